//! Character extraction and caption generation.
//!
//! A panel built from a two-child cluster tells the story of what changed
//! between the children. Its main characters are the nodes whose ego networks
//! changed the most; its supporting characters are the alters most strongly
//! tied to a main character.

mod caption;

pub use caption::{
    caption_clauses, generate_caption, render_caption, Caption, CaptionClauses, CaptionInput,
    CaptionTemplates, ChangeKind, MajorChange, Relation, RelationClause, Summary, TemplateError,
};

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::graph::{ego_graph, union_graphs, AggregationPolicy, EgoLevel, Graph};
use crate::similarity::distance;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NarrativeError {
    #[error("top percent must be in (0, 100], got {0}")]
    TopPercent(f64),
    #[error("highlight percent must be in [0, top percent], got {0}")]
    HighlightPercent(f64),
    #[error("main character count must be at least 1")]
    ZeroMains,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CharacterScore {
    pub node: String,
    pub change_score: f64,
    pub total_link_weight: f64,
}

fn rank(mut scores: Vec<CharacterScore>, k: usize) -> Vec<CharacterScore> {
    scores.sort_by(|a, b| {
        b.change_score
            .total_cmp(&a.change_score)
            .then(b.total_link_weight.total_cmp(&a.total_link_weight))
            .then_with(|| a.node.cmp(&b.node))
    });
    scores.truncate(k);
    scores
}

/// Top-`k` nodes by the distance between their ego networks in `before` and
/// `after`. Ties go to the higher total link weight over both children, then
/// to the smaller id.
pub fn main_characters(
    before: &Graph,
    after: &Graph,
    level: EgoLevel,
    k: usize,
    agg: AggregationPolicy,
) -> Vec<CharacterScore> {
    let union = union_graphs(before, after, agg);
    let scores = union
        .node_ids()
        .map(|id| CharacterScore {
            node: id.to_owned(),
            change_score: distance(
                &ego_graph(before, [id], level),
                &ego_graph(after, [id], level),
            ),
            total_link_weight: union.total_link_weight(id),
        })
        .collect();
    rank(scores, k)
}

/// Fallback ranking for single-snapshot clusters: strongest total tie weight.
pub fn strongest_characters(g: &Graph, k: usize) -> Vec<CharacterScore> {
    let scores = g
        .node_ids()
        .map(|id| CharacterScore {
            node: id.to_owned(),
            change_score: 0.0,
            total_link_weight: g.total_link_weight(id),
        })
        .collect();
    rank(scores, k)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Supporters {
    /// Mains plus the retained alters.
    pub visible: BTreeSet<String>,
    pub highlighted: BTreeSet<String>,
    /// Every alter with its tie weight to the mains, strongest first.
    pub ranking: Vec<(String, f64)>,
}

/// `⌈pct% · count⌉`, robust to the representation error of `pct / 100`.
fn share(pct: f64, count: usize) -> usize {
    let raw = pct * count as f64 / 100.0;
    ((raw - 1e-9).ceil().max(0.0) as usize).min(count)
}

/// Keep the strongest `top_percent` of alters and highlight the strongest
/// `highlight_percent`, ranked by total link weight to any main character.
pub fn supporting_characters(
    g: &Graph,
    mains: &BTreeSet<String>,
    top_percent: f64,
    highlight_percent: f64,
) -> Result<Supporters, NarrativeError> {
    if !(top_percent > 0.0 && top_percent <= 100.0) {
        return Err(NarrativeError::TopPercent(top_percent));
    }
    if !(highlight_percent >= 0.0 && highlight_percent <= top_percent) {
        return Err(NarrativeError::HighlightPercent(highlight_percent));
    }
    let mut ties: BTreeMap<String, f64> = BTreeMap::new();
    for l in g.links() {
        let key = l.key();
        for main in mains {
            if let Some(other) = key.other(main) {
                if !mains.contains(other) {
                    *ties.entry(other.to_owned()).or_default() += l.weight();
                }
            }
        }
    }
    let mut ranking: Vec<(String, f64)> = ties.into_iter().collect();
    ranking.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));

    let n = ranking.len();
    let mut visible: BTreeSet<String> = mains.iter().filter(|m| g.contains_node(m)).cloned().collect();
    visible.extend(ranking.iter().take(share(top_percent, n)).map(|(id, _)| id.clone()));
    let highlighted = ranking
        .iter()
        .take(share(highlight_percent, n))
        .map(|(id, _)| id.clone())
        .collect();
    Ok(Supporters {
        visible,
        highlighted,
        ranking,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::tri_fixture;

    #[test]
    fn tri_cluster_ranks_b_first() {
        let dg = tri_fixture();
        let (t1, t2) = (&dg.snapshot(1).unwrap().graph, &dg.snapshot(2).unwrap().graph);
        let ranked = main_characters(t1, t2, EgoLevel::One, 3, AggregationPolicy::Sum);
        assert_eq!(ranked[0].node, "B");
        assert_eq!(ranked[0].change_score, 1.0);
        assert_eq!(ranked[1].node, "A");
        assert!((ranked[1].change_score - 0.4).abs() < 1e-15);
        assert_eq!(ranked[2].change_score, 0.0);
    }

    #[test]
    fn identical_children_fall_back_to_weight() {
        let dg = tri_fixture();
        let t1 = &dg.snapshot(1).unwrap().graph;
        let ranked = main_characters(t1, t1, EgoLevel::OneAndHalf, 10, AggregationPolicy::Sum);
        assert!(ranked.iter().all(|c| c.change_score == 0.0));
        // the union doubles every weight: A 6, B 4, C 2
        assert_eq!(
            ranked.iter().map(|c| c.node.as_str()).collect::<Vec<_>>(),
            ["A", "B", "C"]
        );
        assert_eq!(ranked.len(), 3);
    }

    fn star(weights: &[f64]) -> Graph {
        let mut g = Graph::new(false);
        for (i, w) in weights.iter().enumerate() {
            g.connect("main", &format!("n{i}"), *w).unwrap();
        }
        g
    }

    #[test]
    fn supporters_ceil_rank() {
        let g = star(&[5.0, 3.0, 2.0, 1.0]);
        let mains = BTreeSet::from(["main".to_string()]);
        let s = supporting_characters(&g, &mains, 50.0, 25.0).unwrap();
        assert_eq!(
            s.visible,
            BTreeSet::from(["main".into(), "n0".into(), "n1".into()])
        );
        assert_eq!(s.highlighted, BTreeSet::from(["n0".to_string()]));
        let all = supporting_characters(&g, &mains, 100.0, 0.0).unwrap();
        assert_eq!(all.visible.len(), 5);
        assert!(all.highlighted.is_empty());
    }

    #[test]
    fn share_is_exact_for_representable_products() {
        // 15% of 20 is 3, not 4
        assert_eq!(share(15.0, 20), 3);
        assert_eq!(share(5.0, 20), 1);
        assert_eq!(share(15.0, 21), 4);
        assert_eq!(share(0.0, 7), 0);
        assert_eq!(share(100.0, 7), 7);
    }

    #[test]
    fn supporter_percent_validation() {
        let g = star(&[1.0]);
        let mains = BTreeSet::from(["main".to_string()]);
        assert!(supporting_characters(&g, &mains, 0.0, 0.0).is_err());
        assert!(supporting_characters(&g, &mains, 10.0, 20.0).is_err());
        assert!(supporting_characters(&g, &mains, 101.0, 0.0).is_err());
    }
}
