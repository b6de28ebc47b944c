//! Causality-preserving agglomerative clustering of the snapshot sequence.
//!
//! Only temporally adjacent groups are ever compared, so every node of the
//! resulting dendrogram covers a contiguous time interval and every cut of it
//! partitions the time axis into ordered intervals. Group-to-group distance is
//! the graph distance between the two union graphs.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::graph::{
    ego_graph, union_graphs, AggregationPolicy, DynamicGraph, EgoLevel, Graph, SnapshotGroup, Span,
};
use crate::similarity::distance;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ClusterError {
    #[error("cannot cluster an empty snapshot sequence")]
    EmptySequence,
    #[error("cut level {0} outside [0, 1]")]
    LevelOutOfRange(f64),
    #[error("cluster count {k} outside [1, {leaves}]")]
    KOutOfRange { k: usize, leaves: usize },
    #[error("span [{start},{end}] is empty or outside [0, {last}]")]
    BadSpan { start: usize, end: usize, last: usize },
}

/// Which graph each snapshot contributes to clustering.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub enum Scope {
    #[default]
    Whole,
    /// Each snapshot is replaced by the ego network of `node` first.
    Ego { node: String, level: EgoLevel },
}

impl FromStr for Scope {
    type Err = String;

    /// `whole`, `ego:<node>` (level 1.5) or `ego:<node>@1.0`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "whole" {
            return Ok(Scope::Whole);
        }
        let rest = s
            .strip_prefix("ego:")
            .ok_or_else(|| format!("scope must be `whole` or `ego:<node>`, got `{s}`"))?;
        let (node, level) = match rest.rsplit_once('@') {
            Some((node, level)) => (node, level.parse()?),
            None => (rest, EgoLevel::default()),
        };
        if node.is_empty() {
            return Err("ego scope needs a node id".into());
        }
        Ok(Scope::Ego {
            node: node.to_owned(),
            level,
        })
    }
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scope::Whole => f.write_str("whole"),
            Scope::Ego { node, level } => write!(f, "ego:{node}@{level}"),
        }
    }
}

/// Internal node of the dendrogram. Ids `0..n` are leaves (snapshot indices),
/// merges are numbered `n..2n-1` in the order they happened.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MergeNode {
    pub id: usize,
    pub children: [usize; 2],
    pub span: Span,
    #[serde(rename = "raw")]
    pub raw_distance: f64,
    pub height: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dendrogram {
    pub leaves: Vec<usize>,
    pub merges: Vec<MergeNode>,
    pub root: usize,
}

impl Dendrogram {
    pub fn leaf_count(&self) -> usize {
        self.leaves.len()
    }

    pub fn is_leaf(&self, id: usize) -> bool {
        id < self.leaves.len()
    }

    pub fn merge(&self, id: usize) -> Option<&MergeNode> {
        id.checked_sub(self.leaves.len()).and_then(|i| self.merges.get(i))
    }

    pub fn span_of(&self, id: usize) -> Span {
        match self.merge(id) {
            Some(m) => m.span,
            None => Span::point(id),
        }
    }

    pub fn height_of(&self, id: usize) -> f64 {
        self.merge(id).map_or(0.0, |m| m.height)
    }

    /// The merge whose span is exactly `span`, if the dendrogram has one.
    pub fn merge_for_span(&self, span: Span) -> Option<&MergeNode> {
        self.merges.iter().find(|m| m.span == span)
    }

    /// Spans of the two children of a merge, earlier first.
    pub fn children_spans(&self, m: &MergeNode) -> (Span, Span) {
        (self.span_of(m.children[0]), self.span_of(m.children[1]))
    }

    /// Keep merges with `height <= level`; clusters come back in time order.
    pub fn cut(&self, level: f64) -> Result<Cut, ClusterError> {
        if !(0.0..=1.0).contains(&level) {
            return Err(ClusterError::LevelOutOfRange(level));
        }
        let mut nodes = Vec::new();
        self.collect(self.root, &|id| self.height_of(id) > level, &mut nodes);
        Ok(self.make_cut(CutCriterion::Level(level), nodes))
    }

    /// Undo the `k - 1` highest merges (later merges first on equal height).
    pub fn cut_k(&self, k: usize) -> Result<Cut, ClusterError> {
        let n = self.leaf_count();
        if k == 0 || k > n {
            return Err(ClusterError::KOutOfRange { k, leaves: n });
        }
        let mut order: Vec<&MergeNode> = self.merges.iter().collect();
        order.sort_by(|a, b| b.height.total_cmp(&a.height).then(b.id.cmp(&a.id)));
        let undone: Vec<usize> = order.iter().take(k - 1).map(|m| m.id).collect();
        let mut nodes = Vec::new();
        self.collect(self.root, &|id| undone.contains(&id), &mut nodes);
        Ok(self.make_cut(CutCriterion::K(k), nodes))
    }

    /// Number of clusters a cut at `level` would produce.
    pub fn cluster_count_at(&self, level: f64) -> usize {
        1 + self.merges.iter().filter(|m| m.height > level).count()
    }

    fn collect(&self, id: usize, split: &dyn Fn(usize) -> bool, out: &mut Vec<usize>) {
        match self.merge(id) {
            Some(m) if split(id) => {
                self.collect(m.children[0], split, out);
                self.collect(m.children[1], split, out);
            }
            _ => out.push(id),
        }
    }

    fn make_cut(&self, criterion: CutCriterion, nodes: Vec<usize>) -> Cut {
        Cut {
            criterion,
            clusters: nodes.iter().map(|&id| self.span_of(id)).collect(),
            nodes,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CutCriterion {
    Level(f64),
    K(usize),
}

/// Contiguous, time-ordered partition of `[0, T]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cut {
    pub criterion: CutCriterion,
    pub clusters: Vec<Span>,
    /// Dendrogram node id of each cluster.
    pub nodes: Vec<usize>,
}

impl Cut {
    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }
}

/// Per-snapshot graphs as seen by a given scope.
pub fn scoped_graphs(dg: &DynamicGraph, scope: &Scope) -> Vec<Graph> {
    dg.snapshots()
        .iter()
        .map(|s| match scope {
            Scope::Whole => s.graph.clone(),
            Scope::Ego { node, level } => ego_graph(&s.graph, [node.as_str()], *level),
        })
        .collect()
}

pub fn build_dendrogram(
    dg: &DynamicGraph,
    scope: &Scope,
    agg: AggregationPolicy,
) -> Result<Dendrogram, ClusterError> {
    cluster_graphs(scoped_graphs(dg, scope), agg)
}

/// Cluster an explicit sequence of graphs.
pub fn cluster_graphs(graphs: Vec<Graph>, agg: AggregationPolicy) -> Result<Dendrogram, ClusterError> {
    let n = graphs.len();
    if n == 0 {
        return Err(ClusterError::EmptySequence);
    }
    // (node id, group) in time order, and distances between neighbours
    let mut groups: Vec<(usize, SnapshotGroup)> = graphs
        .into_iter()
        .enumerate()
        .map(|(t, g)| (t, SnapshotGroup::new(Span::point(t), g)))
        .collect();
    let mut gaps: Vec<f64> = groups
        .windows(2)
        .map(|w| distance(&w[0].1.graph, &w[1].1.graph))
        .collect();

    let mut merges: Vec<MergeNode> = Vec::with_capacity(n - 1);
    while groups.len() > 1 {
        // leftmost minimum wins ties
        let mut best = 0;
        for (i, d) in gaps.iter().enumerate() {
            if *d < gaps[best] {
                best = i;
            }
        }
        let raw = gaps[best];
        let (right_id, right) = groups.remove(best + 1);
        let (left_id, left) = &groups[best];
        let merged = SnapshotGroup::new(
            Span::new(left.span.start, right.span.end),
            union_graphs(&left.graph, &right.graph, agg),
        );
        let id = n + merges.len();
        merges.push(MergeNode {
            id,
            children: [*left_id, right_id],
            span: merged.span,
            raw_distance: raw,
            height: 0.0,
        });
        groups[best] = (id, merged);
        gaps.remove(best);
        if best > 0 {
            gaps[best - 1] = distance(&groups[best - 1].1.graph, &groups[best].1.graph);
        }
        if best < gaps.len() {
            gaps[best] = distance(&groups[best].1.graph, &groups[best + 1].1.graph);
        }
    }

    // running maximum keeps parents at or above their children
    let mut mono = vec![0.0f64; merges.len()];
    for (i, m) in merges.iter().enumerate() {
        let child_max = m
            .children
            .iter()
            .filter_map(|&c| c.checked_sub(n).map(|j| mono[j]))
            .fold(0.0, f64::max);
        mono[i] = m.raw_distance.max(child_max);
    }
    let top = mono.iter().copied().fold(0.0, f64::max);
    for (m, h) in merges.iter_mut().zip(&mono) {
        m.height = if top > 0.0 { h / top } else { 0.0 };
    }

    let root = if merges.is_empty() { 0 } else { n + merges.len() - 1 };
    Ok(Dendrogram {
        leaves: (0..n).collect(),
        merges,
        root,
    })
}

/// Left fold of the union over every snapshot in `span`.
pub fn group_for_span(
    dg: &DynamicGraph,
    span: Span,
    agg: AggregationPolicy,
) -> Result<SnapshotGroup, ClusterError> {
    scoped_group_for_span(dg, &Scope::Whole, span, agg)
}

pub fn scoped_group_for_span(
    dg: &DynamicGraph,
    scope: &Scope,
    span: Span,
    agg: AggregationPolicy,
) -> Result<SnapshotGroup, ClusterError> {
    if span.start > span.end || span.end > dg.last_time() {
        return Err(ClusterError::BadSpan {
            start: span.start,
            end: span.end,
            last: dg.last_time(),
        });
    }
    let pick = |t: usize| {
        let g = &dg.snapshot(t).unwrap().graph;
        match scope {
            Scope::Whole => g.clone(),
            Scope::Ego { node, level } => ego_graph(g, [node.as_str()], *level),
        }
    };
    let mut graph = pick(span.start);
    for t in span.start + 1..=span.end {
        graph = union_graphs(&graph, &pick(t), agg);
    }
    Ok(SnapshotGroup::new(span, graph))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{tri_fixture, LinkKey};

    fn tri_dendrogram() -> Dendrogram {
        build_dendrogram(&tri_fixture(), &Scope::Whole, AggregationPolicy::Sum).unwrap()
    }

    #[test]
    fn tri_merge_sequence() {
        let d = tri_dendrogram();
        assert_eq!(d.merges.len(), 2);
        let (first, second) = (&d.merges[0], &d.merges[1]);
        assert_eq!(first.children, [1, 2]);
        assert_eq!(first.span, Span::new(1, 2));
        assert!((first.raw_distance - 0.4).abs() < 1e-15);
        assert_eq!(second.children, [0, 3]);
        assert!((second.raw_distance - 0.5).abs() < 1e-15);
        assert!((first.height - 0.8).abs() < 1e-15);
        assert_eq!(second.height, 1.0);
        assert_eq!(d.root, 4);
    }

    #[test]
    fn tri_cuts() {
        let d = tri_dendrogram();
        assert_eq!(d.cut(0.9).unwrap().clusters, [Span::point(0), Span::new(1, 2)]);
        assert_eq!(d.cut(1.0).unwrap().clusters, [Span::new(0, 2)]);
        assert_eq!(d.cut(0.0).unwrap().len(), 3);
        assert_eq!(d.cut_k(3).unwrap().clusters, [Span::point(0), Span::point(1), Span::point(2)]);
        assert_eq!(d.cut_k(2).unwrap().clusters, d.cut(0.9).unwrap().clusters);
        assert_eq!(d.cluster_count_at(0.9), 2);
        assert_eq!(d.cluster_count_at(0.5), 3);
    }

    #[test]
    fn cut_errors() {
        let d = tri_dendrogram();
        assert!(matches!(d.cut(1.5), Err(ClusterError::LevelOutOfRange(_))));
        assert!(matches!(d.cut_k(0), Err(ClusterError::KOutOfRange { .. })));
        assert!(matches!(d.cut_k(4), Err(ClusterError::KOutOfRange { .. })));
    }

    #[test]
    fn single_snapshot_has_no_merges() {
        let d = cluster_graphs(vec![Graph::new(false)], AggregationPolicy::Sum).unwrap();
        assert_eq!(d.leaf_count(), 1);
        assert!(d.merges.is_empty());
        assert_eq!(d.cut(1.0).unwrap().clusters, [Span::point(0)]);
        assert!(cluster_graphs(vec![], AggregationPolicy::Sum).is_err());
    }

    #[test]
    fn all_zero_distances_give_zero_heights() {
        let mut g = Graph::new(false);
        g.connect("A", "B", 1.0).unwrap();
        let d = cluster_graphs(vec![g.clone(), g.clone(), g], AggregationPolicy::Max).unwrap();
        assert!(d.merges.iter().all(|m| m.height == 0.0));
        // leftmost tie wins
        assert_eq!(d.merges[0].children, [0, 1]);
    }

    #[test]
    fn group_for_span_folds_unions() {
        let dg = tri_fixture();
        let g = group_for_span(&dg, Span::new(1, 2), AggregationPolicy::Sum).unwrap();
        assert_eq!(g.graph.link(&LinkKey::new("A", "C", false)).unwrap().weight(), 2.0);
        assert_eq!(g.graph.link(&LinkKey::new("A", "B", false)).unwrap().weight(), 2.0);
        let one = group_for_span(&dg, Span::point(1), AggregationPolicy::Sum).unwrap();
        assert_eq!(one.graph, dg.snapshot(1).unwrap().graph);
        assert!(group_for_span(&dg, Span { start: 2, end: 1 }, AggregationPolicy::Sum).is_err());
        assert!(group_for_span(&dg, Span::new(0, 3), AggregationPolicy::Sum).is_err());
    }

    #[test]
    fn scope_parsing() {
        assert_eq!("whole".parse::<Scope>().unwrap(), Scope::Whole);
        assert_eq!(
            "ego:A".parse::<Scope>().unwrap(),
            Scope::Ego { node: "A".into(), level: EgoLevel::OneAndHalf }
        );
        assert_eq!(
            "ego:A@1.0".parse::<Scope>().unwrap(),
            Scope::Ego { node: "A".into(), level: EgoLevel::One }
        );
        assert!("ego:".parse::<Scope>().is_err());
        assert!("nope".parse::<Scope>().is_err());
    }

    #[test]
    fn dendrogram_json_field_order() {
        let json = serde_json::to_string(&tri_dendrogram()).unwrap();
        assert!(json.starts_with(r#"{"leaves":[0,1,2],"merges":[{"id":3,"children":[1,2],"span":{"start":1,"end":2},"raw":0.4"#), "{json}");
        assert!(json.ends_with(r#""root":4}"#));
    }
}
