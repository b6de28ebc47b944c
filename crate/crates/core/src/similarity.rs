//! Graph distance: edit distance over labelled elements where every common
//! node or link is scored by the weighted Jaccard (Ruzicka) similarity of its
//! attribute vectors.
//!
//! For element union `U` and common elements `C`:
//!
//! ```text
//! D(G1, G2) = 1 - Σ_{e ∈ C} ruzicka(x_e, y_e) / |U|
//! ```
//!
//! One-sided elements contribute 0, which is a unit-cost insertion or
//! deletion. When all attribute vectors agree the expression collapses to the
//! plain set Jaccard distance of the element sets.

use serde::Serialize;

use crate::graph::{ego_graph, AttributeVector, DynamicGraph, EgoLevel, ElementKey, Graph};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SimilarityError {
    #[error("negative value {value} at position {index}")]
    NegativeValue { index: usize, value: f64 },
    #[error("vector lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
}

/// Ruzicka similarity `Σ min(x_k, y_k) / Σ max(x_k, y_k)` over the union of keys.
///
/// Two zero vectors are identical and score 1; a zero vector against a
/// non-zero one scores 0.
pub fn ruzicka(x: &AttributeVector, y: &AttributeVector) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    // AttributeVector iterates in key order, so a merge walk covers the union.
    let mut xs = x.iter().peekable();
    let mut ys = y.iter().peekable();
    loop {
        let (a, b) = match (xs.peek(), ys.peek()) {
            (None, None) => break,
            (Some(&(kx, vx)), Some(&(ky, vy))) => match kx.cmp(ky) {
                std::cmp::Ordering::Less => {
                    xs.next();
                    (vx, 0.0)
                }
                std::cmp::Ordering::Greater => {
                    ys.next();
                    (0.0, vy)
                }
                std::cmp::Ordering::Equal => {
                    xs.next();
                    ys.next();
                    (vx, vy)
                }
            },
            (Some(&(_, vx)), None) => {
                xs.next();
                (vx, 0.0)
            }
            (None, Some(&(_, vy))) => {
                ys.next();
                (0.0, vy)
            }
        };
        num += a.min(b);
        den += a.max(b);
    }
    if den == 0.0 {
        1.0
    } else {
        num / den
    }
}

/// Ruzicka similarity on dense vectors of equal length.
pub fn ruzicka_dense(x: &[f64], y: &[f64]) -> Result<f64, SimilarityError> {
    if x.len() != y.len() {
        return Err(SimilarityError::LengthMismatch(x.len(), y.len()));
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for (index, (&a, &b)) in x.iter().zip(y).enumerate() {
        for value in [a, b] {
            if value < 0.0 || value.is_nan() {
                return Err(SimilarityError::NegativeValue { index, value });
            }
        }
        num += a.min(b);
        den += a.max(b);
    }
    Ok(if den == 0.0 { 1.0 } else { num / den })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ElementStatus {
    Common,
    OnlyLeft,
    OnlyRight,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ElementSimilarity {
    pub element: String,
    #[serde(skip)]
    pub key: ElementKey,
    pub similarity: f64,
    pub status: ElementStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GraphDistanceReport {
    pub distance: f64,
    pub per_element: Vec<ElementSimilarity>,
    pub element_union_size: usize,
}

/// Tuning for [`graph_distance_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceConfig {
    /// Weight of each node relative to a link (links weigh 1).
    pub node_weight: f64,
}

impl Default for DistanceConfig {
    fn default() -> Self {
        Self { node_weight: 1.0 }
    }
}

/// Full report with the default configuration.
pub fn graph_distance(g1: &Graph, g2: &Graph) -> GraphDistanceReport {
    graph_distance_with(g1, g2, DistanceConfig::default())
}

pub fn graph_distance_with(g1: &Graph, g2: &Graph, config: DistanceConfig) -> GraphDistanceReport {
    let mut per_element = Vec::new();
    let mut push = |key: ElementKey, similarity: f64, status: ElementStatus| {
        per_element.push(ElementSimilarity {
            element: key.to_string(),
            key,
            similarity,
            status,
        })
    };
    for n in g1.nodes() {
        match g2.node(&n.id) {
            Some(m) => push(ElementKey::Node(n.id.clone()), ruzicka(&n.attrs, &m.attrs), ElementStatus::Common),
            None => push(ElementKey::Node(n.id.clone()), 0.0, ElementStatus::OnlyLeft),
        }
    }
    for m in g2.nodes().filter(|m| !g1.contains_node(&m.id)) {
        push(ElementKey::Node(m.id.clone()), 0.0, ElementStatus::OnlyRight);
    }
    for l in g1.links() {
        let key = l.key();
        match g2.link(&key) {
            Some(r) => {
                let s = ruzicka(&l.attrs, &r.attrs);
                push(ElementKey::Link(key), s, ElementStatus::Common)
            }
            None => push(ElementKey::Link(key), 0.0, ElementStatus::OnlyLeft),
        }
    }
    for r in g2.links().filter(|r| g1.link(&r.key()).is_none()) {
        push(ElementKey::Link(r.key()), 0.0, ElementStatus::OnlyRight);
    }

    let weight = |k: &ElementKey| match k {
        ElementKey::Node(_) => config.node_weight,
        ElementKey::Link(_) => 1.0,
    };
    let total: f64 = per_element.iter().map(|e| weight(&e.key)).sum();
    let score: f64 = per_element.iter().map(|e| weight(&e.key) * e.similarity).sum();
    let distance = if total == 0.0 {
        0.0
    } else {
        (1.0 - score / total).clamp(0.0, 1.0)
    };
    GraphDistanceReport {
        distance,
        element_union_size: per_element.len(),
        per_element,
    }
}

/// Distance only, without materialising the per-element report.
pub fn distance(g1: &Graph, g2: &Graph) -> f64 {
    let mut union = 0usize;
    let mut score = 0.0;
    for n in g1.nodes() {
        union += 1;
        if let Some(m) = g2.node(&n.id) {
            score += ruzicka(&n.attrs, &m.attrs);
        }
    }
    union += g2.nodes().filter(|m| !g1.contains_node(&m.id)).count();
    for l in g1.links() {
        union += 1;
        if let Some(r) = g2.link(&l.key()) {
            score += ruzicka(&l.attrs, &r.attrs);
        }
    }
    union += g2.links().filter(|r| g1.link(&r.key()).is_none()).count();
    if union == 0 {
        0.0
    } else {
        (1.0 - score / union as f64).clamp(0.0, 1.0)
    }
}

/// Distance between the node's ego networks at each consecutive pair of
/// times; length `T` for `T + 1` snapshots.
pub fn consecutive_dissimilarity(dg: &DynamicGraph, node: &str, level: EgoLevel) -> Vec<f64> {
    let egos: Vec<Graph> = dg
        .snapshots()
        .iter()
        .map(|s| ego_graph(&s.graph, [node], level))
        .collect();
    egos.windows(2).map(|w| distance(&w[0], &w[1])).collect()
}
