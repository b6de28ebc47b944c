use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{DynamicGraph, Graph};

const DAMPING: f64 = 0.85;
const TOLERANCE: f64 = 1e-9;
const PAGERANK_MAX_ITER: usize = 200;
const EIGEN_MAX_ITER: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    Degree,
    TotalLinkWeight,
    Pagerank,
    EigenvectorCentrality,
}

impl FromStr for MetricKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "degree" => Ok(Self::Degree),
            "total_link_weight" => Ok(Self::TotalLinkWeight),
            "pagerank" => Ok(Self::Pagerank),
            "eigenvector_centrality" | "centrality" => Ok(Self::EigenvectorCentrality),
            other => Err(format!("unknown metric `{other}`")),
        }
    }
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Degree => "degree",
            Self::TotalLinkWeight => "total_link_weight",
            Self::Pagerank => "pagerank",
            Self::EigenvectorCentrality => "eigenvector_centrality",
        })
    }
}

/// One value per time index; `None` where the node is absent.
pub fn node_metric_series(dg: &DynamicGraph, node: &str, metric: MetricKind) -> Vec<Option<f64>> {
    dg.snapshots()
        .iter()
        .map(|s| {
            if !s.graph.contains_node(node) {
                return None;
            }
            Some(match metric {
                MetricKind::Degree => s.graph.neighbors(node).len() as f64,
                MetricKind::TotalLinkWeight => s.graph.total_link_weight(node),
                MetricKind::Pagerank => pagerank(&s.graph)[node],
                MetricKind::EigenvectorCentrality => eigenvector_centrality(&s.graph)[node],
            })
        })
        .collect()
}

struct Dense<'g> {
    ids: Vec<&'g str>,
    /// `(from, to, weight)`; undirected links appear in both directions.
    arcs: Vec<(usize, usize, f64)>,
}

impl<'g> Dense<'g> {
    fn new(g: &'g Graph) -> Self {
        let ids: Vec<&str> = g.node_ids().collect();
        let index: BTreeMap<&str, usize> = ids.iter().enumerate().map(|(i, id)| (*id, i)).collect();
        let mut arcs = Vec::with_capacity(g.link_count() * 2);
        for l in g.links() {
            let (s, t) = (index[l.source.as_str()], index[l.target.as_str()]);
            arcs.push((s, t, l.weight()));
            if !g.directed && s != t {
                arcs.push((t, s, l.weight()));
            }
        }
        Self { ids, arcs }
    }

    fn into_map(self, values: Vec<f64>) -> BTreeMap<&'g str, f64> {
        self.ids.into_iter().zip(values).collect()
    }
}

/// Weighted PageRank with damping 0.85; dangling mass is spread uniformly.
pub fn pagerank(g: &Graph) -> BTreeMap<&str, f64> {
    let dense = Dense::new(g);
    let n = dense.ids.len();
    if n == 0 {
        return BTreeMap::new();
    }
    let mut out_weight = vec![0.0; n];
    for &(s, _, w) in &dense.arcs {
        out_weight[s] += w;
    }
    let nf = n as f64;
    let mut rank = vec![1.0 / nf; n];
    for _ in 0..PAGERANK_MAX_ITER {
        let dangling: f64 = (0..n).filter(|&i| out_weight[i] == 0.0).map(|i| rank[i]).sum();
        let base = (1.0 - DAMPING) / nf + DAMPING * dangling / nf;
        let mut next = vec![base; n];
        for &(s, t, w) in &dense.arcs {
            next[t] += DAMPING * rank[s] * w / out_weight[s];
        }
        let delta: f64 = next.iter().zip(&rank).map(|(a, b)| (a - b).abs()).sum();
        rank = next;
        if delta < TOLERANCE {
            break;
        }
    }
    dense.into_map(rank)
}

/// Power iteration on the weighted adjacency (in-links for directed graphs),
/// L2-normalised. Graphs without links score 0 everywhere.
pub fn eigenvector_centrality(g: &Graph) -> BTreeMap<&str, f64> {
    let dense = Dense::new(g);
    let n = dense.ids.len();
    if dense.arcs.is_empty() {
        return dense.into_map(vec![0.0; n]);
    }
    let mut x = vec![1.0 / (n as f64).sqrt(); n];
    for _ in 0..EIGEN_MAX_ITER {
        // shift by the identity so bipartite graphs do not oscillate
        let mut next = x.clone();
        for &(s, t, w) in &dense.arcs {
            next[t] += w * x[s];
        }
        let norm = next.iter().map(|v| v * v).sum::<f64>().sqrt();
        next.iter_mut().for_each(|v| *v /= norm);
        let delta: f64 = next.iter().zip(&x).map(|(a, b)| (a - b).abs()).sum();
        x = next;
        if delta < TOLERANCE {
            break;
        }
    }
    dense.into_map(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{tri_fixture, Node};

    #[test]
    fn tri_degree_of_a() {
        let dg = tri_fixture();
        let s = node_metric_series(&dg, "A", MetricKind::Degree);
        assert_eq!(s, [Some(1.0), Some(2.0), Some(1.0)]);
        let b = node_metric_series(&dg, "B", MetricKind::Degree);
        assert_eq!(b, [Some(1.0), Some(1.0), None]);
    }

    #[test]
    fn isolated_single_node() {
        let mut g = Graph::new(false);
        g.add_node(Node::new("solo")).unwrap();
        let dg = DynamicGraph::new(false, [("x".to_string(), g)]).unwrap();
        assert_eq!(node_metric_series(&dg, "solo", MetricKind::Degree), [Some(0.0)]);
        let pr = node_metric_series(&dg, "solo", MetricKind::Pagerank)[0].unwrap();
        assert!((pr - 1.0).abs() < 1e-12);
    }

    #[test]
    fn symmetric_pair_has_equal_centrality() {
        let mut g = Graph::new(false);
        g.connect("A", "B", 3.0).unwrap();
        let c = eigenvector_centrality(&g);
        assert!((c["A"] - c["B"]).abs() < 1e-12);
        assert!((c["A"] - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-9);
    }

    #[test]
    fn star_centre_dominates() {
        let mut g = Graph::new(false);
        for leaf in ["b", "c", "d", "e"] {
            g.connect("a", leaf, 1.0).unwrap();
        }
        let pr = pagerank(&g);
        let c = eigenvector_centrality(&g);
        assert!(pr["a"] > pr["b"]);
        assert!(c["a"] > c["b"]);
        assert!((pr.values().sum::<f64>() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn unknown_metric_is_an_error() {
        assert!("closeness".parse::<MetricKind>().is_err());
        assert_eq!("pagerank".parse::<MetricKind>(), Ok(MetricKind::Pagerank));
    }
}
