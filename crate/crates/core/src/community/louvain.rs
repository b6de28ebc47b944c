//! Deterministic Louvain modularity optimisation.
//!
//! Nodes are visited in ascending index order (callers index by ascending
//! id), candidate communities are scanned in ascending order and a move is
//! taken only on a strict gain, so the result is a pure function of the input.

use std::collections::BTreeMap;

/// Undirected weighted graph on `0..n` with a symmetric adjacency list.
#[derive(Debug, Clone)]
pub struct WeightedGraph {
    n: usize,
    /// `adj[i]` holds `(j, w)`; a self loop appears once with its full weight.
    adj: Vec<Vec<(usize, f64)>>,
}

impl WeightedGraph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize, f64)>) -> Self {
        let mut merged: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for (a, b, w) in edges {
            let key = if a <= b { (a, b) } else { (b, a) };
            *merged.entry(key).or_default() += w;
        }
        let mut adj = vec![Vec::new(); n];
        for ((a, b), w) in merged {
            adj[a].push((b, w));
            if a != b {
                adj[b].push((a, w));
            }
        }
        Self { n, adj }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    /// Weighted degree; a self loop counts twice.
    fn degree(&self, i: usize) -> f64 {
        self.adj[i]
            .iter()
            .map(|&(j, w)| if j == i { 2.0 * w } else { w })
            .sum()
    }

    fn two_m(&self) -> f64 {
        (0..self.n).map(|i| self.degree(i)).sum()
    }

    /// Newman modularity of `membership` at the given resolution.
    pub fn modularity(&self, membership: &[usize], resolution: f64) -> f64 {
        let two_m = self.two_m();
        if two_m == 0.0 {
            return 0.0;
        }
        let groups = membership.iter().copied().max().map_or(0, |m| m + 1);
        let mut internal = vec![0.0; groups];
        let mut total = vec![0.0; groups];
        for i in 0..self.n {
            total[membership[i]] += self.degree(i);
            for &(j, w) in &self.adj[i] {
                if membership[i] == membership[j] {
                    // each undirected edge is seen from both ends, loops once
                    internal[membership[i]] += if i == j { 2.0 * w } else { w };
                }
            }
        }
        internal
            .iter()
            .zip(&total)
            .map(|(a, t)| a / two_m - resolution * (t / two_m).powi(2))
            .sum()
    }
}

/// Outcome of a Louvain run.
#[derive(Debug, Clone, PartialEq)]
pub struct LouvainResult {
    /// Community index per node, numbered by first appearance.
    pub membership: Vec<usize>,
    /// Modularity of the original graph after each level.
    pub level_modularity: Vec<f64>,
}

pub fn louvain(graph: &WeightedGraph, resolution: f64) -> LouvainResult {
    let n = graph.node_count();
    let mut membership: Vec<usize> = (0..n).collect();
    let mut level_modularity = vec![graph.modularity(&membership, resolution)];
    let mut current = graph.clone();

    loop {
        let (local, moved) = one_level(&current, resolution);
        if !moved {
            break;
        }
        let local = renumber(&local);
        for m in membership.iter_mut() {
            *m = local[*m];
        }
        level_modularity.push(graph.modularity(&membership, resolution));
        current = aggregate(&current, &local);
    }
    LouvainResult {
        membership: renumber(&membership),
        level_modularity,
    }
}

/// Local moving phase. Returns the community of each node and whether any
/// node moved.
fn one_level(g: &WeightedGraph, resolution: f64) -> (Vec<usize>, bool) {
    let n = g.node_count();
    let two_m = g.two_m();
    let mut community: Vec<usize> = (0..n).collect();
    if two_m == 0.0 {
        return (community, false);
    }
    let degree: Vec<f64> = (0..n).map(|i| g.degree(i)).collect();
    let mut tot = degree.clone();
    let mut any_move = false;

    loop {
        let mut improved = false;
        for i in 0..n {
            let own = community[i];
            // weights from i to each neighbouring community, loops excluded
            let mut links: BTreeMap<usize, f64> = BTreeMap::new();
            for &(j, w) in &g.adj[i] {
                if j != i {
                    *links.entry(community[j]).or_default() += w;
                }
            }
            tot[own] -= degree[i];
            let gain = |c: usize, k_in: f64| k_in - resolution * tot[c] * degree[i] / two_m;
            let mut best = own;
            let mut best_gain = gain(own, links.get(&own).copied().unwrap_or(0.0));
            for (&c, &k_in) in &links {
                let g = gain(c, k_in);
                if g > best_gain + 1e-12 {
                    best = c;
                    best_gain = g;
                }
            }
            tot[best] += degree[i];
            if best != own {
                community[i] = best;
                improved = true;
                any_move = true;
            }
        }
        if !improved {
            break;
        }
    }
    (community, any_move)
}

fn renumber(labels: &[usize]) -> Vec<usize> {
    let mut map: BTreeMap<usize, usize> = BTreeMap::new();
    labels
        .iter()
        .map(|l| {
            let next = map.len();
            *map.entry(*l).or_insert(next)
        })
        .collect()
}

fn aggregate(g: &WeightedGraph, community: &[usize]) -> WeightedGraph {
    let k = community.iter().copied().max().map_or(0, |m| m + 1);
    let mut edges = Vec::new();
    for i in 0..g.node_count() {
        for &(j, w) in &g.adj[i] {
            // visit each undirected edge once
            if i <= j {
                edges.push((community[i], community[j], w));
            }
        }
    }
    WeightedGraph::new(k, edges)
}
