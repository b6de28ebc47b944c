//! Random data generators and independent reference implementations shared
//! by the integration tests. The references work on plain maps and never
//! call into the library's similarity or clustering code.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use dgcomics::graph::{AttributeVector, DynamicGraph, Graph, Link, Node};
use rand::Rng;

pub const TRI_CSV: &str = include_str!("../fixtures/tri_edges.csv");
pub const TRI_JSON: &str = include_str!("../fixtures/tri.json");
pub const COAUTHORSHIP_JSON: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/data/coauthorship.json");

fn attrs(entries: &BTreeMap<String, f64>) -> AttributeVector {
    let mut v = AttributeVector::new();
    for (k, x) in entries {
        v.set(k.clone(), *x).unwrap();
    }
    v
}

/// Integer-valued attributes keep sums exact whatever the merge order.
fn random_attrs(rng: &mut impl Rng, with_weight: bool) -> BTreeMap<String, f64> {
    let mut m = BTreeMap::new();
    if with_weight {
        m.insert("weight".to_owned(), rng.gen_range(1..=5) as f64);
    }
    for key in ["papers", "citations"] {
        if rng.gen_bool(0.4) {
            m.insert(key.to_owned(), rng.gen_range(0..=6) as f64);
        }
    }
    m
}

/// Sequence of `snapshots` undirected graphs over ids `n0..n{pool}`, each
/// derived from the previous one by a few random attributed edits. Zero-edit
/// steps happen too, so equal distances and ties show up.
pub fn random_dynamic_graph(rng: &mut impl Rng, snapshots: usize, pool: usize) -> DynamicGraph {
    let ids: Vec<String> = (0..pool).map(|i| format!("n{i}")).collect();
    let mut nodes: BTreeMap<usize, BTreeMap<String, f64>> = BTreeMap::new();
    let mut links: BTreeMap<(usize, usize), BTreeMap<String, f64>> = BTreeMap::new();
    for i in 0..pool {
        if rng.gen_bool(0.6) {
            nodes.insert(i, random_attrs(rng, false));
        }
    }
    let mut out = Vec::with_capacity(snapshots);
    for t in 0..snapshots {
        let edits = if t == 0 { 2 * pool } else { rng.gen_range(0..=4) };
        for _ in 0..edits {
            let present: Vec<usize> = nodes.keys().copied().collect();
            match rng.gen_range(0..6) {
                0 => {
                    let i = rng.gen_range(0..pool);
                    nodes.entry(i).or_insert_with(|| random_attrs(rng, false));
                }
                1 if !present.is_empty() => {
                    let i = present[rng.gen_range(0..present.len())];
                    nodes.remove(&i);
                    links.retain(|&(a, b), _| a != i && b != i);
                }
                2 if present.len() >= 2 => {
                    let a = present[rng.gen_range(0..present.len())];
                    let b = present[rng.gen_range(0..present.len())];
                    if a != b {
                        links.insert((a.min(b), a.max(b)), random_attrs(rng, true));
                    }
                }
                3 if !links.is_empty() => {
                    let k = *links.keys().nth(rng.gen_range(0..links.len())).unwrap();
                    links.remove(&k);
                }
                4 if !links.is_empty() => {
                    let k = *links.keys().nth(rng.gen_range(0..links.len())).unwrap();
                    links.get_mut(&k).unwrap().insert("weight".into(), rng.gen_range(1..=5) as f64);
                }
                5 if !present.is_empty() => {
                    let i = present[rng.gen_range(0..present.len())];
                    *nodes.get_mut(&i).unwrap() = random_attrs(rng, false);
                }
                _ => {}
            }
        }
        let mut g = Graph::new(false);
        for (i, a) in &nodes {
            g.add_node(Node::new(ids[*i].clone()).with_attrs(attrs(a))).unwrap();
        }
        for ((a, b), x) in &links {
            g.add_link(Link {
                source: ids[*a].clone(),
                target: ids[*b].clone(),
                directed: false,
                attrs: attrs(x),
            })
            .unwrap();
        }
        out.push((format!("{}", 1990 + t), g));
    }
    DynamicGraph::new(false, out).unwrap()
}

/// Element of a reference graph; nodes sort before links.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Elem {
    Node(String),
    Link(String, String),
}

pub type RefGraph = BTreeMap<Elem, BTreeMap<String, f64>>;

pub fn to_ref(g: &Graph) -> RefGraph {
    let mut out = RefGraph::new();
    for n in g.nodes() {
        out.insert(
            Elem::Node(n.id.clone()),
            n.attrs.iter().map(|(k, v)| (k.to_owned(), v)).collect(),
        );
    }
    for l in g.links() {
        let (a, b) = if l.source <= l.target {
            (l.source.clone(), l.target.clone())
        } else {
            (l.target.clone(), l.source.clone())
        };
        out.insert(Elem::Link(a, b), l.attrs.iter().map(|(k, v)| (k.to_owned(), v)).collect());
    }
    out
}

/// Σmin / Σmax over the union of keys; two empty vectors are identical.
pub fn ref_ruzicka(x: &BTreeMap<String, f64>, y: &BTreeMap<String, f64>) -> f64 {
    let keys: BTreeSet<&String> = x.keys().chain(y.keys()).collect();
    let (mut num, mut den) = (0.0, 0.0);
    for k in keys {
        let a = x.get(k).copied().unwrap_or(0.0);
        let b = y.get(k).copied().unwrap_or(0.0);
        num += a.min(b);
        den += a.max(b);
    }
    if den == 0.0 {
        1.0
    } else {
        num / den
    }
}

/// `1 − Σ_common ruzicka / |element union|`, 0 for two empty graphs.
pub fn ref_distance(g1: &RefGraph, g2: &RefGraph) -> f64 {
    let union: BTreeSet<&Elem> = g1.keys().chain(g2.keys()).collect();
    if union.is_empty() {
        return 0.0;
    }
    let mut score = 0.0;
    for (e, x) in g1 {
        if let Some(y) = g2.get(e) {
            score += ref_ruzicka(x, y);
        }
    }
    (1.0 - score / union.len() as f64).clamp(0.0, 1.0)
}

/// Element-wise sum union.
pub fn ref_union(a: &RefGraph, b: &RefGraph) -> RefGraph {
    let mut out = a.clone();
    for (e, y) in b {
        let slot = out.entry(e.clone()).or_default();
        for (k, v) in y {
            *slot.entry(k.clone()).or_insert(0.0) += v;
        }
    }
    out
}

/// One merge as `(left span, right span, raw distance)`, spans inclusive.
pub type RefMerge = ((usize, usize), (usize, usize), f64);

/// Brute force: every round recomputes all adjacent distances from scratch
/// and merges the leftmost closest pair.
pub fn ref_cluster(graphs: &[RefGraph]) -> Vec<RefMerge> {
    let mut groups: Vec<((usize, usize), RefGraph)> =
        graphs.iter().enumerate().map(|(t, g)| ((t, t), g.clone())).collect();
    let mut merges = Vec::new();
    while groups.len() > 1 {
        let d: Vec<f64> = (0..groups.len() - 1)
            .map(|i| ref_distance(&groups[i].1, &groups[i + 1].1))
            .collect();
        let min = d.iter().copied().fold(f64::INFINITY, f64::min);
        let i = d.iter().position(|&x| x == min).unwrap();
        let (right_span, right) = groups.remove(i + 1);
        let (left_span, left) = &groups[i];
        merges.push((*left_span, right_span, min));
        groups[i] = ((left_span.0, right_span.1), ref_union(left, &right));
    }
    merges
}

/// Heights: the largest raw distance inside each merge's span, scaled by the
/// overall largest.
pub fn ref_heights(merges: &[RefMerge]) -> Vec<f64> {
    let span = |m: &RefMerge| (m.0 .0, m.1 .1);
    let raw: Vec<f64> = merges
        .iter()
        .map(|m| {
            let (s, e) = span(m);
            merges
                .iter()
                .filter(|o| span(o).0 >= s && span(o).1 <= e)
                .map(|o| o.2)
                .fold(0.0, f64::max)
        })
        .collect();
    let top = raw.iter().copied().fold(0.0, f64::max);
    raw.iter().map(|r| if top > 0.0 { r / top } else { 0.0 }).collect()
}

/// True when `spans` tile `0..=last` contiguously in time order.
pub fn tiles(spans: &[(usize, usize)], last: usize) -> bool {
    let mut next = 0;
    for &(s, e) in spans {
        if s != next || e < s {
            return false;
        }
        next = e + 1;
    }
    next == last + 1
}
