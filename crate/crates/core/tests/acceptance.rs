//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero when any criterion fails.
//!
//!     cargo test --test acceptance

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use axum::body::Body;
use axum::http::{header, Request, StatusCode};
use common::*;
use dgcomics::clustering::{build_dendrogram, Dendrogram, Scope};
use dgcomics::community::{
    community_id, louvain_partition, Archetype, CommunityEvent, CommunityMethod, CommunityTimeline,
    EvolutionConfig,
};
use dgcomics::graph::{
    ego_graph, tri_fixture, AggregationPolicy, AttributeVector, DynamicGraph, EgoLevel, Graph, Node,
};
use dgcomics::io::{from_json_str, DatasetStore};
use dgcomics::layout::{layout_panels, tier_count, CanvasConfig};
use dgcomics::narrative::{caption_clauses, CaptionTemplates, ChangeKind, Relation, Summary};
use dgcomics::render::ComicTemplate;
use dgcomics::server::{router, AppState};
use dgcomics::similarity::{distance, ruzicka};
use http_body_util::BodyExt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tower::ServiceExt;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($fmt)+));
        }
    };
}

fn run(name: &str, f: fn() -> Outcome) -> bool {
    let start = Instant::now();
    let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        let msg = p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        Err(format!("panicked: {msg}"))
    });
    let secs = start.elapsed().as_secs_f64();
    match result {
        Ok(detail) => {
            println!("PASS {name}: {detail} ({secs:.2}s)");
            true
        }
        Err(why) => {
            println!("FAIL {name}: {why} ({secs:.2}s)");
            false
        }
    }
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("causality preservation", causality),
        ("clustering oracle", clustering_oracle),
        ("distance metric suite", distance_suite),
        ("TRI golden dendrogram", tri_golden),
        ("panel layout", panel_layout),
        ("caption rules", caption_rules),
        ("community events", community_events),
        ("end-to-end determinism", end_to_end),
        ("fixed-layout mental map", fixed_layout),
    ];
    let failed = criteria.iter().filter(|(n, f)| !run(n, *f)).count();
    println!("{} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

fn spans(c: &dgcomics::clustering::Cut) -> Vec<(usize, usize)> {
    c.clusters.iter().map(|s| (s.start, s.end)).collect()
}

fn causality() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut cuts = 0usize;
    for case in 0..1000 {
        let n = rng.gen_range(3..=30);
        let dg = random_dynamic_graph(&mut rng, n, 12);
        let d = build_dendrogram(&dg, &Scope::Whole, AggregationPolicy::Sum).map_err(|e| e.to_string())?;
        let last = dg.last_time();
        // every distinct height, the midpoints between them and both ends
        let mut levels: Vec<f64> = d.merges.iter().map(|m| m.height).collect();
        levels.extend([0.0, 1.0]);
        levels.sort_by(f64::total_cmp);
        levels.dedup();
        let mids: Vec<f64> = levels.windows(2).map(|w| (w[0] + w[1]) / 2.0).collect();
        levels.extend(mids);
        for l in levels {
            let c = d.cut(l).map_err(|e| e.to_string())?;
            ensure!(tiles(&spans(&c), last), "case {case}: cut at {l} gives {:?}", c.clusters);
            ensure!(c.len() == d.cluster_count_at(l), "case {case}: count at {l}");
            cuts += 1;
        }
        for k in 1..=n {
            let c = d.cut_k(k).map_err(|e| e.to_string())?;
            ensure!(c.len() == k && tiles(&spans(&c), last), "case {case}: k={k} gives {:?}", c.clusters);
            cuts += 1;
        }
    }
    let took = start.elapsed();
    ensure!(took < Duration::from_secs(60), "took {took:?}");
    Ok(format!("1000 graphs, {cuts} cuts, 0 violations"))
}

fn check_against_oracle(dg: &DynamicGraph, d: &Dendrogram) -> Result<(), String> {
    let graphs: Vec<RefGraph> = dg.snapshots().iter().map(|s| to_ref(&s.graph)).collect();
    let want = ref_cluster(&graphs);
    let heights = ref_heights(&want);
    ensure!(want.len() == d.merges.len(), "{} merges, oracle has {}", d.merges.len(), want.len());
    for (i, (m, w)) in d.merges.iter().zip(&want).enumerate() {
        let (l, r) = d.children_spans(m);
        let got = ((l.start, l.end), (r.start, r.end), m.raw_distance);
        ensure!(got == *w, "merge {i}: got {got:?}, oracle {w:?}");
        ensure!(m.id == dg.len() + i, "merge {i} has id {}", m.id);
        ensure!((m.height - heights[i]).abs() <= 1e-12, "merge {i}: height {} vs {}", m.height, heights[i]);
    }
    Ok(())
}

fn clustering_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut ties = 0;
    for case in 0..200 {
        let n = rng.gen_range(2..=8);
        let dg = random_dynamic_graph(&mut rng, n, 8);
        let d = build_dendrogram(&dg, &Scope::Whole, AggregationPolicy::Sum).map_err(|e| e.to_string())?;
        check_against_oracle(&dg, &d).map_err(|e| format!("case {case}: {e}"))?;
        let raws: BTreeSet<u64> = d.merges.iter().map(|m| m.raw_distance.to_bits()).collect();
        ties += usize::from(raws.len() < d.merges.len());
    }
    Ok(format!("200 sequences match exactly ({ties} with tied distances)"))
}

fn node(id: &str, attrs: &[(&str, f64)]) -> Node {
    let mut v = AttributeVector::new();
    for (k, x) in attrs {
        v.set(*k, *x).unwrap();
    }
    Node::new(id).with_attrs(v)
}

/// Five attributed nodes in a ring; `d_attrs` sets node D's attributes and
/// `d_id` its label.
fn five_ring(d_id: &str, d_attrs: &[(&str, f64)]) -> Graph {
    let mut g = Graph::new(false);
    for (id, a) in [("A", 1.0), ("B", 2.0), ("C", 3.0), ("E", 1.0)] {
        g.add_node(node(id, &[("size", a)])).unwrap();
    }
    g.add_node(node(d_id, d_attrs)).unwrap();
    let ids = ["A", "B", "C", d_id, "E"];
    for i in 0..5 {
        g.connect(ids[i], ids[(i + 1) % 5], 1.0).unwrap();
    }
    g
}

fn distance_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut pairs = 0;
    for case in 0..300 {
        let dg = random_dynamic_graph(&mut rng, 6, 10);
        let gs: Vec<&Graph> = dg.snapshots().iter().map(|s| &s.graph).collect();
        for a in &gs {
            ensure!(distance(a, a) == 0.0, "case {case}: d(G,G) = {}", distance(a, a));
            for b in &gs {
                let (ab, ba) = (distance(a, b), distance(b, a));
                ensure!((ab - ba).abs() <= 1e-12, "case {case}: asymmetric {ab} vs {ba}");
                ensure!((0.0..=1.0).contains(&ab), "case {case}: out of range {ab}");
                let want = ref_distance(&to_ref(a), &to_ref(b));
                ensure!((ab - want).abs() <= 1e-12, "case {case}: {ab} vs reference {want}");
                pairs += 1;
            }
        }
    }

    let base = five_ring("D", &[("size", 2.0)]);
    let attr_only = five_ring("D", &[("size", 5.0)]);
    let relabel = five_ring("F", &[("size", 2.0)]);
    let d_attr = distance(&base, &attr_only);
    let d_label = distance(&base, &relabel);
    ensure!(d_attr > 0.0, "attribute change of D gives d = {d_attr}");
    ensure!(d_label > d_attr, "relabel D→F gives {d_label}, attribute change {d_attr}");

    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let mut x = AttributeVector::new();
        let mut y = AttributeVector::new();
        let (mut num, mut den) = (0.0, 0.0);
        for k in 0..rng.gen_range(0..8) {
            let key = format!("k{k}");
            let a: f64 = if rng.gen_bool(0.2) { 0.0 } else { rng.gen_range(0.0..100.0) };
            let b: f64 = if rng.gen_bool(0.2) { 0.0 } else { rng.gen_range(0.0..100.0) };
            if rng.gen_bool(0.8) {
                x.set(key.clone(), a).unwrap();
            }
            if rng.gen_bool(0.8) {
                y.set(key.clone(), b).unwrap();
            }
            num += x.get(&key).min(y.get(&key));
            den += x.get(&key).max(y.get(&key));
        }
        let direct = if den == 0.0 { 1.0 } else { num / den };
        worst = worst.max((ruzicka(&x, &y) - direct).abs());
    }
    ensure!(worst <= 1e-12, "Ruzicka differs by {worst:e}");
    Ok(format!(
        "{pairs} graph pairs; attribute change d={d_attr:.3}, relabel d={d_label:.3}; Ruzicka max error {worst:e}"
    ))
}

fn tri_golden() -> Outcome {
    let dg = tri_fixture();
    let d = build_dendrogram(&dg, &Scope::Whole, AggregationPolicy::Sum).map_err(|e| e.to_string())?;
    let got: Vec<(f64, f64)> = d.merges.iter().map(|m| (m.raw_distance, m.height)).collect();
    ensure!(got == [(0.4, 0.8), (0.5, 1.0)], "merges {got:?}");
    ensure!(d.merges[0].children == [1, 2] && d.merges[1].children == [0, 3], "children {:?}", d.merges);
    let cut = d.cut(0.9).map_err(|e| e.to_string())?;
    ensure!(spans(&cut) == [(0, 0), (1, 2)], "cut at 0.9 gives {:?}", cut.clusters);
    // the same numbers through the CSV and JSON fixtures
    let from_json = from_json_str(TRI_JSON).map_err(|e| e.to_string())?;
    let from_csv = dgcomics::io::load_csv_str(TRI_CSV, None, &Default::default()).map_err(|e| e.to_string())?;
    for other in [from_json, from_csv] {
        let o = build_dendrogram(&other, &Scope::Whole, AggregationPolicy::Sum).map_err(|e| e.to_string())?;
        ensure!(o.merges == d.merges, "fixture file gives {:?}", o.merges);
    }
    Ok("raw 0.4, 0.5; heights 0.8, 1.0; cut 0.9 → [{0},{1,2}]".into())
}

fn panel_layout() -> Outcome {
    let config = CanvasConfig::default();
    let sixteen = layout_panels(&[1; 16], &config).map_err(|e| e.to_string())?;
    ensure!(sixteen.tiers == 4, "16 panels → {} tiers", sixteen.tiers);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut layouts = 0;
    for n in 1..=100 {
        let want = ((n as f64).sqrt().round() as usize).max(1);
        ensure!(tier_count(n) == want, "tier_count({n}) = {}", tier_count(n));
        for rep in 0..20 {
            let spans: Vec<usize> = match rep {
                0 => vec![1; n],
                _ => (0..n).map(|_| rng.gen_range(1..=12)).collect(),
            };
            let page = layout_panels(&spans, &config).map_err(|e| e.to_string())?;
            ensure!(page.tiers == want, "n={n}: {} tiers", page.tiers);
            ensure!(page.panels.len() == n, "n={n}: {} panels", page.panels.len());
            let mut totals = vec![0usize; page.tiers];
            for (p, s) in page.panels.iter().zip(&spans) {
                totals[p.tier] += s;
            }
            let imbalance = totals.iter().max().unwrap() - totals.iter().min().unwrap();
            let widest = *spans.iter().max().unwrap();
            ensure!(imbalance <= widest, "n={n} {spans:?}: tier totals {totals:?}");
            for (i, a) in page.panels.iter().enumerate() {
                ensure!(
                    a.x >= 0.0 && a.y >= 0.0 && a.right() <= page.width + 1e-9 && a.bottom() <= page.height + 1e-9,
                    "n={n}: panel {i} leaves the page"
                );
                ensure!(a.width > 0.0 && a.height > 0.0, "n={n}: panel {i} is empty");
                for (j, b) in page.panels.iter().enumerate().skip(i + 1) {
                    ensure!(!a.overlaps(b), "n={n}: panels {i} and {j} overlap");
                }
            }
            layouts += 1;
        }
    }
    Ok(format!("16 → 4 tiers; {layouts} layouts for n in 1..=100 checked"))
}

type Edges = BTreeMap<(String, String), u32>;

fn caption_graph(nodes: &BTreeSet<String>, edges: &Edges) -> Graph {
    let mut g = Graph::new(false);
    for n in nodes {
        g.add_node(Node::new(n.clone())).unwrap();
    }
    for ((a, b), w) in edges {
        g.connect(a, b, *w as f64).unwrap();
    }
    g
}

fn random_ego(rng: &mut impl Rng) -> (BTreeSet<String>, Edges) {
    let mut nodes = BTreeSet::from(["M".to_owned()]);
    let mut edges = Edges::new();
    for i in 0..8 {
        if rng.gen_bool(0.5) {
            let p = format!("P{i}");
            nodes.insert(p.clone());
            if rng.gen_bool(0.8) {
                edges.insert(("M".into(), p), rng.gen_range(1..=4));
            }
        }
    }
    let alters: Vec<String> = nodes.iter().filter(|n| *n != "M").cloned().collect();
    for a in &alters {
        for b in &alters {
            if a < b && rng.gen_bool(0.2) {
                edges.insert((a.clone(), b.clone()), rng.gen_range(1..=4));
            }
        }
    }
    (nodes, edges)
}

fn main_ties(edges: &Edges) -> BTreeMap<String, u32> {
    edges
        .iter()
        .filter_map(|((a, b), w)| match (a == "M", b == "M") {
            (true, _) => Some((b.clone(), *w)),
            (_, true) => Some((a.clone(), *w)),
            _ => None,
        })
        .collect()
}

fn strongest_of(ties: &BTreeMap<String, u32>) -> BTreeSet<String> {
    let max = ties.values().max();
    ties.iter().filter(|(_, w)| Some(*w) == max).map(|(p, _)| p.clone()).collect()
}

fn caption_rules() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut kinds = BTreeSet::new();
    for case in 0..500 {
        let (bn, be) = random_ego(&mut rng);
        let (an, ae) = random_ego(&mut rng);
        let got = caption_clauses("M", Some(&caption_graph(&bn, &be)), &caption_graph(&an, &ae));

        let added = an.difference(&bn).count();
        let deleted = bn.difference(&an).count();
        let preserved = an.intersection(&bn).count();
        let summary = if added > deleted {
            Summary::Expanded
        } else if added < deleted {
            Summary::Contracted
        } else {
            Summary::Constant
        };
        let top = added.max(deleted).max(preserved);
        let (kind, count) = if added == top {
            (ChangeKind::Added, added)
        } else if deleted == top {
            (ChangeKind::Deleted, deleted)
        } else {
            (ChangeKind::Preserved, preserved)
        };
        let (bt, at) = (main_ties(&be), main_ties(&ae));
        let mut relations = BTreeSet::new();
        for p in strongest_of(&at) {
            let r = match bt.get(&p) {
                None => Relation::Obtained,
                Some(b) if at[&p] > *b => Relation::Strengthened,
                Some(b) if at[&p] < *b => Relation::Weakened,
                Some(_) => Relation::Maintained,
            };
            relations.insert((p, format!("{r:?}")));
        }
        for p in strongest_of(&bt) {
            if !at.contains_key(&p) {
                relations.insert((p, format!("{:?}", Relation::Lost)));
            }
        }

        ensure!(got.summary == Some(summary), "case {case}: summary {:?} vs {summary:?}", got.summary);
        let major = got.major_change.map(|m| (m.kind, m.count));
        ensure!(major == Some((kind, count)), "case {case}: major {major:?} vs {:?}", (kind, count));
        let rel: BTreeSet<(String, String)> = got
            .strongest_relation
            .iter()
            .map(|c| (c.partner.clone(), format!("{:?}", c.relation)))
            .collect();
        ensure!(rel == relations, "case {case}: relations {rel:?} vs {relations:?}");
        kinds.extend(relations.into_iter().map(|(_, r)| r));
    }

    let dg = tri_fixture();
    let ego = |t: usize| ego_graph(&dg.snapshots()[t].graph, ["A"], EgoLevel::OneAndHalf);
    let tri = caption_clauses("A", Some(&ego(0)), &ego(1));
    ensure!(tri.summary == Some(Summary::Expanded), "TRI summary {:?}", tri.summary);
    ensure!(
        tri.major_change.map(|m| (m.kind, m.count)) == Some((ChangeKind::Preserved, 2)),
        "TRI major change {:?}",
        tri.major_change
    );
    let rel: Vec<(&str, Relation)> = tri
        .strongest_relation
        .iter()
        .map(|c| (c.partner.as_str(), c.relation))
        .collect();
    ensure!(rel == [("B", Relation::Strengthened)], "TRI relations {rel:?}");
    Ok(format!(
        "500 diffs match the reference ({} relation kinds seen); TRI: expanded, preserved 2, B strengthened",
        kinds.len()
    ))
}

fn clique(g: &mut Graph, ids: &[&str]) {
    for (i, a) in ids.iter().enumerate() {
        for b in &ids[i + 1..] {
            g.connect(a, b, 1.0).unwrap();
        }
    }
}

fn cliques(groups: &[&[&str]]) -> Graph {
    let mut g = Graph::new(false);
    for ids in groups {
        clique(&mut g, ids);
    }
    g
}

fn events_of(t0: Graph, t1: Graph) -> Result<Vec<CommunityEvent>, String> {
    let dg = DynamicGraph::new(false, [("t0".to_owned(), t0), ("t1".to_owned(), t1)]).map_err(|e| e.to_string())?;
    let tl = CommunityTimeline::detect(&dg, &CommunityMethod::Louvain, EvolutionConfig::default())
        .map_err(|e| e.to_string())?;
    Ok(tl.events)
}

fn ev(time: usize, min: &str, archetype: Archetype) -> CommunityEvent {
    CommunityEvent {
        time,
        community: community_id(time, min),
        archetype,
    }
}

/// Brute-force modularity maximum over every partition of `n` nodes
/// (restricted growth strings).
fn best_modularity(n: usize, edges: &[(usize, usize)]) -> (f64, Vec<usize>) {
    let m = edges.len() as f64;
    let mut a = vec![vec![0.0; n]; n];
    for &(i, j) in edges {
        a[i][j] += 1.0;
        a[j][i] += 1.0;
    }
    let k: Vec<f64> = a.iter().map(|r| r.iter().sum()).collect();
    let q = |c: &[usize]| {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if c[i] == c[j] {
                    s += a[i][j] - k[i] * k[j] / (2.0 * m);
                }
            }
        }
        s / (2.0 * m)
    };
    let mut c = vec![0usize; n];
    let mut best = (f64::NEG_INFINITY, c.clone());
    loop {
        let v = q(&c);
        if v > best.0 + 1e-12 {
            best = (v, c.clone());
        }
        // next restricted growth string
        let mut i = n - 1;
        loop {
            if i == 0 {
                return best;
            }
            let limit = c[..i].iter().max().unwrap() + 1;
            if c[i] < limit {
                c[i] += 1;
                c[i + 1..].iter_mut().for_each(|x| *x = 0);
                break;
            }
            i -= 1;
        }
    }
}

fn r(v: &[String]) -> Vec<&str> {
    v.iter().map(String::as_str).collect()
}

fn community_events() -> Outcome {
    let k = |p: &str, n: usize| -> Vec<String> { (0..n).map(|i| format!("{p}{i}")).collect() };
    let (a7, b4, c3) = (k("a", 7), k("b", 4), k("c", 3));
    let (a7, a8) = (r(&a7), k("a", 8));
    let a8 = r(&a8);
    let (a5, a4) = (&a7[..5], &a7[..4]);
    let (a_lo, a_hi) = (&a8[..4], &a8[4..]);

    let cases: Vec<(&str, Graph, Graph, Vec<CommunityEvent>)> = vec![
        ("growth", cliques(&[a5]), cliques(&[&a7]), vec![ev(1, "a0", Archetype::Growth)]),
        ("contraction", cliques(&[&a7]), cliques(&[a5]), vec![ev(1, "a0", Archetype::Contraction)]),
        ("merge", cliques(&[a_lo, a_hi]), cliques(&[&a8]), vec![ev(1, "a0", Archetype::Merge)]),
        ("split", cliques(&[&a8]), cliques(&[a_lo, a_hi]), vec![ev(0, "a0", Archetype::Split)]),
        ("birth", cliques(&[a4]), cliques(&[a4, &r(&c3)]), vec![ev(1, "c0", Archetype::Birth)]),
        ("death", cliques(&[a4, &r(&b4)]), cliques(&[a4]), vec![ev(0, "b0", Archetype::Death)]),
    ];
    for (name, t0, t1, want) in cases {
        let got = events_of(t0, t1)?;
        ensure!(got == want, "{name}: got {got:?}, want {want:?}");
    }

    let mut barbell = Graph::new(false);
    let (left, right) = (k("l", 5), k("r", 5));
    clique(&mut barbell, &r(&left));
    clique(&mut barbell, &r(&right));
    barbell.connect("l4", "r0", 1.0).unwrap();
    let ids: Vec<&str> = barbell.node_ids().collect();
    let index = |id: &str| ids.iter().position(|x| *x == id).unwrap();
    let edges: Vec<(usize, usize)> = barbell
        .links()
        .map(|l| (index(&l.source), index(&l.target)))
        .collect();
    let (q, best) = best_modularity(ids.len(), &edges);
    let mut want: BTreeMap<usize, BTreeSet<String>> = BTreeMap::new();
    for (i, c) in best.iter().enumerate() {
        want.entry(*c).or_default().insert(ids[i].to_owned());
    }
    let want: BTreeSet<BTreeSet<String>> = want.into_values().collect();
    let got: BTreeSet<BTreeSet<String>> = louvain_partition(0, &barbell, 1.0)
        .communities
        .into_iter()
        .map(|c| c.members.into_iter().collect())
        .collect();
    let two_k5: BTreeSet<BTreeSet<String>> =
        [left.into_iter().collect(), right.into_iter().collect()].into_iter().collect();
    ensure!(want == two_k5, "brute force optimum is {want:?}");
    ensure!(got == want, "Louvain gives {got:?}");
    Ok(format!("six archetypes exact; barbell = two K5, Q = {q:.4} over all 115975 partitions"))
}

fn cli_generate(dir: &std::path::Path) -> Result<(Vec<u8>, Vec<u8>, Duration), String> {
    let svg = dir.join("comic.svg");
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_dgcomics"))
        .args(["generate", COAUTHORSHIP_JSON, "--k", "9", "--ego", "1.5", "--top", "15"])
        .args(["--highlight", "5", "--layout", "fixed", "--out"])
        .arg(&svg)
        .output()
        .map_err(|e| e.to_string())?;
    let took = start.elapsed();
    ensure!(out.status.success(), "exit {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr));
    let json = std::fs::read(dir.join("comic.json")).map_err(|e| e.to_string())?;
    let svg = std::fs::read(svg).map_err(|e| e.to_string())?;
    Ok((json, svg, took))
}

async fn call(app: &axum::Router, method: &str, uri: &str, body: Vec<u8>) -> (StatusCode, Vec<u8>) {
    let req = Request::builder()
        .method(method)
        .uri(uri)
        .header(header::CONTENT_TYPE, "application/json")
        .body(Body::from(body))
        .unwrap();
    let r = app.clone().oneshot(req).await.unwrap();
    let status = r.status();
    (status, r.into_body().collect().await.unwrap().to_bytes().to_vec())
}

fn http_generate() -> Result<(Vec<u8>, Vec<u8>), String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let app = router(AppState::new(DatasetStore::new(dir.path()), CaptionTemplates::default()));
    let data = std::fs::read(COAUTHORSHIP_JSON).map_err(|e| e.to_string())?;
    let rt = tokio::runtime::Runtime::new().map_err(|e| e.to_string())?;
    rt.block_on(async {
        let field = |b: &[u8], k: &str| -> String {
            let v: serde_json::Value = serde_json::from_slice(b).unwrap();
            v[k].as_str().unwrap().to_owned()
        };
        let (s, b) = call(&app, "POST", "/datasets", data).await;
        ensure!(s == StatusCode::CREATED, "upload: {s} {}", String::from_utf8_lossy(&b));
        let body = format!(r#"{{"dataset":"{}"}}"#, field(&b, "id"));
        let (s, b) = call(&app, "POST", "/sessions", body.into_bytes()).await;
        ensure!(s == StatusCode::CREATED, "session: {s} {}", String::from_utf8_lossy(&b));
        let sid = field(&b, "id");
        let body = r#"{"k":9,"ego":1.5,"top":15,"highlight":5,"layout":"fixed"}"#;
        let (s, json) = call(&app, "POST", &format!("/sessions/{sid}/comic"), body.into()).await;
        ensure!(s == StatusCode::OK, "comic: {s} {}", String::from_utf8_lossy(&json));
        let (s, svg) = call(&app, "POST", &format!("/sessions/{sid}/export"), b"{}".to_vec()).await;
        ensure!(s == StatusCode::OK, "export: {s} {}", String::from_utf8_lossy(&svg));
        Ok((json, svg))
    })
}

fn end_to_end() -> Outcome {
    let (d1, d2) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let (j1, s1, t1) = cli_generate(d1.path())?;
    let (j2, s2, t2) = cli_generate(d2.path())?;
    ensure!(j1 == j2, "template JSON differs between runs");
    ensure!(s1 == s2, "SVG differs between runs");
    let text = std::str::from_utf8(&s1).map_err(|e| e.to_string())?;
    let doc = roxmltree::Document::parse(text).map_err(|e| format!("SVG does not parse: {e}"))?;
    ensure!(doc.root_element().tag_name().name() == "svg", "root is not <svg>");
    let t: ComicTemplate = serde_json::from_slice(&j1).map_err(|e| e.to_string())?;
    ensure!(t.panels.len() == 9, "{} panels", t.panels.len());
    let limit = Duration::from_secs(10);
    ensure!(t1 < limit && t2 < limit, "runs took {t1:?} and {t2:?}");
    let (hj, hs) = http_generate()?;
    ensure!(hj == j1, "HTTP template differs from the CLI file");
    ensure!(hs == s1, "HTTP export differs from the CLI SVG");
    Ok(format!(
        "9 panels, {} bytes JSON, {} bytes SVG; CLI runs {:.2}s / {:.2}s; HTTP identical",
        j1.len(),
        s1.len(),
        t1.as_secs_f64(),
        t2.as_secs_f64()
    ))
}

fn fixed_layout() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let (json, _, _) = cli_generate(dir.path())?;
    let t: ComicTemplate = serde_json::from_slice(&json).map_err(|e| e.to_string())?;
    let mut seen: BTreeMap<&str, (u64, u64, usize)> = BTreeMap::new();
    let mut shared = 0;
    for (i, p) in t.panels.iter().enumerate() {
        for n in &p.nodes {
            let bits = (n.x.to_bits(), n.y.to_bits());
            match seen.get(n.id.as_str()) {
                Some(&(x, y, first)) => {
                    ensure!((x, y) == bits, "{} moves between panels {first} and {i}", n.id);
                    shared += 1;
                }
                None => {
                    seen.insert(&n.id, (bits.0, bits.1, i));
                }
            }
        }
    }
    ensure!(shared > 0, "no node appears in two panels");
    Ok(format!("{} nodes, {shared} repeat appearances, all bit-identical", seen.len()))
}
