mod common;

use std::collections::BTreeSet;

use common::{random_dynamic_graph, tiles};
use dgcomics::clustering::{build_dendrogram, Scope};
use dgcomics::comic::{edit_timeline, generate_comic, ComicOptions};
use dgcomics::clustering::CutCriterion;
use dgcomics::graph::{AggregationPolicy, DynamicGraph, Graph, Link, Node, Span};
use dgcomics::io::{from_json_str, load_csv_str, to_csv_strings, to_json_string, CsvOptions};
use dgcomics::layout::{partition_tiers, tier_count};
use dgcomics::narrative::{supporting_characters, CaptionTemplates};
use dgcomics::similarity::distance;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn dynamic(seed: u64, snapshots: usize) -> DynamicGraph {
    random_dynamic_graph(&mut ChaCha8Rng::seed_from_u64(seed), snapshots, 10)
}

/// Every attribute of every element multiplied by `factor`.
fn scaled(g: &Graph, factor: f64) -> Graph {
    let mut out = Graph::new(g.directed);
    for n in g.nodes() {
        out.add_node(Node::new(n.id.clone()).with_attrs(n.attrs.scaled(factor))).unwrap();
    }
    for l in g.links() {
        out.add_link(Link {
            attrs: l.attrs.scaled(factor),
            ..l.clone()
        })
        .unwrap();
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn distance_is_a_bounded_symmetric_dissimilarity(seed in any::<u64>()) {
        let dg = dynamic(seed, 5);
        for a in dg.snapshots() {
            prop_assert_eq!(distance(&a.graph, &a.graph), 0.0);
            for b in dg.snapshots() {
                let d = distance(&a.graph, &b.graph);
                prop_assert!((0.0..=1.0).contains(&d));
                prop_assert!((d - distance(&b.graph, &a.graph)).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn power_of_two_scaling_changes_nothing(seed in any::<u64>(), exp in -8i32..8) {
        let dg = dynamic(seed, 6);
        let factor = 2f64.powi(exp);
        let sc = DynamicGraph::new(
            false,
            dg.snapshots().iter().map(|s| (s.label.clone(), scaled(&s.graph, factor))),
        )
        .unwrap();
        let a = build_dendrogram(&dg, &Scope::Whole, AggregationPolicy::Sum).unwrap();
        let b = build_dendrogram(&sc, &Scope::Whole, AggregationPolicy::Sum).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn every_cut_tiles_the_timeline(seed in any::<u64>(), n in 1usize..20) {
        let dg = dynamic(seed, n);
        let d = build_dendrogram(&dg, &Scope::Whole, AggregationPolicy::Sum).unwrap();
        for k in 1..=n {
            let c = d.cut_k(k).unwrap();
            let spans: Vec<(usize, usize)> = c.clusters.iter().map(|s| (s.start, s.end)).collect();
            prop_assert_eq!(c.len(), k);
            prop_assert!(tiles(&spans, n - 1));
        }
        // heights never decrease towards the root
        for m in &d.merges {
            for child in m.children {
                prop_assert!(d.height_of(child) <= m.height);
            }
        }
    }

    #[test]
    fn supporters_grow_with_top(seed in any::<u64>(), lo in 1.0f64..100.0, hi in 1.0f64..100.0) {
        let (lo, hi) = (lo.min(hi), lo.max(hi));
        let dg = dynamic(seed, 2);
        let g = &dg.snapshots()[1].graph;
        let Some(main) = g.node_ids().next() else { return Ok(()) };
        let mains = BTreeSet::from([main.to_owned()]);
        let small = supporting_characters(g, &mains, lo, 0.0).unwrap();
        let large = supporting_characters(g, &mains, hi, lo).unwrap();
        prop_assert!(small.visible.is_subset(&large.visible));
        prop_assert!(small.visible.contains(main));
        prop_assert!(large.highlighted.is_subset(&large.visible));
    }

    #[test]
    fn mains_are_drawn_in_their_panels(seed in any::<u64>(), n in 2usize..8, k in 1usize..8) {
        let dg = dynamic(seed, n);
        let d = build_dendrogram(&dg, &Scope::Whole, AggregationPolicy::Sum).unwrap();
        let options = ComicOptions { top: 50.0, highlight: 10.0, ..ComicOptions::default() };
        match generate_comic(&dg, &d, CutCriterion::K(k.min(n)), &options, &CaptionTemplates::default()) {
            Ok(t) => {
                for p in &t.panels {
                    for m in &p.mains {
                        prop_assert!(p.node(m).is_some(), "main {} missing from {}", m, p.label);
                    }
                }
            }
            // panels with no nodes at all cannot have mains
            Err(e) => prop_assert!(e.to_string().contains("main"), "{}", e),
        }
    }

    #[test]
    fn tiers_are_balanced(spans in prop::collection::vec(1usize..20, 1..60)) {
        let tiers = tier_count(spans.len());
        let sizes = partition_tiers(&spans, tiers);
        prop_assert_eq!(sizes.len(), tiers);
        prop_assert!(sizes.iter().all(|s| *s > 0));
        prop_assert_eq!(sizes.iter().sum::<usize>(), spans.len());
        let mut at = 0;
        let sums: Vec<usize> = sizes.iter().map(|s| { at += s; spans[at - s..at].iter().sum() }).collect();
        let spread = sums.iter().max().unwrap() - sums.iter().min().unwrap();
        prop_assert!(spread <= *spans.iter().max().unwrap(), "{:?}", sums);
    }

    #[test]
    fn timeline_edits_keep_order(
        cuts in prop::collection::btree_set(1usize..30, 0..6),
        index in 0usize..7,
        times in prop::collection::vec(0usize..30, 1..4),
        replace in any::<bool>(),
    ) {
        let mut bounds: Vec<usize> = cuts.into_iter().collect();
        bounds.insert(0, 0);
        bounds.push(30);
        let spans: Vec<Span> = bounds.windows(2).map(|w| Span::new(w[0], w[1] - 1)).collect();
        if let Ok(out) = edit_timeline(&spans, index, &times, replace, 29) {
            for w in out.windows(2) {
                prop_assert!(w[0].end < w[1].start);
            }
            for t in &times {
                prop_assert!(out.contains(&Span::point(*t)));
            }
            prop_assert_eq!(out.len(), spans.len() - usize::from(replace) + times.len());
        }
    }

    #[test]
    fn json_round_trip(seed in any::<u64>(), n in 1usize..6) {
        let dg = dynamic(seed, n);
        let text = to_json_string(&dg);
        let back = from_json_str(&text).unwrap();
        prop_assert_eq!(&back, &dg);
        prop_assert_eq!(to_json_string(&back), text);
    }

    #[test]
    fn csv_round_trip(seed in any::<u64>(), n in 1usize..6) {
        let dg = dynamic(seed, n);
        // a snapshot with no rows at all cannot be written as CSV
        prop_assume!(dg.snapshots().iter().all(|s| !s.graph.is_empty()));
        let (edges, nodes) = to_csv_strings(&dg);
        let back = load_csv_str(&edges, Some(&nodes), &CsvOptions::default()).unwrap();
        prop_assert_eq!(back, dg);
    }
}
