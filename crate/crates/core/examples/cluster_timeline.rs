//! Causality-preserving clustering of the bundled coauthorship data and the
//! panel spans produced by a few cut levels.
//!
//!     cargo run --example cluster_timeline

use dgcomics::clustering::{build_dendrogram, Scope};
use dgcomics::graph::AggregationPolicy;
use dgcomics::io::load_json;

fn main() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/data/coauthorship.json");
    let dg = load_json(path).unwrap();
    let d = build_dendrogram(&dg, &Scope::Whole, AggregationPolicy::Sum).unwrap();
    for m in &d.merges {
        println!("{:>10}  raw {:.3}  height {:.3}", dg.span_label(m.span), m.raw_distance, m.height);
    }
    for level in [0.5, 0.8, 0.95] {
        let cut = d.cut(level).unwrap();
        let spans: Vec<String> = cut.clusters.iter().map(|s| dg.span_label(*s)).collect();
        println!("cut at {level}: {} panels {spans:?}", cut.len());
    }
    let nine = d.cut_k(9).unwrap();
    println!("k = 9: {:?}", nine.clusters.iter().map(|s| dg.span_label(*s)).collect::<Vec<_>>());

    // re-cluster from one author's point of view
    let ego: Scope = "ego:a00".parse().unwrap();
    let d = build_dendrogram(&dg, &ego, AggregationPolicy::Sum).unwrap();
    println!("ego:a00 split into 4: {:?}", d.cut_k(4).unwrap().clusters.iter().map(|s| dg.span_label(*s)).collect::<Vec<_>>());
}
