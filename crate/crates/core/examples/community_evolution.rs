//! Louvain communities per year, their successions and evolution events,
//! and the community path of two authors.
//!
//!     cargo run --example community_evolution

use dgcomics::community::{character_paths, CommunityMethod, CommunityTimeline, EvolutionConfig};
use dgcomics::io::load_json;

fn main() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/data/coauthorship.json");
    let dg = load_json(path).unwrap();
    for method in ["louvain", "attribute:lab"] {
        let method: CommunityMethod = method.parse().unwrap();
        let tl = CommunityTimeline::detect(&dg, &method, EvolutionConfig::default()).unwrap();
        println!("{method}:");
        for p in &tl.partitions {
            let sizes: Vec<usize> = p.communities.iter().map(|c| c.size).collect();
            println!("  {}  {sizes:?}", dg.snapshots()[p.time].label);
        }
        let mut counts = std::collections::BTreeMap::new();
        for e in &tl.events {
            *counts.entry(format!("{:?}", e.archetype)).or_insert(0) += 1;
        }
        println!("  events {counts:?}");
        for (who, steps) in character_paths(&tl, ["a24", "a25"]) {
            let ids: Vec<&str> = steps.iter().map(|s| &s.community[..4]).collect();
            println!("  path of {who}: {}", ids.join(" "));
        }
    }
}
