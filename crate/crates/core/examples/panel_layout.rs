//! Tier packing of panels on the page and the three node layout modes.
//!
//!     cargo run --example panel_layout

use dgcomics::graph::tri_fixture;
use dgcomics::layout::{
    compact_layout, force_layout, layout_panels, partition_tiers, tier_count, CanvasConfig, Viewport,
};

fn main() {
    for n in [1, 2, 3, 9, 16, 30] {
        println!("{n} panels -> {} tiers", tier_count(n));
    }
    let spans = [4, 1, 2, 1, 6, 1, 1, 2, 2];
    println!("tier run lengths for {spans:?}: {:?}", partition_tiers(&spans, 3));

    let page = layout_panels(&spans, &CanvasConfig::default()).unwrap();
    for p in &page.panels {
        println!("tier {} at ({:.0}, {:.0}) {:.0}x{:.0}", p.tier, p.x, p.y, p.width, p.height);
    }

    let dg = tri_fixture();
    let g = &dg.snapshots()[1].graph;
    let view = Viewport::default();
    for (name, pos) in [("force", force_layout(g, &view)), ("compact", compact_layout(g, &view))] {
        let text: Vec<String> = pos.iter().map(|p| format!("{} ({:.1}, {:.1})", p.id, p.x, p.y)).collect();
        println!("{name}: {}", text.join(", "));
    }
}
