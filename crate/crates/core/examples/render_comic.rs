//! Build the two-panel comic of the three-snapshot fixture and write it as
//! template JSON and SVG into the system temp directory.
//!
//!     cargo run --example render_comic

use dgcomics::clustering::{build_dendrogram, CutCriterion, Scope};
use dgcomics::comic::{generate_comic, ComicOptions};
use dgcomics::graph::{tri_fixture, AggregationPolicy};
use dgcomics::layout::LayoutMode;
use dgcomics::narrative::CaptionTemplates;
use dgcomics::render::{render, HullOverlay};

fn main() {
    let dg = tri_fixture();
    let d = build_dendrogram(&dg, &Scope::Whole, AggregationPolicy::Sum).unwrap();
    let options = ComicOptions {
        mains_per_panel: 2,
        top: 100.0,
        highlight: 50.0,
        layout: LayoutMode::Fixed,
        hulls: vec![HullOverlay {
            community: "core".into(),
            color: "#66c2a5".into(),
            members: vec!["A".into(), "B".into()],
        }],
        title: Some("A, B and C".into()),
        ..ComicOptions::default()
    };
    let t = generate_comic(&dg, &d, CutCriterion::Level(0.9), &options, &CaptionTemplates::default()).unwrap();
    for p in &t.panels {
        println!("[{}] {}", p.label, p.caption.text.replace('\n', " / "));
    }
    let dir = std::env::temp_dir();
    std::fs::write(dir.join("tri_comic.json"), t.to_json()).unwrap();
    std::fs::write(dir.join("tri_comic.svg"), render(&t).unwrap()).unwrap();
    println!("wrote {}", dir.join("tri_comic.svg").display());
}
