//! Ruzicka similarity of attribute vectors and the distance between graphs.
//!
//!     cargo run --example graph_distance

use dgcomics::graph::{tri_fixture, AttributeVector, Graph};
use dgcomics::similarity::{graph_distance, ruzicka};

fn main() {
    let mut x = AttributeVector::new();
    x.set("papers", 3.0).unwrap();
    x.set("citations", 10.0).unwrap();
    let mut y = AttributeVector::new();
    y.set("papers", 1.0).unwrap();
    y.set("citations", 12.0).unwrap();
    // (1 + 10) / (3 + 12)
    println!("ruzicka = {:.4}", ruzicka(&x, &y));

    let dg = tri_fixture();
    let g: Vec<&Graph> = dg.snapshots().iter().map(|s| &s.graph).collect();
    for (a, b) in [(0, 1), (1, 2), (0, 2)] {
        let r = graph_distance(g[a], g[b]);
        println!("d(t{a}, t{b}) = {:.3}", r.distance);
    }

    // same structure, different weight on the only link
    let mut h = g[0].clone();
    h = h.scale_weights(4.0);
    println!("attribute-only change: d = {:.3}", graph_distance(g[0], &h).distance);
}
