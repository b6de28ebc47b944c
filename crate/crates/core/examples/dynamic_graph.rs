//! Snapshots, unions, diffs and ego networks on the three-snapshot fixture.
//!
//!     cargo run --example dynamic_graph

use dgcomics::graph::{diff, ego_graph, tri_fixture, union_graphs, AggregationPolicy, EgoLevel};

fn main() {
    let dg = tri_fixture();
    for s in dg.snapshots() {
        let links: Vec<String> = s.graph.links().map(|l| format!("{}-{}:{}", l.source, l.target, l.weight())).collect();
        println!("t{}: nodes {:?} links {links:?}", s.label, s.graph.node_ids().collect::<Vec<_>>());
    }

    let (g0, g1, g2) = (&dg.snapshots()[0].graph, &dg.snapshots()[1].graph, &dg.snapshots()[2].graph);
    let u = union_graphs(g1, g2, AggregationPolicy::Sum);
    let w: Vec<String> = u.links().map(|l| format!("{}-{}:{}", l.source, l.target, l.weight())).collect();
    println!("union(t1, t2) with sum: {w:?}");

    let d = diff(g0, g1);
    println!("t0 -> t1 added nodes {:?}, added links {:?}", d.added_nodes, d.added_links);

    for level in [EgoLevel::One, EgoLevel::OneAndHalf] {
        let e = ego_graph(g1, ["B"], level);
        println!("ego(B, {level}) at t1: {} nodes, {} links", e.node_count(), e.link_count());
    }
}
