//! Main and supporting characters of a panel and its generated caption.
//!
//!     cargo run --example characters_and_captions

use std::collections::BTreeSet;

use dgcomics::graph::{tri_fixture, union_graphs, AggregationPolicy, EgoLevel};
use dgcomics::narrative::{
    generate_caption, main_characters, supporting_characters, CaptionInput, CaptionTemplates,
};

fn main() {
    let dg = tri_fixture();
    let (before, after) = (&dg.snapshots()[0].graph, &dg.snapshots()[1].graph);

    let mains = main_characters(before, after, EgoLevel::OneAndHalf, 3, AggregationPolicy::Sum);
    for m in &mains {
        println!("{}: change {:.3}, weight {}", m.node, m.change_score, m.total_link_weight);
    }

    let union = union_graphs(before, after, AggregationPolicy::Sum);
    let picked: BTreeSet<String> = [mains[0].node.clone()].into();
    let s = supporting_characters(&union, &picked, 100.0, 50.0).unwrap();
    println!("supporters {:?}, highlighted {:?}", s.visible, s.highlighted);

    let main_ids = vec!["B".to_string()];
    let caption = generate_caption(
        &CaptionInput {
            mains: &main_ids,
            before: Some(before),
            after,
            level: EgoLevel::One,
            span_start: "0",
            span_end: "1",
        },
        &CaptionTemplates::default(),
    );
    println!("{}", caption.text);
}
