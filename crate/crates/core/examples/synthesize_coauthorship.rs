//! Regenerates the bundled 20-year coauthorship dataset in `data/`.
//!
//! Five labs of twelve authors publish every year. Most papers stay inside a
//! lab; lab 2 splits in two from 2009 on, and labs 3 and 4 start a joint
//! project in 2013. Authors join and leave at random, so the data has births,
//! deaths, growth and contraction as well.
//!
//!     cargo run --example synthesize_coauthorship

use std::collections::BTreeMap;
use std::path::Path;

use dgcomics::io::{load_csv_str, save_json, CsvOptions};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 20_240_601;
const FIRST_YEAR: u32 = 2000;
const YEARS: u32 = 20;
const LABS: usize = 5;
const PER_LAB: usize = 12;

const GIVEN: [&str; 12] = [
    "Ada", "Bo", "Chen", "Dana", "Emil", "Fatima", "Goran", "Hana", "Ivo", "Jun", "Kira", "Lars",
];
const FAMILY: [&str; 5] = ["Abe", "Brandt", "Costa", "Dietz", "Eriksen"];

struct Author {
    id: String,
    name: String,
    lab: usize,
    first: u32,
    last: u32,
}

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut authors = Vec::new();
    for (lab, family) in FAMILY.iter().enumerate() {
        for (i, given) in GIVEN.iter().enumerate() {
            // a core of long-running authors, the rest come and go
            let (first, last) = if i < 5 {
                (0, YEARS - 1)
            } else {
                let a = rng.gen_range(0..YEARS - 3);
                (a, (a + rng.gen_range(3..12)).min(YEARS - 1))
            };
            authors.push(Author {
                id: format!("a{:02}", lab * PER_LAB + i),
                name: format!("{given} {family}"),
                lab,
                first,
                last,
            });
        }
    }

    let mut edges: BTreeMap<(u32, usize, usize), u32> = BTreeMap::new();
    let mut papers: BTreeMap<(u32, usize), u32> = BTreeMap::new();
    for y in 0..YEARS {
        let active: Vec<usize> = (0..authors.len())
            .filter(|&a| (authors[a].first..=authors[a].last).contains(&y))
            .collect();
        for _ in 0..30 {
            let lab = rng.gen_range(0..LABS);
            let mut pool: Vec<usize> = active.iter().copied().filter(|&a| authors[a].lab == lab).collect();
            if lab == 2 && y >= 9 {
                // the split: even and odd members stop writing together
                let half = rng.gen_range(0..2);
                pool.retain(|&a| a % 2 == half);
            }
            if (lab == 3 || lab == 4) && y >= 13 && rng.gen_bool(0.5) {
                pool.extend(active.iter().copied().filter(|&a| authors[a].lab == 7 - lab));
            } else if rng.gen_bool(0.1) {
                pool.push(active[rng.gen_range(0..active.len())]);
            }
            pool.sort_unstable();
            pool.dedup();
            let size = rng.gen_range(2..=4).min(pool.len());
            if size < 2 {
                continue;
            }
            let team: Vec<usize> = pool.choose_multiple(&mut rng, size).copied().collect();
            for (i, &a) in team.iter().enumerate() {
                *papers.entry((y, a)).or_default() += 1;
                for &b in &team[i + 1..] {
                    *edges.entry((y, a.min(b), a.max(b))).or_default() += 1;
                }
            }
        }
    }

    let mut edge_csv = String::from("time,source,target,weight\n");
    for ((y, a, b), w) in &edges {
        edge_csv += &format!("{},{},{},{w}\n", FIRST_YEAR + y, authors[*a].id, authors[*b].id);
    }
    let mut node_csv = String::from("time,id,display_name,lab,papers\n");
    for ((y, a), n) in &papers {
        let au = &authors[*a];
        node_csv += &format!("{},{},{},lab{},{n}\n", FIRST_YEAR + y, au.id, au.name, au.lab);
    }

    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
    std::fs::create_dir_all(&dir).unwrap();
    std::fs::write(dir.join("coauthorship_edges.csv"), &edge_csv).unwrap();
    std::fs::write(dir.join("coauthorship_nodes.csv"), &node_csv).unwrap();
    let opts = CsvOptions {
        directed: false,
        name: Some("synthetic coauthorship 2000-2019".into()),
    };
    let dg = load_csv_str(&edge_csv, Some(&node_csv), &opts).unwrap();
    save_json(&dg, dir.join("coauthorship.json")).unwrap();
    let links: usize = dg.snapshots().iter().map(|s| s.graph.link_count()).sum();
    println!("{} years, {} authors, {links} yearly links", dg.len(), authors.len());
}
