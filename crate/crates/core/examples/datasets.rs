//! Loading CSV and JSON datasets, round-tripping them, and the on-disk store.
//!
//!     cargo run --example datasets

use dgcomics::io::{from_json_str, load_csv_str, to_csv_strings, to_json_string, CsvOptions, DatasetStore};

const EDGES: &str = "time,source,target,weight
0,A,B,1
1,A,B,2
1,A,C,1
2,A,C,1
";

fn main() {
    let dg = load_csv_str(EDGES, None, &CsvOptions::default()).unwrap();
    println!("{} snapshots, labels {:?}", dg.len(), dg.labels().collect::<Vec<_>>());

    let json = to_json_string(&dg);
    assert_eq!(from_json_str(&json).unwrap(), dg);
    let (edges, nodes) = to_csv_strings(&dg);
    println!("edge csv:\n{edges}node csv:\n{nodes}");

    match load_csv_str("time,source,target,weight\n0,A,B,-1\n", None, &CsvOptions::default()) {
        Err(e) => println!("rejected: {e}"),
        Ok(_) => unreachable!(),
    }

    let dir = std::env::temp_dir().join("dgcomics-example-store");
    let store = DatasetStore::new(&dir);
    let m = store.put(&dg).unwrap();
    println!("stored as {} with {:?} nodes per snapshot", m.id, m.node_counts);
    assert_eq!(store.get(&m.id).unwrap(), dg);
}
