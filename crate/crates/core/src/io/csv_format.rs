//! Edge-list CSV (`time,source,target,weight[,attr...]`) with an optional
//! node CSV (`time,id[,display_name][,attr...]`).
//!
//! Extra edge columns are numeric link attributes. Extra node columns are
//! numeric attributes when every value parses as a number, categories
//! otherwise. Rows may come in any order: duplicates are summed over sorted
//! values, so shuffled files load to the same graph.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use super::IoError;
use crate::graph::{AttributeVector, DynamicGraph, Graph, Link, LinkKey, Node, WEIGHT};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CsvOptions {
    pub directed: bool,
    pub name: Option<String>,
}

fn csv_err(line: u64, message: impl Into<String>) -> IoError {
    IoError::Csv {
        line,
        message: message.into(),
    }
}

struct Table {
    headers: Vec<String>,
    /// `(line, cells)`
    rows: Vec<(u64, Vec<String>)>,
}

fn read_table(text: &str, required: &[&str]) -> Result<Table, IoError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| csv_err(1, e.to_string()))?
        .iter()
        .map(str::to_owned)
        .collect();
    for (i, name) in required.iter().enumerate() {
        if headers.get(i).map(String::as_str) != Some(*name) {
            return Err(csv_err(1, format!("expected column {} to be `{name}`", i + 1)));
        }
    }
    let mut seen = BTreeSet::new();
    if let Some(dup) = headers.iter().find(|h| !seen.insert(h.as_str())) {
        return Err(csv_err(1, format!("duplicate column `{dup}`")));
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            csv_err(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.iter().all(str::is_empty) {
            continue;
        }
        rows.push((line, record.iter().map(str::to_owned).collect()));
    }
    Ok(Table { headers, rows })
}

fn number(line: u64, column: &str, cell: &str) -> Result<f64, IoError> {
    let v: f64 = cell
        .parse()
        .map_err(|_| csv_err(line, format!("`{column}` value `{cell}` is not a number")))?;
    if !v.is_finite() || v < 0.0 {
        return Err(csv_err(line, format!("`{column}` value {cell} must be finite and non-negative")));
    }
    Ok(v)
}

/// Numeric labels sort by value, anything else lexically.
fn order_labels(labels: BTreeSet<String>) -> Vec<String> {
    let numeric: Option<Vec<(f64, String)>> = labels
        .iter()
        .map(|l| l.parse::<f64>().ok().filter(|v| v.is_finite()).map(|v| (v, l.clone())))
        .collect();
    match numeric {
        Some(mut v) => {
            v.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
            v.into_iter().map(|(_, l)| l).collect()
        }
        None => labels.into_iter().collect(),
    }
}

fn sorted_sum(mut values: Vec<f64>) -> f64 {
    values.sort_by(f64::total_cmp);
    values.into_iter().sum()
}

pub fn load_csv_str(edges: &str, nodes: Option<&str>, options: &CsvOptions) -> Result<DynamicGraph, IoError> {
    let table = read_table(edges, &["time", "source", "target", "weight"])?;
    let mut labels = BTreeSet::new();
    type LinkSums = BTreeMap<String, Vec<f64>>;
    let mut links: BTreeMap<(String, LinkKey), LinkSums> = BTreeMap::new();
    for (line, cells) in &table.rows {
        if cells.len() != table.headers.len() {
            return Err(csv_err(*line, format!("expected {} fields, found {}", table.headers.len(), cells.len())));
        }
        let (time, source, target) = (&cells[0], &cells[1], &cells[2]);
        if time.is_empty() || source.is_empty() || target.is_empty() {
            return Err(csv_err(*line, "time, source and target must be non-empty"));
        }
        let weight = number(*line, WEIGHT, &cells[3])?;
        if weight <= 0.0 {
            return Err(csv_err(*line, "weight must be positive"));
        }
        labels.insert(time.clone());
        let entry = links
            .entry((time.clone(), LinkKey::new(source, target, options.directed)))
            .or_default();
        entry.entry(WEIGHT.to_owned()).or_default().push(weight);
        for (name, cell) in table.headers.iter().zip(cells).skip(4) {
            if !cell.is_empty() {
                entry.entry(name.clone()).or_default().push(number(*line, name, cell)?);
            }
        }
    }

    let mut declared: BTreeMap<(String, String), Node> = BTreeMap::new();
    if let Some(text) = nodes {
        let t = read_table(text, &["time", "id"])?;
        let numeric_cols: BTreeSet<usize> = (2..t.headers.len())
            .filter(|&c| {
                t.headers[c] != "display_name"
                    && t.rows
                        .iter()
                        .all(|(_, r)| r.get(c).is_none_or(|v| v.is_empty() || v.parse::<f64>().is_ok()))
            })
            .collect();
        for (line, cells) in &t.rows {
            if cells.len() != t.headers.len() {
                return Err(csv_err(*line, format!("expected {} fields, found {}", t.headers.len(), cells.len())));
            }
            let (time, id) = (&cells[0], &cells[1]);
            if time.is_empty() || id.is_empty() {
                return Err(csv_err(*line, "time and id must be non-empty"));
            }
            let mut node = Node::new(id.clone());
            for (c, cell) in cells.iter().enumerate().skip(2) {
                let name = &t.headers[c];
                if cell.is_empty() {
                    continue;
                }
                if name == "display_name" {
                    node.display_name = Some(cell.clone());
                } else if numeric_cols.contains(&c) {
                    node.attrs
                        .set(name.clone(), number(*line, name, cell)?)
                        .map_err(|e| csv_err(*line, e.to_string()))?;
                } else {
                    node.categories.insert(name.clone(), cell.clone());
                }
            }
            labels.insert(time.clone());
            if declared.insert((time.clone(), id.clone()), node).is_some() {
                return Err(csv_err(*line, format!("node `{id}` listed twice at time `{time}`")));
            }
        }
    }

    // an edge file without rows is fine as long as the node file has some
    if labels.is_empty() {
        return Err(IoError::Empty);
    }
    let mut graphs: BTreeMap<String, Graph> =
        labels.iter().map(|l| (l.clone(), Graph::new(options.directed))).collect();
    for ((time, _), node) in declared {
        graphs.get_mut(&time).unwrap().add_node(node)?;
    }
    for ((time, key), sums) in links {
        let g = graphs.get_mut(&time).unwrap();
        for end in [&key.source, &key.target] {
            if !g.contains_node(end) {
                g.add_node(Node::new(end.clone()))?;
            }
        }
        let mut attrs = AttributeVector::new();
        for (name, values) in sums {
            attrs.set(name, sorted_sum(values))?;
        }
        g.add_link(Link {
            source: key.source,
            target: key.target,
            directed: options.directed,
            attrs,
        })?;
    }

    let ordered = order_labels(labels);
    let mut dg = DynamicGraph::new(
        options.directed,
        ordered.into_iter().map(|l| {
            let g = graphs.remove(&l).unwrap();
            (l, g)
        }),
    )?;
    dg.name = options.name.clone();
    Ok(dg)
}

pub fn load_csv(edges: impl AsRef<Path>, nodes: Option<&Path>, options: &CsvOptions) -> Result<DynamicGraph, IoError> {
    let edges = edges.as_ref();
    let edge_text = std::fs::read_to_string(edges).map_err(IoError::file(edges))?;
    let node_text = match nodes {
        Some(p) => Some(std::fs::read_to_string(p).map_err(IoError::file(p))?),
        None => None,
    };
    load_csv_str(&edge_text, node_text.as_deref(), options)
}

/// The value of `key` as text, empty when the attribute is absent.
fn cell(attrs: &AttributeVector, key: &str) -> String {
    if attrs.keys().any(|k| k == key) {
        attrs.get(key).to_string()
    } else {
        String::new()
    }
}

/// Edge CSV text and node CSV text (every node, so isolated nodes survive).
pub fn to_csv_strings(dg: &DynamicGraph) -> (String, String) {
    let mut link_cols = BTreeSet::new();
    let mut attr_cols = BTreeSet::new();
    let mut cat_cols = BTreeSet::new();
    let mut display = false;
    for s in dg.snapshots() {
        for l in s.graph.links() {
            link_cols.extend(l.attrs.keys().filter(|k| *k != WEIGHT).map(str::to_owned));
        }
        for n in s.graph.nodes() {
            attr_cols.extend(n.attrs.keys().map(str::to_owned));
            cat_cols.extend(n.categories.keys().cloned());
            display |= n.display_name.is_some();
        }
    }

    let mut edges = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["time", "source", "target", WEIGHT];
    header.extend(link_cols.iter().map(String::as_str));
    edges.write_record(&header).unwrap();
    for s in dg.snapshots() {
        for l in s.graph.links() {
            let mut row = vec![s.label.clone(), l.source.clone(), l.target.clone(), l.weight().to_string()];
            for c in &link_cols {
                row.push(cell(&l.attrs, c));
            }
            edges.write_record(&row).unwrap();
        }
    }

    let mut nodes = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["time", "id"];
    if display {
        header.push("display_name");
    }
    header.extend(attr_cols.iter().map(String::as_str));
    header.extend(cat_cols.iter().map(String::as_str));
    nodes.write_record(&header).unwrap();
    for s in dg.snapshots() {
        for n in s.graph.nodes() {
            let mut row = vec![s.label.clone(), n.id.clone()];
            if display {
                row.push(n.display_name.clone().unwrap_or_default());
            }
            for c in &attr_cols {
                row.push(cell(&n.attrs, c));
            }
            for c in &cat_cols {
                row.push(n.categories.get(c).cloned().unwrap_or_default());
            }
            nodes.write_record(&row).unwrap();
        }
    }
    let text = |w: csv::Writer<Vec<u8>>| String::from_utf8(w.into_inner().unwrap()).unwrap();
    (text(edges), text(nodes))
}

pub fn save_csv(dg: &DynamicGraph, edges: impl AsRef<Path>, nodes: impl AsRef<Path>) -> Result<(), IoError> {
    let (e, n) = to_csv_strings(dg);
    std::fs::write(edges.as_ref(), e).map_err(IoError::file(edges.as_ref()))?;
    std::fs::write(nodes.as_ref(), n).map_err(IoError::file(nodes.as_ref()))
}
