//! Canonical JSON: `{"name"?, "directed"?, "times": [{t, label, nodes, links}]}`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::IoError;
use crate::graph::{AttributeVector, DynamicGraph, Graph, Link, Node};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonDataset {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    #[serde(default)]
    directed: bool,
    times: Vec<JsonTime>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonTime {
    t: usize,
    label: String,
    #[serde(default)]
    nodes: Vec<Node>,
    #[serde(default)]
    links: Vec<JsonLink>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonLink {
    source: String,
    target: String,
    attrs: AttributeVector,
}

fn json_err(path: String, message: impl ToString) -> IoError {
    IoError::Json {
        path,
        message: message.to_string(),
    }
}

pub fn from_json_str(text: &str) -> Result<DynamicGraph, IoError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let raw: JsonDataset = serde_path_to_error::deserialize(de)
        .map_err(|e| json_err(e.path().to_string(), e.inner()))?;
    if raw.times.is_empty() {
        return Err(json_err("times".into(), "at least one time point is required"));
    }
    let mut snapshots = Vec::with_capacity(raw.times.len());
    for (i, time) in raw.times.into_iter().enumerate() {
        if time.t != i {
            return Err(json_err(format!("times[{i}].t"), format!("expected {i}, found {}", time.t)));
        }
        let mut g = Graph::new(raw.directed);
        for (j, node) in time.nodes.into_iter().enumerate() {
            g.add_node(node)
                .map_err(|e| json_err(format!("times[{i}].nodes[{j}]"), e))?;
        }
        for (j, l) in time.links.into_iter().enumerate() {
            let path = format!("times[{i}].links[{j}]");
            for end in [&l.source, &l.target] {
                if !g.contains_node(end) {
                    return Err(json_err(path, format!("link endpoint `{end}` is not a declared node")));
                }
            }
            let link = Link {
                source: l.source,
                target: l.target,
                directed: raw.directed,
                attrs: l.attrs,
            };
            g.add_link(link).map_err(|e| json_err(path, e))?;
        }
        snapshots.push((time.label, g));
    }
    let mut dg = DynamicGraph::new(raw.directed, snapshots)?;
    dg.name = raw.name;
    Ok(dg)
}

pub fn load_json(path: impl AsRef<Path>) -> Result<DynamicGraph, IoError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(IoError::file(path))?;
    from_json_str(&text)
}

/// Pretty-printed canonical form; identical graphs give identical text.
pub fn to_json_string(dg: &DynamicGraph) -> String {
    let raw = JsonDataset {
        name: dg.name.clone(),
        directed: dg.directed(),
        times: dg
            .snapshots()
            .iter()
            .map(|s| JsonTime {
                t: s.time,
                label: s.label.clone(),
                nodes: s.graph.nodes().cloned().collect(),
                links: s
                    .graph
                    .links()
                    .map(|l| JsonLink {
                        source: l.source.clone(),
                        target: l.target.clone(),
                        attrs: l.attrs.clone(),
                    })
                    .collect(),
            })
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&raw).expect("dataset serialises");
    s.push('\n');
    s
}

pub fn save_json(dg: &DynamicGraph, path: impl AsRef<Path>) -> Result<(), IoError> {
    let path = path.as_ref();
    std::fs::write(path, to_json_string(dg)).map_err(IoError::file(path))
}
