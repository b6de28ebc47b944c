//! Dataset formats (CSV, canonical JSON), manifests and the on-disk store.

mod csv_format;
mod json_format;
mod store;

pub use csv_format::{load_csv, load_csv_str, save_csv, to_csv_strings, CsvOptions};
pub use json_format::{from_json_str, load_json, save_json, to_json_string};
pub use store::{DatasetStore, DATA_DIR_ENV};

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::graph::{AggregationPolicy, DynamicGraph, GraphError};

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Csv { line: u64, message: String },
    #[error("{path}: {message}")]
    Json { path: String, message: String },
    #[error("no data rows")]
    Empty,
    #[error("unknown dataset `{0}`")]
    UnknownDataset(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

impl IoError {
    /// True for failures of the file system rather than of the content.
    pub fn is_io(&self) -> bool {
        matches!(self, IoError::File { .. })
    }

    pub(crate) fn file(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> IoError {
        let path = path.into();
        move |source| IoError::File { path, source }
    }
}

/// Load `.json` files as canonical JSON and anything else as an edge CSV.
pub fn load_path(path: &Path, nodes: Option<&Path>, options: &CsvOptions) -> Result<DynamicGraph, IoError> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("json") => {
            let mut dg = load_json(path)?;
            if options.name.is_some() {
                dg.name = options.name.clone();
            }
            Ok(dg)
        }
        _ => load_csv(path, nodes, options),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributeSchema {
    pub node: Vec<String>,
    pub link: Vec<String>,
    pub categories: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub id: String,
    pub name: String,
    pub directed: bool,
    pub labels: Vec<String>,
    pub node_counts: Vec<usize>,
    pub link_counts: Vec<usize>,
    pub aggregation: AggregationPolicy,
    pub attributes: AttributeSchema,
}

/// Content hash of the canonical JSON form, 16 hex digits.
pub fn dataset_id(dg: &DynamicGraph) -> String {
    let digest = Sha256::digest(to_json_string(dg).as_bytes());
    digest[..8].iter().map(|b| format!("{b:02x}")).collect()
}

impl DatasetManifest {
    pub fn describe(dg: &DynamicGraph) -> Self {
        let mut node = BTreeSet::new();
        let mut link = BTreeSet::new();
        let mut categories = BTreeSet::new();
        for s in dg.snapshots() {
            for n in s.graph.nodes() {
                node.extend(n.attrs.keys().map(str::to_owned));
                categories.extend(n.categories.keys().cloned());
            }
            for l in s.graph.links() {
                link.extend(l.attrs.keys().map(str::to_owned));
            }
        }
        let id = dataset_id(dg);
        Self {
            name: dg.name.clone().unwrap_or_else(|| id.clone()),
            id,
            directed: dg.directed(),
            labels: dg.labels().map(str::to_owned).collect(),
            node_counts: dg.snapshots().iter().map(|s| s.graph.node_count()).collect(),
            link_counts: dg.snapshots().iter().map(|s| s.graph.link_count()).collect(),
            aggregation: AggregationPolicy::Sum,
            attributes: AttributeSchema {
                node: node.into_iter().collect(),
                link: link.into_iter().collect(),
                categories: categories.into_iter().collect(),
            },
        }
    }
}
