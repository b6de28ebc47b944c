//! Content-addressed dataset directory plus session files.
//!
//! ```text
//! <root>/datasets/<id>/graph.json
//! <root>/datasets/<id>/manifest.json
//! <root>/sessions/<id>.json
//! ```

use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;

use super::{from_json_str, to_json_string, DatasetManifest, IoError};
use crate::graph::DynamicGraph;

pub const DATA_DIR_ENV: &str = "DGCOMICS_DATA_DIR";

#[derive(Debug, Clone)]
pub struct DatasetStore {
    root: PathBuf,
}

fn safe_id(id: &str) -> bool {
    !id.is_empty() && id.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
}

fn write(path: &Path, text: &str) -> Result<(), IoError> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(IoError::file(dir))?;
    }
    // write-then-rename so readers never see a half-written file
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, text).map_err(IoError::file(&tmp))?;
    std::fs::rename(&tmp, path).map_err(IoError::file(path))
}

impl DatasetStore {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Self { root: root.into() }
    }

    /// Store rooted at `$DGCOMICS_DATA_DIR`, or `./dgcomics-data`.
    pub fn from_env() -> Self {
        Self::new(std::env::var_os(DATA_DIR_ENV).map_or_else(|| PathBuf::from("dgcomics-data"), PathBuf::from))
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn dataset_dir(&self, id: &str) -> Result<PathBuf, IoError> {
        if !safe_id(id) {
            return Err(IoError::UnknownDataset(id.to_owned()));
        }
        Ok(self.root.join("datasets").join(id))
    }

    pub fn put(&self, dg: &DynamicGraph) -> Result<DatasetManifest, IoError> {
        let manifest = DatasetManifest::describe(dg);
        let dir = self.dataset_dir(&manifest.id)?;
        write(&dir.join("graph.json"), &to_json_string(dg))?;
        let text = serde_json::to_string_pretty(&manifest).expect("manifest serialises");
        write(&dir.join("manifest.json"), &text)?;
        Ok(manifest)
    }

    pub fn get(&self, id: &str) -> Result<DynamicGraph, IoError> {
        let path = self.dataset_dir(id)?.join("graph.json");
        match std::fs::read_to_string(&path) {
            Ok(text) => from_json_str(&text),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Err(IoError::UnknownDataset(id.to_owned())),
            Err(e) => Err(IoError::file(path)(e)),
        }
    }

    pub fn manifest(&self, id: &str) -> Result<DatasetManifest, IoError> {
        Ok(DatasetManifest::describe(&self.get(id)?))
    }

    /// Manifests of every stored dataset, ordered by id.
    pub fn list(&self) -> Result<Vec<DatasetManifest>, IoError> {
        let dir = self.root.join("datasets");
        let entries = match std::fs::read_dir(&dir) {
            Ok(e) => e,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
            Err(e) => return Err(IoError::file(dir)(e)),
        };
        let mut ids: Vec<String> = entries
            .filter_map(|e| e.ok()?.file_name().into_string().ok())
            .filter(|id| safe_id(id))
            .collect();
        ids.sort();
        ids.iter().map(|id| self.manifest(id)).collect()
    }

    fn session_path(&self, id: &str) -> Option<PathBuf> {
        safe_id(id).then(|| self.root.join("sessions").join(format!("{id}.json")))
    }

    pub fn put_session<T: Serialize>(&self, id: &str, session: &T) -> Result<(), IoError> {
        let path = self
            .session_path(id)
            .ok_or_else(|| IoError::Json {
                path: "id".into(),
                message: format!("invalid session id `{id}`"),
            })?;
        write(&path, &serde_json::to_string_pretty(session).expect("session serialises"))
    }

    /// `Ok(None)` when no session file exists.
    pub fn get_session<T: DeserializeOwned>(&self, id: &str) -> Result<Option<T>, IoError> {
        let Some(path) = self.session_path(id) else {
            return Ok(None);
        };
        match std::fs::read_to_string(&path) {
            Ok(text) => serde_json::from_str(&text).map(Some).map_err(|e| IoError::Json {
                path: path.display().to_string(),
                message: e.to_string(),
            }),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(IoError::file(path)(e)),
        }
    }

    /// Ids of every persisted session.
    pub fn session_ids(&self) -> Vec<String> {
        let Ok(entries) = std::fs::read_dir(self.root.join("sessions")) else {
            return Vec::new();
        };
        let mut ids: Vec<String> = entries
            .filter_map(|e| {
                let name = e.ok()?.file_name().into_string().ok()?;
                name.strip_suffix(".json").map(str::to_owned)
            })
            .collect();
        ids.sort();
        ids
    }
}
