use std::path::{Path, PathBuf};

use super::StoreError;

/// `models/<kind>/<version-id>.json` layout.
#[derive(Debug, Clone)]
pub struct ModelDir {
    root: PathBuf,
}

impl ModelDir {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        ModelDir { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn path_of(&self, kind: &str, id: &str) -> PathBuf {
        self.root.join(kind).join(format!("{id}.json"))
    }

    pub fn write(&self, kind: &str, id: &str, json: &str) -> Result<PathBuf, StoreError> {
        let path = self.path_of(kind, id);
        let io_err = |source| StoreError::Io { path: path.clone(), source };
        std::fs::create_dir_all(path.parent().expect("model path has a parent")).map_err(io_err)?;
        std::fs::write(&path, json).map_err(io_err)?;
        Ok(path)
    }

    pub fn read(&self, kind: &str, id: &str) -> Result<String, StoreError> {
        let path = self.path_of(kind, id);
        std::fs::read_to_string(&path).map_err(|source| StoreError::Io { path, source })
    }
}
