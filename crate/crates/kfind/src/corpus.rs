use std::fs;
use std::path::{Component, Path, PathBuf};

use kfind_core::search::DocumentStore;

/// Attached documents stored as UTF-8 files under one directory.
#[derive(Debug, Clone)]
pub struct DirStore {
    root: PathBuf,
}

impl DirStore {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        DirStore { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn resolve(&self, path: &str) -> Option<PathBuf> {
        let rel = Path::new(path);
        rel.components()
            .all(|c| matches!(c, Component::Normal(_)))
            .then(|| self.root.join(rel))
    }
}

impl DocumentStore for DirStore {
    fn read(&self, path: &str) -> Option<String> {
        fs::read_to_string(self.resolve(path)?).ok()
    }

    fn exists(&self, path: &str) -> bool {
        self.resolve(path).is_some_and(|p| p.is_file())
    }
}
