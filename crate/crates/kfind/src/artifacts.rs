//! A loaded snapshot with everything derived from it.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use kfind_core::expertise::{build_profiles, ExpertiseProfile};
use kfind_core::search::{build_index, DocumentStore, Index};
use kfind_core::{EntityId, Graph, Violation};
use serde::{Deserialize, Serialize};

use crate::corpus::DirStore;
use crate::snapshot::{checksum, parse_snapshot, SnapshotError};

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Snapshot(#[from] SnapshotError),
    #[error("snapshot has {} integrity violation(s)", .0.len())]
    Invalid(Vec<Violation>),
}

/// Graph, index and profiles built from one snapshot file.
#[derive(Debug)]
pub struct ApiSnapshot {
    pub graph: Graph,
    pub index: Index,
    pub profiles: BTreeMap<EntityId, ExpertiseProfile>,
    /// RFC 3339 time this value was built.
    pub built_at: String,
    /// Hex SHA-256 of the snapshot bytes.
    pub checksum: String,
}

impl ApiSnapshot {
    /// Builds from snapshot bytes. Any integrity violation rejects the
    /// snapshot. `index` is reused when given, otherwise built from `store`.
    pub fn from_bytes(bytes: &[u8], store: &dyn DocumentStore, index: Option<Index>) -> Result<Self, LoadError> {
        let graph = parse_snapshot(bytes)?;
        let violations = graph.validate();
        if !violations.is_empty() {
            return Err(LoadError::Invalid(violations));
        }
        let index = index.unwrap_or_else(|| build_index(&graph, store));
        let profiles = build_profiles(&graph, &index);
        Ok(ApiSnapshot {
            graph,
            index,
            profiles,
            built_at: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true),
            checksum: checksum(bytes),
        })
    }

    /// Loads a snapshot file, reusing a cached index beside it when the
    /// cache was built from the same bytes.
    pub fn load(path: &Path, corpus_root: &Path) -> Result<Self, LoadError> {
        let bytes = fs::read(path).map_err(|source| LoadError::Io { path: path.into(), source })?;
        let cached = read_index_cache(&index_cache_path(path), &checksum(&bytes));
        Self::from_bytes(&bytes, &DirStore::new(corpus_root), cached)
    }
}

/// `<snapshot>.index.json`.
pub fn index_cache_path(snapshot: &Path) -> PathBuf {
    let mut name = snapshot.file_name().unwrap_or_default().to_os_string();
    name.push(".index.json");
    snapshot.with_file_name(name)
}

#[derive(Serialize, Deserialize)]
struct IndexCache {
    snapshot_checksum: String,
    index: Index,
}

pub fn write_index_cache(path: &Path, snapshot_checksum: &str, index: &Index) -> std::io::Result<()> {
    let cache = IndexCache { snapshot_checksum: snapshot_checksum.into(), index: index.clone() };
    fs::write(path, serde_json::to_vec(&cache).map_err(std::io::Error::other)?)
}

/// The cached index, if present, readable and built from `snapshot_checksum`.
pub fn read_index_cache(path: &Path, snapshot_checksum: &str) -> Option<Index> {
    let bytes = fs::read(path).ok()?;
    let cache: IndexCache = serde_json::from_slice(&bytes).ok()?;
    (cache.snapshot_checksum == snapshot_checksum).then_some(cache.index)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::snapshot::to_canonical_bytes;
    use kfind_core::fixtures::{demo_documents, demo_org};

    #[test]
    fn index_cache_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let g = demo_org();
        let index = build_index(&g, &demo_documents());
        let path = dir.path().join("x.index.json");
        write_index_cache(&path, "abc", &index).unwrap();
        assert_eq!(read_index_cache(&path, "abc"), Some(index));
        assert_eq!(read_index_cache(&path, "def"), None);
        assert_eq!(index_cache_path(Path::new("/a/org.jsonl")), Path::new("/a/org.jsonl.index.json"));
    }

    #[test]
    fn rejects_invalid_graph() {
        let mut bytes = to_canonical_bytes(&demo_org());
        bytes.extend_from_slice(b"{\"from\":\"staff:s1\",\"record\":\"link\",\"to\":\"project:ghost\",\"type\":\"contributes_to\"}\n");
        match ApiSnapshot::from_bytes(&bytes, &demo_documents(), None) {
            Err(LoadError::Invalid(v)) => assert_eq!(v.len(), 1),
            other => panic!("{other:?}"),
        }
        let ok = ApiSnapshot::from_bytes(&to_canonical_bytes(&demo_org()), &demo_documents(), None).unwrap();
        assert_eq!(ok.index.doc_count(), 10);
        assert_eq!(ok.checksum.len(), 64);
    }
}
