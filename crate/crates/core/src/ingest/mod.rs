//! Reconciliation of per-source records into one graph.
//!
//! Records from every source are normalised, clustered into groups that
//! denote the same real-world entity, and merged field by field using a
//! global source priority. Relations named in the records are then resolved
//! against the merged entities. Anything that cannot be resolved is reported
//! rather than guessed.

mod assemble;
mod cluster;
mod config;
mod merge;
mod record;

pub use assemble::{
    assemble, DroppedCluster, MergeReport, MissingDocument, UnmatchedHint,
};
pub use cluster::{cluster_records, match_key, MatchKey};
pub use config::{FieldMap, SourceConfig};
pub use merge::{as_source_record, merge_cluster, Conflict, InvalidValue, MergedEntity};
pub use record::{canonical_fields, name_field, HintRelation, LinkHint, SourceRecord, XREF_FIELD};

use alloc::string::String;

use crate::model::EntityKind;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum IngestError {
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("unknown source `{0}`")]
    UnknownSource(String),
    #[error("configuration: {0}")]
    Config(String),
    #[error("cluster mixes {0} and {1} records")]
    MixedKindCluster(EntityKind, EntityKind),
    #[error("empty cluster")]
    EmptyCluster,
    #[error("{kind} record has no usable `{field}`")]
    MissingRequired { kind: EntityKind, field: &'static str },
}

/// Case-folds, turns punctuation into spaces and sorts the words, so
/// "LOVELACE, Ada" and "Ada Lovelace" share one key.
pub fn normalize_name(raw: &str) -> String {
    let mut tokens = crate::search::tokenize(raw);
    tokens.sort();
    tokens.join(" ")
}
