use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::record::{is_canonical, HintRelation, LinkHint, SourceRecord, XREF_FIELD};
use super::IngestError;
use crate::model::EntityKind;

/// Column mapping for one source.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldMap {
    /// Column holding the source's own record id.
    pub id_column: String,
    /// Column name to canonical field, `xref_id`, or an `@relation`.
    pub columns: BTreeMap<String, String>,
    /// Per-kind overrides of `columns`.
    pub kind_columns: BTreeMap<EntityKind, BTreeMap<String, String>>,
}

impl Default for FieldMap {
    fn default() -> Self {
        FieldMap {
            id_column: "id".into(),
            columns: BTreeMap::new(),
            kind_columns: BTreeMap::new(),
        }
    }
}

impl FieldMap {
    fn target(&self, kind: EntityKind, column: &str) -> Option<&str> {
        self.kind_columns
            .get(&kind)
            .and_then(|m| m.get(column))
            .or_else(|| self.columns.get(column))
            .map(String::as_str)
    }
}

/// Source priority, per-source column maps and the document root.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SourceConfig {
    /// Source names, most trusted first.
    pub priority: Vec<String>,
    pub field_maps: BTreeMap<String, FieldMap>,
    pub corpus_root: String,
}

impl SourceConfig {
    pub fn validate(&self) -> Result<(), IngestError> {
        let mut seen = BTreeSet::new();
        for s in &self.priority {
            if !seen.insert(s) {
                return Err(IngestError::Config(format!("source `{s}` listed twice in priority")));
            }
        }
        for (source, map) in &self.field_maps {
            if !seen.contains(source) {
                return Err(IngestError::Config(format!("source `{source}` has a field map but no priority")));
            }
            let all = map.columns.values().chain(map.kind_columns.values().flat_map(|m| m.values()));
            for target in all {
                let known = target == XREF_FIELD
                    || HintRelation::from_target(target).is_some()
                    || EntityKind::ALL.iter().any(|k| is_canonical(*k, target));
                if !known {
                    return Err(IngestError::Config(format!("source `{source}` maps to unknown field `{target}`")));
                }
            }
        }
        Ok(())
    }

    /// Position of `source` in the priority list.
    pub fn rank(&self, source: &str) -> Option<usize> {
        self.priority.iter().position(|s| s == source)
    }

    /// Maps one row of raw `(column, value)` pairs into a source record.
    ///
    /// Mapped columns take their canonical name; `@relation` columns become
    /// link hints (`;` separates several targets); anything else is kept
    /// under `x-<column>`. `line` is only used in error messages.
    pub fn map_row(
        &self,
        source: &str,
        kind: EntityKind,
        row: &[(String, String)],
        line: usize,
    ) -> Result<SourceRecord, IngestError> {
        let map = self
            .field_maps
            .get(source)
            .filter(|_| self.rank(source).is_some())
            .ok_or_else(|| IngestError::UnknownSource(source.to_string()))?;
        let mut local_id = None;
        let mut fields = BTreeMap::new();
        let mut link_hints = Vec::new();
        for (column, value) in row {
            if *column == map.id_column {
                local_id = Some(value.trim().to_string());
            }
            match map.target(kind, column) {
                Some(t) if is_canonical(kind, t) => {
                    fields.insert(t.to_string(), value.clone());
                }
                Some(t) if HintRelation::from_target(t).is_some() => {
                    let relation = HintRelation::from_target(t).expect("checked");
                    link_hints.extend(
                        value
                            .split(';')
                            .map(str::trim)
                            .filter(|v| !v.is_empty())
                            .map(|v| LinkHint { relation, target: v.to_string() }),
                    );
                }
                _ => {
                    if *column != map.id_column {
                        fields.insert(format!("x-{column}"), value.clone());
                    }
                }
            }
        }
        let source_local_id = local_id.filter(|s| !s.is_empty()).ok_or_else(|| IngestError::Parse {
            line,
            reason: format!("missing record id column `{}`", map.id_column),
        })?;
        Ok(SourceRecord {
            source: source.to_string(),
            source_local_id,
            kind,
            fields,
            link_hints,
        })
    }
}
