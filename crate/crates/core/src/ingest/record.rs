use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::model::{EntityKind, LinkType};

/// Canonical field holding an identifier shared across sources.
pub const XREF_FIELD: &str = "xref_id";

/// Relation named by a source record, to be resolved after merging.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HintRelation {
    Link(LinkType),
    Parent,
    Head,
}

impl HintRelation {
    /// Parses the `@...` form used in field maps.
    pub fn from_target(target: &str) -> Option<Self> {
        match target.strip_prefix('@')? {
            "parent" => Some(HintRelation::Parent),
            "head" => Some(HintRelation::Head),
            other => other.parse().ok().map(HintRelation::Link),
        }
    }
}

impl fmt::Display for HintRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HintRelation::Link(t) => write!(f, "@{t}"),
            HintRelation::Parent => f.write_str("@parent"),
            HintRelation::Head => f.write_str("@head"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LinkHint {
    pub relation: HintRelation,
    /// Cross-reference id or name of the other entity.
    pub target: String,
}

/// One raw record from one source, with fields already renamed to
/// canonical names.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceRecord {
    pub source: String,
    pub source_local_id: String,
    pub kind: EntityKind,
    pub fields: BTreeMap<String, String>,
    pub link_hints: Vec<LinkHint>,
}

impl SourceRecord {
    /// Non-empty trimmed value of a field.
    pub fn value(&self, field: &str) -> Option<&str> {
        self.fields.get(field).map(|v| v.trim()).filter(|v| !v.is_empty())
    }

    pub fn name(&self) -> Option<&str> {
        self.value(name_field(self.kind))
    }

    pub fn xref(&self) -> Option<&str> {
        self.value(XREF_FIELD)
    }
}

/// The field that names an entity of `kind`.
pub fn name_field(kind: EntityKind) -> &'static str {
    match kind {
        EntityKind::Staff => "full_name",
        EntityKind::Project | EntityKind::Output => "title",
        EntityKind::Unit => "name",
        EntityKind::Theme => "label",
    }
}

/// Data fields merged into an entity of `kind`, name field first.
pub fn canonical_fields(kind: EntityKind) -> &'static [&'static str] {
    match kind {
        EntityKind::Staff => &["full_name", "email", "phone", "site", "bio", "interests"],
        EntityKind::Project => &[
            "title",
            "abstract",
            "overview",
            "background",
            "status",
            "milestones",
            "deliverables",
        ],
        EntityKind::Output => &["title", "abstract", "venue", "year", "doc_type", "documents"],
        EntityKind::Unit => &["name", "admin_contacts"],
        EntityKind::Theme => &["label", "facet"],
    }
}

pub(crate) fn is_canonical(kind: EntityKind, field: &str) -> bool {
    field == XREF_FIELD || canonical_fields(kind).contains(&field)
}
