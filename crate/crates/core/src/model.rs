//! Entity and link types of the organisational graph.

use alloc::borrow::ToOwned;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// The five kinds of entity held by the graph.
///
/// Variants are declared in alphabetical order of their names so that the
/// derived ordering of [`EntityId`] matches the ordering of its canonical text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntityKind {
    Output,
    Project,
    Staff,
    Theme,
    Unit,
}

impl EntityKind {
    pub const ALL: [EntityKind; 5] = [
        EntityKind::Output,
        EntityKind::Project,
        EntityKind::Staff,
        EntityKind::Theme,
        EntityKind::Unit,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            EntityKind::Output => "output",
            EntityKind::Project => "project",
            EntityKind::Staff => "staff",
            EntityKind::Theme => "theme",
            EntityKind::Unit => "unit",
        }
    }

    /// Prefix used for sequentially assigned local ids during ingest.
    pub fn id_prefix(self) -> &'static str {
        match self {
            EntityKind::Output => "o",
            EntityKind::Project => "p",
            EntityKind::Staff => "s",
            EntityKind::Theme => "t",
            EntityKind::Unit => "u",
        }
    }
}

impl fmt::Display for EntityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EntityKind {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        EntityKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| ModelError::UnknownKind(s.to_owned()))
    }
}

/// Identity of an entity, rendered canonically as `<kind>:<local_id>`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EntityId {
    kind: EntityKind,
    local_id: String,
}

impl EntityId {
    pub fn new(kind: EntityKind, local_id: impl Into<String>) -> Result<Self, ModelError> {
        let local_id = local_id.into();
        if local_id.is_empty() || local_id.chars().any(char::is_whitespace) {
            return Err(ModelError::InvalidId(local_id));
        }
        Ok(EntityId { kind, local_id })
    }

    pub fn kind(&self) -> EntityKind {
        self.kind
    }

    /// Sorts before every valid id; only used as a range bound.
    pub(crate) fn floor() -> Self {
        EntityId {
            kind: EntityKind::Output,
            local_id: String::new(),
        }
    }

    pub fn local_id(&self) -> &str {
        &self.local_id
    }
}

impl fmt::Display for EntityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.kind, self.local_id)
    }
}

impl FromStr for EntityId {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (kind, local) = s
            .split_once(':')
            .ok_or_else(|| ModelError::InvalidId(s.to_owned()))?;
        EntityId::new(kind.parse()?, local)
    }
}

impl Serialize for EntityId {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for EntityId {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("unknown entity kind `{0}`")]
    UnknownKind(String),
    #[error("invalid entity id `{0}`")]
    InvalidId(String),
    #[error("unknown link type `{0}`")]
    UnknownLinkType(String),
    #[error("{entity}: field `{field}`: {message}")]
    InvalidField {
        entity: String,
        field: &'static str,
        message: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProjectStatus {
    Planned,
    Active,
    Completed,
}

impl ProjectStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            ProjectStatus::Planned => "planned",
            ProjectStatus::Active => "active",
            ProjectStatus::Completed => "completed",
        }
    }

    pub fn parse(text: &str) -> Option<Self> {
        match text.trim().to_lowercase().as_str() {
            "planned" => Some(ProjectStatus::Planned),
            "active" => Some(ProjectStatus::Active),
            "completed" => Some(ProjectStatus::Completed),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DocType {
    Report,
    Paper,
    Presentation,
    Design,
    Dataset,
    Other,
}

impl DocType {
    pub const ALL: [DocType; 6] = [
        DocType::Report,
        DocType::Paper,
        DocType::Presentation,
        DocType::Design,
        DocType::Dataset,
        DocType::Other,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            DocType::Report => "report",
            DocType::Paper => "paper",
            DocType::Presentation => "presentation",
            DocType::Design => "design",
            DocType::Dataset => "dataset",
            DocType::Other => "other",
        }
    }

    pub fn parse(text: &str) -> Option<Self> {
        let text = text.trim().to_lowercase();
        DocType::ALL.into_iter().find(|d| d.as_str() == text)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Facet {
    ScienceTech,
    Client,
}

impl Facet {
    pub fn as_str(self) -> &'static str {
        match self {
            Facet::ScienceTech => "science_tech",
            Facet::Client => "client",
        }
    }

    pub fn parse(text: &str) -> Option<Self> {
        match text.trim().to_lowercase().as_str() {
            "science_tech" | "st" => Some(Facet::ScienceTech),
            "client" => Some(Facet::Client),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Milestone {
    pub name: String,
    /// ISO-8601 calendar date, `YYYY-MM-DD`.
    pub date: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    /// Path relative to the corpus root.
    pub path: String,
    pub media_type: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Staff {
    pub id: EntityId,
    pub full_name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub email: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phone: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub site: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bio: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interests: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Project {
    pub id: EntityId,
    pub title: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub abstract_text: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub overview: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub background: Option<String>,
    #[serde(default)]
    pub milestones: Vec<Milestone>,
    #[serde(default)]
    pub deliverables: Vec<String>,
    pub status: ProjectStatus,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Output {
    pub id: EntityId,
    pub title: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub abstract_text: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub venue: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub year: Option<i32>,
    pub doc_type: DocType,
    #[serde(default)]
    pub documents: Vec<Document>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Unit {
    pub id: EntityId,
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parent: Option<EntityId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub head: Option<EntityId>,
    #[serde(default)]
    pub admin_contacts: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Theme {
    pub id: EntityId,
    pub label: String,
    pub facet: Facet,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parent: Option<EntityId>,
}

/// One entity of the graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EntityRecord {
    Output(Output),
    Project(Project),
    Staff(Staff),
    Theme(Theme),
    Unit(Unit),
}

impl EntityRecord {
    pub fn id(&self) -> &EntityId {
        match self {
            EntityRecord::Output(e) => &e.id,
            EntityRecord::Project(e) => &e.id,
            EntityRecord::Staff(e) => &e.id,
            EntityRecord::Theme(e) => &e.id,
            EntityRecord::Unit(e) => &e.id,
        }
    }

    pub fn kind(&self) -> EntityKind {
        self.id().kind()
    }

    /// Name shown for the entity in panels and result lists.
    pub fn display_title(&self) -> &str {
        match self {
            EntityRecord::Output(e) => &e.title,
            EntityRecord::Project(e) => &e.title,
            EntityRecord::Staff(e) => &e.full_name,
            EntityRecord::Theme(e) => &e.label,
            EntityRecord::Unit(e) => &e.name,
        }
    }

    /// The parent reference of units and themes.
    pub fn parent(&self) -> Option<&EntityId> {
        match self {
            EntityRecord::Theme(t) => t.parent.as_ref(),
            EntityRecord::Unit(u) => u.parent.as_ref(),
            _ => None,
        }
    }

    /// Free-text fields searched by the index, in a fixed order.
    ///
    /// Attached document text of outputs is not included; it is read through
    /// a [`crate::search::DocumentStore`].
    pub fn text_fields(&self) -> Vec<(&'static str, &str)> {
        let fields: Vec<(&'static str, Option<&str>)> = match self {
            EntityRecord::Staff(s) => vec![
                ("full_name", Some(s.full_name.as_str())),
                ("bio", s.bio.as_deref()),
                ("interests", s.interests.as_deref()),
            ],
            EntityRecord::Project(p) => vec![
                ("title", Some(p.title.as_str())),
                ("abstract", p.abstract_text.as_deref()),
                ("overview", p.overview.as_deref()),
                ("background", p.background.as_deref()),
            ],
            EntityRecord::Output(o) => vec![
                ("title", Some(o.title.as_str())),
                ("abstract", o.abstract_text.as_deref()),
            ],
            EntityRecord::Unit(u) => vec![("name", Some(u.name.as_str()))],
            EntityRecord::Theme(t) => vec![("label", Some(t.label.as_str()))],
        };
        fields
            .into_iter()
            .filter_map(|(name, v)| v.filter(|v| !v.is_empty()).map(|v| (name, v)))
            .collect()
    }

    /// Checks the per-type invariants that do not depend on other entities.
    pub fn validate(&self) -> Result<(), ModelError> {
        let invalid = |field: &'static str, message: &str| ModelError::InvalidField {
            entity: self.id().to_string(),
            field,
            message: message.to_owned(),
        };
        let required = |field: &'static str, value: &str| {
            if value.trim().is_empty() {
                Err(invalid(field, "must not be empty"))
            } else {
                Ok(())
            }
        };
        match self {
            EntityRecord::Staff(s) => required("full_name", &s.full_name),
            EntityRecord::Project(p) => {
                required("title", &p.title)?;
                for m in &p.milestones {
                    if !is_iso_date(&m.date) {
                        return Err(invalid("milestones", "date is not a valid YYYY-MM-DD date"));
                    }
                }
                Ok(())
            }
            EntityRecord::Output(o) => {
                required("title", &o.title)?;
                if o.documents.iter().any(|d| d.path.trim().is_empty()) {
                    return Err(invalid("documents", "empty document path"));
                }
                Ok(())
            }
            EntityRecord::Unit(u) => required("name", &u.name),
            EntityRecord::Theme(t) => {
                required("label", &t.label)?;
                if t.label.contains('/') {
                    return Err(invalid("label", "must not contain '/'"));
                }
                Ok(())
            }
        }
    }
}

/// Typed, directed edge kinds.
///
/// Declared in alphabetical order so the derived ordering of
/// [`LinkRecord`] equals ordering by `(type name, from, to)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinkType {
    Authored,
    ContributesTo,
    MemberOf,
    ProducedBy,
    RelatedTo,
    Tagged,
    TaskedTo,
}

impl LinkType {
    pub const ALL: [LinkType; 7] = [
        LinkType::Authored,
        LinkType::ContributesTo,
        LinkType::MemberOf,
        LinkType::ProducedBy,
        LinkType::RelatedTo,
        LinkType::Tagged,
        LinkType::TaskedTo,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            LinkType::Authored => "authored",
            LinkType::ContributesTo => "contributes_to",
            LinkType::MemberOf => "member_of",
            LinkType::ProducedBy => "produced_by",
            LinkType::RelatedTo => "related_to",
            LinkType::Tagged => "tagged",
            LinkType::TaskedTo => "tasked_to",
        }
    }

    /// Kinds allowed at the `from` end.
    pub fn from_kinds(self) -> &'static [EntityKind] {
        use EntityKind::*;
        match self {
            LinkType::ContributesTo | LinkType::Authored | LinkType::MemberOf => &[Staff],
            LinkType::ProducedBy => &[Output],
            LinkType::TaskedTo | LinkType::RelatedTo => &[Project],
            LinkType::Tagged => &[Output, Project, Staff],
        }
    }

    /// Kind required at the `to` end.
    pub fn to_kind(self) -> EntityKind {
        use EntityKind::*;
        match self {
            LinkType::ContributesTo | LinkType::ProducedBy | LinkType::RelatedTo => Project,
            LinkType::Authored => Output,
            LinkType::MemberOf | LinkType::TaskedTo => Unit,
            LinkType::Tagged => Theme,
        }
    }

    pub fn accepts(self, from: EntityKind, to: EntityKind) -> bool {
        self.from_kinds().contains(&from) && self.to_kind() == to
    }
}

impl fmt::Display for LinkType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LinkType {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        LinkType::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| ModelError::UnknownLinkType(s.to_owned()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LinkRecord {
    #[serde(rename = "type")]
    pub link_type: LinkType,
    pub from: EntityId,
    pub to: EntityId,
}

impl LinkRecord {
    pub fn new(link_type: LinkType, from: EntityId, to: EntityId) -> Self {
        LinkRecord { link_type, from, to }
    }
}

impl fmt::Display for LinkRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({} -> {})", self.link_type, self.from, self.to)
    }
}

/// Accepts exactly `YYYY-MM-DD` with a real calendar day.
pub fn is_iso_date(text: &str) -> bool {
    let b = text.as_bytes();
    if b.len() != 10 || b[4] != b'-' || b[7] != b'-' {
        return false;
    }
    let digits = |r: core::ops::Range<usize>| -> Option<u32> {
        text.get(r.clone())
            .filter(|s| s.bytes().all(|c| c.is_ascii_digit()))
            .and_then(|s| s.parse().ok())
    };
    let (Some(year), Some(month), Some(day)) = (digits(0..4), digits(5..7), digits(8..10)) else {
        return false;
    };
    let leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
    let days = match month {
        1 | 3 | 5 | 7 | 8 | 10 | 12 => 31,
        4 | 6 | 9 | 11 => 30,
        2 if leap => 29,
        2 => 28,
        _ => return false,
    };
    (1..=days).contains(&day)
}
