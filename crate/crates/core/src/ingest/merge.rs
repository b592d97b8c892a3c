use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::Serialize;

use super::cluster::member_key;
use super::record::{canonical_fields, name_field, SourceRecord};
use super::{IngestError, SourceConfig};
use crate::model::{
    is_iso_date, DocType, Document, EntityId, EntityKind, EntityRecord, Facet, Milestone, Output,
    Project, ProjectStatus, Staff, Theme, Unit,
};

/// A field where a lower-priority source disagreed with the chosen value.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Conflict {
    pub entity: EntityId,
    pub field: String,
    pub chosen_source: String,
    pub chosen_value: String,
    pub losing_source: String,
    pub losing_value: String,
}

/// A source value that could not be parsed for its field and was ignored.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct InvalidValue {
    pub entity: EntityId,
    pub field: String,
    pub source: String,
    pub source_local_id: String,
    pub value: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MergedEntity {
    pub record: EntityRecord,
    /// Winning source per populated field.
    pub provenance: BTreeMap<String, String>,
    pub conflicts: Vec<Conflict>,
    pub invalid_values: Vec<InvalidValue>,
}

/// Merges one cluster into a single entity with local id `local_id`.
///
/// Each field takes the first valid non-empty value in priority order.
/// Every other distinct valid value is recorded as one conflict; values
/// compare by their canonical form, so "Active" and "active" agree.
pub fn merge_cluster(
    cluster: &[SourceRecord],
    config: &SourceConfig,
    local_id: &str,
) -> Result<MergedEntity, IngestError> {
    let first = cluster.first().ok_or(IngestError::EmptyCluster)?;
    let kind = first.kind;
    if let Some(other) = cluster.iter().find(|r| r.kind != kind) {
        return Err(IngestError::MixedKindCluster(kind, other.kind));
    }
    if let Some(r) = cluster.iter().find(|r| config.rank(&r.source).is_none()) {
        return Err(IngestError::UnknownSource(r.source.clone()));
    }
    let id = EntityId::new(kind, local_id).map_err(|e| IngestError::Config(e.to_string()))?;
    let mut members: Vec<&SourceRecord> = cluster.iter().collect();
    members.sort_by(|a, b| member_key(config, a).cmp(&member_key(config, b)));

    let mut chosen: BTreeMap<&'static str, String> = BTreeMap::new();
    let mut provenance = BTreeMap::new();
    let mut conflicts = Vec::new();
    let mut invalid_values = Vec::new();
    for &field in canonical_fields(kind) {
        let mut winner: Option<(&SourceRecord, String)> = None;
        let mut seen = BTreeSet::new();
        for m in &members {
            let Some(raw) = m.value(field) else { continue };
            let value = match canonical_value(kind, field, raw) {
                Ok(Some(v)) => v,
                Ok(None) => continue,
                Err(reason) => {
                    invalid_values.push(InvalidValue {
                        entity: id.clone(),
                        field: field.into(),
                        source: m.source.clone(),
                        source_local_id: m.source_local_id.clone(),
                        value: raw.into(),
                        reason,
                    });
                    continue;
                }
            };
            if !seen.insert(value.clone()) {
                continue;
            }
            match &winner {
                None => winner = Some((m, value)),
                Some((w, chosen_value)) => conflicts.push(Conflict {
                    entity: id.clone(),
                    field: field.into(),
                    chosen_source: w.source.clone(),
                    chosen_value: chosen_value.clone(),
                    losing_source: m.source.clone(),
                    losing_value: value,
                }),
            }
        }
        if let Some((w, value)) = winner {
            provenance.insert(field.to_string(), w.source.clone());
            chosen.insert(field, value);
        }
    }
    if !chosen.contains_key(name_field(kind)) {
        return Err(IngestError::MissingRequired { kind, field: name_field(kind) });
    }
    let record = build(id, &chosen);
    record.validate().map_err(|e| IngestError::Config(e.to_string()))?;
    Ok(MergedEntity { record, provenance, conflicts, invalid_values })
}

fn split_list(raw: &str) -> impl Iterator<Item = &str> {
    raw.split(';').map(str::trim).filter(|s| !s.is_empty())
}

fn join_list<I: IntoIterator<Item = String>>(items: I) -> Option<String> {
    let items: Vec<String> = items.into_iter().collect();
    (!items.is_empty()).then(|| items.join(";"))
}

/// A relative path without `..` segments or backslashes.
pub(crate) fn is_safe_path(path: &str) -> bool {
    !path.is_empty()
        && !path.starts_with('/')
        && !path.contains('\\')
        && !path.contains(':')
        && path.split('/').all(|seg| !seg.is_empty() && seg != "." && seg != "..")
}

fn guess_media_type(path: &str) -> &'static str {
    let ext = path.rsplit_once('.').map(|(_, e)| e.to_ascii_lowercase());
    match ext.as_deref() {
        Some("txt") => "text/plain",
        Some("md") => "text/markdown",
        Some("html") | Some("htm") => "text/html",
        Some("pdf") => "application/pdf",
        Some("csv") => "text/csv",
        Some("json") => "application/json",
        _ => "application/octet-stream",
    }
}

/// Canonical text of one field value; `Ok(None)` when it holds nothing.
fn canonical_value(kind: EntityKind, field: &str, raw: &str) -> Result<Option<String>, String> {
    let raw = raw.trim();
    let value = match (kind, field) {
        (EntityKind::Project, "status") => ProjectStatus::parse(raw)
            .ok_or_else(|| format!("unknown status `{raw}`"))?
            .as_str()
            .to_string(),
        (EntityKind::Project, "milestones") => {
            let mut out = Vec::new();
            for entry in split_list(raw) {
                let (name, date) = entry
                    .rsplit_once('@')
                    .ok_or_else(|| format!("milestone `{entry}` is not name@YYYY-MM-DD"))?;
                let (name, date) = (name.trim(), date.trim());
                if name.is_empty() || !is_iso_date(date) {
                    return Err(format!("milestone `{entry}` is not name@YYYY-MM-DD"));
                }
                out.push(format!("{name}@{date}"));
            }
            return Ok(join_list(out));
        }
        (EntityKind::Project, "deliverables") | (EntityKind::Unit, "admin_contacts") => {
            return Ok(join_list(split_list(raw).map(String::from)));
        }
        (EntityKind::Output, "year") => {
            let year: i32 = raw.parse().map_err(|_| format!("`{raw}` is not a year"))?;
            if !(1..=9999).contains(&year) {
                return Err(format!("year {year} out of range"));
            }
            year.to_string()
        }
        (EntityKind::Output, "doc_type") => DocType::parse(raw)
            .ok_or_else(|| format!("unknown document type `{raw}`"))?
            .as_str()
            .to_string(),
        (EntityKind::Output, "documents") => {
            let mut out = Vec::new();
            for entry in split_list(raw) {
                let (path, media) = match entry.split_once('|') {
                    Some((p, m)) => (p.trim(), m.trim()),
                    None => (entry, ""),
                };
                if !is_safe_path(path) {
                    return Err(format!("unsafe document path `{path}`"));
                }
                let media = if media.is_empty() { guess_media_type(path) } else { media };
                out.push(format!("{path}|{media}"));
            }
            return Ok(join_list(out));
        }
        (EntityKind::Theme, "facet") => Facet::parse(raw)
            .ok_or_else(|| format!("unknown facet `{raw}`"))?
            .as_str()
            .to_string(),
        (EntityKind::Theme, "label") if raw.contains('/') => {
            return Err("label must not contain '/'".into());
        }
        _ => raw.to_string(),
    };
    Ok((!value.is_empty()).then_some(value))
}

fn build(id: EntityId, f: &BTreeMap<&'static str, String>) -> EntityRecord {
    let text = |k: &str| f.get(k).cloned();
    let list = |k: &str| -> Vec<String> {
        f.get(k).map(|v| split_list(v).map(String::from).collect()).unwrap_or_default()
    };
    let name = |k: &str| f.get(k).cloned().unwrap_or_default();
    match id.kind() {
        EntityKind::Staff => EntityRecord::Staff(Staff {
            full_name: name("full_name"),
            email: text("email"),
            phone: text("phone"),
            site: text("site"),
            bio: text("bio"),
            interests: text("interests"),
            id,
        }),
        EntityKind::Project => EntityRecord::Project(Project {
            title: name("title"),
            abstract_text: text("abstract"),
            overview: text("overview"),
            background: text("background"),
            milestones: list("milestones")
                .into_iter()
                .filter_map(|m| {
                    let (name, date) = m.rsplit_once('@')?;
                    Some(Milestone { name: name.into(), date: date.into() })
                })
                .collect(),
            deliverables: list("deliverables"),
            status: f
                .get("status")
                .and_then(|s| ProjectStatus::parse(s))
                .unwrap_or(ProjectStatus::Active),
            id,
        }),
        EntityKind::Output => EntityRecord::Output(Output {
            title: name("title"),
            abstract_text: text("abstract"),
            venue: text("venue"),
            year: f.get("year").and_then(|y| y.parse().ok()),
            doc_type: f.get("doc_type").and_then(|d| DocType::parse(d)).unwrap_or(DocType::Other),
            documents: list("documents")
                .into_iter()
                .map(|d| {
                    let (path, media) = d.split_once('|').unwrap_or((d.as_str(), ""));
                    Document { path: path.into(), media_type: media.into() }
                })
                .collect(),
            id,
        }),
        EntityKind::Unit => EntityRecord::Unit(Unit {
            name: name("name"),
            parent: None,
            head: None,
            admin_contacts: list("admin_contacts"),
            id,
        }),
        EntityKind::Theme => EntityRecord::Theme(Theme {
            label: name("label"),
            facet: f.get("facet").and_then(|x| Facet::parse(x)).unwrap_or(Facet::ScienceTech),
            parent: None,
            id,
        }),
    }
}

/// Renders a merged entity back into a source record carrying its canonical
/// field values. Parent and head are not included; they come from hints.
pub fn as_source_record(entity: &EntityRecord, source: &str) -> SourceRecord {
    let mut fields = BTreeMap::new();
    let mut put = |k: &str, v: Option<String>| {
        if let Some(v) = v.filter(|v| !v.is_empty()) {
            fields.insert(k.to_string(), v);
        }
    };
    match entity {
        EntityRecord::Staff(s) => {
            put("full_name", Some(s.full_name.clone()));
            put("email", s.email.clone());
            put("phone", s.phone.clone());
            put("site", s.site.clone());
            put("bio", s.bio.clone());
            put("interests", s.interests.clone());
        }
        EntityRecord::Project(p) => {
            put("title", Some(p.title.clone()));
            put("abstract", p.abstract_text.clone());
            put("overview", p.overview.clone());
            put("background", p.background.clone());
            put("status", Some(p.status.as_str().into()));
            put(
                "milestones",
                join_list(p.milestones.iter().map(|m| format!("{}@{}", m.name, m.date))),
            );
            put("deliverables", join_list(p.deliverables.iter().cloned()));
        }
        EntityRecord::Output(o) => {
            put("title", Some(o.title.clone()));
            put("abstract", o.abstract_text.clone());
            put("venue", o.venue.clone());
            put("year", o.year.map(|y| y.to_string()));
            put("doc_type", Some(o.doc_type.as_str().into()));
            put(
                "documents",
                join_list(o.documents.iter().map(|d| format!("{}|{}", d.path, d.media_type))),
            );
        }
        EntityRecord::Unit(u) => {
            put("name", Some(u.name.clone()));
            put("admin_contacts", join_list(u.admin_contacts.iter().cloned()));
        }
        EntityRecord::Theme(t) => {
            put("label", Some(t.label.clone()));
            put("facet", Some(t.facet.as_str().into()));
        }
    }
    SourceRecord {
        source: source.into(),
        source_local_id: entity.id().local_id().into(),
        kind: entity.kind(),
        fields,
        link_hints: Vec::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    fn config() -> SourceConfig {
        SourceConfig {
            priority: vec!["hr".into(), "projects".into(), "library".into()],
            ..Default::default()
        }
    }

    fn rec(source: &str, id: &str, kind: EntityKind, fields: &[(&str, &str)]) -> SourceRecord {
        SourceRecord {
            source: source.into(),
            source_local_id: id.into(),
            kind,
            fields: fields.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect(),
            link_hints: vec![],
        }
    }

    #[test]
    fn priority_wins_and_conflicts_counted() {
        let cluster = [
            rec("library", "L1", EntityKind::Staff, &[("full_name", "A. Lovelace"), ("site", "Bath")]),
            rec("hr", "H1", EntityKind::Staff, &[("full_name", "Ada Lovelace"), ("email", "")]),
            rec("projects", "P1", EntityKind::Staff, &[("full_name", "Ada Lovelace"), ("email", "ada@x")]),
        ];
        let m = merge_cluster(&cluster, &config(), "s1").unwrap();
        let EntityRecord::Staff(s) = &m.record else { panic!() };
        assert_eq!(s.full_name, "Ada Lovelace");
        assert_eq!(s.email.as_deref(), Some("ada@x"));
        assert_eq!(s.site.as_deref(), Some("Bath"));
        assert_eq!(m.provenance["full_name"], "hr");
        assert_eq!(m.provenance["email"], "projects");
        // "Ada Lovelace" from projects agrees with hr; only the library spelling loses.
        assert_eq!(m.conflicts.len(), 1);
        assert_eq!(m.conflicts[0].losing_value, "A. Lovelace");
        assert_eq!(m.conflicts[0].losing_source, "library");
    }

    #[test]
    fn invalid_values_are_skipped() {
        let cluster = [
            rec("hr", "1", EntityKind::Project, &[("title", "Radar"), ("status", "ongoing")]),
            rec("library", "2", EntityKind::Project, &[("title", "Radar"), ("status", "COMPLETED")]),
        ];
        let m = merge_cluster(&cluster, &config(), "p1").unwrap();
        let EntityRecord::Project(p) = &m.record else { panic!() };
        assert_eq!(p.status, ProjectStatus::Completed);
        assert!(m.conflicts.is_empty());
        assert_eq!(m.invalid_values.len(), 1);
        assert_eq!(m.invalid_values[0].field, "status");
    }

    #[test]
    fn structured_fields() {
        let cluster = [rec(
            "hr",
            "1",
            EntityKind::Output,
            &[
                ("title", "T"),
                ("year", " 2005 "),
                ("doc_type", "Report"),
                ("documents", "docs/a.txt; docs/b.pdf|application/pdf"),
            ],
        )];
        let m = merge_cluster(&cluster, &config(), "o1").unwrap();
        let EntityRecord::Output(o) = &m.record else { panic!() };
        assert_eq!(o.year, Some(2005));
        assert_eq!(o.doc_type, DocType::Report);
        assert_eq!(o.documents[0].media_type, "text/plain");
        assert_eq!(o.documents[1].path, "docs/b.pdf");

        let bad = [rec("hr", "1", EntityKind::Output, &[("title", "T"), ("documents", "../etc/passwd")])];
        let m = merge_cluster(&bad, &config(), "o1").unwrap();
        assert_eq!(m.invalid_values.len(), 1);
    }

    #[test]
    fn errors() {
        assert_eq!(merge_cluster(&[], &config(), "x"), Err(IngestError::EmptyCluster));
        let mixed = [
            rec("hr", "1", EntityKind::Staff, &[("full_name", "A")]),
            rec("hr", "2", EntityKind::Unit, &[("name", "A")]),
        ];
        assert!(matches!(merge_cluster(&mixed, &config(), "x"), Err(IngestError::MixedKindCluster(..))));
        let nameless = [rec("hr", "1", EntityKind::Unit, &[("name", "  ")])];
        assert!(matches!(merge_cluster(&nameless, &config(), "x"), Err(IngestError::MissingRequired { .. })));
        let stranger = [rec("payroll", "1", EntityKind::Unit, &[("name", "U")])];
        assert!(matches!(merge_cluster(&stranger, &config(), "x"), Err(IngestError::UnknownSource(_))));
    }

    #[test]
    fn safe_paths() {
        assert!(is_safe_path("docs/o1.txt"));
        for p in ["", "/etc/x", "a/../b", "a//b", "c:\\x", "./a"] {
            assert!(!is_safe_path(p), "{p}");
        }
    }

    fn field_value() -> impl Strategy<Value = String> {
        prop_oneof![
            Just(String::new()),
            "[A-Za-z ]{1,12}",
            Just("active".into()),
            Just("Planned".into()),
            Just("bogus".into()),
            Just("2004".into()),
            Just("report".into()),
            Just("m1@2020-01-31;m2@2021-02-30".into()),
            Just("m1@2020-01-31".into()),
            Just("docs/a.txt;docs/b.md".into()),
            Just("x; y ;".into()),
        ]
    }

    fn arb_cluster() -> impl Strategy<Value = (EntityKind, Vec<SourceRecord>)> {
        (0usize..5, 1usize..5).prop_flat_map(|(k, n)| {
            let kind = EntityKind::ALL[k];
            let fields = canonical_fields(kind);
            let member = (0usize..3, prop::collection::vec(field_value(), fields.len()), "[a-z]{1,3}")
                .prop_map(move |(src, values, local)| {
                    let mut r = SourceRecord {
                        source: ["hr", "projects", "library"][src].into(),
                        source_local_id: local,
                        kind,
                        fields: fields.iter().map(|f| f.to_string()).zip(values).collect(),
                        link_hints: vec![],
                    };
                    r.fields.insert(name_field(kind).into(), "Name".into());
                    r
                });
            (Just(kind), prop::collection::vec(member, n))
        })
    }

    proptest! {
        // Conflicts equal, per field, the distinct valid values minus one.
        #[test]
        fn conflict_accounting((kind, cluster) in arb_cluster()) {
            let m = merge_cluster(&cluster, &config(), "x1").unwrap();
            let mut expected = 0;
            for &field in canonical_fields(kind) {
                let distinct: BTreeSet<String> = cluster
                    .iter()
                    .filter_map(|r| r.value(field))
                    .filter_map(|v| canonical_value(kind, field, v).ok().flatten())
                    .collect();
                expected += distinct.len().saturating_sub(1);
            }
            prop_assert_eq!(m.conflicts.len(), expected);
        }

        #[test]
        fn remerge_is_identity((_kind, cluster) in arb_cluster()) {
            let m = merge_cluster(&cluster, &config(), "x1").unwrap();
            let mut again = cluster.clone();
            again.push(as_source_record(&m.record, "hr"));
            let mut cfg = config();
            cfg.priority.insert(0, "merged".into());
            again.last_mut().unwrap().source = "merged".into();
            let m2 = merge_cluster(&again, &cfg, "x1").unwrap();
            prop_assert_eq!(m2.record, m.record);
        }
    }
}
