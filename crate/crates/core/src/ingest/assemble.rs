use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use serde::Serialize;

use super::cluster::{cluster_records, match_key, MatchKey};
use super::merge::{merge_cluster, Conflict, InvalidValue};
use super::normalize_name;
use super::record::{HintRelation, SourceRecord};
use super::{IngestError, SourceConfig};
use crate::graph::{Graph, Violation};
use crate::model::{EntityId, EntityKind, EntityRecord, LinkRecord};
use crate::search::DocumentStore;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UnmatchedHint {
    pub source: String,
    pub source_local_id: String,
    pub kind: EntityKind,
    pub relation: String,
    pub target: String,
    pub reason: String,
}

/// A cluster that produced no entity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DroppedCluster {
    pub kind: EntityKind,
    /// `source:source_local_id` of every member.
    pub members: Vec<String>,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MissingDocument {
    pub entity: EntityId,
    pub path: String,
}

/// Everything ingestion decided that is not visible in the graph itself.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct MergeReport {
    /// Number of merged entities emitted.
    pub clusters_formed: usize,
    pub conflicts_resolved: Vec<Conflict>,
    pub unmatched_link_hints: Vec<UnmatchedHint>,
    pub violations: Vec<Violation>,
    /// Winning source per field, per entity.
    pub provenance: BTreeMap<EntityId, BTreeMap<String, String>>,
    pub invalid_values: Vec<InvalidValue>,
    pub dropped_clusters: Vec<DroppedCluster>,
    pub missing_documents: Vec<MissingDocument>,
}

impl MergeReport {
    /// True when the graph passed integrity checks.
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Default)]
struct Lookup {
    xref: BTreeMap<(EntityKind, String), EntityId>,
    local: BTreeMap<(String, EntityKind, String), EntityId>,
    name: BTreeMap<MatchKey, EntityId>,
}

impl Lookup {
    fn add(&mut self, id: &EntityId, members: &[SourceRecord]) {
        for m in members {
            if let Some(x) = m.xref() {
                self.xref.insert((m.kind, x.to_string()), id.clone());
            }
            self.local
                .insert((m.source.clone(), m.kind, m.source_local_id.clone()), id.clone());
            if let Some(k) = match_key(m) {
                self.name.insert(k, id.clone());
            }
        }
    }

    /// Resolves `target` among `kinds`: by cross-reference id, then by the
    /// referring source's own record id, then by normalised name. The first
    /// rule with any match decides; more than one match is ambiguous.
    fn resolve(&self, source: &str, target: &str, kinds: &[EntityKind]) -> Result<EntityId, &'static str> {
        let target = target.trim();
        let key = normalize_name(target);
        for rule in 0..3 {
            let hits: BTreeSet<&EntityId> = kinds
                .iter()
                .filter_map(|&k| match rule {
                    0 => self.xref.get(&(k, target.to_string())),
                    1 => self.local.get(&(source.to_string(), k, target.to_string())),
                    _ => self.name.get(&MatchKey { kind: k, key: key.clone() }),
                })
                .collect();
            match hits.len() {
                0 => continue,
                1 => return Ok(hits.into_iter().next().expect("one").clone()),
                _ => return Err("ambiguous target"),
            }
        }
        Err("no matching entity")
    }
}

struct Resolved {
    source: String,
    target: EntityId,
}

/// Clusters, merges and links `records` into a graph.
///
/// Fails only on configuration problems. Data problems (unresolvable
/// relations, bad values, missing documents, integrity violations) are
/// reported and the offending piece is left out.
pub fn assemble(
    records: Vec<SourceRecord>,
    config: &SourceConfig,
    store: &dyn DocumentStore,
) -> Result<(Graph, MergeReport), IngestError> {
    config.validate()?;
    if let Some(r) = records.iter().find(|r| config.rank(&r.source).is_none()) {
        return Err(IngestError::UnknownSource(r.source.clone()));
    }
    let mut report = MergeReport::default();
    let mut seq: BTreeMap<EntityKind, usize> = BTreeMap::new();
    let mut merged: Vec<(EntityRecord, Vec<SourceRecord>)> = Vec::new();
    let mut lookup = Lookup::default();

    for cluster in cluster_records(records, config) {
        let kind = cluster[0].kind;
        let n = seq.get(&kind).copied().unwrap_or(0) + 1;
        let local = format!("{}{n}", kind.id_prefix());
        let mut m = match merge_cluster(&cluster, config, &local) {
            Ok(m) => m,
            Err(e @ IngestError::MissingRequired { .. }) => {
                report.dropped_clusters.push(DroppedCluster {
                    kind,
                    members: cluster
                        .iter()
                        .map(|r| format!("{}:{}", r.source, r.source_local_id))
                        .collect(),
                    reason: e.to_string(),
                });
                continue;
            }
            Err(e) => return Err(e),
        };
        seq.insert(kind, n);
        if let EntityRecord::Output(o) = &mut m.record {
            let id = o.id.clone();
            o.documents.retain(|d| {
                let ok = store.exists(&d.path);
                if !ok {
                    report.missing_documents.push(MissingDocument { entity: id.clone(), path: d.path.clone() });
                }
                ok
            });
        }
        lookup.add(m.record.id(), &cluster);
        report.provenance.insert(m.record.id().clone(), m.provenance);
        report.conflicts_resolved.extend(m.conflicts);
        report.invalid_values.extend(m.invalid_values);
        merged.push((m.record, cluster));
    }

    let mut links = BTreeSet::new();
    let mut parents: BTreeMap<EntityId, Vec<Resolved>> = BTreeMap::new();
    let mut heads: BTreeMap<EntityId, Vec<Resolved>> = BTreeMap::new();
    for (entity, members) in &merged {
        let me = entity.id();
        for m in members {
            for hint in &m.link_hints {
                let unmatched = |reason: &str| UnmatchedHint {
                    source: m.source.clone(),
                    source_local_id: m.source_local_id.clone(),
                    kind: m.kind,
                    relation: hint.relation.to_string(),
                    target: hint.target.clone(),
                    reason: reason.into(),
                };
                let (kinds, outgoing): (Vec<EntityKind>, bool) = match hint.relation {
                    HintRelation::Link(t) if t.from_kinds().contains(&m.kind) => (vec![t.to_kind()], true),
                    HintRelation::Link(t) if t.to_kind() == m.kind => (t.from_kinds().to_vec(), false),
                    HintRelation::Parent if matches!(m.kind, EntityKind::Unit | EntityKind::Theme) => {
                        (vec![m.kind], true)
                    }
                    HintRelation::Head if m.kind == EntityKind::Unit => (vec![EntityKind::Staff], true),
                    _ => {
                        report.unmatched_link_hints.push(unmatched("relation does not apply to this kind"));
                        continue;
                    }
                };
                let target = match lookup.resolve(&m.source, &hint.target, &kinds) {
                    Ok(t) if &t == me => {
                        report.unmatched_link_hints.push(unmatched("refers to itself"));
                        continue;
                    }
                    Ok(t) => t,
                    Err(reason) => {
                        report.unmatched_link_hints.push(unmatched(reason));
                        continue;
                    }
                };
                let resolved = Resolved { source: m.source.clone(), target };
                match hint.relation {
                    HintRelation::Link(t) => {
                        let (from, to) = if outgoing {
                            (me.clone(), resolved.target)
                        } else {
                            (resolved.target, me.clone())
                        };
                        links.insert(LinkRecord::new(t, from, to));
                    }
                    HintRelation::Parent => parents.entry(me.clone()).or_default().push(resolved),
                    HintRelation::Head => heads.entry(me.clone()).or_default().push(resolved),
                }
            }
        }
    }

    let mut graph = Graph::new();
    for (mut entity, _) in merged {
        let id = entity.id().clone();
        let parent = pick(&id, "parent", parents.remove(&id), &mut report);
        let head = pick(&id, "head", heads.remove(&id), &mut report);
        match &mut entity {
            EntityRecord::Unit(u) => {
                u.parent = parent;
                u.head = head;
            }
            EntityRecord::Theme(t) => t.parent = parent,
            _ => {}
        }
        graph.add_entity(entity).map_err(|e| IngestError::Config(e.to_string()))?;
    }
    for link in links {
        graph.add_link(link).map_err(|e| IngestError::Config(e.to_string()))?;
    }
    report.clusters_formed = graph.entity_count();
    report.violations = graph.validate();
    Ok((graph, report))
}

/// First resolution in priority order wins; each other distinct target is a
/// conflict.
fn pick(
    id: &EntityId,
    field: &str,
    candidates: Option<Vec<Resolved>>,
    report: &mut MergeReport,
) -> Option<EntityId> {
    let mut candidates = candidates?.into_iter();
    let first = candidates.next()?;
    let mut seen = BTreeSet::new();
    seen.insert(first.target.clone());
    for c in candidates {
        if seen.insert(c.target.clone()) {
            report.conflicts_resolved.push(Conflict {
                entity: id.clone(),
                field: field.into(),
                chosen_source: first.source.clone(),
                chosen_value: first.target.to_string(),
                losing_source: c.source,
                losing_value: c.target.to_string(),
            });
        }
    }
    report
        .provenance
        .entry(id.clone())
        .or_default()
        .insert(field.into(), first.source.clone());
    Some(first.target)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::ViolationCode;
    use crate::ingest::LinkHint;
    use crate::model::LinkType;
    use crate::search::NoDocuments;
    use alloc::vec;
    use proptest::prelude::*;

    fn config() -> SourceConfig {
        SourceConfig {
            priority: vec!["hr".into(), "projects".into(), "library".into()],
            ..Default::default()
        }
    }

    fn rec(source: &str, id: &str, kind: EntityKind, fields: &[(&str, &str)], hints: &[(HintRelation, &str)]) -> SourceRecord {
        SourceRecord {
            source: source.into(),
            source_local_id: id.into(),
            kind,
            fields: fields.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect(),
            link_hints: hints
                .iter()
                .map(|(relation, target)| LinkHint { relation: *relation, target: target.to_string() })
                .collect(),
        }
    }

    fn sample() -> Vec<SourceRecord> {
        let member = HintRelation::Link(LinkType::MemberOf);
        vec![
            rec("hr", "H1", EntityKind::Staff, &[("full_name", "Ada Lovelace"), ("xref_id", "E1")], &[(member, "U-B")]),
            rec("library", "L7", EntityKind::Staff, &[("full_name", "LOVELACE, Ada"), ("site", "Fern Hill")], &[]),
            rec("hr", "U1", EntityKind::Unit, &[("name", "Division A"), ("xref_id", "U-A")], &[]),
            rec("hr", "U2", EntityKind::Unit, &[("name", "Branch B"), ("xref_id", "U-B")], &[(HintRelation::Parent, "U-A"), (HintRelation::Head, "E1")]),
            rec("projects", "X9", EntityKind::Unit, &[("name", "branch b")], &[(HintRelation::Parent, "Branch B")]),
            rec("projects", "P1", EntityKind::Project, &[("title", "Radar"), ("status", "active")], &[(HintRelation::Link(LinkType::ContributesTo), "Ada Lovelace"), (HintRelation::Link(LinkType::TaskedTo), "U-Z")]),
            rec("library", "O1", EntityKind::Output, &[("title", "Trial Report"), ("documents", "docs/o1.txt;docs/gone.txt")], &[(HintRelation::Link(LinkType::ProducedBy), "P1"), (HintRelation::Link(LinkType::Authored), "L7")]),
            rec("library", "O2", EntityKind::Output, &[("abstract", "no title")], &[]),
        ]
    }

    fn docs() -> BTreeMap<String, String> {
        [("docs/o1.txt".to_string(), "text".to_string())].into_iter().collect()
    }

    #[test]
    fn builds_graph_and_report() {
        let (g, r) = assemble(sample(), &config(), &docs()).unwrap();
        let id = |s: &str| s.parse::<EntityId>().unwrap();
        assert_eq!(r.clusters_formed, 5);
        assert_eq!(g.entity_count(), 5);
        assert!(r.is_clean(), "{:?}", r.violations);
        let EntityRecord::Unit(b) = g.get(&id("unit:u2")).unwrap() else { panic!() };
        assert_eq!(b.parent, Some(id("unit:u1")));
        assert_eq!(b.head, Some(id("staff:s1")));
        assert!(g.has_link(&LinkRecord::new(LinkType::MemberOf, id("staff:s1"), id("unit:u2"))));
        // Incoming hints: the project names its contributor, the output its author.
        assert!(g.has_link(&LinkRecord::new(LinkType::ContributesTo, id("staff:s1"), id("project:p1"))));
        assert!(g.has_link(&LinkRecord::new(LinkType::Authored, id("staff:s1"), id("output:o1"))));
        assert_eq!(g.links().len(), 3);
        // "branch b" points its parent at its own cluster.
        let reasons: Vec<(&str, &str)> = r
            .unmatched_link_hints
            .iter()
            .map(|u| (u.target.as_str(), u.reason.as_str()))
            .collect();
        // A source's own record ids only resolve within that source, so the
        // library cannot reach the project by its id in another source.
        assert_eq!(
            reasons,
            vec![
                ("P1", "no matching entity"),
                ("U-Z", "no matching entity"),
                ("Branch B", "refers to itself"),
            ]
        );
        assert_eq!(r.missing_documents.len(), 1);
        assert_eq!(r.missing_documents[0].path, "docs/gone.txt");
        assert_eq!(r.dropped_clusters.len(), 1);
        assert_eq!(r.provenance[&id("staff:s1")]["site"], "library");
        assert_eq!(r.provenance[&id("unit:u2")]["parent"], "hr");
        let fields: Vec<&str> = r.conflicts_resolved.iter().map(|c| c.field.as_str()).collect();
        assert_eq!(fields, vec!["full_name", "name"]);
    }

    #[test]
    fn cycles_are_reported_not_rejected() {
        let p = HintRelation::Parent;
        let recs = vec![
            rec("hr", "1", EntityKind::Theme, &[("label", "A")], &[(p, "B")]),
            rec("hr", "2", EntityKind::Theme, &[("label", "B")], &[(p, "A")]),
        ];
        let (_, r) = assemble(recs, &config(), &NoDocuments).unwrap();
        assert_eq!(r.violations.len(), 2);
        assert!(r.violations.iter().all(|v| v.code == ViolationCode::CycleCreated));
    }

    #[test]
    fn parent_disagreement_is_a_conflict() {
        let p = HintRelation::Parent;
        let recs = vec![
            rec("hr", "1", EntityKind::Unit, &[("name", "Top")], &[]),
            rec("hr", "2", EntityKind::Unit, &[("name", "Other")], &[]),
            rec("hr", "3", EntityKind::Unit, &[("name", "Leaf")], &[(p, "Top")]),
            rec("library", "3", EntityKind::Unit, &[("name", "Leaf")], &[(p, "Other")]),
        ];
        let (g, r) = assemble(recs, &config(), &NoDocuments).unwrap();
        let leaf = g.entities_of(EntityKind::Unit).find(|e| e.display_title() == "Leaf").unwrap();
        let top = g.entities_of(EntityKind::Unit).find(|e| e.display_title() == "Top").unwrap();
        assert_eq!(leaf.parent(), Some(top.id()));
        assert_eq!(r.conflicts_resolved.len(), 1);
        assert_eq!(r.conflicts_resolved[0].losing_source, "library");
    }

    #[test]
    fn unknown_source_is_an_error() {
        let recs = vec![rec("payroll", "1", EntityKind::Unit, &[("name", "U")], &[])];
        assert_eq!(
            assemble(recs, &config(), &NoDocuments).unwrap_err(),
            IngestError::UnknownSource("payroll".into())
        );
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn input_order_does_not_matter(order in Just(sample()).prop_shuffle()) {
            let (g0, r0) = assemble(sample(), &config(), &docs()).unwrap();
            let (g1, r1) = assemble(order, &config(), &docs()).unwrap();
            prop_assert_eq!(g0, g1);
            prop_assert_eq!(r0, r1);
        }
    }
}
