use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{normalize_value, tokenize, Bm25, DocumentStore};
use crate::graph::Graph;
use crate::model::{EntityId, EntityKind, EntityRecord, LinkType};
use crate::query::FieldName;
use crate::themes::descendants;
use crate::view::Direction;

/// Everything indexed for one entity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DocUnit {
    pub entity: EntityId,
    pub text_fields: BTreeMap<String, String>,
    pub structured_fields: BTreeMap<FieldName, BTreeSet<String>>,
    pub token_count: usize,
    pub term_freqs: BTreeMap<String, u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Posting {
    pub entity_ord: u32,
    pub term_frequency: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "warning", rename_all = "snake_case")]
pub enum IndexWarning {
    MissingDocument { entity: EntityId, path: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub(crate) struct ThemeEntry {
    pub label: String,
    pub parent: Option<EntityId>,
}

/// Immutable inverted index built from one graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Index {
    pub(crate) bm25: Bm25,
    /// Entity ids in canonical order; postings refer to positions here.
    pub(crate) entities: Vec<EntityId>,
    pub(crate) docs: Vec<DocUnit>,
    pub(crate) postings: BTreeMap<String, Vec<Posting>>,
    pub(crate) doc_freq: BTreeMap<String, u32>,
    pub(crate) avg_doc_len: f64,
    pub(crate) structured: BTreeMap<FieldName, BTreeMap<String, BTreeSet<EntityId>>>,
    pub(crate) theme_tags: BTreeMap<EntityId, BTreeSet<EntityId>>,
    pub(crate) themes: BTreeMap<EntityId, ThemeEntry>,
    pub(crate) warnings: Vec<IndexWarning>,
}

impl Index {
    pub fn doc_count(&self) -> usize {
        self.docs.len()
    }

    pub fn avg_doc_len(&self) -> f64 {
        self.avg_doc_len
    }

    pub fn bm25(&self) -> Bm25 {
        self.bm25
    }

    pub fn doc_freq(&self, term: &str) -> u32 {
        self.doc_freq.get(term).copied().unwrap_or(0)
    }

    pub fn idf(&self, term: &str) -> f64 {
        Bm25::idf(self.doc_count(), self.doc_freq(term))
    }

    pub fn doc(&self, id: &EntityId) -> Option<&DocUnit> {
        self.entities.binary_search(id).ok().map(|i| &self.docs[i])
    }

    pub fn docs(&self) -> impl Iterator<Item = &DocUnit> {
        self.docs.iter()
    }

    /// Entities containing `term`, with their term frequencies.
    pub fn postings(&self, term: &str) -> impl Iterator<Item = (&EntityId, u32)> {
        self.postings
            .get(term)
            .into_iter()
            .flatten()
            .map(|p| (&self.entities[p.entity_ord as usize], p.term_frequency))
    }

    pub fn structured_matches(&self, field: FieldName, value: &str) -> Option<&BTreeSet<EntityId>> {
        self.structured.get(&field)?.get(&normalize_value(value))
    }

    /// Entities tagged with the theme or any of its descendants.
    pub fn theme_members(&self, theme: &EntityId) -> Option<&BTreeSet<EntityId>> {
        self.theme_tags.get(theme)
    }

    pub fn resolve_theme(&self, reference: &str) -> Option<EntityId> {
        super::resolve_theme_ref(
            self.themes
                .iter()
                .map(|(id, t)| (id, t.label.as_str(), t.parent.as_ref())),
            reference,
        )
    }

    pub fn warnings(&self) -> &[IndexWarning] {
        &self.warnings
    }
}

/// Builds the index. Unreadable documents are skipped and reported as
/// warnings; the entity is still indexed from its metadata.
pub fn build_index(graph: &Graph, store: &dyn DocumentStore) -> Index {
    let units = unit_closure(graph);
    let mut warnings = Vec::new();
    let mut entities = Vec::new();
    let mut docs = Vec::new();

    for e in graph.entities() {
        let mut text_fields: BTreeMap<String, String> = e
            .text_fields()
            .into_iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect();
        if let EntityRecord::Output(o) = e {
            let mut body = Vec::new();
            for d in &o.documents {
                match store.read(&d.path) {
                    Some(text) => body.push(text),
                    None => warnings.push(IndexWarning::MissingDocument {
                        entity: o.id.clone(),
                        path: d.path.clone(),
                    }),
                }
            }
            if !body.is_empty() {
                text_fields.insert("documents".into(), body.join("\n"));
            }
        }
        let mut term_freqs = BTreeMap::new();
        let mut token_count = 0;
        for text in text_fields.values() {
            for tok in tokenize(text) {
                token_count += 1;
                *term_freqs.entry(tok).or_insert(0u32) += 1;
            }
        }
        entities.push(e.id().clone());
        docs.push(DocUnit {
            entity: e.id().clone(),
            text_fields,
            structured_fields: structured_fields(graph, e, &units),
            token_count,
            term_freqs,
        });
    }

    let mut postings: BTreeMap<String, Vec<Posting>> = BTreeMap::new();
    let mut structured: BTreeMap<FieldName, BTreeMap<String, BTreeSet<EntityId>>> = BTreeMap::new();
    for (ord, doc) in docs.iter().enumerate() {
        for (term, &tf) in &doc.term_freqs {
            postings.entry(term.clone()).or_default().push(Posting {
                entity_ord: ord as u32,
                term_frequency: tf,
            });
        }
        for (field, values) in &doc.structured_fields {
            for v in values {
                structured
                    .entry(*field)
                    .or_default()
                    .entry(v.clone())
                    .or_default()
                    .insert(doc.entity.clone());
            }
        }
    }
    let doc_freq = postings
        .iter()
        .map(|(t, p)| (t.clone(), p.len() as u32))
        .collect();
    let total: usize = docs.iter().map(|d| d.token_count).sum();
    let avg_doc_len = if docs.is_empty() { 0.0 } else { total as f64 / docs.len() as f64 };

    let mut theme_tags = BTreeMap::new();
    let mut themes = BTreeMap::new();
    for t in graph.entities_of(EntityKind::Theme) {
        let mut members = BTreeSet::new();
        for d in descendants(graph, t.id()) {
            members.extend(graph.neighbor_iter(&d, LinkType::Tagged, Direction::Incoming).cloned());
        }
        theme_tags.insert(t.id().clone(), members);
        themes.insert(
            t.id().clone(),
            ThemeEntry {
                label: t.display_title().into(),
                parent: t.parent().cloned(),
            },
        );
    }

    Index {
        bm25: Bm25::default(),
        entities,
        docs,
        postings,
        doc_freq,
        avg_doc_len,
        structured,
        theme_tags,
        themes,
        warnings,
    }
}

/// For every unit, the unit itself and all units below it.
fn unit_closure(graph: &Graph) -> BTreeMap<EntityId, BTreeSet<EntityId>> {
    graph
        .entities_of(EntityKind::Unit)
        .map(|u| (u.id().clone(), descendants(graph, u.id()).into_iter().collect()))
        .collect()
}

fn structured_fields(
    graph: &Graph,
    e: &EntityRecord,
    unit_closure: &BTreeMap<EntityId, BTreeSet<EntityId>>,
) -> BTreeMap<FieldName, BTreeSet<String>> {
    let mut out: BTreeMap<FieldName, BTreeSet<String>> = BTreeMap::new();
    let mut put = |field: FieldName, value: &str| {
        let v = normalize_value(value);
        if !v.is_empty() {
            out.entry(field).or_default().insert(v);
        }
    };
    let id = e.id();
    put(FieldName::Id, &id.to_string());
    put(FieldName::Id, id.local_id());
    put(FieldName::Type, id.kind().as_str());
    match e {
        EntityRecord::Staff(s) => {
            put(FieldName::Name, &s.full_name);
            if let Some(site) = &s.site {
                put(FieldName::Site, site);
            }
        }
        EntityRecord::Project(p) => {
            put(FieldName::Title, &p.title);
            put(FieldName::Status, p.status.as_str());
        }
        EntityRecord::Output(o) => {
            put(FieldName::Title, &o.title);
            put(FieldName::Type, o.doc_type.as_str());
            if let Some(y) = o.year {
                put(FieldName::Year, &y.to_string());
            }
        }
        EntityRecord::Unit(u) => put(FieldName::Name, &u.name),
        EntityRecord::Theme(t) => put(FieldName::Name, &t.label),
    }

    // Units the entity sits in directly.
    let mut direct: BTreeSet<&EntityId> = BTreeSet::new();
    match e.kind() {
        EntityKind::Staff => direct.extend(graph.neighbor_iter(id, LinkType::MemberOf, Direction::Outgoing)),
        EntityKind::Project => direct.extend(graph.neighbor_iter(id, LinkType::TaskedTo, Direction::Outgoing)),
        EntityKind::Output => {
            for p in graph.neighbor_iter(id, LinkType::ProducedBy, Direction::Outgoing) {
                direct.extend(graph.neighbor_iter(p, LinkType::TaskedTo, Direction::Outgoing));
            }
        }
        EntityKind::Unit => {
            direct.insert(id);
        }
        EntityKind::Theme => {}
    }
    // A unit value applies when the unit's subtree contains a direct unit.
    for (unit, below) in unit_closure {
        if direct.iter().any(|d| below.contains(*d)) {
            if let Some(u) = graph.get(unit) {
                put(FieldName::Unit, u.display_title());
                put(FieldName::Unit, &unit.to_string());
                put(FieldName::Unit, unit.local_id());
            }
        }
    }
    out
}
