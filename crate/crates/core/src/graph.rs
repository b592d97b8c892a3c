//! The canonical entity graph and its integrity checks.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::model::{EntityId, EntityKind, EntityRecord, LinkRecord, LinkType, ModelError};
use crate::view::Direction;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("invalid entity: {0}")]
    InvalidEntity(#[from] ModelError),
    #[error("link endpoint {0} does not exist")]
    DanglingEndpoint(EntityId),
    #[error("{link_type} cannot link {from} to {to}")]
    KindMismatch {
        link_type: LinkType,
        from: EntityKind,
        to: EntityKind,
    },
    #[error("{0} cannot link to itself")]
    SelfLoop(EntityId),
    #[error("unknown entity {0}")]
    UnknownEntity(EntityId),
}

/// Integrity problem reported by [`Graph::validate`].
///
/// Variants are declared alphabetically so violations sort by code name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ViolationCode {
    CycleCreated,
    DanglingEndpoint,
    FacetMismatch,
    InvalidEntity,
    KindMismatch,
    SelfLoop,
}

impl ViolationCode {
    pub fn as_str(self) -> &'static str {
        match self {
            ViolationCode::CycleCreated => "CycleCreated",
            ViolationCode::DanglingEndpoint => "DanglingEndpoint",
            ViolationCode::FacetMismatch => "FacetMismatch",
            ViolationCode::InvalidEntity => "InvalidEntity",
            ViolationCode::KindMismatch => "KindMismatch",
            ViolationCode::SelfLoop => "SelfLoop",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationSubject {
    Entity(EntityId),
    Link(LinkRecord),
}

impl ViolationSubject {
    fn sort_key(&self) -> String {
        match self {
            ViolationSubject::Entity(id) => id.to_string(),
            ViolationSubject::Link(l) => format!("{} {} {}", l.from, l.link_type, l.to),
        }
    }
}

impl fmt::Display for ViolationSubject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ViolationSubject::Entity(id) => write!(f, "{id}"),
            ViolationSubject::Link(l) => write!(f, "{l}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub code: ViolationCode,
    pub subject: ViolationSubject,
    pub message: String,
}

/// Typed entities plus the set of typed links between them.
///
/// Entities are keyed by id and links kept as an ordered set, so iteration
/// is always in canonical order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Graph {
    entities: BTreeMap<EntityId, EntityRecord>,
    links: BTreeSet<LinkRecord>,
    // (type, to, from) for incoming lookups.
    incoming: BTreeSet<(LinkType, EntityId, EntityId)>,
    schema_version: u32,
}

impl Graph {
    pub fn new() -> Self {
        Graph {
            schema_version: crate::SCHEMA_VERSION,
            ..Default::default()
        }
    }

    /// Builds a graph without any checks. Used when loading stored data,
    /// which is then passed through [`Graph::validate`].
    pub fn from_parts(
        schema_version: u32,
        entities: impl IntoIterator<Item = EntityRecord>,
        links: impl IntoIterator<Item = LinkRecord>,
    ) -> Self {
        let mut graph = Graph {
            schema_version,
            ..Default::default()
        };
        for e in entities {
            graph.entities.insert(e.id().clone(), e);
        }
        for l in links {
            graph.insert_link(l);
        }
        graph
    }

    pub fn schema_version(&self) -> u32 {
        self.schema_version
    }

    pub fn entities(&self) -> impl Iterator<Item = &EntityRecord> {
        self.entities.values()
    }

    pub fn entities_of(&self, kind: EntityKind) -> impl Iterator<Item = &EntityRecord> {
        self.entities.values().filter(move |e| e.kind() == kind)
    }

    pub fn entity_count(&self) -> usize {
        self.entities.len()
    }

    pub fn get(&self, id: &EntityId) -> Option<&EntityRecord> {
        self.entities.get(id)
    }

    pub fn contains(&self, id: &EntityId) -> bool {
        self.entities.contains_key(id)
    }

    pub fn links(&self) -> &BTreeSet<LinkRecord> {
        &self.links
    }

    pub fn has_link(&self, link: &LinkRecord) -> bool {
        self.links.contains(link)
    }

    /// Inserts or replaces an entity (last write wins).
    pub fn add_entity(&mut self, entity: EntityRecord) -> Result<(), GraphError> {
        entity.validate()?;
        self.entities.insert(entity.id().clone(), entity);
        Ok(())
    }

    /// Adds a link after checking endpoints and kinds. Adding an existing
    /// link is a no-op.
    pub fn add_link(&mut self, link: LinkRecord) -> Result<(), GraphError> {
        for end in [&link.from, &link.to] {
            if !self.contains(end) {
                return Err(GraphError::DanglingEndpoint(end.clone()));
            }
        }
        if link.from == link.to {
            return Err(GraphError::SelfLoop(link.from));
        }
        if !link.link_type.accepts(link.from.kind(), link.to.kind()) {
            return Err(GraphError::KindMismatch {
                link_type: link.link_type,
                from: link.from.kind(),
                to: link.to.kind(),
            });
        }
        self.insert_link(link);
        Ok(())
    }

    fn insert_link(&mut self, link: LinkRecord) {
        self.incoming
            .insert((link.link_type, link.to.clone(), link.from.clone()));
        self.links.insert(link);
    }

    /// Endpoints of links of `link_type` leaving (or entering) `id`, in
    /// ascending id order.
    pub fn neighbors(
        &self,
        id: &EntityId,
        link_type: LinkType,
        direction: Direction,
    ) -> Result<Vec<EntityId>, GraphError> {
        if !self.contains(id) {
            return Err(GraphError::UnknownEntity(id.clone()));
        }
        Ok(self.neighbor_iter(id, link_type, direction).cloned().collect())
    }

    /// Like [`Graph::neighbors`] but without the existence check.
    pub fn neighbor_iter<'a>(
        &'a self,
        id: &'a EntityId,
        link_type: LinkType,
        direction: Direction,
    ) -> impl Iterator<Item = &'a EntityId> + 'a {
        // Both sets order by (type, anchor, other), so a range scan from the
        // smallest possible `other` visits exactly the matching links.
        let floor = EntityId::floor();
        let (outgoing, incoming) = match direction {
            Direction::Outgoing => (
                Some(self.links.range(LinkRecord::new(link_type, id.clone(), floor)..)),
                None,
            ),
            Direction::Incoming => (
                None,
                Some(self.incoming.range((link_type, id.clone(), floor)..)),
            ),
        };
        let out = outgoing
            .into_iter()
            .flatten()
            .take_while(move |l| l.link_type == link_type && &l.from == id)
            .map(|l| &l.to);
        let inc = incoming
            .into_iter()
            .flatten()
            .take_while(move |(t, to, _)| *t == link_type && to == id)
            .map(|(_, _, from)| from);
        out.chain(inc)
    }

    /// Direct children of a unit or theme.
    pub fn children_of(&self, id: &EntityId) -> Vec<EntityId> {
        self.entities_of(id.kind())
            .filter(|e| e.parent() == Some(id))
            .map(|e| e.id().clone())
            .collect()
    }

    /// Collects every invariant violation, ordered by (code, subject).
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut push = |code, subject, message: String| {
            out.push(Violation { code, subject, message });
        };

        for (key, e) in &self.entities {
            let subject = || ViolationSubject::Entity(key.clone());
            if key != e.id() {
                push(ViolationCode::InvalidEntity, subject(), format!("stored under {key}"));
            }
            if let Err(err) = e.validate() {
                push(ViolationCode::InvalidEntity, subject(), err.to_string());
            }
            let refs: Vec<(&str, &EntityId, EntityKind)> = match e {
                EntityRecord::Unit(u) => u
                    .parent
                    .iter()
                    .map(|p| ("parent", p, EntityKind::Unit))
                    .chain(u.head.iter().map(|h| ("head", h, EntityKind::Staff)))
                    .collect(),
                EntityRecord::Theme(t) => {
                    t.parent.iter().map(|p| ("parent", p, EntityKind::Theme)).collect()
                }
                _ => Vec::new(),
            };
            for (field, target, kind) in refs {
                if target.kind() != kind {
                    push(
                        ViolationCode::KindMismatch,
                        subject(),
                        format!("{field} {target} is not a {kind}"),
                    );
                } else if !self.contains(target) {
                    push(
                        ViolationCode::DanglingEndpoint,
                        subject(),
                        format!("{field} {target} does not exist"),
                    );
                }
            }
            if let EntityRecord::Theme(t) = e {
                if let Some(EntityRecord::Theme(parent)) = t.parent.as_ref().and_then(|p| self.get(p)) {
                    if parent.facet != t.facet {
                        push(
                            ViolationCode::FacetMismatch,
                            subject(),
                            format!("parent {} has facet {}", parent.id, parent.facet.as_str()),
                        );
                    }
                }
            }
        }

        for id in self.cyclic_entities() {
            push(
                ViolationCode::CycleCreated,
                ViolationSubject::Entity(id.clone()),
                format!("{id} is on a parent cycle"),
            );
        }

        for l in &self.links {
            let subject = || ViolationSubject::Link(l.clone());
            for end in [&l.from, &l.to] {
                if !self.contains(end) {
                    push(
                        ViolationCode::DanglingEndpoint,
                        subject(),
                        format!("endpoint {end} does not exist"),
                    );
                }
            }
            if l.from == l.to {
                push(ViolationCode::SelfLoop, subject(), format!("{} links to itself", l.from));
            }
            if !l.link_type.accepts(l.from.kind(), l.to.kind()) {
                push(
                    ViolationCode::KindMismatch,
                    subject(),
                    format!("{} cannot link {} to {}", l.link_type, l.from.kind(), l.to.kind()),
                );
            }
        }

        out.sort_by(|a, b| {
            (a.code, a.subject.sort_key(), &a.message).cmp(&(b.code, b.subject.sort_key(), &b.message))
        });
        out
    }

    /// Units and themes whose parent chain leads back to themselves.
    fn cyclic_entities(&self) -> BTreeSet<&EntityId> {
        // Iterative walk with three colours; a node reached again while still
        // on the current path closes a cycle, and every node on that stretch
        // of the path is cyclic.
        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            OnPath,
            Done,
        }
        let mut marks: BTreeMap<&EntityId, Mark> = BTreeMap::new();
        let mut cyclic = BTreeSet::new();
        for start in self.entities.keys() {
            if marks.contains_key(start) {
                continue;
            }
            let mut path: Vec<&EntityId> = Vec::new();
            let mut cur = Some(start);
            while let Some(id) = cur {
                match marks.get(id) {
                    Some(Mark::OnPath) => {
                        let pos = path.iter().position(|p| *p == id).unwrap_or(0);
                        cyclic.extend(path[pos..].iter().copied());
                        break;
                    }
                    Some(Mark::Done) => break,
                    None => {}
                }
                marks.insert(id, Mark::OnPath);
                path.push(id);
                cur = self
                    .entities
                    .get(id)
                    .and_then(EntityRecord::parent)
                    .filter(|p| p.kind() == id.kind())
                    .and_then(|p| self.entities.get_key_value(p).map(|(k, _)| k));
            }
            for id in path {
                marks.insert(id, Mark::Done);
            }
        }
        cyclic
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{demo_org, id};
    use crate::model::{Staff, Unit};
    use alloc::vec;

    fn staff(local: &str, name: &str) -> EntityRecord {
        EntityRecord::Staff(Staff {
            id: EntityId::new(EntityKind::Staff, local).unwrap(),
            full_name: name.into(),
            email: None,
            phone: None,
            site: None,
            bio: None,
            interests: None,
        })
    }

    fn unit(local: &str, parent: Option<&str>) -> EntityRecord {
        EntityRecord::Unit(Unit {
            id: EntityId::new(EntityKind::Unit, local).unwrap(),
            name: local.into(),
            parent: parent.map(id),
            head: None,
            admin_contacts: vec![],
        })
    }

    #[test]
    fn add_entity_last_write_wins() {
        let mut g = Graph::new();
        g.add_entity(staff("s1", "First")).unwrap();
        assert_eq!(g.entity_count(), 1);
        g.add_entity(staff("s1", "Second")).unwrap();
        assert_eq!(g.entity_count(), 1);
        assert_eq!(g.get(&id("staff:s1")).unwrap().display_title(), "Second");
    }

    #[test]
    fn add_entity_rejects_empty_name() {
        let mut g = Graph::new();
        assert!(matches!(g.add_entity(staff("s1", " ")), Err(GraphError::InvalidEntity(_))));
    }

    #[test]
    fn add_link_checks() {
        let mut g = demo_org();
        let before = g.links().len();
        let link = LinkRecord::new(LinkType::Authored, id("staff:s1"), id("output:o1"));
        g.add_link(link.clone()).unwrap();
        g.add_link(link.clone()).unwrap();
        assert!(g.has_link(&link));
        assert_eq!(g.links().len(), before);

        let bad = LinkRecord::new(LinkType::ProducedBy, id("output:o1"), id("output:o1"));
        assert!(matches!(g.add_link(bad), Err(GraphError::SelfLoop(_))));
        let mut g2 = g.clone();
        g2.add_entity(EntityRecord::Output(match g.get(&id("output:o1")).unwrap().clone() {
            EntityRecord::Output(mut o) => {
                o.id = id("output:o2");
                o
            }
            _ => unreachable!(),
        }))
        .unwrap();
        let bad = LinkRecord::new(LinkType::ProducedBy, id("output:o1"), id("output:o2"));
        assert!(matches!(g2.add_link(bad), Err(GraphError::KindMismatch { .. })));
        let bad = LinkRecord::new(LinkType::Authored, id("staff:s1"), id("project:p1"));
        assert!(matches!(g.add_link(bad), Err(GraphError::KindMismatch { .. })));
        let ghost = LinkRecord::new(LinkType::ContributesTo, id("staff:s1"), id("project:ghost"));
        assert!(matches!(g.add_link(ghost), Err(GraphError::DanglingEndpoint(_))));
    }

    #[test]
    fn demo_org_is_valid() {
        assert_eq!(demo_org().validate(), vec![]);
    }

    #[test]
    fn self_parent_is_a_cycle() {
        let mut g = Graph::new();
        g.add_entity(unit("u2", Some("unit:u2"))).unwrap();
        let v = g.validate();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].code, ViolationCode::CycleCreated);
        assert_eq!(v[0].subject, ViolationSubject::Entity(id("unit:u2")));
    }

    #[test]
    fn longer_cycles_flag_each_member_once() {
        let mut g = Graph::new();
        g.add_entity(unit("a", Some("unit:b"))).unwrap();
        g.add_entity(unit("b", Some("unit:c"))).unwrap();
        g.add_entity(unit("c", Some("unit:a"))).unwrap();
        g.add_entity(unit("d", Some("unit:a"))).unwrap();
        let cyc: Vec<_> = g
            .validate()
            .into_iter()
            .map(|v| (v.code, v.subject.to_string()))
            .collect();
        assert_eq!(
            cyc,
            vec![
                (ViolationCode::CycleCreated, "unit:a".into()),
                (ViolationCode::CycleCreated, "unit:b".into()),
                (ViolationCode::CycleCreated, "unit:c".into()),
            ]
        );
    }

    #[test]
    fn dangling_link_is_reported() {
        let mut links: Vec<_> = demo_org().links().iter().cloned().collect();
        links.push(LinkRecord::new(LinkType::ContributesTo, id("staff:s1"), id("project:ghost")));
        let g = Graph::from_parts(1, demo_org().entities().cloned(), links);
        let v = g.validate();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].code, ViolationCode::DanglingEndpoint);
    }

    #[test]
    fn neighbors_in_both_directions() {
        let g = demo_org();
        assert_eq!(
            g.neighbors(&id("staff:s1"), LinkType::Authored, Direction::Outgoing).unwrap(),
            vec![id("output:o1")]
        );
        assert!(g
            .neighbors(&id("staff:s2"), LinkType::Authored, Direction::Outgoing)
            .unwrap()
            .is_empty());
        assert_eq!(
            g.neighbors(&id("project:p1"), LinkType::ProducedBy, Direction::Incoming).unwrap(),
            vec![id("output:o1")]
        );
        assert!(matches!(
            g.neighbors(&id("staff:nobody"), LinkType::Authored, Direction::Outgoing),
            Err(GraphError::UnknownEntity(_))
        ));
    }

    #[test]
    fn facet_mismatch_is_reported() {
        let mut g = demo_org();
        if let Some(EntityRecord::Theme(mut t)) = g.get(&id("theme:t_maritime")).cloned() {
            t.parent = Some(id("theme:t_st"));
            g.add_entity(EntityRecord::Theme(t)).unwrap();
        }
        let codes: Vec<_> = g.validate().into_iter().map(|v| v.code).collect();
        assert_eq!(codes, vec![ViolationCode::FacetMismatch]);
    }
}
