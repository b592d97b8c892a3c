//! Hydrated entity views: an entity plus one panel per applicable link.

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::graph::{Graph, GraphError};
use crate::model::{EntityId, EntityKind, EntityRecord, LinkType};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Outgoing,
    Incoming,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub id: EntityId,
    pub kind: EntityKind,
    pub title: String,
}

impl Summary {
    pub fn of(entity: &EntityRecord) -> Self {
        Summary {
            id: entity.id().clone(),
            kind: entity.kind(),
            title: entity.display_title().into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Panel {
    pub name: &'static str,
    pub link_type: LinkType,
    pub direction: Direction,
    pub items: Vec<Summary>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EntityView {
    pub entity: EntityRecord,
    pub panels: Vec<Panel>,
}

impl EntityView {
    pub fn panel(&self, name: &str) -> Option<&Panel> {
        self.panels.iter().find(|p| p.name == name)
    }
}

/// The panels shown for each kind: `(name, link type, direction)`.
pub fn panel_layout(kind: EntityKind) -> &'static [(&'static str, LinkType, Direction)] {
    use Direction::*;
    use LinkType::*;
    match kind {
        EntityKind::Staff => &[
            ("projects", ContributesTo, Outgoing),
            ("outputs", Authored, Outgoing),
            ("units", MemberOf, Outgoing),
            ("themes", Tagged, Outgoing),
        ],
        EntityKind::Project => &[
            ("contributors", ContributesTo, Incoming),
            ("outputs", ProducedBy, Incoming),
            ("units", TaskedTo, Outgoing),
            ("themes", Tagged, Outgoing),
            ("related", RelatedTo, Outgoing),
            ("related_from", RelatedTo, Incoming),
        ],
        EntityKind::Output => &[
            ("authors", Authored, Incoming),
            ("projects", ProducedBy, Outgoing),
            ("themes", Tagged, Outgoing),
        ],
        EntityKind::Unit => &[
            ("members", MemberOf, Incoming),
            ("projects", TaskedTo, Incoming),
        ],
        EntityKind::Theme => &[("tagged", Tagged, Incoming)],
    }
}

pub fn entity_view(graph: &Graph, id: &EntityId) -> Result<EntityView, GraphError> {
    let entity = graph
        .get(id)
        .ok_or_else(|| GraphError::UnknownEntity(id.clone()))?;
    let panels = panel_layout(id.kind())
        .iter()
        .map(|&(name, link_type, direction)| Panel {
            name,
            link_type,
            direction,
            items: graph
                .neighbor_iter(id, link_type, direction)
                .filter_map(|n| graph.get(n))
                .map(Summary::of)
                .collect(),
        })
        .collect();
    Ok(EntityView {
        entity: entity.clone(),
        panels,
    })
}
