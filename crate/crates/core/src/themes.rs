//! Theme taxonomy traversal and rollup.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::graph::{Graph, GraphError};
use crate::model::{EntityId, EntityKind, LinkType};
use crate::view::Direction;

/// Everything known about a theme.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThemeAggregate {
    pub theme: EntityId,
    pub staff: Vec<EntityId>,
    pub projects: Vec<EntityId>,
    pub outputs: Vec<EntityId>,
}

/// Which staff a rollup includes.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum RollupRule {
    /// Staff tagged under the theme plus staff who contributed to or
    /// authored an included project or output.
    #[default]
    WithContributors,
    /// Only staff tagged under the theme.
    DirectTagsOnly,
}

/// The subtree rooted at `id` (itself included) in ascending id order.
/// Works for both units and themes; parent cycles are tolerated.
pub fn descendants(graph: &Graph, id: &EntityId) -> Vec<EntityId> {
    let mut children: BTreeMap<&EntityId, Vec<&EntityId>> = BTreeMap::new();
    for e in graph.entities_of(id.kind()) {
        if let Some(p) = e.parent() {
            children.entry(p).or_default().push(e.id());
        }
    }
    let mut seen: BTreeSet<EntityId> = BTreeSet::new();
    let mut stack = alloc::vec![id];
    while let Some(cur) = stack.pop() {
        if seen.insert(cur.clone()) {
            stack.extend(children.get(cur).into_iter().flatten().copied());
        }
    }
    seen.into_iter().collect()
}

fn require_theme(graph: &Graph, id: &EntityId) -> Result<(), GraphError> {
    if id.kind() != EntityKind::Theme || !graph.contains(id) {
        return Err(GraphError::UnknownEntity(id.clone()));
    }
    Ok(())
}

pub fn theme_descendants(graph: &Graph, theme: &EntityId) -> Result<Vec<EntityId>, GraphError> {
    require_theme(graph, theme)?;
    Ok(descendants(graph, theme))
}

pub fn theme_rollup(graph: &Graph, theme: &EntityId) -> Result<ThemeAggregate, GraphError> {
    theme_rollup_with(graph, theme, RollupRule::default())
}

pub fn theme_rollup_with(graph: &Graph, theme: &EntityId, rule: RollupRule) -> Result<ThemeAggregate, GraphError> {
    require_theme(graph, theme)?;
    let mut staff = BTreeSet::new();
    let mut projects = BTreeSet::new();
    let mut outputs = BTreeSet::new();
    for t in descendants(graph, theme) {
        for e in graph.neighbor_iter(&t, LinkType::Tagged, Direction::Incoming) {
            match e.kind() {
                EntityKind::Staff => staff.insert(e.clone()),
                EntityKind::Project => projects.insert(e.clone()),
                EntityKind::Output => outputs.insert(e.clone()),
                _ => false,
            };
        }
    }
    if rule == RollupRule::WithContributors {
        for p in &projects {
            staff.extend(graph.neighbor_iter(p, LinkType::ContributesTo, Direction::Incoming).cloned());
        }
        for o in &outputs {
            staff.extend(graph.neighbor_iter(o, LinkType::Authored, Direction::Incoming).cloned());
        }
    }
    Ok(ThemeAggregate {
        theme: theme.clone(),
        staff: staff.into_iter().collect(),
        projects: projects.into_iter().collect(),
        outputs: outputs.into_iter().collect(),
    })
}

/// A theme with its children, for rendering the taxonomy.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ThemeNode {
    pub id: EntityId,
    pub label: alloc::string::String,
    pub facet: crate::model::Facet,
    pub children: Vec<ThemeNode>,
}

/// The theme forest: roots in id order, children in id order.
pub fn theme_tree(graph: &Graph) -> Vec<ThemeNode> {
    fn node(graph: &Graph, id: &EntityId, depth: usize) -> Option<ThemeNode> {
        let crate::model::EntityRecord::Theme(t) = graph.get(id)? else {
            return None;
        };
        // Depth bound keeps a corrupt cyclic graph from recursing forever.
        let children = if depth > graph.entity_count() {
            Vec::new()
        } else {
            graph
                .children_of(id)
                .iter()
                .filter_map(|c| node(graph, c, depth + 1))
                .collect()
        };
        Some(ThemeNode {
            id: id.clone(),
            label: t.label.clone(),
            facet: t.facet,
            children,
        })
    }
    graph
        .entities_of(EntityKind::Theme)
        .filter(|t| t.parent().is_none_or(|p| !graph.contains(p)))
        .filter_map(|t| node(graph, t.id(), 0))
        .collect()
}
