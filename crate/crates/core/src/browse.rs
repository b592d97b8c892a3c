//! Filterable, paged entity lists.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::Serialize;

use crate::graph::Graph;
use crate::model::{DocType, EntityId, EntityKind, EntityRecord, LinkType, ProjectStatus};
use crate::search::{normalize_value, resolve_theme_ref};
use crate::themes::descendants;
use crate::view::{Direction, Summary};

pub const MAX_PAGE: usize = 500;
pub const DEFAULT_PAGE: usize = 50;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BrowseError {
    #[error("bad filter: {0}")]
    BadFilter(String),
    #[error("bad paging: {0}")]
    BadPaging(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Page {
    pub offset: usize,
    pub limit: usize,
}

impl Default for Page {
    fn default() -> Self {
        Page { offset: 0, limit: DEFAULT_PAGE }
    }
}

impl Page {
    pub fn new(offset: usize, limit: usize) -> Result<Self, BrowseError> {
        if limit == 0 || limit > MAX_PAGE {
            return Err(BrowseError::BadPaging(format!("limit must be between 1 and {MAX_PAGE}")));
        }
        Ok(Page { offset, limit })
    }

    pub fn slice<'a, T>(&self, items: &'a [T]) -> &'a [T] {
        let start = self.offset.min(items.len());
        let end = start.saturating_add(self.limit).min(items.len());
        &items[start..end]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BrowsePage {
    pub total: usize,
    pub offset: usize,
    pub limit: usize,
    pub items: Vec<Summary>,
}

/// Filters accepted for each kind.
pub fn allowed_filters(kind: EntityKind) -> &'static [&'static str] {
    match kind {
        EntityKind::Staff => &["unit", "site", "theme"],
        EntityKind::Project => &["unit", "status", "theme"],
        EntityKind::Output => &["unit", "type", "year", "theme"],
        EntityKind::Unit => &["unit"],
        EntityKind::Theme => &["theme"],
    }
}

/// Entities of `kind` matching every filter, in id order, paged.
///
/// `unit` and `theme` take an id (canonical or local) and include
/// everything below that unit or theme; themes also accept a label path.
/// The other filters compare normalised values.
pub fn browse(
    graph: &Graph,
    kind: EntityKind,
    filters: &BTreeMap<String, String>,
    page: Page,
) -> Result<BrowsePage, BrowseError> {
    let allowed = allowed_filters(kind);
    let mut preds: Vec<Filter> = Vec::new();
    for (name, value) in filters {
        if !allowed.contains(&name.as_str()) {
            return Err(BrowseError::BadFilter(format!("`{name}` does not apply to {kind}")));
        }
        preds.push(parse_filter(graph, name, value)?);
    }
    let matching: Vec<Summary> = graph
        .entities_of(kind)
        .filter(|e| preds.iter().all(|p| p.holds(graph, e)))
        .map(Summary::of)
        .collect();
    Ok(BrowsePage {
        total: matching.len(),
        offset: page.offset,
        limit: page.limit,
        items: page.slice(&matching).to_vec(),
    })
}

enum Filter {
    Units(BTreeSet<EntityId>),
    Themes(BTreeSet<EntityId>),
    Site(String),
    Status(ProjectStatus),
    Type(DocType),
    Year(i32),
}

fn lookup(graph: &Graph, kind: EntityKind, value: &str) -> Option<EntityId> {
    let id = value
        .parse::<EntityId>()
        .ok()
        .filter(|id| id.kind() == kind)
        .or_else(|| EntityId::new(kind, value.trim()).ok())?;
    graph.contains(&id).then_some(id)
}

fn parse_filter(graph: &Graph, name: &str, value: &str) -> Result<Filter, BrowseError> {
    let bad = |what: &str| BrowseError::BadFilter(format!("{name}: {what} `{value}`"));
    Ok(match name {
        "unit" => {
            let unit = lookup(graph, EntityKind::Unit, value).ok_or_else(|| bad("unknown unit"))?;
            Filter::Units(descendants(graph, &unit).into_iter().collect())
        }
        "theme" => {
            let themes = graph
                .entities_of(EntityKind::Theme)
                .map(|t| (t.id(), t.display_title(), t.parent()));
            let theme = resolve_theme_ref(themes, value).ok_or_else(|| bad("unknown theme"))?;
            Filter::Themes(descendants(graph, &theme).into_iter().collect())
        }
        "site" => Filter::Site(normalize_value(value)),
        "status" => Filter::Status(ProjectStatus::parse(value).ok_or_else(|| bad("unknown status"))?),
        "type" => Filter::Type(DocType::parse(value).ok_or_else(|| bad("unknown type"))?),
        "year" => Filter::Year(value.trim().parse().map_err(|_| bad("not a year"))?),
        _ => return Err(bad("unknown filter")),
    })
}

impl Filter {
    fn holds(&self, graph: &Graph, e: &EntityRecord) -> bool {
        let id = e.id();
        match self {
            Filter::Units(units) => match e {
                EntityRecord::Unit(_) => units.contains(id),
                EntityRecord::Staff(_) => graph
                    .neighbor_iter(id, LinkType::MemberOf, Direction::Outgoing)
                    .any(|u| units.contains(u)),
                EntityRecord::Project(_) => graph
                    .neighbor_iter(id, LinkType::TaskedTo, Direction::Outgoing)
                    .any(|u| units.contains(u)),
                EntityRecord::Output(_) => graph
                    .neighbor_iter(id, LinkType::ProducedBy, Direction::Outgoing)
                    .flat_map(|p| graph.neighbor_iter(p, LinkType::TaskedTo, Direction::Outgoing))
                    .any(|u| units.contains(u)),
                EntityRecord::Theme(_) => false,
            },
            Filter::Themes(themes) => match e {
                EntityRecord::Theme(_) => themes.contains(id),
                _ => graph
                    .neighbor_iter(id, LinkType::Tagged, Direction::Outgoing)
                    .any(|t| themes.contains(t)),
            },
            Filter::Site(site) => matches!(e, EntityRecord::Staff(s) if s.site.as_deref().is_some_and(|x| &normalize_value(x) == site)),
            Filter::Status(status) => matches!(e, EntityRecord::Project(p) if p.status == *status),
            Filter::Type(t) => matches!(e, EntityRecord::Output(o) if o.doc_type == *t),
            Filter::Year(y) => matches!(e, EntityRecord::Output(o) if o.year == Some(*y)),
        }
    }
}

/// Parses paging parameters, applying defaults.
pub fn page_from(offset: Option<&str>, limit: Option<&str>) -> Result<Page, BrowseError> {
    let num = |name: &str, v: Option<&str>, default: usize| -> Result<usize, BrowseError> {
        v.map_or(Ok(default), |s| {
            s.trim()
                .parse()
                .map_err(|_| BrowseError::BadPaging(format!("{name} must be a non-negative integer")))
        })
    };
    Page::new(num("offset", offset, 0)?, num("limit", limit, DEFAULT_PAGE)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{demo_org, id};
    use alloc::string::ToString;
    use alloc::vec;

    fn filters(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
        pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
    }

    fn ids(p: &BrowsePage) -> Vec<EntityId> {
        p.items.iter().map(|s| s.id.clone()).collect()
    }

    #[test]
    fn unit_filter_includes_subunits() {
        let g = demo_org();
        let p = browse(&g, EntityKind::Project, &filters(&[("unit", "u1")]), Page::default()).unwrap();
        assert_eq!(ids(&p), vec![id("project:p1")]);
        let p = browse(&g, EntityKind::Staff, &filters(&[("unit", "unit:u2")]), Page::default()).unwrap();
        assert_eq!(ids(&p), vec![id("staff:s1")]);
    }

    #[test]
    fn all_staff() {
        let p = browse(&demo_org(), EntityKind::Staff, &BTreeMap::new(), Page::default()).unwrap();
        assert_eq!(ids(&p), vec![id("staff:s1"), id("staff:s2")]);
        assert_eq!(p.total, 2);
    }

    #[test]
    fn inapplicable_filter() {
        let r = browse(&demo_org(), EntityKind::Staff, &filters(&[("status", "active")]), Page::default());
        assert!(matches!(r, Err(BrowseError::BadFilter(_))));
        let r = browse(&demo_org(), EntityKind::Project, &filters(&[("status", "ongoing")]), Page::default());
        assert!(matches!(r, Err(BrowseError::BadFilter(_))));
        let r = browse(&demo_org(), EntityKind::Project, &filters(&[("unit", "u99")]), Page::default());
        assert!(matches!(r, Err(BrowseError::BadFilter(_))));
    }

    #[test]
    fn other_filters() {
        let g = demo_org();
        let get = |kind, f: &[(&str, &str)]| ids(&browse(&g, kind, &filters(f), Page::default()).unwrap());
        assert_eq!(get(EntityKind::Staff, &[("site", "FERN HILL")]), vec![id("staff:s1")]);
        assert_eq!(get(EntityKind::Output, &[("type", "report"), ("year", "2005")]), vec![id("output:o1")]);
        assert!(get(EntityKind::Output, &[("year", "1999")]).is_empty());
        assert_eq!(get(EntityKind::Output, &[("theme", "st")]), vec![id("output:o1")]);
        assert_eq!(get(EntityKind::Staff, &[("theme", "t_maritime")]), vec![id("staff:s2")]);
        assert_eq!(get(EntityKind::Unit, &[("unit", "u1")]), vec![id("unit:u1"), id("unit:u2")]);
    }

    #[test]
    fn paging() {
        assert!(Page::new(0, 0).is_err());
        assert!(Page::new(0, 501).is_err());
        assert!(page_from(Some("x"), None).is_err());
        let g = demo_org();
        let all = browse(&g, EntityKind::Theme, &BTreeMap::new(), Page::new(0, 500).unwrap()).unwrap();
        let mut joined = Vec::new();
        for off in (0..all.total).step_by(3) {
            let p = browse(&g, EntityKind::Theme, &BTreeMap::new(), Page::new(off, 3).unwrap()).unwrap();
            assert_eq!(p.total, all.total);
            joined.extend(p.items);
        }
        assert_eq!(joined, all.items);
        let past = browse(&g, EntityKind::Theme, &BTreeMap::new(), Page::new(99, 3).unwrap()).unwrap();
        assert!(past.items.is_empty());
    }
}
