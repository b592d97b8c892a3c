//! Reference evaluator: scans every entity directly, without the index.

use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::{normalize_value, resolve_theme_ref, tokenize, DocumentStore, SearchError};
use crate::graph::Graph;
use crate::model::{EntityId, EntityKind, EntityRecord, LinkType};
use crate::query::{FieldName, QueryAst};

/// Returns the set of entities matching `ast`.
pub fn oracle_evaluate(
    graph: &Graph,
    store: &dyn DocumentStore,
    ast: &QueryAst,
) -> Result<BTreeSet<EntityId>, SearchError> {
    let ast = resolve_themes(graph, ast)?;
    let mut out = BTreeSet::new();
    for e in graph.entities() {
        let words: BTreeSet<String> = entity_text(e, store).iter().flat_map(|t| tokenize(t)).collect();
        if matches(graph, e, &words, &ast) {
            out.insert(e.id().clone());
        }
    }
    Ok(out)
}

/// The query with every theme reference replaced by the resolved theme id.
enum Resolved {
    Term(String),
    Phrase(Vec<String>),
    Field(FieldName, String),
    Theme(EntityId),
    And(Vec<Resolved>),
    Or(Vec<Resolved>),
}

fn resolve_themes(graph: &Graph, ast: &QueryAst) -> Result<Resolved, SearchError> {
    Ok(match ast {
        QueryAst::Term(t) => Resolved::Term(t.clone()),
        QueryAst::Phrase(ts) => Resolved::Phrase(ts.clone()),
        QueryAst::Field { name, value } => Resolved::Field(*name, normalize_value(value)),
        QueryAst::ThemeRef(r) => {
            let themes = graph
                .entities_of(EntityKind::Theme)
                .map(|t| (t.id(), t.display_title(), t.parent()));
            Resolved::Theme(resolve_theme_ref(themes, r).ok_or_else(|| SearchError::UnknownTheme(r.clone()))?)
        }
        QueryAst::And(c) => Resolved::And(c.iter().map(|n| resolve_themes(graph, n)).collect::<Result<_, _>>()?),
        QueryAst::Or(c) => Resolved::Or(c.iter().map(|n| resolve_themes(graph, n)).collect::<Result<_, _>>()?),
    })
}

fn entity_text(e: &EntityRecord, store: &dyn DocumentStore) -> Vec<String> {
    let mut texts: Vec<String> = e.text_fields().into_iter().map(|(_, t)| t.to_string()).collect();
    if let EntityRecord::Output(o) = e {
        texts.extend(o.documents.iter().filter_map(|d| store.read(&d.path)));
    }
    texts
}

fn matches(graph: &Graph, e: &EntityRecord, words: &BTreeSet<String>, node: &Resolved) -> bool {
    match node {
        Resolved::Term(t) => words.contains(t),
        Resolved::Phrase(ts) => ts.iter().all(|t| words.contains(t)),
        Resolved::Field(f, v) => !v.is_empty() && field_holds(graph, e, *f, v),
        Resolved::Theme(theme) => tagged_under(graph, e.id(), theme),
        Resolved::And(c) => c.iter().all(|n| matches(graph, e, words, n)),
        Resolved::Or(c) => c.iter().any(|n| matches(graph, e, words, n)),
    }
}

fn same(raw: &str, wanted: &str) -> bool {
    normalize_value(raw) == wanted
}

fn field_holds(graph: &Graph, e: &EntityRecord, field: FieldName, v: &str) -> bool {
    let id = e.id();
    match (field, e) {
        (FieldName::Id, _) => same(&id.to_string(), v) || same(id.local_id(), v),
        (FieldName::Type, EntityRecord::Output(o)) => same(id.kind().as_str(), v) || same(o.doc_type.as_str(), v),
        (FieldName::Type, _) => same(id.kind().as_str(), v),
        (FieldName::Name, EntityRecord::Staff(s)) => same(&s.full_name, v),
        (FieldName::Name, EntityRecord::Unit(u)) => same(&u.name, v),
        (FieldName::Name, EntityRecord::Theme(t)) => same(&t.label, v),
        (FieldName::Title, EntityRecord::Project(p)) => same(&p.title, v),
        (FieldName::Title, EntityRecord::Output(o)) => same(&o.title, v),
        (FieldName::Site, EntityRecord::Staff(s)) => s.site.as_deref().is_some_and(|x| same(x, v)),
        (FieldName::Status, EntityRecord::Project(p)) => same(p.status.as_str(), v),
        (FieldName::Year, EntityRecord::Output(o)) => o.year.is_some_and(|y| same(&y.to_string(), v)),
        (FieldName::Unit, _) => direct_units(graph, e).into_iter().any(|u| unit_chain_matches(graph, u, v)),
        _ => false,
    }
}

/// Units an entity belongs to before following unit parents, found by
/// scanning the link set.
fn direct_units<'a>(graph: &'a Graph, e: &'a EntityRecord) -> Vec<&'a EntityId> {
    let id = e.id();
    let outgoing = |from: &'a EntityId, ty: LinkType| {
        graph
            .links()
            .iter()
            .filter(move |l| l.link_type == ty && &l.from == from)
            .map(|l| &l.to)
    };
    match e.kind() {
        EntityKind::Staff => outgoing(id, LinkType::MemberOf).collect(),
        EntityKind::Project => outgoing(id, LinkType::TaskedTo).collect(),
        EntityKind::Output => outgoing(id, LinkType::ProducedBy)
            .flat_map(|p| outgoing(p, LinkType::TaskedTo))
            .collect(),
        EntityKind::Unit => alloc::vec![id],
        EntityKind::Theme => Vec::new(),
    }
}

/// Walks up from `unit` through its parents looking for a unit whose name
/// or id matches.
fn unit_chain_matches(graph: &Graph, unit: &EntityId, v: &str) -> bool {
    let mut seen = BTreeSet::new();
    let mut cur = Some(unit);
    while let Some(u) = cur {
        if !seen.insert(u) {
            break;
        }
        let Some(EntityRecord::Unit(rec)) = graph.get(u) else { break };
        if same(&rec.name, v) || same(&u.to_string(), v) || same(u.local_id(), v) {
            return true;
        }
        cur = rec.parent.as_ref();
    }
    false
}

/// True when the entity carries a tag whose parent chain reaches `theme`.
fn tagged_under(graph: &Graph, entity: &EntityId, theme: &EntityId) -> bool {
    graph
        .links()
        .iter()
        .filter(|l| l.link_type == LinkType::Tagged && &l.from == entity)
        .any(|l| {
            let mut seen = BTreeSet::new();
            let mut cur = Some(&l.to);
            while let Some(t) = cur {
                if t == theme {
                    return true;
                }
                if !seen.insert(t) {
                    return false;
                }
                cur = graph.get(t).and_then(EntityRecord::parent);
            }
            false
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{demo_documents, demo_org, id};
    use crate::query::parse_query;
    use crate::search::{build_index, evaluate, NoDocuments};

    fn oracle(q: &str) -> BTreeSet<EntityId> {
        oracle_evaluate(&demo_org(), &demo_documents(), &parse_query(q).unwrap()).unwrap()
    }

    #[test]
    fn agrees_with_index_on_demo_queries() {
        let g = demo_org();
        let docs = demo_documents();
        let index = build_index(&g, &docs);
        for q in [
            "radar",
            "radar sonar OR theme:st/sensors/radar",
            "unit:\"Division A\"",
            "unit:u2 AND type:staff",
            "autofocus",
            "\"synthetic aperture\" OR name:\"alan turing\"",
            "year:2005 OR status:active",
            "site:\"fern hill\" OR id:p1",
            "type:report",
            "theme:maritime OR title:\"sar imaging trial report\"",
        ] {
            let ast = parse_query(q).unwrap();
            let fast: BTreeSet<_> = evaluate(&index, &ast).unwrap().into_iter().map(|h| h.entity).collect();
            assert_eq!(fast, oracle(q), "{q}");
        }
    }

    #[test]
    fn empty_graph() {
        let ast = parse_query("radar").unwrap();
        assert!(oracle_evaluate(&Graph::new(), &NoDocuments, &ast).unwrap().is_empty());
    }

    #[test]
    fn or_is_union() {
        let a = oracle("radar");
        let b = oracle("unit:u1");
        let both = oracle("radar OR unit:u1");
        assert_eq!(both, a.union(&b).cloned().collect());
        assert!(both.contains(&id("staff:s2")));
    }
}
