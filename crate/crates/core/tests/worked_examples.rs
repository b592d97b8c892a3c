//! Worked examples through the public API, on the demo organisation.

use std::collections::BTreeMap;

use kfind_core::browse::{browse, Page};
use kfind_core::fixtures::{demo_documents, demo_org, id};
use kfind_core::ingest::normalize_name;
use kfind_core::query::{parse_query, print_query, FieldName, QueryAst, QueryError};
use kfind_core::search::{build_index, evaluate, oracle_evaluate, tokenize, NoDocuments};
use kfind_core::themes::{theme_descendants, theme_rollup};
use kfind_core::{entity_view, Direction, EntityKind, LinkType};

fn term(t: &str) -> QueryAst {
    QueryAst::Term(t.into())
}

#[test]
fn names_and_tokens() {
    assert_eq!(normalize_name("LOVELACE, Ada"), "ada lovelace");
    assert_eq!(normalize_name("Ada Lovelace"), "ada lovelace");
    assert_eq!(normalize_name(""), "");
    assert_eq!(tokenize("Synthetic-Aperture RADAR."), ["synthetic", "aperture", "radar"]);
    assert_eq!(tokenize("C2 systems"), ["c2", "systems"]);
    assert!(tokenize("").is_empty());
}

#[test]
fn query_examples() {
    assert_eq!(
        parse_query(r#"radar AND unit:"Division A""#).unwrap(),
        QueryAst::And(vec![term("radar"), QueryAst::Field { name: FieldName::Unit, value: "Division A".into() }])
    );
    assert_eq!(
        parse_query("radar sonar OR theme:st/sensors/radar").unwrap(),
        QueryAst::Or(vec![
            QueryAst::And(vec![term("radar"), term("sonar")]),
            QueryAst::ThemeRef("st/sensors/radar".into())
        ])
    );
    assert!(matches!(parse_query("radar AND"), Err(QueryError::Syntax { .. })));
    assert_eq!(parse_query("   "), Err(QueryError::EmptyQuery));
    assert_eq!(print_query(&QueryAst::And(vec![term("radar"), term("sonar")])), "(radar AND sonar)");
}

#[test]
fn graph_views() {
    let g = demo_org();
    assert!(g.validate().is_empty());
    assert_eq!(g.neighbors(&id("staff:s1"), LinkType::Authored, Direction::Outgoing).unwrap(), [id("output:o1")]);
    assert!(g.neighbors(&id("staff:s2"), LinkType::Authored, Direction::Outgoing).unwrap().is_empty());
    assert_eq!(g.neighbors(&id("project:p1"), LinkType::ProducedBy, Direction::Incoming).unwrap(), [id("output:o1")]);

    let view = entity_view(&g, &id("project:p1")).unwrap();
    let members = |name: &str| -> Vec<String> {
        view.panel(name).map(|p| p.items.iter().map(|s| s.id.to_string()).collect()).unwrap_or_default()
    };
    assert_eq!(members("contributors"), ["staff:s1"]);
    assert_eq!(members("outputs"), ["output:o1"]);
    assert_eq!(members("units"), ["unit:u2"]);
    assert_eq!(members("themes"), ["theme:t_radar"]);
    assert!(members("related").is_empty());
    assert!(entity_view(&g, &id("project:ghost")).is_err());
}

#[test]
fn themes_and_browse() {
    let g = demo_org();
    assert_eq!(
        theme_descendants(&g, &id("theme:t_st")).unwrap(),
        [id("theme:t_radar"), id("theme:t_sensors"), id("theme:t_st")]
    );
    let radar = theme_rollup(&g, &id("theme:t_radar")).unwrap();
    assert_eq!((radar.projects, radar.outputs, radar.staff), (vec![id("project:p1")], vec![id("output:o1")], vec![id("staff:s1")]));

    let filters = BTreeMap::from([("unit".to_string(), "unit:u1".to_string())]);
    let page = browse(&g, EntityKind::Project, &filters, Page::default()).unwrap();
    assert_eq!(page.items.iter().map(|s| s.id.clone()).collect::<Vec<_>>(), [id("project:p1")]);
    let bad = BTreeMap::from([("status".to_string(), "active".to_string())]);
    assert!(browse(&g, EntityKind::Staff, &bad, Page::default()).is_err());
}

#[test]
fn search_examples() {
    let g = demo_org();
    let docs = demo_documents();
    let index = build_index(&g, &docs);
    assert_eq!(index.doc_count(), 10);
    let radar: Vec<_> = index.postings("radar").map(|(e, _)| e.clone()).collect();
    assert!(radar.contains(&id("project:p1")) && radar.contains(&id("output:o1")));

    let ast = parse_query("theme:st/sensors/radar").unwrap();
    let hits = evaluate(&index, &ast).unwrap();
    assert_eq!(hits.iter().map(|h| (h.entity.to_string(), h.score)).collect::<Vec<_>>(), [
        ("output:o1".to_string(), 1.0),
        ("project:p1".to_string(), 1.0)
    ]);
    let set: Vec<_> = oracle_evaluate(&g, &docs, &ast).unwrap().into_iter().collect();
    assert_eq!(set, [id("output:o1"), id("project:p1")]);

    assert!(evaluate(&index, &parse_query("zzzz AND radar").unwrap()).unwrap().is_empty());
    let empty = build_index(&kfind_core::Graph::new(), &NoDocuments);
    assert_eq!(empty.doc_count(), 0);
}
