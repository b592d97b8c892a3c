#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use kfind::config::load_config;
use kfind::sources::{discover_bundle, ingest_all};
use kfind_core::ingest::MergeReport;
use kfind_core::{EntityId, EntityKind, EntityRecord, Graph, LinkRecord};

pub fn demo_bundle() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/demo-org")
}

pub fn ingest_dir(root: &Path) -> (Graph, MergeReport) {
    let config = load_config(&root.join("config.toml")).expect("config");
    let files = discover_bundle(root).expect("bundle");
    ingest_all(&files, &config).expect("ingest")
}

/// Rewrites ids through `map`, leaving unmapped ids alone.
pub fn rename(g: &Graph, map: &BTreeMap<EntityId, EntityId>) -> Graph {
    let re = |id: &EntityId| map.get(id).cloned().unwrap_or_else(|| id.clone());
    let mut out = Graph::new();
    for e in g.entities() {
        let mut v = serde_json::to_value(e).unwrap();
        rewrite_ids(&mut v, &|s| s.parse::<EntityId>().ok().map(|id| re(&id).to_string()));
        let e: EntityRecord = serde_json::from_value(v).unwrap();
        out.add_entity(e).unwrap();
    }
    for l in g.links() {
        out.add_link(LinkRecord::new(l.link_type, re(&l.from), re(&l.to))).unwrap();
    }
    out
}

fn rewrite_ids(v: &mut serde_json::Value, f: &dyn Fn(&str) -> Option<String>) {
    match v {
        serde_json::Value::String(s) => {
            if let Some(n) = f(s) {
                *s = n;
            }
        }
        serde_json::Value::Array(a) => a.iter_mut().for_each(|x| rewrite_ids(x, f)),
        serde_json::Value::Object(o) => o.values_mut().for_each(|x| rewrite_ids(x, f)),
        _ => {}
    }
}

/// Maps the ingested demo theme ids onto the hand-built fixture's ids by label.
pub fn demo_theme_map(ingested: &Graph, fixture: &Graph) -> BTreeMap<EntityId, EntityId> {
    let label = |g: &Graph| -> BTreeMap<String, EntityId> {
        g.entities_of(EntityKind::Theme).map(|e| (e.display_title().to_string(), e.id().clone())).collect()
    };
    let want = label(fixture);
    label(ingested).into_iter().map(|(l, id)| (id, want[&l].clone())).collect()
}
