//! Request handling independent of the HTTP transport. Each function
//! answers one endpoint from one snapshot.

use std::collections::BTreeMap;

use kfind_core::browse::{browse, page_from, BrowseError};
use kfind_core::expertise::{find_experts, profile_summary};
use kfind_core::query::{parse_query, print_query, QueryError};
use kfind_core::search::{evaluate, tokenize, RankedHit, SearchError};
use kfind_core::themes::{theme_rollup, theme_tree};
use kfind_core::{entity_view, EntityId, EntityKind, EntityRecord, Graph, Violation};
use serde::Serialize;
use serde_json::{json, Value};

use crate::artifacts::ApiSnapshot;

/// Terms shown on staff pages.
pub const PROFILE_TERMS: usize = 10;
pub const DEFAULT_EXPERTS: usize = 10;
pub const MAX_EXPERTS: usize = 500;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApiError {
    #[serde(skip)]
    pub status: u16,
    pub code: &'static str,
    pub message: String,
    pub detail: Value,
}

impl ApiError {
    pub fn new(status: u16, code: &'static str, message: impl Into<String>) -> Self {
        ApiError { status, code, message: message.into(), detail: Value::Null }
    }

    pub fn with_detail(mut self, detail: Value) -> Self {
        self.detail = detail;
        self
    }

    pub fn unknown_entity(id: &str) -> Self {
        ApiError::new(404, "UnknownEntity", format!("no entity `{id}`"))
    }

    pub fn snapshot_invalid(violations: &[Violation]) -> Self {
        ApiError::new(422, "SnapshotInvalid", format!("{} integrity violation(s)", violations.len()))
            .with_detail(json!({ "violations": violations }))
    }
}

impl From<QueryError> for ApiError {
    fn from(e: QueryError) -> Self {
        match e {
            QueryError::EmptyQuery => ApiError::new(400, "SyntaxError", e.to_string())
                .with_detail(json!({ "position": 0, "expected": "query" })),
            QueryError::Syntax { position, ref expected } => {
                let detail = json!({ "position": position, "expected": expected });
                ApiError::new(400, "SyntaxError", e.to_string()).with_detail(detail)
            }
        }
    }
}

impl From<SearchError> for ApiError {
    fn from(e: SearchError) -> Self {
        match &e {
            SearchError::UnknownTheme(r) => {
                ApiError::new(400, "UnknownTheme", e.to_string()).with_detail(json!({ "theme": r }))
            }
        }
    }
}

impl From<BrowseError> for ApiError {
    fn from(e: BrowseError) -> Self {
        match e {
            BrowseError::BadFilter(_) => ApiError::new(400, "BadFilter", e.to_string()),
            BrowseError::BadPaging(_) => ApiError::new(400, "BadPaging", e.to_string()),
        }
    }
}

pub type ApiResult = Result<Value, ApiError>;

fn lookup(graph: &Graph, raw: &str) -> Result<EntityId, ApiError> {
    raw.parse::<EntityId>()
        .ok()
        .filter(|id| graph.contains(id))
        .ok_or_else(|| ApiError::unknown_entity(raw))
}

fn terms_json(terms: Vec<(String, f64)>) -> Value {
    terms.into_iter().map(|(term, weight)| json!({ "term": term, "weight": weight })).collect()
}

/// GET /entities/{id}
pub fn entity(snap: &ApiSnapshot, raw_id: &str) -> ApiResult {
    let id = lookup(&snap.graph, raw_id)?;
    let view = entity_view(&snap.graph, &id).map_err(|_| ApiError::unknown_entity(raw_id))?;
    let mut body = serde_json::to_value(&view).expect("serialisable");
    match view.entity {
        EntityRecord::Theme(_) => {
            let agg = theme_rollup(&snap.graph, &id).map_err(|_| ApiError::unknown_entity(raw_id))?;
            body["aggregate"] = serde_json::to_value(agg).expect("serialisable");
        }
        EntityRecord::Staff(_) => {
            let terms = snap.profiles.get(&id).map(|p| profile_summary(p, PROFILE_TERMS)).unwrap_or_default();
            body["profile"] = terms_json(terms);
        }
        _ => {}
    }
    Ok(body)
}

/// GET /browse/{kind}; every parameter other than `offset` and `limit` is
/// a filter.
pub fn browse_kind(snap: &ApiSnapshot, kind: &str, params: &BTreeMap<String, String>) -> ApiResult {
    let kind: EntityKind = kind
        .parse()
        .map_err(|_| ApiError::new(404, "UnknownKind", format!("no entity kind `{kind}`")))?;
    let page = page_from(params.get("offset").map(String::as_str), params.get("limit").map(String::as_str))?;
    let filters: BTreeMap<String, String> = params
        .iter()
        .filter(|(k, _)| !matches!(k.as_str(), "offset" | "limit"))
        .map(|(k, v)| (k.clone(), v.clone()))
        .collect();
    Ok(serde_json::to_value(browse(&snap.graph, kind, &filters, page)?).expect("serialisable"))
}

/// One search hit with display fields.
pub fn hit_json(graph: &Graph, hit: &RankedHit) -> Value {
    json!({
        "id": hit.entity,
        "kind": hit.entity.kind(),
        "title": graph.get(&hit.entity).map(EntityRecord::display_title).unwrap_or_default(),
        "score": hit.score,
    })
}

/// Parses and evaluates `q`, returning the canonical query text and hits.
pub fn run_query(snap: &ApiSnapshot, q: &str) -> Result<(String, Vec<RankedHit>), ApiError> {
    let ast = parse_query(q)?;
    let hits = evaluate(&snap.index, &ast)?;
    Ok((print_query(&ast), hits))
}

/// GET /search?q&offset&limit
pub fn search(snap: &ApiSnapshot, params: &BTreeMap<String, String>) -> ApiResult {
    let page = page_from(params.get("offset").map(String::as_str), params.get("limit").map(String::as_str))?;
    let q = params.get("q").map(String::as_str).unwrap_or("");
    let (canonical, hits) = run_query(snap, q)?;
    let shown: Vec<Value> = page.slice(&hits).iter().map(|h| hit_json(&snap.graph, h)).collect();
    Ok(json!({
        "query": canonical,
        "total": hits.len(),
        "offset": page.offset,
        "limit": page.limit,
        "hits": shown,
    }))
}

/// Distinct query terms in first-seen order.
pub fn expert_terms(q: &str) -> Vec<String> {
    let mut terms: Vec<String> = Vec::new();
    for t in tokenize(q) {
        if !terms.contains(&t) {
            terms.push(t);
        }
    }
    terms
}

/// Ranked staff for `q`, with each person's name and strongest terms.
pub fn rank_experts(snap: &ApiSnapshot, q: &str, k: usize) -> Result<Vec<Value>, ApiError> {
    let terms = expert_terms(q);
    let ranked = find_experts(&snap.profiles, &terms, k)
        .map_err(|e| ApiError::new(400, "BadQuery", e.to_string()))?;
    Ok(ranked
        .into_iter()
        .map(|(id, score)| {
            let top = snap.profiles.get(&id).map(|p| profile_summary(p, 5)).unwrap_or_default();
            json!({
                "id": id,
                "name": snap.graph.get(&id).map(EntityRecord::display_title).unwrap_or_default(),
                "score": score,
                "top_terms": terms_json(top),
            })
        })
        .collect())
}

/// GET /experts?q&k
pub fn experts(snap: &ApiSnapshot, params: &BTreeMap<String, String>) -> ApiResult {
    let k = match params.get("k") {
        None => DEFAULT_EXPERTS,
        Some(raw) => raw
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|k| (1..=MAX_EXPERTS).contains(k))
            .ok_or_else(|| ApiError::new(400, "BadParam", format!("k must be between 1 and {MAX_EXPERTS}")))?,
    };
    let q = params.get("q").map(String::as_str).unwrap_or("");
    let experts = rank_experts(snap, q, k)?;
    Ok(json!({ "terms": expert_terms(q), "k": k, "experts": experts }))
}

/// GET /themes/tree
pub fn themes_tree(snap: &ApiSnapshot) -> ApiResult {
    Ok(json!({ "themes": theme_tree(&snap.graph) }))
}

/// GET /themes/{id}/rollup; accepts `theme:<id>` or a bare local id.
pub fn rollup(snap: &ApiSnapshot, raw_id: &str) -> ApiResult {
    let id = if raw_id.contains(':') {
        raw_id.to_owned()
    } else {
        format!("theme:{raw_id}")
    };
    let id = lookup(&snap.graph, &id).map_err(|_| ApiError::unknown_entity(raw_id))?;
    if id.kind() != EntityKind::Theme {
        return Err(ApiError::unknown_entity(raw_id));
    }
    let agg = theme_rollup(&snap.graph, &id).map_err(|_| ApiError::unknown_entity(raw_id))?;
    Ok(serde_json::to_value(agg).expect("serialisable"))
}

/// GET /health
pub fn health(snap: &ApiSnapshot) -> ApiResult {
    Ok(json!({
        "status": "ok",
        "checksum": snap.checksum,
        "built_at": snap.built_at,
        "schema_version": snap.graph.schema_version(),
        "entities": snap.graph.entity_count(),
        "links": snap.graph.links().len(),
        "index_warnings": snap.index.warnings(),
    }))
}
