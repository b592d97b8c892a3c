//! HTTP service over the current snapshot.
//!
//! Each request takes one reference to the active snapshot and answers from
//! it alone; reload builds the replacement first and then swaps the
//! reference, so a response never mixes two snapshots. Every response
//! carries the checksum of the snapshot that produced it.

use std::collections::BTreeMap;
use std::net::SocketAddr;
use std::path::{Path as FsPath, PathBuf};
use std::sync::{Arc, RwLock};

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Deserialize;
use serde_json::json;

use crate::api::{self, ApiError, ApiResult};
use crate::artifacts::{ApiSnapshot, LoadError};

pub const CHECKSUM_HEADER: &str = "x-snapshot-checksum";

pub struct AppState {
    current: RwLock<Arc<ApiSnapshot>>,
    corpus_root: PathBuf,
}

impl AppState {
    pub fn new(snapshot: ApiSnapshot, corpus_root: impl Into<PathBuf>) -> Arc<Self> {
        Arc::new(AppState {
            current: RwLock::new(Arc::new(snapshot)),
            corpus_root: corpus_root.into(),
        })
    }

    pub fn snapshot(&self) -> Arc<ApiSnapshot> {
        Arc::clone(&self.current.read().unwrap_or_else(|e| e.into_inner()))
    }

    /// Loads `path` and makes it current. On failure the active snapshot is
    /// left in place.
    pub fn reload(&self, path: &FsPath) -> Result<Arc<ApiSnapshot>, LoadError> {
        let next = Arc::new(ApiSnapshot::load(path, &self.corpus_root)?);
        *self.current.write().unwrap_or_else(|e| e.into_inner()) = Arc::clone(&next);
        Ok(next)
    }
}

fn respond(checksum: &str, result: ApiResult) -> Response {
    let mut response = match result {
        Ok(body) => Json(body).into_response(),
        Err(e) => {
            let status = StatusCode::from_u16(e.status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
            (status, Json(e)).into_response()
        }
    };
    if let Ok(v) = HeaderValue::from_str(checksum) {
        response.headers_mut().insert(CHECKSUM_HEADER, v);
    }
    response
}

type Shared = State<Arc<AppState>>;
type Params = Query<BTreeMap<String, String>>;

async fn entity(State(st): Shared, Path(id): Path<String>) -> Response {
    let snap = st.snapshot();
    respond(&snap.checksum, api::entity(&snap, &id))
}

async fn browse(State(st): Shared, Path(kind): Path<String>, Query(p): Params) -> Response {
    let snap = st.snapshot();
    respond(&snap.checksum, api::browse_kind(&snap, &kind, &p))
}

async fn search(State(st): Shared, Query(p): Params) -> Response {
    let snap = st.snapshot();
    respond(&snap.checksum, api::search(&snap, &p))
}

async fn experts(State(st): Shared, Query(p): Params) -> Response {
    let snap = st.snapshot();
    respond(&snap.checksum, api::experts(&snap, &p))
}

async fn themes_tree(State(st): Shared) -> Response {
    let snap = st.snapshot();
    respond(&snap.checksum, api::themes_tree(&snap))
}

async fn rollup(State(st): Shared, Path(id): Path<String>) -> Response {
    let snap = st.snapshot();
    respond(&snap.checksum, api::rollup(&snap, &id))
}

async fn health(State(st): Shared) -> Response {
    let snap = st.snapshot();
    respond(&snap.checksum, api::health(&snap))
}

#[derive(Deserialize)]
struct ReloadRequest {
    path: PathBuf,
}

async fn reload(State(st): Shared, body: Bytes) -> Response {
    let req: ReloadRequest = match serde_json::from_slice(&body) {
        Ok(r) => r,
        Err(e) => {
            let err = ApiError::new(400, "BadRequest", format!("expected {{\"path\": ...}}: {e}"));
            return respond(&st.snapshot().checksum, Err(err));
        }
    };
    let worker = Arc::clone(&st);
    let outcome = tokio::task::spawn_blocking(move || worker.reload(&req.path)).await;
    match outcome {
        Ok(Ok(snap)) => {
            let body = json!({
                "status": "reloaded",
                "checksum": snap.checksum,
                "built_at": snap.built_at,
                "entities": snap.graph.entity_count(),
            });
            respond(&snap.checksum, Ok(body))
        }
        Ok(Err(e)) => {
            let err = match &e {
                LoadError::Invalid(v) => ApiError::snapshot_invalid(v),
                LoadError::Snapshot(_) => ApiError::new(422, "SnapshotInvalid", e.to_string()),
                LoadError::Io { .. } => ApiError::new(400, "SnapshotUnreadable", e.to_string()),
            };
            respond(&st.snapshot().checksum, Err(err))
        }
        Err(e) => respond(
            &st.snapshot().checksum,
            Err(ApiError::new(500, "Internal", e.to_string())),
        ),
    }
}

async fn not_found(State(st): Shared) -> Response {
    respond(&st.snapshot().checksum, Err(ApiError::new(404, "NotFound", "no such endpoint")))
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/entities/{id}", get(entity))
        .route("/browse/{kind}", get(browse))
        .route("/search", get(search))
        .route("/experts", get(experts))
        .route("/themes/tree", get(themes_tree))
        .route("/themes/{id}/rollup", get(rollup))
        .route("/health", get(health))
        .route("/admin/reload", post(reload))
        .fallback(not_found)
        .with_state(state)
}

/// Serves until interrupted.
pub async fn serve(state: Arc<AppState>, addr: SocketAddr) -> std::io::Result<()> {
    serve_on(state, tokio::net::TcpListener::bind(addr).await?).await
}

pub async fn serve_on(state: Arc<AppState>, listener: tokio::net::TcpListener) -> std::io::Result<()> {
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
