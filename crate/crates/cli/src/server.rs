//! JSON service over a workspace. Reads run concurrently; FPD writes and
//! reruns go through one writer at a time.

use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Deserialize;
use serde_json::{json, Value};
use tokio::sync::{Mutex, RwLock};
use tower_http::services::ServeDir;

use gifpo::gif::FpdEntry;
use gifpo::workbench::{FpdCheck, PointQuery, Session, WorkbenchError, Workspace};

/// Bumped when a response shape changes.
pub const API_VERSION: u32 = 1;

pub struct AppState {
    pub ws: Workspace,
    pub session: RwLock<Session>,
    writer: Mutex<()>,
}

impl AppState {
    pub fn new(ws: Workspace, session: Session) -> Arc<AppState> {
        Arc::new(AppState { ws, session: RwLock::new(session), writer: Mutex::new(()) })
    }

    /// State for the latest run of `dir`.
    pub fn load(dir: &Path) -> Result<Arc<AppState>, String> {
        let ws = Workspace::open(dir).map_err(|e| e.to_string())?;
        let s = ws
            .latest()
            .map_err(|e| e.to_string())?
            .ok_or_else(|| format!("{} has no runs yet; use `gifpo run` first", dir.display()))?;
        Ok(AppState::new(ws, s))
    }
}

struct ApiError(StatusCode, String);

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.0, Json(json!({ "error": self.1, "api_version": API_VERSION }))).into_response()
    }
}

fn internal(e: impl std::fmt::Display) -> ApiError {
    ApiError(StatusCode::INTERNAL_SERVER_ERROR, e.to_string())
}

fn stamped(mut v: Value) -> Json<Value> {
    v["api_version"] = json!(API_VERSION);
    Json(v)
}

pub fn router(state: Arc<AppState>, ui: Option<&Path>) -> Router {
    let api = Router::new()
        .route("/api/summary", get(summary))
        .route("/api/points", get(points))
        .route("/api/curve", get(curve))
        .route("/api/source", get(source))
        .route("/api/fpd", post(add_fpd))
        .route("/api/rerun", post(rerun))
        .with_state(state);
    match ui {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    }
}

async fn summary(State(st): State<Arc<AppState>>) -> Json<Value> {
    stamped(st.session.read().await.summary_json())
}

async fn points(State(st): State<Arc<AppState>>, Query(q): Query<PointQuery>) -> Result<Json<Value>, ApiError> {
    let s = st.session.read().await;
    s.points_json(&q).map(stamped).map_err(|e| ApiError(StatusCode::BAD_REQUEST, e.to_string()))
}

async fn curve(State(st): State<Arc<AppState>>) -> Result<Json<Value>, ApiError> {
    st.session.read().await.curve_json().map(stamped).map_err(internal)
}

#[derive(Deserialize)]
struct SourceQuery {
    gate: Option<String>,
}

async fn source(State(st): State<Arc<AppState>>, Query(q): Query<SourceQuery>) -> Json<Value> {
    stamped(st.session.read().await.source_json(q.gate.as_deref()))
}

async fn add_fpd(State(st): State<Arc<AppState>>, body: Bytes) -> Result<Json<Value>, ApiError> {
    let entry: FpdEntry = serde_json::from_slice(&body).map_err(|e| ApiError(StatusCode::BAD_REQUEST, e.to_string()))?;
    let _w = st.writer.lock().await;
    let _lock = st.ws.lock().map_err(|e| ApiError(StatusCode::CONFLICT, e.to_string()))?;
    let mut s = st.session.write().await;
    match s.fpd_targets(&entry) {
        Err(FpdCheck::Malformed(m)) => return Err(ApiError(StatusCode::BAD_REQUEST, m)),
        Err(FpdCheck::NoMatch) => return Err(ApiError(StatusCode::NOT_FOUND, "entry matches no GIF-PO point".into())),
        Err(FpdCheck::Covered(ps)) => {
            let names: Vec<String> = ps.iter().map(|&p| s.model.universe.describe(&s.model.elab, p)).collect();
            return Err(ApiError(StatusCode::CONFLICT, format!("covered points cannot be unreachable: {}", names.join("; "))));
        }
        Ok(_) => {}
    }
    st.ws.append_fpd(&entry).map_err(internal)?;
    let marked = s.apply_entry(&entry);
    let mut v = s.summary_json();
    v["marked"] = json!(marked);
    Ok(stamped(v))
}

#[derive(Deserialize)]
struct RerunBody {
    stimulus_path: String,
}

async fn rerun(State(st): State<Arc<AppState>>, body: Bytes) -> Result<Json<Value>, ApiError> {
    let req: RerunBody = serde_json::from_slice(&body).map_err(|e| ApiError(StatusCode::BAD_REQUEST, e.to_string()))?;
    let _w = st.writer.lock().await;
    let path = st.ws.resolve(&req.stimulus_path);
    let text = std::fs::read_to_string(&path)
        .map_err(|e| ApiError(StatusCode::NOT_FOUND, format!("{}: {e}", path.display())))?;
    let ws = st.ws.clone();
    let fresh = tokio::task::spawn_blocking(move || {
        let _lock = ws.lock()?;
        ws.run(&text, &[])
    })
    .await
    .map_err(internal)?;
    let fresh = fresh.map_err(|e| match e {
        WorkbenchError::Locked(_) => ApiError(StatusCode::CONFLICT, e.to_string()),
        WorkbenchError::Sim(_) | WorkbenchError::Parse(_) => ApiError(StatusCode::BAD_REQUEST, e.to_string()),
        e => internal(e),
    })?;
    let v = fresh.summary_json();
    *st.session.write().await = fresh;
    Ok(stamped(v))
}

pub fn serve_blocking(dir: &Path, addr: SocketAddr, ui: Option<&Path>) -> Result<(), String> {
    let state = AppState::load(dir)?;
    let ui: Option<PathBuf> = ui.map(Path::to_path_buf);
    let rt = tokio::runtime::Runtime::new().map_err(|e| e.to_string())?;
    rt.block_on(async move {
        let listener = tokio::net::TcpListener::bind(addr).await.map_err(|e| format!("{addr}: {e}"))?;
        eprintln!("serving {} on http://{addr}", dir.display());
        axum::serve(listener, router(state, ui.as_deref())).await.map_err(|e| e.to_string())
    })
}
