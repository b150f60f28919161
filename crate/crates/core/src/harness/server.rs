//! HTTP service hosting dialog sessions for the chat UI.
//!
//! Turns on one session are serialized: a turn that arrives while another
//! is running on the same session gets `409 Conflict` instead of waiting.

use std::collections::HashMap;
use std::path::{Component, Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use axum::body::Bytes;
use axum::extract::{Path as UrlPath, State};
use axum::http::{header, StatusCode, Uri};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Deserialize;
use serde_json::{json, Value};
use tokio::sync::{Mutex, RwLock};
use tower_http::trace::TraceLayer;

use crate::dialog::{parse_kb_facts, DialogAgent, DialogState};

#[derive(Clone, Debug, Default)]
pub struct ServerConfig {
    pub port: u16,
    /// Holds `ui/` (built chat UI) and optionally `restaurants.txt`, the
    /// restaurant table given to new sessions.
    pub data_dir: Option<PathBuf>,
    /// Sessions are persisted here as `<id>.json` when set.
    pub session_dir: Option<PathBuf>,
    /// Artificial latency added to every turn. Only useful in tests.
    pub turn_delay: Duration,
}

impl ServerConfig {
    /// `PORT` (default 8080), `DATA_DIR`, `SESSION_DIR`.
    pub fn from_env() -> Self {
        let var = |k: &str| std::env::var(k).ok().filter(|v| !v.is_empty());
        ServerConfig {
            port: var("PORT").and_then(|p| p.parse().ok()).unwrap_or(8080),
            data_dir: var("DATA_DIR").map(PathBuf::from),
            session_dir: var("SESSION_DIR").map(PathBuf::from),
            turn_delay: Duration::ZERO,
        }
    }
}

type Session = Arc<Mutex<DialogState>>;

pub struct AppState {
    agent: DialogAgent,
    sessions: RwLock<HashMap<String, Session>>,
    config: ServerConfig,
    restaurants: Vec<(String, String, String)>,
}

impl AppState {
    pub fn new(agent: DialogAgent, config: ServerConfig) -> Result<Arc<Self>, crate::Error> {
        let mut restaurants = Vec::new();
        if let Some(dir) = &config.data_dir {
            let path = dir.join("restaurants.txt");
            if path.exists() {
                restaurants = parse_kb_facts(&super::read_file(&path)?)?;
            }
        }
        let mut sessions = HashMap::new();
        if let Some(dir) = &config.session_dir {
            std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
            for entry in std::fs::read_dir(dir).map_err(|e| io_err(dir, e))? {
                let path = entry.map_err(|e| io_err(dir, e))?.path();
                if path.extension().is_some_and(|e| e == "json") {
                    match DialogState::from_json(&super::read_file(&path)?) {
                        Ok(state) => {
                            sessions.insert(state.session_id.clone(), Arc::new(Mutex::new(state)));
                        }
                        Err(e) => tracing::warn!(path = %path.display(), error = %e, "skipping unreadable session"),
                    }
                }
            }
        }
        Ok(Arc::new(AppState { agent, sessions: RwLock::new(sessions), config, restaurants }))
    }

    async fn session(&self, id: &str) -> Option<Session> {
        self.sessions.read().await.get(id).cloned()
    }

    fn persist(&self, state: &DialogState) {
        if let Some(dir) = &self.config.session_dir {
            let path = dir.join(format!("{}.json", state.session_id));
            if let Err(e) = std::fs::write(&path, state.to_json()) {
                tracing::error!(path = %path.display(), error = %e, "could not persist session");
            }
        }
    }
}

fn io_err(path: &Path, e: std::io::Error) -> crate::Error {
    crate::Error::Io { path: path.display().to_string(), msg: e.to_string() }
}

fn error(status: StatusCode, msg: impl Into<String>) -> Response {
    (status, Json(json!({ "error": msg.into() }))).into_response()
}

fn slots_json(state: &DialogState) -> Value {
    serde_json::to_value(&state.slots).expect("slots serialize")
}

#[derive(Deserialize)]
struct NewSession {
    #[serde(default)]
    kb: Option<String>,
}

#[derive(Deserialize)]
struct TurnBody {
    text: String,
}

async fn create_session(State(app): State<Arc<AppState>>, body: Bytes) -> Response {
    let mut kb = app.restaurants.clone();
    if !body.is_empty() {
        let req: NewSession = match serde_json::from_slice(&body) {
            Ok(r) => r,
            Err(e) => return error(StatusCode::BAD_REQUEST, e.to_string()),
        };
        if let Some(text) = req.kb {
            match parse_kb_facts(&text) {
                Ok(rows) => kb = rows,
                Err(e) => return error(StatusCode::BAD_REQUEST, e.to_string()),
            }
        }
    }
    let id = uuid::Uuid::new_v4().to_string();
    let state = DialogState::new(id.clone()).with_kb(kb);
    app.persist(&state);
    let fsm = state.fsm;
    app.sessions.write().await.insert(id.clone(), Arc::new(Mutex::new(state)));
    tracing::info!(session = %id, "session created");
    (StatusCode::CREATED, Json(json!({ "session_id": id, "fsm_state": fsm }))).into_response()
}

async fn turn(State(app): State<Arc<AppState>>, UrlPath(id): UrlPath<String>, body: Bytes) -> Response {
    let req: TurnBody = match serde_json::from_slice(&body) {
        Ok(r) => r,
        Err(e) => return error(StatusCode::BAD_REQUEST, e.to_string()),
    };
    let Some(session) = app.session(&id).await else {
        return error(StatusCode::NOT_FOUND, format!("unknown session {id}"));
    };
    let Ok(mut guard) = session.try_lock_owned() else {
        return error(StatusCode::CONFLICT, "a turn is already running on this session");
    };
    if !app.config.turn_delay.is_zero() {
        tokio::time::sleep(app.config.turn_delay).await;
    }
    let worker = app.clone();
    let result = tokio::task::spawn_blocking(move || {
        let outcome = worker.agent.step(&mut guard, &req.text);
        if outcome.is_ok() {
            worker.persist(&guard);
        }
        outcome.map(|o| (o, slots_json(&guard)))
    })
    .await;
    match result {
        Ok(Ok((outcome, slots))) => {
            tracing::info!(session = %id, from = %outcome.from, to = %outcome.to, act = %outcome.act, "turn");
            Json(json!({
                "response": outcome.response,
                "fsm_state": outcome.to,
                "slots": slots,
                "justification": outcome.justification,
            }))
            .into_response()
        }
        Ok(Err(e)) => error(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()),
        Err(e) => error(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()),
    }
}

async fn history(State(app): State<Arc<AppState>>, UrlPath(id): UrlPath<String>) -> Response {
    let Some(session) = app.session(&id).await else {
        return error(StatusCode::NOT_FOUND, format!("unknown session {id}"));
    };
    let state = session.lock().await;
    Json(json!({
        "session_id": state.session_id,
        "fsm_state": state.fsm,
        "slots": slots_json(&state),
        "history": state.history,
    }))
    .into_response()
}

async fn delete_session(State(app): State<Arc<AppState>>, UrlPath(id): UrlPath<String>) -> Response {
    if app.sessions.write().await.remove(&id).is_none() {
        return error(StatusCode::NOT_FOUND, format!("unknown session {id}"));
    }
    if let Some(dir) = &app.config.session_dir {
        let _ = std::fs::remove_file(dir.join(format!("{id}.json")));
    }
    StatusCode::NO_CONTENT.into_response()
}

fn content_type(path: &Path) -> &'static str {
    match path.extension().and_then(|e| e.to_str()) {
        Some("html") => "text/html; charset=utf-8",
        Some("js" | "mjs") => "text/javascript",
        Some("css") => "text/css",
        Some("json") => "application/json",
        Some("svg") => "image/svg+xml",
        Some("png") => "image/png",
        Some("ico") => "image/x-icon",
        _ => "application/octet-stream",
    }
}

/// Serves the built chat UI from `DATA_DIR/ui`.
async fn static_file(State(app): State<Arc<AppState>>, uri: Uri) -> Response {
    let Some(root) = app.config.data_dir.as_ref().map(|d| d.join("ui")) else {
        return error(StatusCode::NOT_FOUND, "no UI configured");
    };
    let rel = Path::new(uri.path().trim_start_matches('/'));
    if rel.components().any(|c| !matches!(c, Component::Normal(_))) {
        return error(StatusCode::NOT_FOUND, "not found");
    }
    let mut path = root.join(rel);
    if rel.as_os_str().is_empty() || path.is_dir() {
        path = path.join("index.html");
    }
    match tokio::fs::read(&path).await {
        Ok(bytes) => ([(header::CONTENT_TYPE, content_type(&path))], bytes).into_response(),
        Err(_) => error(StatusCode::NOT_FOUND, "not found"),
    }
}

pub fn router(app: Arc<AppState>) -> Router {
    Router::new()
        .route("/api/session", post(create_session))
        .route("/api/session/{id}/turn", post(turn))
        .route("/api/session/{id}/history", get(history))
        .route("/api/session/{id}", axum::routing::delete(delete_session))
        .fallback(get(static_file))
        .layer(TraceLayer::new_for_http())
        .with_state(app)
}

/// Binds `config.port` and serves until interrupted.
pub async fn serve_http(config: ServerConfig, agent: DialogAgent) -> Result<(), crate::Error> {
    let addr = std::net::SocketAddr::from(([0, 0, 0, 0], config.port));
    let app = AppState::new(agent, config)?;
    let listener = tokio::net::TcpListener::bind(addr)
        .await
        .map_err(|e| crate::Error::Io { path: addr.to_string(), msg: e.to_string() })?;
    tracing::info!(%addr, "listening");
    axum::serve(listener, router(app))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
        .map_err(|e| crate::Error::Io { path: addr.to_string(), msg: e.to_string() })
}
