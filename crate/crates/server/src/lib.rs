//! HTTP service for interactive plays of the multiplayer game.
//!
//! Endpoints:
//!
//! - `POST /sessions` creates a session and returns its id
//! - `GET /sessions/{id}/view?player=p` is player `p`'s observation
//! - `POST /sessions/{id}/move` with `{"player": p, "direction": "B"}`
//! - `POST /sessions/{id}/auto` with `{"player": p}`
//! - `GET /sessions/{id}/transcript[?player=p]`
//! - `GET /healthz`
//!
//! Errors are JSON objects `{"error": "..."}` with status 400 for bad input,
//! 403 for moves out of turn and hidden information, 404 for unknown ids.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};

use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};

use hypergame::session::{EnginePolicy, OpponentPolicy, Session, SessionError, SessionOptions, View};
use hypergame::{parse_hyperltl, parse_ks};

/// Inputs used when a create request leaves them out.
#[derive(Debug, Clone, Default)]
pub struct Defaults {
    pub ks: Option<String>,
    pub formula: Option<String>,
    pub prophecies: Option<String>,
}

#[derive(Clone, Default)]
pub struct AppState {
    sessions: Arc<Mutex<HashMap<String, Arc<Mutex<Session>>>>>,
    next_id: Arc<AtomicU64>,
    defaults: Arc<Defaults>,
}

impl AppState {
    pub fn new(defaults: Defaults) -> Self {
        AppState {
            defaults: Arc::new(defaults),
            ..Default::default()
        }
    }

    fn session(&self, id: &str) -> Result<Arc<Mutex<Session>>, ApiError> {
        self.sessions
            .lock()
            .unwrap()
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError(StatusCode::NOT_FOUND, format!("no session '{id}'")))
    }
}

#[derive(Debug)]
pub struct ApiError(pub StatusCode, pub String);

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.0, Json(serde_json::json!({ "error": self.1 }))).into_response()
    }
}

impl From<SessionError> for ApiError {
    fn from(e: SessionError) -> Self {
        let status = match e {
            SessionError::NotHuman(_) | SessionError::NotYourTurn { .. } => StatusCode::FORBIDDEN,
            _ => StatusCode::BAD_REQUEST,
        };
        ApiError(status, e.to_string())
    }
}

fn bad(msg: impl Into<String>) -> ApiError {
    ApiError(StatusCode::BAD_REQUEST, msg.into())
}

#[derive(Debug, Deserialize)]
pub struct CreateRequest {
    pub ks: Option<String>,
    pub formula: Option<String>,
    pub prophecies: Option<String>,
    #[serde(default)]
    pub human_players: Vec<usize>,
    /// `random` (default) or `adversarial`.
    pub opponent: Option<String>,
    /// `random` or `certificate`.
    pub engine: Option<String>,
    pub certificate: Option<String>,
    #[serde(default)]
    pub seed: u64,
    pub horizon: Option<usize>,
}

#[derive(Debug, Serialize)]
pub struct CreateResponse {
    pub id: String,
    pub players: usize,
    pub coalition: Vec<usize>,
    pub human_players: Vec<usize>,
    pub directions: Vec<String>,
    /// View of the human player to move, if any.
    pub view: Option<View>,
}

#[derive(Debug, Deserialize)]
pub struct PlayerQuery {
    pub player: Option<usize>,
}

#[derive(Debug, Deserialize)]
pub struct MoveRequest {
    pub player: usize,
    pub direction: String,
}

#[derive(Debug, Deserialize)]
pub struct AutoRequest {
    pub player: usize,
}

fn options(req: &CreateRequest, prophecies: Option<String>) -> Result<SessionOptions, ApiError> {
    let opponent = match req.opponent.as_deref() {
        None | Some("random") => OpponentPolicy::Random,
        Some("adversarial") => OpponentPolicy::Adversarial,
        Some(o) => return Err(bad(format!("unknown opponent policy '{o}'"))),
    };
    let engine = match (req.engine.as_deref(), &req.certificate) {
        (None, None) => None,
        (Some("random"), _) => Some(EnginePolicy::Random),
        (Some("certificate") | None, Some(text)) => Some(EnginePolicy::Certificate(text.clone())),
        (Some("certificate"), None) => return Err(bad("engine 'certificate' needs a certificate")),
        (Some(e), _) => return Err(bad(format!("unknown engine policy '{e}'"))),
    };
    let mut o = SessionOptions {
        prophecies,
        human_players: req.human_players.clone(),
        opponent,
        engine,
        seed: req.seed,
        ..Default::default()
    };
    if let Some(h) = req.horizon {
        o.horizon = h;
    }
    Ok(o)
}

async fn create(State(st): State<AppState>, Json(req): Json<CreateRequest>) -> Result<Json<CreateResponse>, ApiError> {
    let d = &st.defaults;
    let ks_text = req.ks.clone().or_else(|| d.ks.clone()).ok_or_else(|| bad("missing 'ks'"))?;
    let f_text = req.formula.clone().or_else(|| d.formula.clone()).ok_or_else(|| bad("missing 'formula'"))?;
    let prophecies = if req.ks.is_some() || req.formula.is_some() {
        req.prophecies.clone()
    } else {
        req.prophecies.clone().or_else(|| d.prophecies.clone())
    };
    let opts = options(&req, prophecies)?;
    let ks = parse_ks(&ks_text).map_err(|e| bad(format!("model: {e}")))?;
    let f = parse_hyperltl(&f_text).map_err(|e| bad(format!("formula: {e}")))?;
    let session = tokio::task::spawn_blocking(move || Session::new(&ks, &f, opts))
        .await
        .map_err(|e| ApiError(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))??;
    let id = format!("s{}", st.next_id.fetch_add(1, Ordering::Relaxed) + 1);
    let g = session.game();
    let turn = session.turn();
    let view = session.view(turn).ok();
    let resp = CreateResponse {
        id: id.clone(),
        players: g.num_players(),
        coalition: g.coalition().to_vec(),
        human_players: session.human_players().to_vec(),
        directions: g.ks().directions().to_vec(),
        view,
    };
    log::info!("created session {id}");
    st.sessions.lock().unwrap().insert(id, Arc::new(Mutex::new(session)));
    Ok(Json(resp))
}

async fn view(
    State(st): State<AppState>,
    Path(id): Path<String>,
    Query(q): Query<PlayerQuery>,
) -> Result<Json<View>, ApiError> {
    let p = q.player.ok_or_else(|| bad("missing 'player'"))?;
    let s = st.session(&id)?;
    let v = s.lock().unwrap().view(p)?;
    Ok(Json(v))
}

async fn apply(
    State(st): State<AppState>,
    Path(id): Path<String>,
    Json(req): Json<MoveRequest>,
) -> Result<Json<View>, ApiError> {
    let s = st.session(&id)?;
    let v = s.lock().unwrap().apply_move(req.player, &req.direction)?;
    Ok(Json(v))
}

async fn auto(
    State(st): State<AppState>,
    Path(id): Path<String>,
    Json(req): Json<AutoRequest>,
) -> Result<Json<View>, ApiError> {
    let s = st.session(&id)?;
    let v = s.lock().unwrap().auto_move(req.player)?;
    Ok(Json(v))
}

/// With `player`, that player's own rows; without, the full record, which
/// is only released once the play is over or when no human takes part.
async fn transcript(
    State(st): State<AppState>,
    Path(id): Path<String>,
    Query(q): Query<PlayerQuery>,
) -> Result<Response, ApiError> {
    let s = st.session(&id)?;
    let s = s.lock().unwrap();
    match q.player {
        Some(p) => {
            let v = s.view(p)?;
            Ok(Json(serde_json::json!({ "player": p, "finished": v.finished, "rows": v.transcript })).into_response())
        }
        None => {
            if !s.finished() && !s.human_players().is_empty() {
                return Err(ApiError(
                    StatusCode::FORBIDDEN,
                    "the full transcript is hidden until the play is over".into(),
                ));
            }
            Ok(Json(s.transcript()).into_response())
        }
    }
}

async fn healthz() -> &'static str {
    "ok"
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/healthz", get(healthz))
        .route("/sessions", post(create))
        .route("/sessions/{id}/view", get(view))
        .route("/sessions/{id}/move", post(apply))
        .route("/sessions/{id}/auto", post(auto))
        .route("/sessions/{id}/transcript", get(transcript))
        .with_state(state)
}

/// Serves until the process is stopped.
pub async fn serve(listener: tokio::net::TcpListener, state: AppState) -> std::io::Result<()> {
    axum::serve(listener, router(state)).await
}
