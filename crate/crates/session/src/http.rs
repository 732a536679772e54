use std::collections::HashMap;
use std::sync::{Arc, Mutex, RwLock};

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::routing::{delete, get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use uuid::Uuid;

use mobius_bell::Mode;

use crate::error::SessionError;
use crate::session::{
    Choice, FinalReport, HumanRole, Role, Session, SessionConfig, StatsView, SubmitOutcome, TrialView,
};

/// Body of `POST /sessions`. Every field is optional.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CreateRequest {
    #[serde(default = "default_role")]
    pub mode: HumanRole,
    #[serde(default = "default_mode")]
    pub experiment_mode: Mode,
    /// Fresh entropy when absent.
    #[serde(default)]
    pub seed: Option<u64>,
    /// Simulated Alice's acceptance probability; human Bob sessions only.
    #[serde(default)]
    pub alice_p: Option<f64>,
}

fn default_role() -> HumanRole {
    HumanRole::HumanAlice
}

fn default_mode() -> Mode {
    Mode::Standard
}

impl Default for CreateRequest {
    fn default() -> Self {
        CreateRequest { mode: default_role(), experiment_mode: default_mode(), seed: None, alice_p: None }
    }
}

/// Per-player tokens. Requests name their player with `token`; it may be
/// omitted when the session has a single human player.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tokens {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alice: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bob: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CreateResponse {
    pub id: String,
    pub config: SessionConfig,
    pub tokens: Tokens,
    /// First trial for a single human player. With two human players each
    /// fetches their own view with their token.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trial: Option<TrialView>,
}

/// Body of `POST /sessions/{id}/choice`.
///
/// `choice` is `accept` or `reject` for Alice and `B` or `B'` for Bob.
/// `direction` (`cw` or `ccw`) accompanies a rejection in nonlocal mode.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChoiceRequest {
    #[serde(default)]
    pub token: Option<String>,
    pub choice: String,
    #[serde(default)]
    pub direction: Option<String>,
}

#[derive(Debug, Deserialize)]
struct TokenQuery {
    token: Option<String>,
}

struct Entry {
    tokens: Tokens,
    session: Mutex<Session>,
}

impl Entry {
    fn role(&self, token: Option<&str>) -> Result<Role, SessionError> {
        let session = self.lock();
        let humans = session.human_roles();
        match token {
            Some(t) => {
                let role = if self.tokens.alice.as_deref() == Some(t) {
                    Role::Alice
                } else if self.tokens.bob.as_deref() == Some(t) {
                    Role::Bob
                } else {
                    return Err(SessionError::ModeMismatch("token does not belong to a player of this session".into()));
                };
                Ok(role)
            }
            None if humans.len() == 1 => Ok(humans[0]),
            None => Err(SessionError::ModeMismatch("two human players: a token is required".into())),
        }
    }

    fn lock(&self) -> std::sync::MutexGuard<'_, Session> {
        self.session.lock().unwrap_or_else(|poisoned| poisoned.into_inner())
    }
}

/// Shared registry of sessions. Each session has its own lock, so requests
/// to one session are serialized and different sessions never contend.
#[derive(Clone, Default)]
pub struct AppState {
    sessions: Arc<RwLock<HashMap<String, Arc<Entry>>>>,
}

impl AppState {
    pub fn new() -> Self {
        AppState::default()
    }

    fn get(&self, id: &str) -> Result<Arc<Entry>, SessionError> {
        let map = self.sessions.read().unwrap_or_else(|p| p.into_inner());
        map.get(id).cloned().ok_or_else(|| SessionError::UnknownSession(id.to_owned()))
    }

    pub fn create(&self, req: CreateRequest) -> Result<CreateResponse, SessionError> {
        if req.alice_p.is_some() && req.mode != HumanRole::HumanBob {
            return Err(SessionError::ModeMismatch("alice_p applies only when a human plays Bob".into()));
        }
        let config = SessionConfig {
            mode: req.mode,
            experiment_mode: req.experiment_mode,
            seed: req.seed.unwrap_or_else(rand::random),
            alice_p: req.alice_p.unwrap_or(1.0),
        };
        let session = Session::new(config.clone())?;
        let token = || Some(Uuid::new_v4().simple().to_string());
        let tokens = match req.mode {
            HumanRole::HumanAlice => Tokens { alice: token(), bob: None },
            HumanRole::HumanBob => Tokens { alice: None, bob: token() },
            HumanRole::HumanBoth => Tokens { alice: token(), bob: token() },
        };
        let trial = match session.human_roles() {
            [only] => Some(session.trial_view(*only)?),
            _ => None,
        };
        let id = Uuid::new_v4().simple().to_string();
        let entry = Arc::new(Entry { tokens: tokens.clone(), session: Mutex::new(session) });
        self.sessions.write().unwrap_or_else(|p| p.into_inner()).insert(id.clone(), entry);
        Ok(CreateResponse { id, config, tokens, trial })
    }
}

/// Serves a fresh registry on `listener` until `shutdown` resolves.
pub async fn serve(
    listener: tokio::net::TcpListener,
    shutdown: impl std::future::Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    axum::serve(listener, router(AppState::new())).with_graceful_shutdown(shutdown).await
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/health", get(health))
        .route("/sessions", post(create))
        .route("/sessions/{id}", delete(close))
        .route("/sessions/{id}/trial", get(trial))
        .route("/sessions/{id}/choice", post(choice))
        .route("/sessions/{id}/advance", post(advance))
        .route("/sessions/{id}/stats", get(stats))
        .with_state(state)
}

type ApiResult<T> = Result<Json<T>, SessionError>;

async fn health() -> Json<Value> {
    Json(json!({ "status": "ok" }))
}

async fn create(State(state): State<AppState>, body: Bytes) -> Result<(StatusCode, Json<CreateResponse>), SessionError> {
    let req = if body.iter().all(u8::is_ascii_whitespace) {
        CreateRequest::default()
    } else {
        serde_json::from_slice(&body).map_err(|e| SessionError::ModeMismatch(format!("invalid session request: {e}")))?
    };
    Ok((StatusCode::CREATED, Json(state.create(req)?)))
}

async fn trial(State(state): State<AppState>, Path(id): Path<String>, Query(q): Query<TokenQuery>) -> ApiResult<TrialView> {
    let entry = state.get(&id)?;
    let role = entry.role(q.token.as_deref())?;
    let view = entry.lock().trial_view(role)?;
    Ok(Json(view))
}

async fn choice(
    State(state): State<AppState>,
    Path(id): Path<String>,
    Query(q): Query<TokenQuery>,
    body: Bytes,
) -> ApiResult<SubmitOutcome> {
    let entry = state.get(&id)?;
    let req: ChoiceRequest =
        serde_json::from_slice(&body).map_err(|e| SessionError::BadChoice(format!("invalid choice body: {e}")))?;
    let role = entry.role(req.token.as_deref().or(q.token.as_deref()))?;
    let choice = Choice::parse(&req.choice, req.direction.as_deref())?;
    let outcome = entry.lock().submit(role, choice)?;
    Ok(Json(outcome))
}

async fn advance(State(state): State<AppState>, Path(id): Path<String>, Query(q): Query<TokenQuery>) -> ApiResult<TrialView> {
    let entry = state.get(&id)?;
    let role = entry.role(q.token.as_deref())?;
    let mut session = entry.lock();
    session.advance()?;
    Ok(Json(session.trial_view(role)?))
}

async fn stats(State(state): State<AppState>, Path(id): Path<String>) -> ApiResult<StatsView> {
    Ok(Json(state.get(&id)?.lock().stats()?))
}

async fn close(State(state): State<AppState>, Path(id): Path<String>) -> ApiResult<FinalReport> {
    Ok(Json(state.get(&id)?.lock().close()?))
}
