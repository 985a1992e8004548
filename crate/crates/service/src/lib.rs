//! HTTP sessions for a human playing against the search agent.
//!
//! `POST /sessions` starts a game with the human as player 0,
//! `GET /sessions/{id}` returns the human's view and
//! `POST /sessions/{id}/actions` applies one human action, then lets the agent
//! play until it is the human's turn again.

pub mod error;
pub mod session;

use std::collections::HashMap;
use std::net::SocketAddr;
use std::sync::{Arc, Mutex as StdMutex};
use std::time::{Duration, Instant};

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::routing::{get, post};
use axum::{Json, Router};
use davinci_core::agent::AgentConfig;
use davinci_core::{GameState, RuleSet};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use tokio::sync::Mutex;
use tower_http::cors::CorsLayer;

pub use error::{ApiError, ErrorBody};
pub use session::{Action, Session, StateView};

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub idle_expiry: Duration,
    pub agent: AgentConfig,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig { idle_expiry: Duration::from_secs(3600), agent: AgentConfig::default() }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct CreateSession {
    pub rules: RuleSet,
    /// Falls back to the service default.
    pub agent: Option<AgentConfig>,
    /// Drawn from entropy when absent.
    pub seed: Option<u64>,
}

pub type SessionHandle = Arc<Mutex<Session>>;

#[derive(Default)]
pub struct AppState {
    pub config: ServiceConfig,
    sessions: StdMutex<HashMap<String, SessionHandle>>,
}

impl AppState {
    pub fn new(config: ServiceConfig) -> Arc<Self> {
        Arc::new(AppState { config, sessions: StdMutex::new(HashMap::new()) })
    }

    pub fn session(&self, id: &str) -> Option<SessionHandle> {
        self.sessions.lock().unwrap().get(id).cloned()
    }

    pub fn session_count(&self) -> usize {
        self.sessions.lock().unwrap().len()
    }

    /// Drops sessions idle for longer than the configured expiry.
    pub fn expire_idle(&self, now: Instant) {
        let ttl = self.config.idle_expiry;
        self.sessions.lock().unwrap().retain(|_, s| match s.try_lock() {
            Ok(s) => now.saturating_duration_since(s.last_active) < ttl,
            Err(_) => true,
        });
    }

    fn insert(&self, session: Session) -> SessionHandle {
        let id = session.id.clone();
        let handle = Arc::new(Mutex::new(session));
        self.sessions.lock().unwrap().insert(id, handle.clone());
        handle
    }
}

fn validate_agent(agent: &AgentConfig) -> Result<(), ApiError> {
    if agent.search.workers == 0 {
        return Err(ApiError::new(StatusCode::BAD_REQUEST, "invalid_config", "agent needs at least one worker"));
    }
    agent.search.per_worker.validate()?;
    Ok(())
}

fn body<T>(payload: Result<Json<T>, JsonRejection>) -> Result<T, ApiError> {
    payload.map(|Json(v)| v).map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, "bad_request", e.body_text()))
}

async fn create_session(
    State(app): State<Arc<AppState>>,
    payload: Result<Json<CreateSession>, JsonRejection>,
) -> Result<(StatusCode, Json<StateView>), ApiError> {
    let req = body(payload)?;
    app.expire_idle(Instant::now());
    let agent = req.agent.unwrap_or(app.config.agent);
    validate_agent(&agent)?;
    let seed = req.seed.unwrap_or_else(rand::random);
    let state = GameState::new(req.rules, seed)?;
    let session = Session {
        id: uuid::Uuid::new_v4().simple().to_string(),
        state,
        human: 0,
        agent,
        events: Vec::new(),
        rng: ChaCha8Rng::seed_from_u64(seed.rotate_left(32) ^ 0xa5a5_a5a5),
        last_active: Instant::now(),
    };
    let handle = app.insert(session);
    let view = handle.lock().await.view();
    Ok((StatusCode::CREATED, Json(view)))
}

async fn get_state(State(app): State<Arc<AppState>>, Path(id): Path<String>) -> Result<Json<StateView>, ApiError> {
    let handle = app.session(&id).ok_or_else(|| ApiError::not_found(&id))?;
    let mut s = handle.lock().await;
    s.last_active = Instant::now();
    Ok(Json(s.view()))
}

async fn post_action(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
    payload: Result<Json<Action>, JsonRejection>,
) -> Result<Json<StateView>, ApiError> {
    let handle = app.session(&id).ok_or_else(|| ApiError::not_found(&id))?;
    let action = body(payload)?;
    let mut s = handle.lock().await;
    s.last_active = Instant::now();
    s.apply_human(action)?;
    if s.agent_to_move() {
        let (state, human, agent, rng) = (s.state.clone(), s.human, s.agent, s.rng.clone());
        let (state, events, rng) = tokio::task::spawn_blocking(move || session::run_agents(state, human, agent, rng))
            .await
            .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string()))??;
        s.state = state;
        s.rng = rng;
        s.events.extend(events);
    }
    s.last_active = Instant::now();
    Ok(Json(s.view()))
}

pub fn router(app: Arc<AppState>) -> Router {
    Router::new()
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(get_state))
        .route("/sessions/{id}/actions", post(post_action))
        .layer(CorsLayer::permissive())
        .with_state(app)
}

/// Serves until the process is stopped, sweeping idle sessions once a minute.
pub async fn serve(addr: SocketAddr, config: ServiceConfig) -> std::io::Result<()> {
    let app = AppState::new(config);
    let sweeper = app.clone();
    tokio::spawn(async move {
        let mut tick = tokio::time::interval(Duration::from_secs(60));
        loop {
            tick.tick().await;
            sweeper.expire_idle(Instant::now());
        }
    });
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(app)).await
}
