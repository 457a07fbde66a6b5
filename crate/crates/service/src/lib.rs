//! HTTP/JSON front end for interactive elicitation sessions.
//!
//! | Method | Path | Body | Response |
//! |---|---|---|---|
//! | `POST` | `/sessions` | [`CreateSession`] | [`SessionView`] (201) |
//! | `GET` | `/sessions/{id}` | | [`SessionView`] |
//! | `PUT` | `/sessions/{id}/judgments` | [`JudgmentWrite`] | [`SessionView`] |
//! | `POST` | `/sessions/{id}/whatif` | [`Judgment`] | [`MatrixAnalysis`] |
//! | `PUT` | `/sessions/{id}/coin` | [`CoinWrite`] | [`SessionView`] |
//! | `POST` | `/panels/aggregate` | [`Panel`] | [`PanelResult`] |
//! | `GET` | `/census?n=3..10&samples=&seed=&threshold=` | | `[CensusResult]` |
//!
//! Errors are `{"error": kind, "message": …}` with status 404 for unknown
//! sessions, 409 for writes based on a stale revision and 422 for
//! validation failures.

mod error;
mod session;
mod store;

use std::future::Future;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::routing::{get, post, put};
use axum::{Json, Router};
use pmm_ahp::montecarlo::{consistency_census, parse_dimensions, CensusResult, MonteCarloRi};
use pmm_ahp::{analyze, CoinVector, ComparisonMatrix, MatrixAnalysis, Panel, PriorityVector};
use serde::{Deserialize, Serialize};
use tokio::net::TcpListener;

pub use error::ServiceError;
pub use session::{
    CoinWrite, CreateSession, Judgment, JudgmentWrite, Mode, Session, SessionReport, SessionState,
    SessionView, MAX_SESSION_N,
};
pub use store::SessionStore;

/// Upper bound on `samples` for `/census`, which runs in-request.
pub const MAX_CENSUS_SAMPLES: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct ServiceConfig {
    pub data_dir: PathBuf,
    /// Sample count and seed of the self-estimated random index used in
    /// consistency reports.
    pub ri_samples: usize,
    pub ri_seed: u64,
}

impl ServiceConfig {
    pub fn new(data_dir: impl Into<PathBuf>) -> Self {
        let ri = MonteCarloRi::default();
        ServiceConfig {
            data_dir: data_dir.into(),
            ri_samples: ri.samples,
            ri_seed: ri.seed,
        }
    }
}

#[derive(Clone)]
pub struct AppState {
    pub store: Arc<SessionStore>,
    pub ri: Arc<MonteCarloRi>,
}

impl AppState {
    pub fn open(config: &ServiceConfig) -> std::io::Result<Self> {
        Ok(AppState {
            store: Arc::new(SessionStore::open(&config.data_dir)?),
            ri: Arc::new(MonteCarloRi::new(config.ri_samples, config.ri_seed)),
        })
    }

    /// The report the service attaches to `session`.
    pub fn report(&self, session: &Session) -> Result<SessionReport, ServiceError> {
        match session.matrix() {
            Some(m) => Ok(SessionReport::Complete(Box::new(analyze(
                &m,
                &*self.ri,
                session.delta,
            )?))),
            None => {
                let missing = session.missing();
                let total = session.n * (session.n - 1);
                let placeholder = match &session.state {
                    SessionState::Pairwise { entries } => {
                        let rows: Vec<Vec<f64>> = entries
                            .iter()
                            .map(|r| r.iter().map(|v| v.unwrap_or(1.0)).collect())
                            .collect();
                        ComparisonMatrix::from_rows(&rows)?
                    }
                    SessionState::Coin { .. } => unreachable!("coin sessions are always complete"),
                };
                Ok(SessionReport::Incomplete {
                    filled: total - missing.len(),
                    total,
                    missing,
                    placeholder,
                })
            }
        }
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(get_session))
        .route("/sessions/{id}/judgments", put(submit_judgment))
        .route("/sessions/{id}/whatif", post(whatif))
        .route("/sessions/{id}/coin", put(set_coin))
        .route("/panels/aggregate", post(aggregate))
        .route("/census", get(census))
        .with_state(state)
}

/// Serves until `shutdown` resolves.
pub async fn serve(
    listener: TcpListener,
    state: AppState,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    axum::serve(listener, router(state))
        .with_graceful_shutdown(shutdown)
        .await
}

/// Binds `addr` and opens the store; the returned listener reports the
/// actual address when port 0 was requested.
pub async fn bind(
    addr: SocketAddr,
    config: &ServiceConfig,
) -> std::io::Result<(TcpListener, AppState)> {
    let state = AppState::open(config)?;
    Ok((TcpListener::bind(addr).await?, state))
}

type Reply<T> = Result<Json<T>, ServiceError>;

fn body<T>(payload: Result<Json<T>, JsonRejection>) -> Result<T, ServiceError> {
    payload
        .map(|Json(v)| v)
        .map_err(|e| ServiceError::Invalid(e.body_text()))
}

/// Runs CPU-bound engine work off the async workers.
async fn blocking<T: Send + 'static>(
    work: impl FnOnce() -> Result<T, ServiceError> + Send + 'static,
) -> Result<T, ServiceError> {
    tokio::task::spawn_blocking(work)
        .await
        .map_err(|e| ServiceError::Storage(std::io::Error::other(e)))?
}

async fn view(state: &AppState, session: Arc<Session>) -> Reply<SessionView> {
    let state = state.clone();
    blocking(move || {
        let report = state.report(&session)?;
        Ok(Json(SessionView {
            session: (*session).clone(),
            report,
        }))
    })
    .await
}

async fn create_session(
    State(state): State<AppState>,
    payload: Result<Json<CreateSession>, JsonRejection>,
) -> Result<(StatusCode, Json<SessionView>), ServiceError> {
    let request = body(payload)?;
    let id = uuid::Uuid::new_v4().simple().to_string();
    let session = state.store.insert(Session::create(id, request)?)?;
    Ok((StatusCode::CREATED, view(&state, session).await?))
}

async fn get_session(State(state): State<AppState>, Path(id): Path<String>) -> Reply<SessionView> {
    let session = state.store.get(&id)?;
    view(&state, session).await
}

async fn submit_judgment(
    State(state): State<AppState>,
    Path(id): Path<String>,
    payload: Result<Json<JudgmentWrite>, JsonRejection>,
) -> Reply<SessionView> {
    state.store.get(&id)?;
    let write = body(payload)?;
    let session = state
        .store
        .update(&id, write.revision, |s| s.with_judgment(&write.judgment))
        .await?;
    view(&state, session).await
}

async fn whatif(
    State(state): State<AppState>,
    Path(id): Path<String>,
    payload: Result<Json<Judgment>, JsonRejection>,
) -> Reply<MatrixAnalysis> {
    let session = state.store.get(&id)?;
    let judgment = body(payload)?;
    if session.matrix().is_none() {
        return Err(ServiceError::Invalid(format!(
            "session is incomplete: {} judgments missing",
            session.missing().len()
        )));
    }
    let hypothetical = Session {
        state: session.with_judgment(&judgment)?,
        ..(*session).clone()
    };
    let ri = state.ri.clone();
    blocking(move || {
        let m = hypothetical
            .matrix()
            .expect("complete sessions stay complete");
        Ok(Json(analyze(&m, &*ri, hypothetical.delta)?))
    })
    .await
}

async fn set_coin(
    State(state): State<AppState>,
    Path(id): Path<String>,
    payload: Result<Json<CoinWrite>, JsonRejection>,
) -> Reply<SessionView> {
    state.store.get(&id)?;
    let write = body(payload)?;
    let session = state
        .store
        .update(&id, write.revision, |s| s.with_prices(write.prices.clone()))
        .await?;
    view(&state, session).await
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PanelResult {
    pub prices: CoinVector,
    pub weights: PriorityVector,
    pub matrix: ComparisonMatrix,
}

async fn aggregate(payload: Result<Json<Panel>, JsonRejection>) -> Reply<PanelResult> {
    let panel = body(payload)?;
    let prices = panel.aggregate()?;
    Ok(Json(PanelResult {
        weights: prices.weights(),
        matrix: pmm_ahp::elicitation::coin_to_matrix(&prices),
        prices,
    }))
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct CensusQuery {
    pub n: String,
    #[serde(default = "default_census_samples")]
    pub samples: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_threshold")]
    pub threshold: f64,
}

fn default_census_samples() -> usize {
    10_000
}

fn default_threshold() -> f64 {
    pmm_ahp::montecarlo::DEFAULT_CR_THRESHOLD
}

async fn census(query: Result<Query<CensusQuery>, QueryRejection>) -> Reply<Vec<CensusResult>> {
    let Query(q) = query.map_err(|e| ServiceError::Invalid(e.body_text()))?;
    if q.samples > MAX_CENSUS_SAMPLES {
        return Err(ServiceError::Invalid(format!(
            "samples is capped at {MAX_CENSUS_SAMPLES} per request; use the command line for larger runs"
        )));
    }
    let dims = parse_dimensions(&q.n)?;
    blocking(move || {
        Ok(Json(consistency_census(
            &dims,
            q.samples,
            q.threshold,
            q.seed,
        )?))
    })
    .await
}
