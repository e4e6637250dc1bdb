//! HTTP study service.
//!
//! - `GET /lineups/next?observer=ID` → `{lineup_id, svg, m, question}`, or
//!   204 once the observer has answered every lineup
//! - `POST /responses` → 201, or 400 / 404 / 409
//! - `GET /summary` → [`StudySummary`]
//!
//! Nothing served here carries the true panel position.

use std::collections::HashMap;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{SystemTime, UNIX_EPOCH};

use axum::extract::{Query, State};
use axum::http::{HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use tower_http::cors::{Any, CorsLayer};

use crate::error::{Error, Result};
use crate::inference::DifficultyReport;
use crate::metrics::MetricKind;
use crate::render::{render_lineup, PanelLayout};
use crate::study::{
    load_lineups, score_lineups, summarize, AppendError, ObserverResponse, ResponseStore,
    StoredLineup, StudySummary, RESPONSES_FILE,
};

#[derive(Clone, Debug)]
pub struct ServiceConfig {
    pub study_dir: PathBuf,
    pub port: u16,
    pub metric: Option<MetricKind>,
    /// Allowed CORS origin; `*` allows any.
    pub cors_origin: String,
}

/// What an observer receives. Deliberately has no position field.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineupView {
    pub lineup_id: String,
    pub svg: String,
    pub m: usize,
    pub question: String,
}

pub struct Study {
    lineups: Vec<StoredLineup>,
    /// Unrevealed SVG per lineup, rendered once.
    svgs: HashMap<String, String>,
    metric: Option<MetricKind>,
    scores: HashMap<String, DifficultyReport>,
    store: ResponseStore,
}

impl Study {
    pub fn open(study_dir: &Path, metric: Option<MetricKind>) -> Result<Self> {
        let lineups = load_lineups(study_dir)?;
        if lineups.is_empty() {
            return Err(Error::Precondition(format!(
                "no lineups under {}",
                study_dir.display()
            )));
        }
        let svgs = lineups
            .iter()
            .map(|s| {
                let layout = PanelLayout::for_lineup(&s.lineup)?;
                Ok((s.id.clone(), render_lineup(&s.lineup, &layout, false)?))
            })
            .collect::<Result<HashMap<_, _>>>()?;
        let scores = metric.map(|m| score_lineups(&lineups, &m)).unwrap_or_default();
        let store = ResponseStore::open(&study_dir.join(RESPONSES_FILE))?;
        Ok(Study {
            lineups,
            svgs,
            metric,
            scores,
            store,
        })
    }

    /// First stored lineup `observer` has not answered.
    pub fn next_for(&self, observer: &str) -> Option<LineupView> {
        self.lineups
            .iter()
            .find(|s| !self.store.answered(observer, &s.id))
            .map(|s| LineupView {
                lineup_id: s.id.clone(),
                svg: self.svgs[&s.id].clone(),
                m: s.lineup.m(),
                question: s.lineup.question().to_string(),
            })
    }

    pub fn record(&self, mut response: ObserverResponse) -> std::result::Result<(), ApiError> {
        let lineup = self
            .lineups
            .iter()
            .find(|s| s.id == response.lineup_id)
            .ok_or_else(|| ApiError::NotFound(format!("unknown lineup `{}`", response.lineup_id)))?;
        let m = lineup.lineup.m();
        if !(1..=m).contains(&response.picked_position) {
            return Err(ApiError::BadRequest(format!(
                "picked_position {} outside 1..={m}",
                response.picked_position
            )));
        }
        if response.observer_id.trim().is_empty() {
            return Err(ApiError::BadRequest("observer_id is required".into()));
        }
        if response.timestamp == 0 {
            response.timestamp = now_ms();
        }
        self.store.append(response).map_err(|e| match e {
            AppendError::Duplicate { .. } => ApiError::Conflict(e.to_string()),
            AppendError::Store(e) => ApiError::Internal(e.to_string()),
        })
    }

    pub fn summary(&self) -> StudySummary {
        summarize(&self.lineups, &self.store.snapshot(), self.metric, &self.scores)
    }
}

fn now_ms() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis() as u64)
        .unwrap_or(0)
}

#[derive(Debug)]
pub enum ApiError {
    BadRequest(String),
    NotFound(String),
    Conflict(String),
    Internal(String),
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let (status, msg) = match self {
            ApiError::BadRequest(m) => (StatusCode::BAD_REQUEST, m),
            ApiError::NotFound(m) => (StatusCode::NOT_FOUND, m),
            ApiError::Conflict(m) => (StatusCode::CONFLICT, m),
            ApiError::Internal(m) => (StatusCode::INTERNAL_SERVER_ERROR, m),
        };
        (status, Json(serde_json::json!({ "error": msg }))).into_response()
    }
}

#[derive(Deserialize)]
struct NextQuery {
    observer: Option<String>,
}

async fn next_lineup(
    State(study): State<Arc<Study>>,
    Query(q): Query<NextQuery>,
) -> std::result::Result<Response, ApiError> {
    let observer = q
        .observer
        .filter(|o| !o.trim().is_empty())
        .ok_or_else(|| ApiError::BadRequest("query parameter `observer` is required".into()))?;
    Ok(match study.next_for(&observer) {
        Some(view) => Json(view).into_response(),
        None => StatusCode::NO_CONTENT.into_response(),
    })
}

async fn post_response(
    State(study): State<Arc<Study>>,
    body: axum::body::Bytes,
) -> std::result::Result<Response, ApiError> {
    let response: ObserverResponse = serde_json::from_slice(&body)
        .map_err(|e| ApiError::BadRequest(format!("invalid response body: {e}")))?;
    let study = study.clone();
    // the store fsyncs; keep that off the async workers
    tokio::task::spawn_blocking(move || study.record(response))
        .await
        .map_err(|e| ApiError::Internal(e.to_string()))??;
    Ok((StatusCode::CREATED, Json(serde_json::json!({ "status": "recorded" }))).into_response())
}

async fn get_summary(State(study): State<Arc<Study>>) -> Json<StudySummary> {
    Json(study.summary())
}

pub fn router(study: Arc<Study>, cors_origin: &str) -> Router {
    let cors = CorsLayer::new().allow_methods(Any).allow_headers(Any);
    let cors = match cors_origin {
        "*" => cors.allow_origin(Any),
        origin => match HeaderValue::from_str(origin) {
            Ok(v) => cors.allow_origin(v),
            Err(_) => cors,
        },
    };
    Router::new()
        .route("/lineups/next", get(next_lineup))
        .route("/responses", post(post_response))
        .route("/summary", get(get_summary))
        .layer(cors)
        .with_state(study)
}

/// Serves on an already-bound listener until the future is dropped.
pub async fn serve_on(listener: tokio::net::TcpListener, study: Arc<Study>, cors_origin: &str) -> Result<()> {
    let addr = listener.local_addr().map_err(|e| Error::io("<listener>", e))?;
    axum::serve(listener, router(study, cors_origin))
        .await
        .map_err(|e| Error::io(format!("http://{addr}"), e))
}

pub async fn serve_study(config: ServiceConfig) -> Result<()> {
    let study = Arc::new(Study::open(&config.study_dir, config.metric)?);
    let addr = SocketAddr::from(([127, 0, 0, 1], config.port));
    let listener = tokio::net::TcpListener::bind(addr)
        .await
        .map_err(|e| Error::io(format!("{addr}"), e))?;
    eprintln!("serving {} lineups on http://{addr}", study.lineups.len());
    serve_on(listener, study, &config.cors_origin).await
}
