//! JSON-over-HTTP frontend for [`Study`].

use std::collections::BTreeMap;
use std::sync::{Arc, Mutex, MutexGuard};

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, State};
use axum::http::{header, HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use chrono::Utc;
use cohesion_core::bundle::StudyBundle;
use serde::Deserialize;
use serde_json::json;

use crate::config::ServiceConfig;
use crate::events::Demographics;
use crate::study::Study;
use crate::ServiceError;

pub struct AppState {
    pub study: Mutex<Study>,
    pub admin_token: Option<String>,
}

impl AppState {
    pub fn new(study: Study, admin_token: Option<String>) -> Arc<Self> {
        Arc::new(AppState {
            study: Mutex::new(study),
            admin_token,
        })
    }

    fn lock(&self) -> MutexGuard<'_, Study> {
        // A panic mid-request leaves the log authoritative; keep serving.
        self.study.lock().unwrap_or_else(|p| p.into_inner())
    }

    fn authorize(&self, headers: &HeaderMap) -> Result<(), ServiceError> {
        let Some(expected) = &self.admin_token else {
            return Err(ServiceError::Unauthorized);
        };
        let given = headers
            .get(header::AUTHORIZATION)
            .and_then(|v| v.to_str().ok())
            .and_then(|v| v.strip_prefix("Bearer "));
        match given {
            Some(t) if constant_time_eq(t.as_bytes(), expected.as_bytes()) => Ok(()),
            _ => Err(ServiceError::Unauthorized),
        }
    }
}

fn constant_time_eq(a: &[u8], b: &[u8]) -> bool {
    a.len() == b.len() && a.iter().zip(b).fold(0u8, |acc, (x, y)| acc | (x ^ y)) == 0
}

impl IntoResponse for ServiceError {
    fn into_response(self) -> Response {
        let status = match &self {
            ServiceError::Validation(_) => StatusCode::UNPROCESSABLE_ENTITY,
            ServiceError::Conflict(_) | ServiceError::NoValidRatings => StatusCode::CONFLICT,
            ServiceError::UnknownSession => StatusCode::NOT_FOUND,
            ServiceError::Unauthorized => StatusCode::UNAUTHORIZED,
            _ => StatusCode::INTERNAL_SERVER_ERROR,
        };
        if status.is_server_error() {
            tracing::error!(error = %self, "request failed");
        }
        (status, Json(json!({ "error": self.to_string() }))).into_response()
    }
}

fn body<T>(payload: Result<Json<T>, JsonRejection>) -> Result<T, ServiceError> {
    payload
        .map(|Json(v)| v)
        .map_err(|e| ServiceError::Validation(e.body_text()))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RatingBody {
    unit_id: String,
    scores: BTreeMap<String, u8>,
    submission_token: String,
}

async fn open_session(
    State(state): State<Arc<AppState>>,
    payload: Result<Json<Demographics>, JsonRejection>,
) -> Result<Response, ServiceError> {
    let demographics = body(payload)?;
    let info = state.lock().open_session(demographics)?;
    Ok((StatusCode::CREATED, Json(info)).into_response())
}

async fn next_unit(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> Result<Response, ServiceError> {
    let next = state.lock().next_unit(&id)?;
    Ok(Json(next).into_response())
}

async fn submit_rating(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    payload: Result<Json<RatingBody>, JsonRejection>,
) -> Result<Response, ServiceError> {
    let b = body(payload)?;
    let ack = state
        .lock()
        .submit_rating(&id, &b.unit_id, &b.scores, &b.submission_token, Utc::now())?;
    let status = if ack.stored { StatusCode::CREATED } else { StatusCode::OK };
    Ok((status, Json(ack)).into_response())
}

async fn export_ratings(State(state): State<Arc<AppState>>, headers: HeaderMap) -> Result<Response, ServiceError> {
    state.authorize(&headers)?;
    let mut study = state.lock();
    study.apply_validity_filter()?;
    let csv = study.export_ratings_csv()?;
    Ok(([(header::CONTENT_TYPE, "text/csv; charset=utf-8")], csv).into_response())
}

async fn export_matrices(State(state): State<Arc<AppState>>, headers: HeaderMap) -> Result<Response, ServiceError> {
    state.authorize(&headers)?;
    let mut study = state.lock();
    study.apply_validity_filter()?;
    Ok(Json(study.export_matrices()?).into_response())
}

async fn healthz() -> Json<serde_json::Value> {
    Json(json!({ "status": "ok" }))
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/sessions", post(open_session))
        .route("/sessions/{id}/next", get(next_unit))
        .route("/sessions/{id}/ratings", post(submit_rating))
        .route("/export/ratings", get(export_ratings))
        .route("/export/matrices", get(export_matrices))
        .route("/healthz", get(healthz))
        .with_state(state)
}

/// Loads the bundle, replays the store and serves until Ctrl-C.
pub async fn serve(config: ServiceConfig) -> Result<(), ServiceError> {
    let bundle = Arc::new(StudyBundle::load(&config.bundle)?);
    let study = Study::open(bundle, config.options, &config.store)?;
    if config.admin_token.is_none() {
        tracing::warn!("no admin token configured; export endpoints are disabled");
    }
    let app = router(AppState::new(study, config.admin_token.clone()));
    let listener = tokio::net::TcpListener::bind(config.bind)
        .await
        .map_err(|e| ServiceError::Config(format!("bind {}: {e}", config.bind)))?;
    tracing::info!(addr = %config.bind, store = %config.store.display(), "listening");
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
        .map_err(|e| ServiceError::Internal(e.to_string()))
}
