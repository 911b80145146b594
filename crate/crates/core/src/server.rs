//! JSON evaluation API for interactive front ends.
//!
//! Every request is evaluated against an immutable snapshot of the loaded
//! configuration plus the overrides carried in its body; nothing is shared
//! between requests. Malformed JSON is a 400, well-formed input that the
//! model rejects is a 422 naming the field or constraint.

use std::sync::Arc;

use axum::extract::rejection::JsonRejection;
use axum::extract::State;
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::{resolve_scenario, ConfigError, RunConfig};
use crate::report::{compare, DeltaReport};
use crate::scenario::EnergyReport;
use crate::ModelError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field: Option<String>,
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    body: ErrorBody,
}

impl ApiError {
    fn new(status: StatusCode, error: impl ToString, field: Option<String>) -> Self {
        Self {
            status,
            body: ErrorBody {
                error: error.to_string(),
                field,
            },
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

impl From<JsonRejection> for ApiError {
    fn from(r: JsonRejection) -> Self {
        ApiError::new(r.status(), r.body_text(), None)
    }
}

impl From<ConfigError> for ApiError {
    fn from(e: ConfigError) -> Self {
        let status = match e {
            ConfigError::Syntax(_) | ConfigError::Io { .. } => StatusCode::BAD_REQUEST,
            _ => StatusCode::UNPROCESSABLE_ENTITY,
        };
        let field = e.field().map(str::to_owned);
        ApiError::new(status, e, field)
    }
}

impl From<ModelError> for ApiError {
    fn from(e: ModelError) -> Self {
        let field = match &e {
            ModelError::Validation(v) => Some(v.field.clone()),
            ModelError::Access(_) => Some("access.max_subscribers_per_gpon".into()),
            _ => None,
        };
        ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, e, field)
    }
}

/// Body of `POST /evaluate`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvaluateRequest {
    /// Preset name or scenario document; defaults to the configured baseline.
    #[serde(default)]
    pub scenario: Option<Value>,
    /// Partial configuration merged onto the server's defaults.
    #[serde(default)]
    pub config: Option<Value>,
}

/// Body of `POST /compare`; deltas read `b - a`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareRequest {
    pub a: Value,
    pub b: Value,
    #[serde(default)]
    pub config: Option<Value>,
}

#[derive(Clone)]
struct AppState {
    defaults: Arc<RunConfig>,
}

async fn blocking<T: Send + 'static>(
    f: impl FnOnce() -> Result<T, ApiError> + Send + 'static,
) -> Result<T, ApiError> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e, None))?
}

async fn health() -> Json<Value> {
    Json(serde_json::json!({ "status": "ok" }))
}

async fn defaults(State(state): State<AppState>) -> Json<RunConfig> {
    Json((*state.defaults).clone())
}

/// Evaluate the requested scenario and attach its delta to the configured baseline.
pub fn evaluate_request(defaults: &RunConfig, req: EvaluateRequest) -> Result<EnergyReport, ApiError> {
    let config = match req.config {
        None => defaults.clone(),
        Some(v) => defaults.with_overrides(v)?,
    };
    let scenario = match req.scenario {
        Some(selector) => resolve_scenario(&config, selector)?,
        None => config.baseline_scenario().clone(),
    };
    let report = config.model.evaluate(&scenario)?;
    let base = if scenario.name == config.baseline && scenario == *config.baseline_scenario() {
        report.clone()
    } else {
        config.model.evaluate(config.baseline_scenario())?
    };
    Ok(report.with_delta(&base))
}

pub fn compare_request(defaults: &RunConfig, req: CompareRequest) -> Result<DeltaReport, ApiError> {
    let config = match req.config {
        None => defaults.clone(),
        Some(v) => defaults.with_overrides(v)?,
    };
    let a = resolve_scenario(&config, req.a)?;
    let b = resolve_scenario(&config, req.b)?;
    let ra = config.model.evaluate(&a)?;
    let rb = config.model.evaluate(&b)?;
    Ok(compare(ra, rb))
}

async fn evaluate(
    State(state): State<AppState>,
    body: Result<Json<EvaluateRequest>, JsonRejection>,
) -> Result<Json<EnergyReport>, ApiError> {
    let Json(req) = body?;
    let defaults = state.defaults.clone();
    blocking(move || evaluate_request(&defaults, req)).await.map(Json)
}

async fn compare_handler(
    State(state): State<AppState>,
    body: Result<Json<CompareRequest>, JsonRejection>,
) -> Result<Json<DeltaReport>, ApiError> {
    let Json(req) = body?;
    let defaults = state.defaults.clone();
    blocking(move || compare_request(&defaults, req)).await.map(Json)
}

pub fn router(config: RunConfig) -> Router {
    let state = AppState {
        defaults: Arc::new(config),
    };
    Router::new()
        .route("/health", get(health))
        .route("/defaults", get(defaults))
        .route("/evaluate", post(evaluate))
        .route("/compare", post(compare_handler))
        .with_state(state)
}

/// Serve until Ctrl-C.
pub async fn serve(config: RunConfig, bind: &str) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(bind).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(config))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
