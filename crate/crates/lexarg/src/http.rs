//! HTTP routes over [`SessionStore`].
//!
//! | method | path | body / query |
//! |---|---|---|
//! | `GET` | `/sessions` | |
//! | `POST` | `/sessions` | [`CaseSource`] |
//! | `GET`, `DELETE` | `/sessions/{id}` | |
//! | `GET` | `/sessions/{id}/assumptions` | |
//! | `POST` | `/sessions/{id}/assumptions` | `{"constraint": "p(E1) >= 0.9", "id": "a7"?}` |
//! | `DELETE` | `/sessions/{id}/assumptions/{aid}` | |
//! | `GET` | `/sessions/{id}/beliefs` | |
//! | `GET` | `/sessions/{id}/verdict` | `threshold`, `depth` |
//! | `GET` | `/sessions/{id}/explanation` | `argument`, `bound`, `depth` |
//! | `GET` | `/sessions/{id}/log` | `format=jsonl` for the CLI log format |
//! | `POST` | `/validate` | [`CaseSource`] |
//!
//! Errors carry a [`Diagnostic`]; an unsatisfiable state answers `409` with
//! the conflict.

use std::sync::Arc;

use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{delete, get, post};
use axum::{Json, Router};
use lexarg_core::explain::Bound;
use serde::{Deserialize, Serialize};

use crate::service::{validate, CaseSource, Diagnostic, ServiceError, SessionStore};
use crate::session::SessionLog;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: Diagnostic,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub conflict: Option<crate::payload::ConflictPayload>,
}

impl IntoResponse for ServiceError {
    fn into_response(self) -> Response {
        let diagnostic = self.diagnostic();
        let status = match diagnostic.kind.as_str() {
            "not-found" => StatusCode::NOT_FOUND,
            "conflict" => StatusCode::CONFLICT,
            "validation" => StatusCode::UNPROCESSABLE_ENTITY,
            _ => StatusCode::BAD_REQUEST,
        };
        let conflict = match self {
            ServiceError::Conflict(c) => Some(c),
            _ => None,
        };
        (status, Json(ErrorBody { error: diagnostic, conflict })).into_response()
    }
}

type Store = State<Arc<SessionStore>>;
type ApiResult<T> = Result<Json<T>, ServiceError>;

pub fn router(store: Arc<SessionStore>) -> Router {
    Router::new()
        .route("/sessions", get(list_sessions).post(create_session))
        .route("/sessions/{id}", get(get_session).delete(delete_session))
        .route("/sessions/{id}/assumptions", get(list_assumptions).post(post_assumption))
        .route("/sessions/{id}/assumptions/{aid}", delete(delete_assumption))
        .route("/sessions/{id}/beliefs", get(beliefs))
        .route("/sessions/{id}/verdict", get(verdict))
        .route("/sessions/{id}/explanation", get(explanation))
        .route("/sessions/{id}/log", get(log))
        .route("/validate", post(validate_case))
        .with_state(store)
}

pub async fn serve(addr: &str) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(Arc::new(SessionStore::new()))).await
}

async fn list_sessions(State(store): Store) -> Json<Vec<String>> {
    Json(store.ids())
}

async fn create_session(State(store): Store, Json(source): Json<CaseSource>) -> Result<Response, ServiceError> {
    let session = store.create(&source)?;
    Ok((StatusCode::CREATED, Json(session)).into_response())
}

async fn get_session(State(store): Store, Path(id): Path<String>) -> ApiResult<crate::service::SessionPayload> {
    Ok(Json(store.get(&id)?))
}

async fn delete_session(State(store): Store, Path(id): Path<String>) -> Result<StatusCode, ServiceError> {
    store.delete(&id)?;
    Ok(StatusCode::NO_CONTENT)
}

async fn list_assumptions(
    State(store): Store,
    Path(id): Path<String>,
) -> ApiResult<Vec<crate::payload::AssumptionPayload>> {
    Ok(Json(store.assumptions(&id)?))
}

#[derive(Debug, Deserialize)]
struct NewAssumption {
    constraint: String,
    #[serde(default)]
    id: Option<String>,
}

async fn post_assumption(
    State(store): Store,
    Path(id): Path<String>,
    Json(body): Json<NewAssumption>,
) -> Result<Response, ServiceError> {
    let state = store.assume(&id, &body.constraint, body.id.as_deref())?;
    Ok((StatusCode::CREATED, Json(state)).into_response())
}

async fn delete_assumption(
    State(store): Store,
    Path((id, aid)): Path<(String, String)>,
) -> ApiResult<crate::service::StatePayload> {
    Ok(Json(store.retract(&id, &aid)?))
}

async fn beliefs(State(store): Store, Path(id): Path<String>) -> ApiResult<crate::payload::BeliefsPayload> {
    Ok(Json(store.beliefs(&id)?))
}

#[derive(Debug, Deserialize)]
struct VerdictQuery {
    threshold: Option<String>,
    depth: Option<usize>,
}

async fn verdict(
    State(store): Store,
    Path(id): Path<String>,
    Query(q): Query<VerdictQuery>,
) -> ApiResult<crate::payload::VerdictPayload> {
    Ok(Json(store.verdict(&id, q.threshold.as_deref(), q.depth.unwrap_or(usize::MAX))?))
}

#[derive(Debug, Deserialize)]
struct ExplanationQuery {
    argument: String,
    bound: Option<String>,
    depth: Option<usize>,
}

async fn explanation(
    State(store): Store,
    Path(id): Path<String>,
    Query(q): Query<ExplanationQuery>,
) -> ApiResult<crate::payload::ExplanationPayload> {
    let bound = match q.bound.as_deref() {
        None => Bound::Lower,
        Some(b) => b.parse().map_err(ServiceError::BadRequest)?,
    };
    Ok(Json(store.explanation(&id, &q.argument, bound, q.depth.unwrap_or(1))?))
}

#[derive(Debug, Deserialize)]
struct LogQuery {
    format: Option<String>,
}

async fn log(State(store): Store, Path(id): Path<String>, Query(q): Query<LogQuery>) -> Result<Response, ServiceError> {
    let entries = store.log(&id)?;
    match q.format.as_deref() {
        None | Some("json") => Ok(Json(entries).into_response()),
        Some("jsonl") => {
            let mut log = SessionLog::new();
            entries.into_iter().for_each(|e| log.push(e));
            Ok(([(header::CONTENT_TYPE, "application/x-ndjson")], log.to_jsonl()).into_response())
        }
        Some(other) => Err(ServiceError::BadRequest(format!("unknown log format `{other}`"))),
    }
}

async fn validate_case(Json(source): Json<CaseSource>) -> Response {
    let report = validate(&source);
    let status = if report.valid { StatusCode::OK } else { StatusCode::UNPROCESSABLE_ENTITY };
    (status, Json(report)).into_response()
}
