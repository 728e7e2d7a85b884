//! JSON-over-HTTP routes for [`Service`].

use std::sync::Arc;

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use lsim_core::similarity::DEFAULT_MATCHES;
use serde::Deserialize;
use serde_json::json;

use crate::service::{GroupRequest, QueryRequest, Service, ServiceError, DEFAULT_WORDS};

const IMPORTANT_WORDS_SUFFIX: &str = "/important-words";

pub fn router(service: Arc<Service>) -> Router {
    Router::new()
        .route("/api/health", get(health))
        .route("/api/similar", post(similar))
        .route("/api/group-similarity", post(group_similarity))
        // Ids may contain '/', so the important-words suffix is split off by hand.
        .route("/api/docs/{*rest}", get(docs))
        .route("/api/stats/{kind}", get(stats))
        .with_state(service)
}

struct ApiError(StatusCode, String);

impl From<ServiceError> for ApiError {
    fn from(e: ServiceError) -> Self {
        let status = StatusCode::from_u16(e.status()).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
        ApiError(status, e.to_string())
    }
}

impl From<JsonRejection> for ApiError {
    fn from(e: JsonRejection) -> Self {
        ApiError(StatusCode::BAD_REQUEST, e.body_text())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = Json(json!({ "error": self.1, "status": self.0.as_u16() }));
        (self.0, body).into_response()
    }
}

type ApiResult = Result<Response, ApiError>;

async fn health(State(svc): State<Arc<Service>>) -> Json<crate::service::Health> {
    Json(svc.health())
}

async fn similar(State(svc): State<Arc<Service>>, body: Result<Json<QueryRequest>, JsonRejection>) -> ApiResult {
    let Json(req) = body?;
    Ok(Json(svc.handle_similar(&req)?).into_response())
}

async fn group_similarity(
    State(svc): State<Arc<Service>>,
    body: Result<Json<GroupRequest>, JsonRejection>,
) -> ApiResult {
    let Json(req) = body?;
    Ok(Json(svc.handle_group_comparison(&req)?).into_response())
}

#[derive(Debug, Deserialize)]
struct WordsParams {
    matches: Option<usize>,
    words: Option<usize>,
}

async fn docs(
    State(svc): State<Arc<Service>>,
    Path(rest): Path<String>,
    Query(params): Query<WordsParams>,
) -> ApiResult {
    match rest.strip_suffix(IMPORTANT_WORDS_SUFFIX) {
        Some(id) if svc.index().ordinal(&rest).is_none() => {
            let matches = params.matches.unwrap_or(DEFAULT_MATCHES);
            let words = params.words.unwrap_or(DEFAULT_WORDS);
            let terms = svc.document_important_words(id, matches, words)?;
            Ok(Json(json!({ "doc_id": id, "matches": matches, "important_words": terms })).into_response())
        }
        _ => Ok(Json(svc.document(&rest)?).into_response()),
    }
}

async fn stats(State(svc): State<Arc<Service>>, Path(kind): Path<String>) -> ApiResult {
    match kind.as_str() {
        "authors" => Ok(Json(svc.author_stats()).into_response()),
        "words" => Ok(Json(svc.word_stats()).into_response()),
        other => Err(ApiError(
            StatusCode::NOT_FOUND,
            format!("unknown statistics {other:?}; use authors or words"),
        )),
    }
}
