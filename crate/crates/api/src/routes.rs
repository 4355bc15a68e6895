use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{DefaultBodyLimit, State};
use axum::http::{header, HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use serde::Serialize;
use tower_http::cors::CorsLayer;

use crate::error::ApiError;
use crate::service::Service;

pub const ADMIN_TOKEN_HEADER: &str = "x-admin-token";
const BODY_LIMIT: usize = 16 * 1024 * 1024;

fn json<T: Serialize>(result: Result<T, ApiError>) -> Response {
    match result {
        Ok(body) => {
            let body = serde_json::to_string(&body).expect("responses serialize");
            (StatusCode::OK, [(header::CONTENT_TYPE, "application/json")], body).into_response()
        }
        Err(e) => e.into_response(),
    }
}

/// Runs blocking service work off the async executor.
async fn blocking<T: Send + 'static>(f: impl FnOnce() -> Result<T, ApiError> + Send + 'static) -> Result<T, ApiError> {
    tokio::task::spawn_blocking(f).await.unwrap_or_else(|e| {
        tracing::error!(error = %e, "handler panicked");
        Err(ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "INTERNAL", "internal error"))
    })
}

async fn paraphrase(State(svc): State<Arc<Service>>, body: Bytes) -> Response {
    json(blocking(move || svc.paraphrase(&body)).await)
}

async fn feedback(State(svc): State<Arc<Service>>, body: Bytes) -> Response {
    json(blocking(move || svc.feedback(&body)).await)
}

async fn status(State(svc): State<Arc<Service>>) -> Response {
    json(blocking(move || Ok(svc.status())).await)
}

async fn retrain(State(svc): State<Arc<Service>>, headers: HeaderMap) -> Response {
    let token = headers.get(ADMIN_TOKEN_HEADER).and_then(|v| v.to_str().ok()).map(str::to_owned);
    json(blocking(move || svc.retrain(token.as_deref())).await)
}

async fn not_found() -> Response {
    ApiError::new(StatusCode::NOT_FOUND, "NOT_FOUND", "no such route").into_response()
}

pub fn router(service: Arc<Service>, cors_allow_all: bool) -> Router {
    let router = Router::new()
        .route("/paraphrase", post(paraphrase))
        .route("/feedback", post(feedback))
        .route("/model/status", get(status))
        .route("/admin/retrain", post(retrain))
        .fallback(not_found)
        .layer(DefaultBodyLimit::max(BODY_LIMIT))
        .with_state(service);
    if cors_allow_all {
        router.layer(CorsLayer::permissive())
    } else {
        router
    }
}
