use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use serde::Serialize;
use serde_json::Value;

use adapara_core::adapt::AdaptError;
use adapara_core::store::StoreError;
use adapara_core::text::TextError;

/// Error body `{code, message, detail}` with its HTTP status.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApiError {
    #[serde(skip)]
    pub status: StatusCode,
    pub code: &'static str,
    pub message: String,
    pub detail: Value,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        ApiError { status, code, message: message.into(), detail: Value::Null }
    }

    pub fn with_detail(mut self, detail: Value) -> Self {
        self.detail = detail;
        self
    }

    pub fn bad_request(code: &'static str, message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, code, message)
    }

    pub fn invalid_event(message: impl Into<String>) -> Self {
        Self::bad_request("INVALID_EVENT", message)
    }
}

impl From<TextError> for ApiError {
    fn from(e: TextError) -> Self {
        let message = e.to_string();
        match e {
            TextError::EmptyText => ApiError::bad_request("EMPTY_TEXT", message),
            TextError::TextTooLarge { len, max } => ApiError::new(StatusCode::PAYLOAD_TOO_LARGE, "TEXT_TOO_LARGE", message)
                .with_detail(serde_json::json!({ "length": len, "limit": max })),
            TextError::SpanOutOfRange { span, len } => ApiError::bad_request("SPAN_OUT_OF_RANGE", message)
                .with_detail(serde_json::json!({ "span": span, "text_length": len })),
            TextError::SpanMisaligned(span) => {
                ApiError::bad_request("SPAN_MISALIGNED", message).with_detail(serde_json::json!({ "span": span }))
            }
        }
    }
}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> Self {
        let message = e.to_string();
        match e {
            StoreError::InvalidEvent(_) => ApiError::invalid_event(message),
            StoreError::UnknownUndoTarget(seq) => ApiError::bad_request("UNKNOWN_UNDO_TARGET", message)
                .with_detail(serde_json::json!({ "undo_of": seq })),
            StoreError::Io { .. } | StoreError::CorruptLine { .. } | StoreError::BadArtifact { .. } => {
                tracing::error!(error = %message, "store failure");
                ApiError::new(StatusCode::SERVICE_UNAVAILABLE, "STORE_UNAVAILABLE", "the event store is unavailable")
            }
        }
    }
}

impl From<AdaptError> for ApiError {
    fn from(e: AdaptError) -> Self {
        match e {
            AdaptError::Store(s) => s.into(),
            AdaptError::NothingToTrain => ApiError::new(StatusCode::CONFLICT, "NOTHING_TO_TRAIN", e.to_string()),
            other => {
                tracing::error!(error = %other, "adapt loop failure");
                ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "INTERNAL", other.to_string())
            }
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = serde_json::to_string(&self).expect("errors serialize");
        (self.status, [(axum::http::header::CONTENT_TYPE, "application/json")], body).into_response()
    }
}
