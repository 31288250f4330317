use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use lawmap_core::traverse::TraverseError;
use serde::Serialize;
use serde_json::Value;

/// An HTTP error rendered as `{code, message, details?}`.
#[derive(Debug, Clone, Serialize)]
pub struct ApiError {
    #[serde(skip)]
    pub status: StatusCode,
    pub code: &'static str,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub details: Option<Value>,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        ApiError {
            status,
            code,
            message: message.into(),
            details: None,
        }
    }

    pub fn with_details(mut self, details: Value) -> Self {
        self.details = Some(details);
        self
    }

    pub fn map_not_found(id: &str) -> Self {
        ApiError::new(StatusCode::NOT_FOUND, "map_not_found", format!("no map with id '{id}'"))
    }

    pub fn session_not_found(id: &str) -> Self {
        ApiError::new(StatusCode::NOT_FOUND, "session_not_found", format!("no session with id '{id}'"))
    }

    pub fn internal(message: impl Into<String>) -> Self {
        ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", message)
    }
}

impl From<TraverseError> for ApiError {
    fn from(e: TraverseError) -> Self {
        let message = e.to_string();
        match e {
            TraverseError::NotPending(_) => ApiError::new(StatusCode::CONFLICT, "not_pending", message),
            TraverseError::NotAnswered(_) => ApiError::new(StatusCode::CONFLICT, "not_answered", message),
            TraverseError::UnknownDecision(_) => ApiError::new(StatusCode::CONFLICT, "unknown_decision", message),
            TraverseError::InvalidLabel { options, .. } => ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "invalid_label", message)
                .with_details(serde_json::json!({ "options": options })),
            TraverseError::UnknownNode(_) => ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "unknown_node", message),
            TraverseError::InvalidMap(_) => ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "invalid_map", message),
            TraverseError::SetMismatch(..) => ApiError::new(StatusCode::CONFLICT, "set_mismatch", message),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(&self)).into_response()
    }
}
