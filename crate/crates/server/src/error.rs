use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;

use fosgraph_core::views::{ErrorBody, ErrorDetail, ViewError};

#[derive(Debug, Clone, PartialEq)]
pub struct ApiError {
    pub status: StatusCode,
    pub code: &'static str,
    pub message: String,
    pub snapshot_version: Option<u64>,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        ApiError {
            status,
            code,
            message: message.into(),
            snapshot_version: None,
        }
    }

    pub fn snapshot_missing() -> Self {
        Self::new(
            StatusCode::SERVICE_UNAVAILABLE,
            "snapshot_missing",
            "no snapshot has been ingested yet",
        )
    }

    pub fn bad_request(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "bad_request", message)
    }

    pub fn not_found(message: impl Into<String>) -> Self {
        Self::new(StatusCode::NOT_FOUND, "not_found", message)
    }

    pub fn at(mut self, version: u64) -> Self {
        self.snapshot_version = Some(version);
        self
    }
}

impl From<ViewError> for ApiError {
    fn from(e: ViewError) -> Self {
        match e {
            ViewError::NotFound { .. } => ApiError::not_found(e.to_string()),
            ViewError::BadRequest(m) => ApiError::bad_request(m),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = ErrorBody {
            error: ErrorDetail {
                code: self.code.to_string(),
                message: self.message,
            },
            snapshot_version: self.snapshot_version,
        };
        (self.status, Json(body)).into_response()
    }
}
