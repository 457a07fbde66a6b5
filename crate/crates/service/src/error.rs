use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde_json::json;

#[derive(Debug, thiserror::Error)]
pub enum ServiceError {
    #[error("unknown session {0}")]
    NotFound(String),
    #[error("stale revision: session is at {current}, write was based on {submitted}")]
    Conflict { current: u64, submitted: u64 },
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Engine(#[from] pmm_ahp::Error),
    #[error("storage failure: {0}")]
    Storage(#[from] std::io::Error),
}

impl ServiceError {
    pub fn status(&self) -> StatusCode {
        match self {
            ServiceError::NotFound(_) => StatusCode::NOT_FOUND,
            ServiceError::Conflict { .. } => StatusCode::CONFLICT,
            ServiceError::Invalid(_) | ServiceError::Engine(_) => StatusCode::UNPROCESSABLE_ENTITY,
            ServiceError::Storage(_) => StatusCode::INTERNAL_SERVER_ERROR,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            ServiceError::NotFound(_) => "not_found",
            ServiceError::Conflict { .. } => "conflict",
            ServiceError::Invalid(_) | ServiceError::Engine(_) => "validation",
            ServiceError::Storage(_) => "storage",
        }
    }
}

impl IntoResponse for ServiceError {
    fn into_response(self) -> Response {
        if let ServiceError::Storage(e) = &self {
            log::error!("{e}");
        }
        let mut body = json!({ "error": self.kind(), "message": self.to_string() });
        if let ServiceError::Conflict { current, .. } = self {
            body["revision"] = json!(current);
        }
        (self.status(), Json(body)).into_response()
    }
}
