use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde_json::json;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SessionError {
    #[error("unknown session {0}")]
    UnknownSession(String),
    #[error("wrong phase: {0}")]
    WrongPhase(String),
    #[error("session is closed")]
    Gone,
    #[error("bad choice: {0}")]
    BadChoice(String),
    #[error("mode mismatch: {0}")]
    ModeMismatch(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl SessionError {
    /// Stable machine-readable code sent to clients.
    pub fn code(&self) -> &'static str {
        match self {
            SessionError::UnknownSession(_) => "unknown_session",
            SessionError::WrongPhase(_) | SessionError::Gone => "wrong_phase",
            SessionError::BadChoice(_) => "bad_choice",
            SessionError::ModeMismatch(_) => "mode_mismatch",
            SessionError::Internal(_) => "internal",
        }
    }

    pub fn status(&self) -> StatusCode {
        match self {
            SessionError::UnknownSession(_) => StatusCode::NOT_FOUND,
            SessionError::WrongPhase(_) => StatusCode::CONFLICT,
            SessionError::Gone => StatusCode::GONE,
            SessionError::BadChoice(_) | SessionError::ModeMismatch(_) => StatusCode::BAD_REQUEST,
            SessionError::Internal(_) => StatusCode::INTERNAL_SERVER_ERROR,
        }
    }
}

impl IntoResponse for SessionError {
    fn into_response(self) -> Response {
        let body = json!({ "error": { "code": self.code(), "message": self.to_string() } });
        (self.status(), Json(body)).into_response()
    }
}
