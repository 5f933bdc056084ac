use std::path::PathBuf;

use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use geckograph::game::GameError;
use geckograph::infer::ExprError;
use geckograph::syntax::SyntaxError;
use serde_json::json;
use thiserror::Error;

/// Startup failures.
#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("bad config: {0}")]
    Config(String),
    #[error("{path}: {1}", path = .0.display())]
    Io(PathBuf, String),
    #[error("bad level file: {0}")]
    Levels(String),
    #[error("bad palette: {0}")]
    Palette(String),
    #[error("bad event log: {0}")]
    Log(String),
}

/// A request that cannot be served. Failed attempts are not errors: they
/// come back as 200 with a status field.
#[derive(Debug, Error)]
pub enum ApiError {
    #[error("{message}")]
    BadRequest { kind: &'static str, offset: Option<usize>, message: String },
    #[error("{0} not found")]
    NotFound(String),
    #[error(transparent)]
    Conflict(#[from] GameError),
    #[error("{0}")]
    Internal(String),
}

impl ApiError {
    pub fn bad(kind: &'static str, message: impl Into<String>) -> Self {
        ApiError::BadRequest { kind, offset: None, message: message.into() }
    }
}

impl From<SyntaxError> for ApiError {
    fn from(e: SyntaxError) -> Self {
        let kind = if matches!(e, SyntaxError::Kind(_)) { "kind_error" } else { "syntax_error" };
        ApiError::BadRequest { kind, offset: e.offset(), message: e.to_string() }
    }
}

impl From<ExprError> for ApiError {
    fn from(e: ExprError) -> Self {
        match e {
            ExprError::Syntax(s) => s.into(),
            e => ApiError::BadRequest { kind: "syntax_error", offset: e.offset(), message: e.to_string() },
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let message = self.to_string();
        let (status, body) = match self {
            ApiError::BadRequest { kind, offset, .. } => {
                (StatusCode::BAD_REQUEST, json!({"kind": kind, "offset": offset, "message": message}))
            }
            ApiError::NotFound(_) => (StatusCode::NOT_FOUND, json!({"kind": "not_found", "message": message})),
            ApiError::Conflict(e) => {
                let kind = match e {
                    GameError::SessionComplete => "session_complete",
                    GameError::NoSkipsRemaining => "no_skips_remaining",
                };
                (StatusCode::CONFLICT, json!({"kind": kind, "message": message}))
            }
            ApiError::Internal(_) => (StatusCode::INTERNAL_SERVER_ERROR, json!({"kind": "internal", "message": message})),
        };
        (status, Json(body)).into_response()
    }
}
