use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use davinci_core::Error;
use serde::{Deserialize, Serialize};

/// The JSON body of every failed request.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub code: String,
    pub message: String,
}

#[derive(Debug)]
pub struct ApiError {
    pub status: StatusCode,
    pub body: ErrorBody,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &str, message: impl Into<String>) -> Self {
        ApiError { status, body: ErrorBody { code: code.into(), message: message.into() } }
    }

    pub fn not_found(id: &str) -> Self {
        Self::new(StatusCode::NOT_FOUND, "not_found", format!("no session {id}"))
    }

    pub fn out_of_turn() -> Self {
        Self::new(StatusCode::CONFLICT, "out_of_turn", "it is not your turn")
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(m) => Self::new(StatusCode::BAD_REQUEST, "invalid_config", m),
            Error::Protocol(m) => Self::new(StatusCode::UNPROCESSABLE_ENTITY, "wrong_phase", m),
            Error::IllegalAction(m) => Self::new(StatusCode::UNPROCESSABLE_ENTITY, "illegal_action", m),
            Error::Inconsistent(m) => Self::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", m),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}
