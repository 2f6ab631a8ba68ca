use axum::extract::rejection::JsonRejection;
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;

use weaklab_api::ErrorBody;
use weaklab_core::error::Error;

/// An error on its way to becoming a JSON response.
#[derive(Debug)]
pub struct ApiError {
    pub status: StatusCode,
    pub body: ErrorBody,
}

impl ApiError {
    pub fn new(status: StatusCode, kind: &str, message: impl Into<String>) -> Self {
        ApiError { status, body: ErrorBody { kind: kind.to_owned(), message: message.into() } }
    }

    pub fn internal(message: impl Into<String>) -> Self {
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", message)
    }
}

pub fn status_of(err: &Error) -> StatusCode {
    match err {
        Error::Domain(_) | Error::Validation(_) | Error::Capability(_) => StatusCode::UNPROCESSABLE_ENTITY,
        Error::Config(_) | Error::Parse { .. } | Error::Csv(_) | Error::Json(_) => StatusCode::BAD_REQUEST,
        Error::State(_) => StatusCode::NOT_FOUND,
        Error::Io(_) => StatusCode::INTERNAL_SERVER_ERROR,
    }
}

impl From<Error> for ApiError {
    fn from(err: Error) -> Self {
        ApiError::new(status_of(&err), err.kind(), err.to_string())
    }
}

impl From<JsonRejection> for ApiError {
    fn from(rej: JsonRejection) -> Self {
        ApiError::new(rej.status(), "parse", rej.body_text())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        if self.status.is_server_error() {
            tracing::error!(kind = %self.body.kind, "{}", self.body.message);
        }
        (self.status, Json(self.body)).into_response()
    }
}
