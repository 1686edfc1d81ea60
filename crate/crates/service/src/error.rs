use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use fairist_core::recommend::RecommendError;
use fairist_core::{SessionError, StoreError};
use serde::Serialize;

/// JSON error body: `{code, question_id?, detail}`.
#[derive(Debug, Serialize)]
pub struct ApiError {
    #[serde(skip)]
    pub status: StatusCode,
    pub code: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub question_id: Option<String>,
    pub detail: String,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &'static str, detail: impl Into<String>) -> Self {
        Self {
            status,
            code,
            question_id: None,
            detail: detail.into(),
        }
    }

    /// The one response for every token that does not name a live session.
    pub fn unknown_token() -> Self {
        Self::new(
            StatusCode::NOT_FOUND,
            "unknown_token",
            "unknown session token",
        )
    }

    pub fn bad_request(detail: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "malformed_body", detail)
    }

    pub fn internal(detail: impl Into<String>) -> Self {
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", detail)
    }

    pub fn with_question(mut self, question_id: impl Into<String>) -> Self {
        self.question_id = Some(question_id.into());
        self
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(&self)).into_response()
    }
}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> Self {
        match e {
            StoreError::UnknownToken => ApiError::unknown_token(),
            other => {
                tracing::error!(error = %other, "session store failure");
                ApiError::internal("session storage failure")
            }
        }
    }
}

impl From<SessionError> for ApiError {
    fn from(e: SessionError) -> Self {
        let status = match e {
            SessionError::AlreadyComplete => StatusCode::CONFLICT,
            _ => StatusCode::UNPROCESSABLE_ENTITY,
        };
        let question = e.question_id().map(str::to_owned);
        let mut err = ApiError::new(status, e.code(), e.to_string());
        err.question_id = question;
        err
    }
}

impl From<RecommendError> for ApiError {
    fn from(e: RecommendError) -> Self {
        match e {
            RecommendError::NotComplete => ApiError::new(
                StatusCode::CONFLICT,
                "session_incomplete",
                "complete the session before requesting its report",
            ),
            RecommendError::Session(e) => e.into(),
        }
    }
}
