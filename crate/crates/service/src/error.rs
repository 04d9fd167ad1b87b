use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use elicit_core::report::ApiError;
use elicit_core::ElicitError;

/// Engine error carried to the HTTP boundary.
#[derive(Debug)]
pub struct AppError(pub ElicitError);

impl From<ElicitError> for AppError {
    fn from(e: ElicitError) -> Self {
        AppError(e)
    }
}

pub fn status_for(e: &ElicitError) -> StatusCode {
    match e {
        ElicitError::Parse(_) => StatusCode::BAD_REQUEST,
        ElicitError::NotFound(_) => StatusCode::NOT_FOUND,
        ElicitError::State(_) => StatusCode::CONFLICT,
        ElicitError::Io(_) => StatusCode::INTERNAL_SERVER_ERROR,
        ElicitError::Domain(_)
        | ElicitError::InvalidJudgement(_)
        | ElicitError::FitFailure { .. }
        | ElicitError::InvalidTransform(_)
        | ElicitError::InvalidConfig(_)
        | ElicitError::Validation { .. } => StatusCode::UNPROCESSABLE_ENTITY,
    }
}

impl IntoResponse for AppError {
    fn into_response(self) -> Response {
        let status = status_for(&self.0);
        if status.is_server_error() {
            tracing::error!(error = %self.0, "request failed");
        } else {
            tracing::debug!(code = self.0.code(), error = %self.0, "request rejected");
        }
        (status, Json(ApiError::from(&self.0))).into_response()
    }
}

pub type ApiResult<T> = Result<T, AppError>;
