use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde::de::DeserializeOwned;
use serde_json::json;

use crate::clustering::ClusterError;
use crate::comic::{ComicError, TimelineError};
use crate::community::CommunityError;
use crate::io::IoError;
use crate::narrative::NarrativeError;
use crate::render::InvalidTemplate;

/// Error body: `{"error": "...", "path": "..."}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ApiError {
    pub status: StatusCode,
    pub message: String,
    pub path: Option<String>,
}

impl ApiError {
    pub fn new(status: StatusCode, message: impl Into<String>) -> Self {
        Self {
            status,
            message: message.into(),
            path: None,
        }
    }

    pub fn bad(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, message)
    }

    pub fn not_found(message: impl Into<String>) -> Self {
        Self::new(StatusCode::NOT_FOUND, message)
    }

    pub fn at(mut self, path: impl Into<String>) -> Self {
        self.path = Some(path.into());
        self
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = match &self.path {
            Some(p) => json!({ "error": self.message, "path": p }),
            None => json!({ "error": self.message }),
        };
        (self.status, Json(body)).into_response()
    }
}

/// Strict JSON body parsing with the failing field's path in the error. An
/// empty body reads as `{}`.
pub fn parse_body<T: DeserializeOwned>(body: &[u8]) -> Result<T, ApiError> {
    let body: &[u8] = if body.iter().all(u8::is_ascii_whitespace) { b"{}" } else { body };
    let de = &mut serde_json::Deserializer::from_slice(body);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        ApiError::bad(e.into_inner().to_string()).at(path)
    })
}

impl From<IoError> for ApiError {
    fn from(e: IoError) -> Self {
        match &e {
            IoError::UnknownDataset(_) => Self::not_found(e.to_string()),
            IoError::File { .. } => Self::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()),
            IoError::Json { path, message } => Self::bad(message.clone()).at(path.clone()),
            IoError::Csv { line, message } => Self::bad(message.clone()).at(format!("line {line}")),
            _ => Self::bad(e.to_string()),
        }
    }
}

impl From<ClusterError> for ApiError {
    fn from(e: ClusterError) -> Self {
        let path = match e {
            ClusterError::LevelOutOfRange(_) => "level",
            ClusterError::KOutOfRange { .. } => "k",
            _ => "span",
        };
        Self::bad(e.to_string()).at(path)
    }
}

impl From<ComicError> for ApiError {
    fn from(e: ComicError) -> Self {
        match e {
            ComicError::Cluster(c) => c.into(),
            ComicError::UnknownMain(_) => Self::bad(e.to_string()).at("mains"),
            ComicError::Narrative(NarrativeError::HighlightPercent(_)) => Self::bad(e.to_string()).at("highlight"),
            ComicError::Narrative(_) => Self::bad(e.to_string()).at("top"),
            _ => Self::bad(e.to_string()),
        }
    }
}

impl From<CommunityError> for ApiError {
    fn from(e: CommunityError) -> Self {
        Self::bad(e.to_string()).at("method")
    }
}

impl From<TimelineError> for ApiError {
    fn from(e: TimelineError) -> Self {
        match e {
            TimelineError::NoPanel(_) => Self::not_found(e.to_string()),
            _ => Self::bad(e.to_string()).at("times"),
        }
    }
}

impl From<InvalidTemplate> for ApiError {
    fn from(e: InvalidTemplate) -> Self {
        let path = e.0.first().map(|i| match (i.panel, &i.element) {
            (Some(p), Some(el)) => format!("panels[{p}].{el}"),
            (Some(p), None) => format!("panels[{p}]"),
            (None, Some(el)) => el.clone(),
            (None, None) => String::new(),
        });
        let err = Self::bad(e.to_string());
        match path {
            Some(p) if !p.is_empty() => err.at(p),
            _ => err,
        }
    }
}
