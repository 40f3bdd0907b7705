//! Harness around `graft-core`: the JSON graft format, corpus generation,
//! the theorem checks and their parallel runner, and DOT export.

pub mod checks;
pub mod dot;
pub mod generate;
pub mod json;
pub mod suite;

use graft_core::GraftError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LabError {
    #[error(transparent)]
    Graft(#[from] GraftError),
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("unknown check `{0}`")]
    UnknownCheck(String),
    #[error("invalid corpus: {0}")]
    Corpus(String),
    #[error("invalid input: {0}")]
    Input(String),
}

pub type Result<T, E = LabError> = std::result::Result<T, E>;
