//! Crate-wide error type.

use std::path::PathBuf;

use thiserror::Error;

use crate::llm::Condition;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: missing header row")]
    MissingHeader { path: PathBuf },

    #[error("{path}: missing column {column:?}")]
    MissingColumn { path: PathBuf, column: String },

    #[error("{path}: row {row}, column {column:?}: {reason}")]
    InvalidCell {
        path: PathBuf,
        row: usize,
        column: String,
        reason: String,
    },

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("no numeric token in response {raw:?}")]
    NoNumberFound { raw: String },

    #[error("score {value} outside [0, 1] in response {raw:?}")]
    OutOfRange { value: f64, raw: String },

    #[error(
        "conflicting score for patient {patient_id}, condition {condition}, model {model_id:?}"
    )]
    DuplicateScore {
        patient_id: usize,
        condition: Condition,
        model_id: String,
    },

    #[error(
        "score store incomplete for model {model_id:?}: missing {}",
        format_pairs(missing)
    )]
    IncompleteStore {
        model_id: String,
        missing: Vec<(usize, Condition)>,
    },

    #[error(
        "request for patient {patient_id}, condition {condition} failed after {attempts} attempt(s): {message}"
    )]
    RequestFailed {
        patient_id: usize,
        condition: Condition,
        attempts: u32,
        message: String,
    },

    #[error("environment variable {name:?} is not set or empty")]
    MissingApiKey { name: String },

    #[error("training data must contain both classes")]
    SingleClass,

    #[error("at least {needed} rows required, got {got}")]
    TooFewRows { needed: usize, got: usize },

    #[error("expected a row of {expected} features, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("labels and predictions differ in length ({labels} vs {predictions})")]
    LengthMismatch { labels: usize, predictions: usize },

    #[error("labels contain a single class; need at least one positive and one negative")]
    SingleClassLabels,

    #[error("cannot build a valid split plan: {reason}")]
    InfeasibleSplit { reason: String },

    #[error("empty input: {what}")]
    EmptyInput { what: &'static str },

    #[error("baseline mean for {metric} is zero")]
    ZeroBaseline { metric: &'static str },

    #[error("mismatched summaries: {reason}")]
    SummaryMismatch { reason: String },

    #[error("invalid parameter: {reason}")]
    InvalidParam { reason: String },

    #[error("HTTP error: {0}")]
    Http(#[from] reqwest::Error),

    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

fn format_pairs(missing: &[(usize, Condition)]) -> String {
    let shown: Vec<String> = missing
        .iter()
        .take(8)
        .map(|(id, c)| format!("(patient {id}, {c})"))
        .collect();
    if missing.len() > shown.len() {
        format!(
            "{} pairs: {}, ... and {} more",
            missing.len(),
            shown.join(", "),
            missing.len() - shown.len()
        )
    } else {
        format!("{} pair(s): {}", missing.len(), shown.join(", "))
    }
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
