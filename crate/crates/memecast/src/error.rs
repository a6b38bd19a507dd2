//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A line of an input file could not be parsed.
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    /// A node id outside the network was passed to a graph operation.
    #[error("node id {id} out of range (network has {count} nodes)")]
    InvalidNode { id: u32, count: usize },

    /// A label in an input file does not resolve against the network.
    #[error("line {line}: unknown node label {label:?}")]
    UnknownLabel { line: usize, label: String },

    /// Power iteration failed to reach the requested tolerance.
    #[error("pagerank did not converge within {iterations} iterations (last residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    /// A meme has fewer events than the requested early window.
    #[error("meme {meme_id:?} has {have} events, needs {need}")]
    InsufficientEvents {
        meme_id: String,
        have: usize,
        need: usize,
    },

    /// The training data cannot support the requested model.
    #[error("cannot train: {0}")]
    Training(String),

    /// A feature row does not match the model's dimensionality.
    #[error("feature dimension mismatch: model expects {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// A parameter is outside its valid range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Predicted and actual label vectors have different lengths.
    #[error("label length mismatch: {predicted} predicted vs {actual} actual")]
    LabelLengthMismatch { predicted: usize, actual: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("model file: {0}")]
    Model(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
