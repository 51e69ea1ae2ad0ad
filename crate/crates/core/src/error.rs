use alloc::string::String;

use crate::Label;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("unknown label code `{0}`")]
    UnknownLabel(String),
    #[error("label {label} has {available} sentences, {requested} requested")]
    InsufficientData {
        label: Label,
        available: usize,
        requested: usize,
    },
    #[error("split ratio {0} must lie strictly between 0 and 1")]
    InvalidRatio(f64),
    #[error("malformed row at line {0}: expected `<label>\\t<text>`")]
    MalformedRow(usize),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("vocabulary is empty")]
    EmptyVocabulary,
    #[error("empty input")]
    EmptyInput,
    #[error("feature {index} has negative count {value}")]
    NegativeCount { index: usize, value: f64 },
    #[error("k = {k} is invalid for {n} training points")]
    InvalidK { k: usize, n: usize },
    #[error("sequence has no tokens")]
    SequenceTooShort,
    #[error("at least 2 points required, got {0}")]
    TooFewPoints(usize),
    #[error("eigenpair {component} did not converge (residual {residual:e})")]
    ConvergenceFailure { component: usize, residual: f64 },
    #[error("perplexity {perplexity} is infeasible at point {point} (reached {achieved})")]
    PerplexityInfeasible {
        point: usize,
        perplexity: f64,
        achieved: f64,
    },
    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("prediction failed for sentence {index}: {source}")]
    Prediction {
        index: usize,
        #[source]
        source: alloc::boxed::Box<Error>,
    },
}
