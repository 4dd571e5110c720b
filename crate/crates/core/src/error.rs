use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("invalid word: generator index {index} out of range for {generators} generators")]
    InvalidWord { index: usize, generators: usize },

    #[error("parse error at byte {offset}: expected one of {expected:?}")]
    Parse { offset: usize, expected: Vec<String> },

    #[error("evaluation error: {0}")]
    Eval(String),

    #[error("support violation: {0}")]
    SupportViolation(String),

    #[error("field is not compatible with the identifications: {0}")]
    Periodicity(String),

    #[error("integration diverged at s = {at}")]
    IntegrationDiverged { at: f64 },

    #[error("path sampled too coarsely: step {step} >= limit {limit} at sample {index}")]
    PathTooCoarse { index: usize, step: f64, limit: f64 },

    #[error("invalid representation: {0}")]
    InvalidRepresentation(String),

    #[error("representation presentation does not match the manifold")]
    PresentationMismatch,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("box touches an identified edge or the truncation margin: {0}")]
    BoxTouchesEdge(String),

    #[error("linear solve failed: {0}")]
    SolveFailed(String),

    #[error("operator size {size} exceeds cap {cap}")]
    SizeExceeded { size: usize, cap: usize },

    #[error("eigensolver failure: {0}")]
    SolverFailure(String),

    #[error("configuration error at `{path}` (line {line}): {message}")]
    Config { path: String, line: usize, message: String },

    #[error("job `{job}` failed: {message}")]
    Job { job: String, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
