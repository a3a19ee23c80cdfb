use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("vertex {vertex} out of range for graph on {n} vertices")]
    OutOfRange { vertex: usize, n: usize },

    #[error("random regular generation failed after {restarts} restarts (n={n}, d={d})")]
    GenerationFailure { n: usize, d: usize, restarts: usize },

    #[error("matrix is not symmetric: |M[{row}][{col}] - M[{col}][{row}]*| = {deviation:e}")]
    NotSymmetric { row: usize, col: usize, deviation: f64 },

    #[error("eigensolver did not converge at index {index} after {iterations} iterations (n={n})")]
    NumericalFailure { n: usize, index: usize, iterations: usize },

    #[error("eigenpair {index} has residual {residual:e} above {limit:e}")]
    ResidualTooLarge { index: usize, residual: f64, limit: f64 },

    #[error("base eigenvalue {value} has no unused lift eigenvalue within {window:e}")]
    MatchingFailure { value: f64, window: f64 },

    #[error("characterization violated: {check} = {value:e} exceeds {limit:e} ({detail})")]
    CharacterizationViolation {
        check: &'static str,
        value: f64,
        limit: f64,
        detail: String,
    },

    #[error("size limit exceeded: {0}")]
    SizeLimit(String),

    #[error("no rounding satisfied the quadratic-form condition in {tries} tries (best deficit {best_deficit:e})")]
    SearchFailure {
        tries: usize,
        best_deficit: f64,
        best: Vec<f64>,
    },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("{0}")]
    Validation(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: msg.into(),
        }
    }
}
