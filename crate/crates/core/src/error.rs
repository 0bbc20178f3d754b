use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("rejected input: {0}")]
    RejectedInput(String),

    #[error("dimension mismatch: {0}")]
    Structural(String),

    #[error("undefined direction: {0}")]
    UndefinedDirection(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("unsupported exponent: {0}")]
    UnsupportedExponent(String),

    #[error("inconsistent smoothness assumptions: {0}")]
    Inconsistent(String),

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    Convergence { iterations: usize, residual: f64 },

    #[error("energy unbounded below along search line: {0}")]
    EllipticityViolated(String),

    #[error("degenerate dictionary: {reason} (atoms {atoms:?})")]
    DictionaryDegenerate { reason: String, atoms: Vec<usize> },

    #[error("dictionary cannot be norming: {0}")]
    NormingImpossible(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}
