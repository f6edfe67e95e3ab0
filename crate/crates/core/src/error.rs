use thiserror::Error;

/// Errors raised by the library.
///
/// The variants are grouped by how a caller is expected to react: bad input
/// (`Param`, `WrongPhase`, `Index`, `Dimension`, `Config`), guard or numeric
/// trouble (`Guard`, `Singular`, `Numeric`, `Degenerate`) and resource limits.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Param(String),

    #[error("wrong phase: {op} requires {expected}, got {found}")]
    WrongPhase { op: &'static str, expected: &'static str, found: String },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("guard violated: {0}")]
    Guard(String),

    #[error("representation singular: factor {factor} vanishes at m = {m}")]
    Singular { factor: &'static str, m: usize },

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("{what} needs {needed} states, cap is {cap}")]
    Resource { what: String, needed: u128, cap: usize },

    #[error("dimension mismatch: {0} vs {1}")]
    Dimension(usize, usize),

    #[error("index out of range: {0}")]
    Index(String),

    #[error("window too small: half width {have}, need at least {need}")]
    WindowTooSmall { have: i64, need: i64 },

    #[error("incompatible inputs: {0}")]
    Incompatible(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures caused by the caller's input rather than by numerics.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::Param(_)
                | Error::WrongPhase { .. }
                | Error::Index(_)
                | Error::Dimension(..)
                | Error::Config(_)
                | Error::Incompatible(_)
                | Error::WindowTooSmall { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
