use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("x = {x} outside domain [0, {x_max}]")]
    Domain { x: f64, x_max: f64 },

    #[error("probe leaves the grid at n = {n} (x = {x}, x_max = {x_max})")]
    ProbeDomain { n: usize, x: f64, x_max: f64 },

    #[error("front at level {level} not bracketed on the grid (generation {generation})")]
    FrontNotFound { level: f64, generation: usize },

    #[error("fit error: {0}")]
    Fit(String),

    #[error("alpha scan failed for delta = {delta}: {reason}")]
    Scan { delta: f64, reason: String },

    #[error("quadrature did not converge on [{lo}, {hi}]")]
    Quadrature { lo: f64, hi: f64 },
}

/// Coarse classification used to map failures onto process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Config,
    Numeric,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Config(_) | Error::GridMismatch(_) | Error::Domain { .. } => ErrorKind::Config,
            Error::ProbeDomain { .. }
            | Error::FrontNotFound { .. }
            | Error::Fit(_)
            | Error::Scan { .. }
            | Error::Quadrature { .. } => ErrorKind::Numeric,
        }
    }
}
