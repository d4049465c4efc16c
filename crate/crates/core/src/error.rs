use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid kernel spec: {0}")]
    InvalidSpec(String),

    #[error("kernel support is empty on this grid: {0}")]
    EmptySupport(String),

    #[error("field has {found} values, grid has {expected} sites")]
    GridMismatch { expected: usize, found: usize },

    #[error("invalid density profile at site {site}: {reason}")]
    InvalidProfile { site: usize, reason: String },

    #[error("requested {requested} occupied sites on a grid of {sites}")]
    CountOverflow { requested: usize, sites: usize },

    #[error("no infected sites left: the process is absorbed")]
    Absorbed,

    #[error("bound violated at t = {t}, site {site}: {detail}")]
    StabilityViolation { t: f64, site: usize, detail: String },

    #[error("infected density still {max_u1:e} at horizon t = {horizon}")]
    HorizonExceeded { horizon: f64, max_u1: f64 },

    #[error("argument outside domain: {0}")]
    DomainError(String),

    #[error("fixed-point iteration did not converge after {iterations} iterations (last update {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("inconsistent input at site {site}: {reason}")]
    InconsistentInput { site: usize, reason: String },

    #[error("config error: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for failures of a numerical method rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Absorbed
                | Error::StabilityViolation { .. }
                | Error::HorizonExceeded { .. }
                | Error::DomainError(_)
                | Error::NoConvergence { .. }
                | Error::InconsistentInput { .. }
        )
    }
}
