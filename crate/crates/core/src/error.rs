use thiserror::Error;

/// Errors produced by the numerical routines and the file-based front end.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("quadrature did not converge on [{lower}, {upper}]: estimate {estimate:e}, error estimate {error_estimate:e}")]
    Quadrature {
        lower: f64,
        upper: f64,
        estimate: f64,
        error_estimate: f64,
    },

    #[error("root not bracketed in [{lower}, {upper}]")]
    RootNotBracketed { lower: f64, upper: f64 },

    #[error("unbounded search: {0}")]
    Unbounded(String),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("matrix is numerically rank deficient (ratio {ratio:e})")]
    RankDeficient { ratio: f64 },

    #[error("ill-conditioned system (condition estimate {estimate:e})")]
    IllConditioned { estimate: f64 },

    #[error("iteration limit of {0} reached")]
    IterationLimit(usize),

    #[error("enumeration budget exhausted: {0}")]
    Budget(String),

    #[error("monotonicity assumption violated: {0}")]
    Monotonicity(String),

    #[error("parse error in {source_name} at {location}: {message}")]
    Parse {
        source_name: String,
        location: String,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for errors caused by the caller's input rather than by the numerics.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::InvalidArgument(_) | Error::Parse { .. } | Error::Io(_) | Error::Json(_) | Error::Csv(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
