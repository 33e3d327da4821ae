use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("operator is not positive semidefinite (minimum eigenvalue {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("state trace is {trace}, expected 1")]
    NotNormalized { trace: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(
        "probe is not faithful: rank {phi} of {required} required; \
         use pseudo_reconstruct or patch a set of probes instead"
    )]
    Unfaithful { phi: usize, required: usize },

    #[error("probe set is not faithful: span rank {rank} of {required} required")]
    UnfaithfulSet { rank: usize, required: usize },

    #[error("internal consistency check failed: {0}")]
    Consistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;
