use thiserror::Error;

use crate::spectral::Wavevector;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("wavevector {k:?} lies outside the stored lattice (|k_i| <= {half})")]
    OutOfRange { k: Wavevector, half: i32 },

    #[error("conflicting assignments at {k:?} and its negative violate conjugate symmetry")]
    ConjugateConflict { k: Wavevector },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("field is not divergence-free (relative divergence {0:.3e})")]
    NotDivergenceFree(f64),

    #[error("noise spectrum is not radially symmetric")]
    NonRadialTheta,

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("config violates rule `{rule}`: {detail}")]
    Validation { rule: &'static str, detail: String },

    #[error("step {step} rejected: {reason}")]
    StepRejected { step: usize, reason: String },

    #[error("non-finite coefficient at step {step}")]
    NonFinite { step: usize },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("config parse error: {0}")]
    Toml(#[from] toml::de::Error),
}

impl Error {
    /// Whether the error stems from invalid input rather than a failure during a run.
    pub fn is_validation(&self) -> bool {
        !matches!(
            self,
            Error::StepRejected { .. } | Error::NonFinite { .. } | Error::Io(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
