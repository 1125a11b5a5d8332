use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Γ_ab·Γ_cb + |Ω_d|² is exactly zero (no ground-state decay, no detuning, no drive).
    #[error("degenerate medium: gamma_cb = 0, detuning = 0 and drive intensity = 0")]
    DegenerateMedium,

    #[error("dark state undefined when both Rabi frequencies vanish")]
    UndefinedState,

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("fringe period {period:e} m is not resolved by grid spacing {dx:e} m")]
    UnresolvedFringe { period: f64, dx: f64 },

    #[error("non-finite field value at step {step}, sample {index}")]
    NonFinite { step: usize, index: usize },

    #[error("no peak above the prominence threshold")]
    NoPeak,

    #[error("half-maximum crossing of the peak at sample {index} is not bracketed in the window")]
    UnresolvedPeak { index: usize },

    #[error("drive Rabi frequency is zero")]
    ZeroDrive,

    #[error("zero denominator: {0}")]
    ZeroDenominator(String),

    #[error("every sweep row failed; first error: {0}")]
    SweepFailed(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("drive file {path}: {msg}")]
    DriveFile { path: PathBuf, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Whether the error comes from user input (config, files, arguments)
    /// rather than from the numerics.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::Config(_) | Error::DriveFile { .. } | Error::InvalidArgument(_)
        )
    }
}
