use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the solver, diagnostics and experiment drivers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch: {left} vs {right} points per side")]
    GridMismatch { left: usize, right: usize },

    #[error("non-finite value at flat index {index}")]
    NonFinite { index: usize },

    #[error("coefficients are not Hermitian-symmetric (defect {defect:.3e})")]
    NotHermitian { defect: f64 },

    #[error("field has nonzero mean coefficient {mean:.3e}; velocity is undefined on the torus")]
    NonzeroMean { mean: f64 },

    #[error(
        "mollifier width {epsilon} is under-resolved: needs at least {min_epsilon} (4 grid cells)"
    )]
    UnresolvedKernel { epsilon: f64, min_epsilon: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("numerical blow-up at step {step} (t = {time})")]
    BlowUp { step: u64, time: f64 },

    #[error("need at least {needed} samples, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("resolution guard: nu = {nu} needs dissipation wavenumber {k_diss:.1} <= cutoff {cutoff:.1}; use N >= {required_n}")]
    Unresolved {
        nu: f64,
        k_diss: f64,
        cutoff: f64,
        required_n: usize,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
