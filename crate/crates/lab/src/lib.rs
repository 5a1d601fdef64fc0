//! Study harness for the wave-packet / envelope convergence experiments:
//! configuration, sweep drivers, slope fitting, kernel quadrature, result
//! persistence and plot emission.

pub mod config;
pub mod criteria;
pub mod emit;
pub mod fit;
pub mod pool;
pub mod quadrature;
pub mod report;
pub mod studies;
pub mod svg;

pub use config::{Format, ProfileConfig, RunConfig, Study};
pub use report::{CheckResult, ConvergenceReport, FitResult, KernelReport, KernelSample};

use thiserror::Error;

/// Harness-level error with the CLI exit-code taxonomy.
#[derive(Debug, Error)]
pub enum LabError {
    /// Exit code 2.
    #[error("configuration error: {0}")]
    Config(String),
    /// Exit code 3.
    #[error("numerical failure: {0}")]
    Numerical(String),
    /// Exit code 4 (only with --check).
    #[error("acceptance threshold failed: {0}")]
    CheckFailed(String),
    /// Exit code 3 (I/O surfaces with path context).
    #[error("i/o failure on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl LabError {
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Config(_) => 2,
            LabError::Numerical(_) | LabError::Io { .. } => 3,
            LabError::CheckFailed(_) => 4,
        }
    }
}

impl From<envelope_core::CoreError> for LabError {
    fn from(e: envelope_core::CoreError) -> Self {
        use envelope_core::CoreError as CE;
        match e {
            CE::InvalidGrid(_) | CE::InvalidParam(_) | CE::OffLattice { .. } => {
                LabError::Config(e.to_string())
            }
            CE::Io { path, source } => LabError::Io { path, source },
            other => LabError::Numerical(other.to_string()),
        }
    }
}

pub type Result<T, E = LabError> = std::result::Result<T, E>;
