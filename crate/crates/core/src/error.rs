//! Error type shared by the numeric core.

use thiserror::Error;

/// Errors surfaced by grid construction, spectral operators and solvers.
#[derive(Debug, Error)]
pub enum CoreError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("fields live on different grids (n = {left} vs n = {right})")]
    GridMismatch { left: usize, right: usize },

    #[error("symbol is not finite at grid frequency xi = {xi}")]
    NonFiniteSymbol { xi: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("operation requires a real-flagged field")]
    ComplexInput,

    #[error("epsilon mismatch: state carries {state}, caller passed {given}")]
    EpsilonMismatch { state: f64, given: f64 },

    #[error("frequency {freq} is not on the grid lattice (spacing {spacing})")]
    OffLattice { freq: f64, spacing: f64 },

    #[error("numerical failure at t = {t_last}: {reason}")]
    NumericalFailure { t_last: f64, reason: String },

    #[error("requested time {t} exceeds the safe horizon: {reason}")]
    TimeOutOfRange { t: f64, reason: String },

    #[error("trajectory coverage mismatch: {0}")]
    CoverageMismatch(String),

    #[error("i/o failure on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("snapshot format error: {0}")]
    SnapshotFormat(String),
}
