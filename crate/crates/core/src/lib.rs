//! Pseudospectral toolkit for cubic Klein-Gordon dynamics and their NLS
//! envelope limit on a periodic domain.
//!
//! The crate is organised around a small set of value types:
//!
//! - [`TorusGrid`]: a periodic domain `[0, 2*pi*P)` sampled at a power-of-two
//!   number of collocation points, together with its discrete frequency set.
//! - [`Field`]: a complex function on a grid, viewable in physical or
//!   spectral space. All operators act diagonally in spectral space or
//!   through dealiased products, so every operation is exact for the
//!   retained modes.
//! - Solver states ([`solvers::KgState`], [`solvers::AmplitudeState`],
//!   [`solvers::NlsState`]) for the three evolution routes: the real
//!   second-order wave field, the coupled core/remainder envelope pair and
//!   the single cubic-Schroedinger envelope.
//!
//! Everything numeric is generic over the scalar type through [`Real`];
//! concrete `f64` aliases are exported at the crate root.

pub mod ansatz;
pub mod error;
pub mod field;
pub mod grid;
pub mod propagators;
pub mod real;
pub mod schemes;
pub mod snapshot;
pub mod solvers;
pub mod spectral;

pub use error::CoreError;
pub use field::Field;
pub use grid::TorusGrid;
pub use real::Real;

/// `f64` grid used throughout the study harness.
pub type Grid64 = TorusGrid<f64>;
/// `f64` field used throughout the study harness.
pub type Field64 = Field<f64>;
/// Complex scalar over `f64`.
pub type Complex64 = num_complex::Complex<f64>;

/// Result alias for fallible core operations.
pub type Result<T, E = CoreError> = std::result::Result<T, E>;
