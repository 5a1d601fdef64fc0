//! Scalar abstraction for the numeric core.

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};
use rustfft::FftNum;
use std::fmt::{Debug, Display};
use std::iter::Sum;

/// Real scalar type the spectral machinery is generic over.
///
/// Bundles the `num-traits` surface the solvers need with the FFT bound so a
/// single parameter threads through grids, fields and integrators. The crate
/// ships impls for `f32` and `f64`; all shipped studies run in `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + FftNum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Lossless conversion from `f64` for tabulated constants.
    fn from_f64_c(x: f64) -> Self {
        Self::from_f64(x).expect("constant representable in scalar type")
    }

    /// `sqrt(2)`, the carrier dispersion value `<1>`.
    fn sqrt2() -> Self {
        Self::SQRT_2()
    }

    /// Japanese bracket `<x> = sqrt(1 + x^2)`.
    fn bracket(self) -> Self {
        (Self::one() + self * self).sqrt()
    }
}

impl Real for f32 {}
impl Real for f64 {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bracket_values() {
        assert_eq!(0.0f64.bracket(), 1.0);
        assert!((1.0f64.bracket() - std::f64::consts::SQRT_2).abs() < 1e-15);
        assert_eq!((-3.0f64).bracket(), 3.0f64.bracket());
    }
}
