//! Periodic computational domain and its discrete frequency lattice.

use crate::{CoreError, Real, Result};
use num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use std::fmt;
use std::sync::Arc;

/// One-dimensional torus `[0, L)` with `L = 2*pi*P` for a positive integer
/// `P`, sampled at `n` collocation points (`n` a power of two, `n >= 16`).
///
/// The frequency lattice is `xi_j = 2*pi*j/L = j/P` for
/// `j in {-n/2, ..., n/2 - 1}`, stored in FFT index order (non-negative
/// indices first). Keeping `L` an integer multiple of `2*pi` puts the unit
/// carrier frequency exactly on the lattice.
///
/// Grids are cheap to clone (the payload, including FFT plans for the plain
/// and zero-padded transforms, sits behind an `Arc`) and compare equal when
/// they describe the same domain.
pub struct TorusGrid<T: Real> {
    inner: Arc<GridInner<T>>,
}

struct GridInner<T: Real> {
    periods: u64,
    n: usize,
    length: T,
    /// Frequencies in FFT index order.
    freqs: Vec<T>,
    /// Collocation nodes `x_m = m L / n`.
    nodes: Vec<T>,
    /// Forward/inverse plans for sizes n, 2n and 4n (padded products).
    plans: Vec<(Arc<dyn Fft<T>>, Arc<dyn Fft<T>>)>,
}

impl<T: Real> Clone for TorusGrid<T> {
    fn clone(&self) -> Self {
        Self { inner: self.inner.clone() }
    }
}

impl<T: Real> PartialEq for TorusGrid<T> {
    fn eq(&self, other: &Self) -> bool {
        self.inner.periods == other.inner.periods && self.inner.n == other.inner.n
    }
}
impl<T: Real> Eq for TorusGrid<T> {}

impl<T: Real> fmt::Debug for TorusGrid<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TorusGrid(L = 2*pi*{}, n = {})", self.inner.periods, self.inner.n)
    }
}

impl<T: Real> TorusGrid<T> {
    /// Build the torus `[0, 2*pi*periods)` with `n` collocation points.
    pub fn new(periods: u64, n: usize) -> Result<Self> {
        if periods == 0 {
            return Err(CoreError::InvalidGrid("period count must be positive".into()));
        }
        if n < 16 || !n.is_power_of_two() {
            return Err(CoreError::InvalidGrid(format!(
                "n must be a power of two >= 16, got {n}"
            )));
        }
        let p = T::from_u64(periods)
            .ok_or_else(|| CoreError::InvalidGrid("period count overflows scalar".into()))?;
        let length = T::from_f64_c(2.0) * T::PI() * p;
        let freqs = (0..n)
            .map(|i| {
                let j = if i < n / 2 { i as i64 } else { i as i64 - n as i64 };
                T::from_i64(j).unwrap() / p
            })
            .collect();
        let nodes = (0..n)
            .map(|m| length * T::from_usize(m).unwrap() / T::from_usize(n).unwrap())
            .collect();
        let mut planner = FftPlanner::new();
        let plans = [n, 2 * n, 4 * n]
            .iter()
            .map(|&m| (planner.plan_fft_forward(m), planner.plan_fft_inverse(m)))
            .collect();
        Ok(Self {
            inner: Arc::new(GridInner { periods, n, length, freqs, nodes, plans }),
        })
    }

    pub fn n(&self) -> usize {
        self.inner.n
    }

    /// Domain length `L = 2*pi*P`.
    pub fn length(&self) -> T {
        self.inner.length
    }

    /// Integer period count `P`.
    pub fn periods(&self) -> u64 {
        self.inner.periods
    }

    /// Frequency spacing `2*pi/L = 1/P`.
    pub fn freq_spacing(&self) -> T {
        T::one() / T::from_u64(self.inner.periods).unwrap()
    }

    /// Largest resolved frequency magnitude, `(n/2) / P`.
    pub fn nyquist(&self) -> T {
        T::from_usize(self.inner.n / 2).unwrap() * self.freq_spacing()
    }

    /// Frequencies in FFT index order.
    pub fn freqs(&self) -> &[T] {
        &self.inner.freqs
    }

    /// Collocation nodes `x_m = m L / n`.
    pub fn nodes(&self) -> &[T] {
        &self.inner.nodes
    }

    /// Signed mode number of storage slot `i` (`i` -> `j` with `xi_j = j/P`).
    pub fn mode_of_slot(&self, i: usize) -> i64 {
        let n = self.inner.n;
        if i < n / 2 {
            i as i64
        } else {
            i as i64 - n as i64
        }
    }

    /// Storage slot of signed mode number `j`, if resolved.
    pub fn slot_of_mode(&self, j: i64) -> Option<usize> {
        let n = self.inner.n as i64;
        if j >= -n / 2 && j < n / 2 {
            Some(if j >= 0 { j as usize } else { (j + n) as usize })
        } else {
            None
        }
    }

    /// Express `freq` as a signed lattice mode number; errors when it is not
    /// an integer multiple of the frequency spacing (to 1e-9 relative).
    pub fn lattice_mode(&self, freq: T) -> Result<i64> {
        let steps = freq / self.freq_spacing();
        let rounded = steps.round();
        let tol = T::from_f64_c(1e-9) * (T::one() + steps.abs());
        if (steps - rounded).abs() > tol {
            return Err(CoreError::OffLattice {
                freq: freq.to_f64().unwrap_or(f64::NAN),
                spacing: self.freq_spacing().to_f64().unwrap_or(f64::NAN),
            });
        }
        rounded
            .to_i64()
            .ok_or_else(|| CoreError::InvalidParam("lattice mode overflows i64".into()))
    }

    pub(crate) fn forward(&self, buf: &mut [Complex<T>]) {
        self.plan_for(buf.len()).0.process(buf);
    }

    pub(crate) fn inverse(&self, buf: &mut [Complex<T>]) {
        self.plan_for(buf.len()).1.process(buf);
    }

    fn plan_for(&self, m: usize) -> &(Arc<dyn Fft<T>>, Arc<dyn Fft<T>>) {
        let n = self.inner.n;
        let idx = match m {
            _ if m == n => 0,
            _ if m == 2 * n => 1,
            _ if m == 4 * n => 2,
            _ => panic!("no FFT plan for size {m} on a grid of {n} points"),
        };
        &self.inner.plans[idx]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_sizes() {
        assert!(TorusGrid::<f64>::new(0, 64).is_err());
        assert!(TorusGrid::<f64>::new(1, 8).is_err());
        assert!(TorusGrid::<f64>::new(1, 48).is_err());
    }

    #[test]
    fn frequency_lattice() {
        let g = TorusGrid::<f64>::new(16, 64).unwrap();
        assert_eq!(g.freq_spacing(), 1.0 / 16.0);
        assert_eq!(g.freqs()[0], 0.0);
        assert_eq!(g.freqs()[1], 1.0 / 16.0);
        assert_eq!(g.freqs()[63], -1.0 / 16.0);
        assert_eq!(g.freqs()[32], -2.0);
        assert_eq!(g.nyquist(), 2.0);
        assert_eq!(g.slot_of_mode(-1), Some(63));
        assert_eq!(g.mode_of_slot(63), -1);
        assert_eq!(g.lattice_mode(1.0).unwrap(), 16);
        assert!(g.lattice_mode(0.03).is_err());
    }
}
