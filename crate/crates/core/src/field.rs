//! Complex-valued functions on a torus grid with physical and spectral views.

use crate::{CoreError, Real, Result, TorusGrid};
use num_complex::Complex;
use std::sync::OnceLock;

/// A function sampled on a [`TorusGrid`], stored canonically through its
/// Fourier coefficients under the convention
/// `u_hat_j = (1/n) * sum_m u(x_m) exp(-i xi_j x_m)`,
/// so a pure mode `exp(i xi_j x)` has unit coefficient at slot `j`.
///
/// Physical samples are regenerated lazily and cached; fields are immutable
/// values, safe to share across threads.
#[derive(Debug)]
pub struct Field<T: Real> {
    grid: TorusGrid<T>,
    spectrum: Vec<Complex<T>>,
    physical: OnceLock<Vec<Complex<T>>>,
    real: bool,
}

impl<T: Real> Clone for Field<T> {
    fn clone(&self) -> Self {
        let physical = OnceLock::new();
        if let Some(v) = self.physical.get() {
            let _ = physical.set(v.clone());
        }
        Self { grid: self.grid.clone(), spectrum: self.spectrum.clone(), physical, real: self.real }
    }
}

impl<T: Real> Field<T> {
    /// Zero field.
    pub fn zero(grid: &TorusGrid<T>) -> Self {
        Self {
            grid: grid.clone(),
            spectrum: vec![Complex::default(); grid.n()],
            physical: OnceLock::new(),
            real: true,
        }
    }

    /// Build from Fourier coefficients in FFT slot order.
    pub fn from_spectrum(grid: &TorusGrid<T>, spectrum: Vec<Complex<T>>) -> Result<Self> {
        if spectrum.len() != grid.n() {
            return Err(CoreError::GridMismatch { left: grid.n(), right: spectrum.len() });
        }
        Ok(Self { grid: grid.clone(), spectrum, physical: OnceLock::new(), real: false })
    }

    /// Build from complex physical samples (one forward transform).
    pub fn from_physical(grid: &TorusGrid<T>, values: Vec<Complex<T>>) -> Result<Self> {
        if values.len() != grid.n() {
            return Err(CoreError::GridMismatch { left: grid.n(), right: values.len() });
        }
        let mut spectrum = values.clone();
        grid.forward(&mut spectrum);
        let scale = T::one() / T::from_usize(grid.n()).unwrap();
        for c in &mut spectrum {
            *c = *c * scale;
        }
        let physical = OnceLock::new();
        let _ = physical.set(values);
        Ok(Self { grid: grid.clone(), spectrum, physical, real: false })
    }

    /// Build from real physical samples; the result carries the real flag.
    pub fn from_real_samples(grid: &TorusGrid<T>, values: &[T]) -> Result<Self> {
        let complex: Vec<Complex<T>> = values.iter().map(|&v| Complex::new(v, T::zero())).collect();
        let mut f = Self::from_physical(grid, complex)?;
        f.real = true;
        Ok(f)
    }

    /// Single mode `coeff * exp(i xi_j x)` at signed mode number `j`.
    pub fn from_mode(grid: &TorusGrid<T>, mode: i64, coeff: Complex<T>) -> Result<Self> {
        let slot = grid
            .slot_of_mode(mode)
            .ok_or_else(|| CoreError::InvalidParam(format!("mode {mode} beyond Nyquist")))?;
        let mut spectrum = vec![Complex::default(); grid.n()];
        spectrum[slot] = coeff;
        Self::from_spectrum(grid, spectrum)
    }

    /// Sample a scalar function of position.
    pub fn from_fn_real(grid: &TorusGrid<T>, f: impl Fn(T) -> T) -> Result<Self> {
        let vals: Vec<T> = grid.nodes().iter().map(|&x| f(x)).collect();
        Self::from_real_samples(grid, &vals)
    }

    pub fn grid(&self) -> &TorusGrid<T> {
        &self.grid
    }

    pub fn n(&self) -> usize {
        self.grid.n()
    }

    /// Whether the field was constructed as (or certified) real-valued.
    pub fn is_real(&self) -> bool {
        self.real
    }

    /// Mark the field real after external verification (used by operators
    /// whose output is real by construction).
    pub(crate) fn flag_real(mut self) -> Self {
        self.real = true;
        self
    }

    /// Fourier coefficients in FFT slot order.
    pub fn spectrum(&self) -> &[Complex<T>] {
        &self.spectrum
    }

    /// Physical samples `u(x_m)`; computed on first use.
    pub fn values(&self) -> &[Complex<T>] {
        self.physical.get_or_init(|| {
            let mut buf = self.spectrum.clone();
            self.grid.inverse(&mut buf);
            buf
        })
    }

    /// Real parts of the physical samples.
    pub fn values_real(&self) -> Vec<T> {
        self.values().iter().map(|c| c.re).collect()
    }

    /// `L^2` norm over the torus, evaluated spectrally:
    /// `sqrt(L * sum_j |u_hat_j|^2)`.
    pub fn l2_norm(&self) -> T {
        let sum: T = self.spectrum.iter().map(|c| c.norm_sqr()).sum();
        (self.grid.length() * sum).sqrt()
    }

    /// Largest pointwise magnitude over the collocation nodes.
    pub fn sup_norm(&self) -> T {
        self.values().iter().map(|c| c.norm()).fold(T::zero(), T::max)
    }

    /// True when every coefficient is finite.
    pub fn is_finite(&self) -> bool {
        self.spectrum.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// `2 Re(self)` as a real-flagged field (half-wave reconstruction).
    pub fn two_re(&self) -> Self {
        let vals: Vec<Complex<T>> = self
            .values()
            .iter()
            .map(|c| Complex::new(c.re + c.re, T::zero()))
            .collect();
        let mut f = Self::from_physical(&self.grid, vals).expect("same grid");
        f.real = true;
        f
    }

    /// Pointwise complex conjugate.
    pub fn conj(&self) -> Self {
        // conj(u)_hat(j) = conj(u_hat(-j)); the -n/2 slot pairs with itself
        // only through aliasing, so it must be conjugated in place.
        let n = self.n();
        let mut spectrum = vec![Complex::default(); n];
        for i in 0..n {
            let j = self.grid.mode_of_slot(i);
            let src = if j == -((n / 2) as i64) {
                i
            } else {
                self.grid.slot_of_mode(-j).unwrap()
            };
            spectrum[i] = self.spectrum[src].conj();
        }
        Self { grid: self.grid.clone(), spectrum, physical: OnceLock::new(), real: self.real }
    }

    /// Linear combination `self + alpha * other`.
    pub fn add_scaled(&self, alpha: Complex<T>, other: &Self) -> Result<Self> {
        self.check_same_grid(other)?;
        let spectrum = self
            .spectrum
            .iter()
            .zip(&other.spectrum)
            .map(|(a, b)| *a + alpha * *b)
            .collect();
        Ok(Self {
            grid: self.grid.clone(),
            spectrum,
            physical: OnceLock::new(),
            real: false,
        })
    }

    /// Difference `self - other`.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add_scaled(Complex::new(-T::one(), T::zero()), other)
    }

    /// Scale by a complex constant.
    pub fn scale(&self, alpha: Complex<T>) -> Self {
        let spectrum = self.spectrum.iter().map(|c| alpha * *c).collect();
        Self { grid: self.grid.clone(), spectrum, physical: OnceLock::new(), real: false }
    }

    pub(crate) fn check_same_grid(&self, other: &Self) -> Result<()> {
        if self.grid == other.grid {
            Ok(())
        } else {
            Err(CoreError::GridMismatch { left: self.n(), right: other.n() })
        }
    }

    /// Internal constructor from raw spectral storage.
    pub(crate) fn from_spectrum_unchecked(grid: &TorusGrid<T>, spectrum: Vec<Complex<T>>) -> Self {
        debug_assert_eq!(spectrum.len(), grid.n());
        Self { grid: grid.clone(), spectrum, physical: OnceLock::new(), real: false }
    }
}
