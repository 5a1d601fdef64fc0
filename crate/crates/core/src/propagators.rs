//! Exact unitary evolution under the rescaled Klein-Gordon symbol, its
//! Schroedinger limit, and numeric probes of the linear convergence and
//! dispersive-decay behaviour.

use crate::spectral::{self, lp_project, ProjectionMode};
use crate::{CoreError, Field, Real, Result, TorusGrid};
use num_complex::Complex;

/// Carrier data of the wave packet: `k = 1`, `omega = <1> = sqrt(2)`,
/// group velocity `c_g = 1/sqrt(2)`, plus the small parameter `eps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WavePacketParams<T: Real> {
    pub eps: T,
}

impl<T: Real> WavePacketParams<T> {
    pub fn new(eps: T) -> Result<Self> {
        spectral::check_eps(eps)?;
        Ok(Self { eps })
    }

    /// Carrier wavenumber, fixed at one by scaling.
    pub fn carrier(&self) -> T {
        T::one()
    }

    /// Carrier temporal frequency `omega = <k>`.
    pub fn omega(&self) -> T {
        T::sqrt2()
    }

    /// Group velocity `c_g = k / <k>`.
    pub fn group_velocity(&self) -> T {
        T::one() / T::sqrt2()
    }
}

/// Moving-frame rescaled Klein-Gordon symbol
/// `p_eps(xi) = eps^{-2} (<1 + eps xi> - sqrt(2) - eps xi / sqrt(2))`.
///
/// Evaluated through the algebraically equivalent form
/// `xi^2 / (2 (<1 + eps xi> + sqrt(2) + eps xi / sqrt(2)))`,
/// whose denominator is bounded below by `sqrt(2)`, so no cancellation
/// occurs anywhere on the frequency axis.
pub fn rescaled_symbol<T: Real>(xi: T, eps: T) -> T {
    let z = eps * xi;
    let denom = (T::one() + z).bracket() + T::sqrt2() + z / T::sqrt2();
    xi * xi / (denom + denom)
}

/// Limiting Schroedinger symbol `q(xi) = xi^2 / (4 sqrt(2))`.
pub fn schrodinger_symbol<T: Real>(xi: T) -> T {
    xi * xi / (T::from_f64_c(4.0) * T::sqrt2())
}

/// Which unitary flow `evolve_linear` applies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LinearFlow<T: Real> {
    /// `exp(-i t p_eps(D))`: rescaled Klein-Gordon in the carrier frame.
    KgRescaled { eps: T },
    /// `exp(-i t q(D))` with `q = xi^2/(4 sqrt 2)`: the envelope limit.
    Schrodinger,
    /// `exp(-i t <D>)`: physical half-wave flow.
    KgPhysical,
    /// `exp(-i a D)`: translation by `a`.
    Translation { shift: T },
}

impl<T: Real> LinearFlow<T> {
    /// Phase angle `theta(xi)` such that the flow multiplies by
    /// `exp(-i t theta)` (for `Translation` the angle is `a xi` and `t` is
    /// ignored by convention of passing `t = 1`).
    pub fn phase(&self, xi: T, t: T) -> T {
        match *self {
            LinearFlow::KgRescaled { eps } => t * rescaled_symbol(xi, eps),
            LinearFlow::Schrodinger => t * schrodinger_symbol(xi),
            LinearFlow::KgPhysical => t * xi.bracket(),
            LinearFlow::Translation { shift } => shift * xi,
        }
    }
}

/// Apply the exact unitary phase `exp(-i t symbol(xi_j))` mode by mode.
///
/// The `L^2` norm is preserved to rounding for every flow and every `t`.
pub fn evolve_linear<T: Real>(f: &Field<T>, t: T, flow: LinearFlow<T>) -> Result<Field<T>> {
    if !t.is_finite() {
        return Err(CoreError::InvalidParam(format!("evolution time must be finite, got {t}")));
    }
    if let LinearFlow::KgRescaled { eps } = flow {
        spectral::check_eps(eps)?;
    }
    spectral::apply_multiplier(f, |xi| {
        let theta = flow.phase(xi, t);
        Complex::from_polar(T::one(), -theta)
    })
}

/// Maximum over sampled `t` in `[0, window]` of the `L^2` distance between
/// the rescaled flow and the Schroedinger flow applied to `u0`.
///
/// Computed spectrally:
/// `|| (S_eps(t) - S_0(t)) u0 || = sqrt(L sum 4 sin^2(t (p - q)/2) |u_hat|^2)`.
pub fn linear_deviation<T: Real>(
    u0: &Field<T>,
    eps: T,
    window: T,
    samples: usize,
) -> Result<T> {
    spectral::check_eps(eps)?;
    if !(window > T::zero()) || samples < 2 {
        return Err(CoreError::InvalidParam(
            "linear_deviation needs a positive window and at least two samples".into(),
        ));
    }
    let grid = u0.grid();
    let gaps: Vec<T> = grid
        .freqs()
        .iter()
        .map(|&xi| rescaled_symbol(xi, eps) - schrodinger_symbol(xi))
        .collect();
    let four = T::from_f64_c(4.0);
    let half = T::from_f64_c(0.5);
    let mut worst = T::zero();
    for k in 0..samples {
        let t = window * T::from_usize(k).unwrap() / T::from_usize(samples - 1).unwrap();
        let sum: T = u0
            .spectrum()
            .iter()
            .zip(&gaps)
            .map(|(c, &d)| {
                let s = (t * d * half).sin();
                four * s * s * c.norm_sqr()
            })
            .sum();
        worst = worst.max((grid.length() * sum).sqrt());
    }
    Ok(worst)
}

/// Band-limited near-delta used by [`decay_probe`]: unit flat spectrum on
/// `|xi| <= 8 N`, centred at mid-domain, scaled so the sup norm is one.
pub fn decay_probe_data<T: Real>(grid: &TorusGrid<T>, band: T) -> Result<Field<T>> {
    if !(band > T::zero()) {
        return Err(CoreError::InvalidParam("band must be positive".into()));
    }
    let lim = T::from_f64_c(8.0) * band;
    if lim > grid.nyquist() {
        return Err(CoreError::InvalidParam(format!(
            "grid Nyquist {} does not resolve the probe band {}",
            grid.nyquist(),
            lim
        )));
    }
    let n = grid.n();
    let half_l = grid.length() * T::from_f64_c(0.5);
    let mut spec = vec![Complex::default(); n];
    for i in 0..n {
        let xi = grid.freqs()[i];
        if xi.abs() <= lim {
            // centre the bump at L/2 with a translation phase
            spec[i] = Complex::from_polar(T::one(), -xi * half_l);
        }
    }
    let f = Field::from_spectrum(grid, spec)?;
    let peak = f.sup_norm();
    Ok(f.scale(Complex::new(T::one() / peak, T::zero())))
}

/// Sup-norm decay probe: `|| S_eps(t) P_N u0 ||_{L^infty}` at each requested
/// time, for the band-limited near-delta data of [`decay_probe_data`].
///
/// Errors when the dispersed wave reaches the domain boundary (more than
/// 1e-6 of the mass within the outer percent of the torus), naming the first
/// bad time.
pub fn decay_probe<T: Real>(
    grid: &TorusGrid<T>,
    band: T,
    eps: T,
    times: &[T],
) -> Result<Vec<T>> {
    spectral::check_eps(eps)?;
    let u0 = decay_probe_data(grid, band)?;
    let projected = lp_project(&u0, band, ProjectionMode::Band, false)?;
    let mut out = Vec::with_capacity(times.len());
    let mut prev = T::neg_infinity();
    for &t in times {
        if t <= prev {
            return Err(CoreError::InvalidParam("probe times must be increasing".into()));
        }
        if !(t > T::zero()) {
            return Err(CoreError::InvalidParam("probe times must be positive".into()));
        }
        prev = t;
        let evolved = evolve_linear(&projected, t, LinearFlow::KgRescaled { eps })?;
        check_boundary_mass(&evolved, t)?;
        out.push(evolved.sup_norm());
    }
    Ok(out)
}

fn check_boundary_mass<T: Real>(f: &Field<T>, t: T) -> Result<()> {
    let n = f.n();
    let margin = (n / 100).max(1);
    let vals = f.values();
    let total: T = vals.iter().map(|c| c.norm_sqr()).sum();
    let edge: T = vals[..margin]
        .iter()
        .chain(vals[n - margin..].iter())
        .map(|c| c.norm_sqr())
        .sum();
    if edge > T::from_f64_c(1e-6) * total {
        return Err(CoreError::TimeOutOfRange {
            t: t.to_f64().unwrap_or(f64::NAN),
            reason: "dispersed wave reached the domain boundary".into(),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    type C = Complex<f64>;

    #[test]
    fn symbol_vanishes_at_origin() {
        for eps in [1.0, 0.5, 0.25, 1e-3] {
            assert_eq!(rescaled_symbol(0.0, eps), 0.0);
        }
        assert_eq!(schrodinger_symbol(0.0), 0.0);
    }

    #[test]
    fn symbol_reference_values() {
        // frozen from 40-digit evaluation of the defining formula
        assert_relative_eq!(rescaled_symbol(2.0, 0.5), 0.45899053576058849, epsilon = 1e-15);
        assert_relative_eq!(rescaled_symbol(1.0, 1e-3), 0.17668834008909052, epsilon = 1e-13);
        assert_relative_eq!(schrodinger_symbol(2.0), 0.70710678118654752, epsilon = 1e-15);
        // small-eps agreement with the quadratic limit
        assert!((rescaled_symbol(1.0f64, 1e-3) - 0.17677669529663688).abs() < 1e-3);
    }

    #[test]
    fn symbol_matches_direct_formula_at_moderate_arguments() {
        for &(xi, eps) in &[(2.0, 0.5), (-3.0, 0.25), (7.5, 0.125), (-30.0, 0.03125)] {
            let direct = ((1.0 + eps * xi as f64).bracket()
                - 2f64.sqrt()
                - eps * xi / 2f64.sqrt())
                / (eps * eps);
            assert_relative_eq!(rescaled_symbol(xi, eps), direct, max_relative = 1e-9);
        }
    }

    #[test]
    fn schrodinger_symbol_even() {
        for xi in [0.25, 1.0, 17.5] {
            assert_eq!(schrodinger_symbol(xi), schrodinger_symbol(-xi));
        }
    }

    #[test]
    fn single_mode_phase_rotation() {
        let g = TorusGrid::<f64>::new(8, 64).unwrap();
        let f = Field::from_mode(&g, 16, C::new(1.0, 0.0)).unwrap(); // xi0 = 2
        let t = 0.73;
        let eps = 0.5;
        let out = evolve_linear(&f, t, LinearFlow::KgRescaled { eps }).unwrap();
        let slot = g.slot_of_mode(16).unwrap();
        let want = C::from_polar(1.0, -t * rescaled_symbol(2.0, eps));
        assert!((out.spectrum()[slot] - want).norm() < 1e-15);
    }

    #[test]
    fn translation_by_half_period_squares_to_identity() {
        let g = TorusGrid::<f64>::new(8, 64).unwrap();
        let f = Field::from_fn_real(&g, |x| (3.0 * x).sin() + 0.1 * x.cos()).unwrap();
        let half = g.length() / 2.0;
        let once = evolve_linear(&f, 1.0, LinearFlow::Translation { shift: half }).unwrap();
        let twice = evolve_linear(&once, 1.0, LinearFlow::Translation { shift: half }).unwrap();
        let err: f64 = twice
            .spectrum()
            .iter()
            .zip(f.spectrum())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!(err < 1e-12 * f.l2_norm());
    }

    #[test]
    fn group_law() {
        let g = TorusGrid::<f64>::new(8, 64).unwrap();
        let f = Field::from_fn_real(&g, |x| (2.0 * x).cos() + (5.0 * x).sin()).unwrap();
        let flow = LinearFlow::KgRescaled { eps: 0.25 };
        let a = evolve_linear(&evolve_linear(&f, 0.37, flow).unwrap(), 1.11, flow).unwrap();
        let b = evolve_linear(&f, 1.48, flow).unwrap();
        let err: f64 = a
            .spectrum()
            .iter()
            .zip(b.spectrum())
            .map(|(x, y)| (x - y).norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!(err < 1e-12 * f.l2_norm());
    }

    #[test]
    fn unitarity_all_flows() {
        let g = TorusGrid::<f64>::new(8, 64).unwrap();
        let f = Field::from_fn_real(&g, |x| (x - 8.0).tanh() + (6.0 * x).cos()).unwrap();
        let flows = [
            LinearFlow::KgRescaled { eps: 0.125 },
            LinearFlow::Schrodinger,
            LinearFlow::KgPhysical,
            LinearFlow::Translation { shift: 1.234 },
        ];
        for flow in flows {
            for t in [0.1, 3.7, 250.0] {
                let out = evolve_linear(&f, t, flow).unwrap();
                assert_relative_eq!(out.l2_norm(), f.l2_norm(), max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn commutation_with_projection_is_exact() {
        let g = TorusGrid::<f64>::new(8, 64).unwrap();
        let f = Field::from_fn_real(&g, |x| (2.0 * x).cos() + (7.0 * x).sin()).unwrap();
        let flow = LinearFlow::KgRescaled { eps: 0.25 };
        let a = lp_project(&evolve_linear(&f, 0.9, flow).unwrap(), 3.0, ProjectionMode::High, true)
            .unwrap();
        let b = evolve_linear(&lp_project(&f, 3.0, ProjectionMode::High, true).unwrap(), 0.9, flow)
            .unwrap();
        assert_eq!(a.spectrum(), b.spectrum());
    }

    #[test]
    fn deviation_single_mode_closed_form() {
        // unit-L2-mass mode at xi0 = 2, eps = 0.5, window 1: frozen value
        let g = TorusGrid::<f64>::new(8, 64).unwrap();
        let coeff = 1.0 / g.length().sqrt();
        let f = Field::from_mode(&g, 16, C::new(coeff, 0.0)).unwrap();
        let d = linear_deviation(&f, 0.5, 1.0, 257).unwrap();
        assert_relative_eq!(d, 0.24748029954976952, epsilon = 1e-10);
    }

    #[test]
    fn deviation_vanishes_for_zero_mode_data() {
        let g = TorusGrid::<f64>::new(8, 64).unwrap();
        let f = Field::from_mode(&g, 0, C::new(2.5, 0.0)).unwrap();
        for eps in [1.0, 0.25, 0.0625] {
            assert_eq!(linear_deviation(&f, eps, 1.0, 17).unwrap(), 0.0);
        }
    }

    #[test]
    fn deviation_decreases_when_eps_halves() {
        let g = TorusGrid::<f64>::new(8, 256).unwrap();
        let f = Field::from_fn_real(&g, |x| (-(x - 8.0 * std::f64::consts::PI).powi(2) / 2.0).exp())
            .unwrap();
        let d1 = linear_deviation(&f, 0.25, 1.0, 65).unwrap();
        let d2 = linear_deviation(&f, 0.125, 1.0, 65).unwrap();
        assert!(d2 < d1);
    }

    #[test]
    fn symbol_gap_bounded_by_cubic() {
        // |p_eps - q| <= C eps |xi|^3 with a single C <= 1 over the stated grid.
        let mut c_max: f64 = 0.0;
        for k in 1..=6 {
            let eps = 2f64.powi(-k);
            let mut xi = -8.0f64;
            while xi <= 8.0 {
                if xi.abs() > 1e-9 {
                    let gap = (rescaled_symbol(xi, eps) - schrodinger_symbol(xi)).abs();
                    c_max = c_max.max(gap / (eps * xi.abs().powi(3)));
                }
                xi += 0.0625;
            }
        }
        assert!(c_max <= 1.0, "measured constant {c_max}");
        assert!(c_max > 0.05, "sanity: constant should be near 1/(8 sqrt 2)");
    }

    #[test]
    fn second_difference_positive() {
        // discrete convexity of p_eps in the carrier frame where <1+eps*xi>
        // stays bounded
        let g = TorusGrid::<f64>::new(8, 256).unwrap();
        let eps = 0.25;
        let h = g.freq_spacing();
        for i in 0..g.n() {
            let xi = g.freqs()[i];
            if xi.abs() > 10.0 {
                continue;
            }
            let dd = rescaled_symbol(xi + h, eps) - 2.0 * rescaled_symbol(xi, eps)
                + rescaled_symbol(xi - h, eps);
            assert!(dd > 0.0, "second difference at xi = {xi}: {dd}");
        }
    }

    #[test]
    fn probe_starts_at_projected_peak_and_translates() {
        let g = TorusGrid::<f64>::new(64, 4096).unwrap();
        let u0 = decay_probe_data(&g, 1.0).unwrap();
        let proj = lp_project(&u0, 1.0, ProjectionMode::Band, false).unwrap();
        // tiny time: no decay yet
        let v = decay_probe(&g, 1.0, 0.25, &[1e-9]).unwrap();
        assert_relative_eq!(v[0], proj.sup_norm(), max_relative = 1e-6);
        // sup norm invariant under spatial translation of the data (by a
        // lattice shift, so the collocation nodes see the same values)
        let dx = g.length() / g.n() as f64;
        let shifted =
            evolve_linear(&proj, 1.0, LinearFlow::Translation { shift: 512.0 * dx }).unwrap();
        let e1 = evolve_linear(&proj, 2.0, LinearFlow::KgRescaled { eps: 0.25 }).unwrap();
        let e2 = evolve_linear(&shifted, 2.0, LinearFlow::KgRescaled { eps: 0.25 }).unwrap();
        assert_relative_eq!(e1.sup_norm(), e2.sup_norm(), max_relative = 1e-9);
    }

    #[test]
    fn probe_rejects_wrapping_times() {
        // tiny torus: by t = 200 the wave has crossed the boundary
        let g = TorusGrid::<f64>::new(16, 1024).unwrap();
        let err = decay_probe(&g, 1.0, 0.25, &[1.0, 200.0]).unwrap_err();
        match err {
            CoreError::TimeOutOfRange { t, .. } => assert_eq!(t, 200.0),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn packet_params_relations() {
        let p = WavePacketParams::new(0.25f64).unwrap();
        assert_eq!(p.carrier(), 1.0);
        assert_relative_eq!(p.omega(), p.carrier().bracket(), epsilon = 1e-15);
        assert_relative_eq!(
            p.group_velocity(),
            p.carrier() / p.carrier().bracket(),
            epsilon = 1e-15
        );
        assert!(WavePacketParams::new(0.0f64).is_err());
        assert!(WavePacketParams::new(1.5f64).is_err());
    }
}
