//! Fourier multipliers, frequency projections, norms, dealiased products and
//! energy functionals.
//!
//! Everything here acts diagonally in spectral space or through zero-padded
//! products, so results are exact for the retained modes up to rounding.

use crate::{CoreError, Field, Real, Result, TorusGrid};
use num_complex::Complex;

/// Conjugation applied to one factor of a spectral product.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Conj {
    Id,
    Conj,
}

/// Apply a Fourier multiplier `symbol(xi)` to a field.
///
/// The symbol may be complex-valued; it must be finite at every grid
/// frequency, otherwise the offending frequency is reported.
pub fn apply_multiplier<T: Real>(
    f: &Field<T>,
    symbol: impl Fn(T) -> Complex<T>,
) -> Result<Field<T>> {
    let grid = f.grid();
    let mut out = Vec::with_capacity(f.n());
    for (i, &c) in f.spectrum().iter().enumerate() {
        let xi = grid.freqs()[i];
        let m = symbol(xi);
        if !m.re.is_finite() || !m.im.is_finite() {
            return Err(CoreError::NonFiniteSymbol { xi: xi.to_f64().unwrap_or(f64::NAN) });
        }
        out.push(m * c);
    }
    Field::from_spectrum(grid, out)
}

/// Real-valued multiplier convenience wrapper.
pub fn apply_real_multiplier<T: Real>(f: &Field<T>, symbol: impl Fn(T) -> T) -> Result<Field<T>> {
    apply_multiplier(f, |xi| Complex::new(symbol(xi), T::zero()))
}

/// Frequency region selected by [`lp_project`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProjectionMode {
    /// Dyadic band around `N`.
    Band,
    /// Low pass `|xi| <= N`.
    Low,
    /// High pass `|xi| > N`.
    High,
}

/// C^2 monotone step: 0 for `r <= 1/2`, 1 for `r >= 1`.
fn smooth_step<T: Real>(r: T) -> T {
    let half = T::from_f64_c(0.5);
    if r <= half {
        T::zero()
    } else if r >= T::one() {
        T::one()
    } else {
        let x = (r - half) / half;
        let x3 = x * x * x;
        x3 * (T::from_f64_c(10.0) - T::from_f64_c(15.0) * x + T::from_f64_c(6.0) * x * x)
    }
}

/// Dyadic window `chi(xi) = step(|xi|) - step(|xi|/2)`.
///
/// Supported in `1/2 < |xi| < 2` and summing exactly to one over dyadic
/// dilates: `sum_k chi(xi / 2^k) = 1` for `xi != 0`.
fn dyadic_window<T: Real>(xi: T) -> T {
    let a = xi.abs();
    smooth_step(a) - smooth_step(a / T::from_f64_c(2.0))
}

/// Smallest dyadic value `2^k` strictly greater than `x`.
fn next_dyadic_above<T: Real>(x: T) -> T {
    let two = T::from_f64_c(2.0);
    let mut m = two.powf(x.log2().floor());
    while m <= x {
        m = m * two;
    }
    // Guard against landing one dyadic level too high from the floor above.
    while m / two > x {
        m = m / two;
    }
    m
}

/// Multiplier value of the high-pass ladder `sum over dyadic M > N/2` of the
/// dyadic window, which telescopes to a single smooth step.
fn smooth_high_multiplier<T: Real>(xi: T, cutoff: T) -> T {
    let m0 = next_dyadic_above(cutoff / T::from_f64_c(2.0));
    smooth_step(xi.abs() / m0)
}

/// The projection multiplier at frequency `xi` for cutoff `N`.
pub fn projection_multiplier<T: Real>(xi: T, cutoff: T, mode: ProjectionMode, sharp: bool) -> T {
    let a = xi.abs();
    if sharp {
        match mode {
            ProjectionMode::High => {
                if a > cutoff {
                    T::one()
                } else {
                    T::zero()
                }
            }
            ProjectionMode::Low => {
                if a <= cutoff {
                    T::one()
                } else {
                    T::zero()
                }
            }
            ProjectionMode::Band => {
                if a > cutoff / T::from_f64_c(2.0) && a <= cutoff {
                    T::one()
                } else {
                    T::zero()
                }
            }
        }
    } else {
        match mode {
            ProjectionMode::Band => dyadic_window(xi / cutoff),
            ProjectionMode::High => smooth_high_multiplier(xi, cutoff),
            ProjectionMode::Low => T::one() - smooth_high_multiplier(xi, cutoff),
        }
    }
}

/// Frequency projection.
///
/// The sharp variants multiply by indicator functions of the stated sets
/// (`High` is exactly `1_{|xi| > N}`); the smooth variants use a fixed C^2
/// dyadic window forming an exact partition of unity, with `High` the
/// telescoped ladder over dyadic blocks above `N/2`.
pub fn lp_project<T: Real>(
    f: &Field<T>,
    cutoff: T,
    mode: ProjectionMode,
    sharp: bool,
) -> Result<Field<T>> {
    if !(cutoff > T::zero()) {
        return Err(CoreError::InvalidParam(format!(
            "projection cutoff must be positive, got {cutoff}"
        )));
    }
    apply_real_multiplier(f, |xi| projection_multiplier(xi, cutoff, mode, sharp))
}

/// Ramp multiplier value: `|xi|/N` below `N`, `1` above.
pub fn ramp_multiplier<T: Real>(xi: T, cutoff: T) -> T {
    (xi.abs() / cutoff).min(T::one())
}

/// Apply the low-frequency ramp `m_N(D)`: `m_N(xi) = |xi|/N` for
/// `|xi| <= N` and `1` for `|xi| >= N`. Acts as a high-frequency cutoff
/// that is comparable across octaves.
pub fn m_multiplier<T: Real>(f: &Field<T>, cutoff: T) -> Result<Field<T>> {
    if !(cutoff > T::zero()) {
        return Err(CoreError::InvalidParam(format!(
            "ramp cutoff must be positive, got {cutoff}"
        )));
    }
    apply_real_multiplier(f, |xi| ramp_multiplier(xi, cutoff))
}

/// Norm selector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NormFlavor<T: Real> {
    /// Rescaled Sobolev `sqrt(L * sum <eps*xi>^{2s} |u_hat|^2)`.
    SobolevRescaled,
    /// Lebesgue `L^r` by the uniform rectangle rule.
    Lebesgue { r: T },
}

/// Norm specification: Sobolev index, rescaling parameter and flavor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormSpec<T: Real> {
    pub s: T,
    pub eps: T,
    pub flavor: NormFlavor<T>,
}

impl<T: Real> NormSpec<T> {
    pub fn sobolev(s: T, eps: T) -> Result<Self> {
        check_eps(eps)?;
        Ok(Self { s, eps, flavor: NormFlavor::SobolevRescaled })
    }

    pub fn lebesgue(r: T) -> Result<Self> {
        if !(r >= T::one()) {
            return Err(CoreError::InvalidParam(format!("Lebesgue exponent must be >= 1, got {r}")));
        }
        Ok(Self { s: T::zero(), eps: T::one(), flavor: NormFlavor::Lebesgue { r } })
    }
}

pub(crate) fn check_eps<T: Real>(eps: T) -> Result<()> {
    if eps > T::zero() && eps <= T::one() {
        Ok(())
    } else {
        Err(CoreError::InvalidParam(format!("epsilon must lie in (0, 1], got {eps}")))
    }
}

/// Evaluate a norm.
///
/// The rescaled Sobolev norm is computed spectrally; Lebesgue norms use the
/// uniform-grid rectangle rule, which is spectrally accurate on the torus.
pub fn norm<T: Real>(f: &Field<T>, spec: &NormSpec<T>) -> T {
    match spec.flavor {
        NormFlavor::SobolevRescaled => h_eps_norm(f, spec.s, spec.eps),
        NormFlavor::Lebesgue { r } => lebesgue_norm(f, r),
    }
}

/// `H_eps^s` norm: `sqrt(L * sum_j <eps xi_j>^{2s} |u_hat_j|^2)`.
pub fn h_eps_norm<T: Real>(f: &Field<T>, s: T, eps: T) -> T {
    let grid = f.grid();
    let two_s = s + s;
    let sum: T = f
        .spectrum()
        .iter()
        .zip(grid.freqs())
        .map(|(c, &xi)| (eps * xi).bracket().powf(two_s) * c.norm_sqr())
        .sum();
    (grid.length() * sum).sqrt()
}

/// `L^r` norm by the rectangle rule `(sum |u(x_m)|^r * L/n)^{1/r}`.
pub fn lebesgue_norm<T: Real>(f: &Field<T>, r: T) -> T {
    let grid = f.grid();
    let dx = grid.length() / T::from_usize(grid.n()).unwrap();
    let sum: T = f.values().iter().map(|c| c.norm().powf(r)).sum();
    (sum * dx).powf(T::one() / r)
}

/// `W_eps^{s,r}` norm via composition: `|| <eps D>^s u ||_{L^r}`.
pub fn w_eps_norm<T: Real>(f: &Field<T>, s: T, eps: T, r: T) -> Result<T> {
    check_eps(eps)?;
    let weighted = apply_real_multiplier(f, |xi| (eps * xi).bracket().powf(s))?;
    Ok(lebesgue_norm(&weighted, r))
}

// ---------------------------------------------------------------------------
// Dealiased products
// ---------------------------------------------------------------------------

/// Copy a spectrum of `n` coefficients into a zero-padded buffer of `m`
/// slots, preserving signed mode numbers.
pub(crate) fn pad_spectrum<T: Real>(
    grid: &TorusGrid<T>,
    spectrum: &[Complex<T>],
    m: usize,
) -> Vec<Complex<T>> {
    let n = grid.n();
    debug_assert!(m >= n);
    let mut out = vec![Complex::default(); m];
    for (i, &c) in spectrum.iter().enumerate() {
        let j = grid.mode_of_slot(i);
        let slot = if j >= 0 { j as usize } else { (j + m as i64) as usize };
        out[slot] = c;
    }
    out
}

/// Physical samples of the zero-padded interpolant on `m` nodes.
pub(crate) fn padded_values<T: Real>(
    grid: &TorusGrid<T>,
    spectrum: &[Complex<T>],
    m: usize,
) -> Vec<Complex<T>> {
    let mut buf = pad_spectrum(grid, spectrum, m);
    grid.inverse(&mut buf);
    buf
}

/// Forward-transform padded physical samples and truncate back to the
/// retained band of `grid`.
pub(crate) fn truncate_to_grid<T: Real>(
    grid: &TorusGrid<T>,
    mut padded: Vec<Complex<T>>,
) -> Vec<Complex<T>> {
    let m = padded.len();
    grid.forward(&mut padded);
    let scale = T::one() / T::from_usize(m).unwrap();
    let n = grid.n();
    let mut out = vec![Complex::default(); n];
    for (i, slot) in out.iter_mut().enumerate() {
        let j = grid.mode_of_slot(i);
        let src = if j >= 0 { j as usize } else { (j + m as i64) as usize };
        *slot = padded[src] * scale;
    }
    out
}

/// Exact cubic product with per-factor conjugation.
///
/// Each spectrum is zero-padded (to `4n` modes) before the pointwise
/// product, so every retained coefficient of the result equals the exact
/// convolution sum; content beyond the retained band is discarded, never
/// aliased. The generous padding covers the corner where a conjugated
/// factor reflects the unpaired `-n/2` mode to `+n/2`, pushing the triple
/// product to `3n/2`, which a bare doubled grid would wrap onto `-n/2`.
pub fn dealiased_cubic<T: Real>(
    f: &Field<T>,
    g: &Field<T>,
    h: &Field<T>,
    pattern: [Conj; 3],
) -> Result<Field<T>> {
    f.check_same_grid(g)?;
    f.check_same_grid(h)?;
    let grid = f.grid();
    let m = 4 * grid.n();
    let fv = padded_values(grid, f.spectrum(), m);
    let gv = padded_values(grid, g.spectrum(), m);
    let hv = padded_values(grid, h.spectrum(), m);
    let take = |c: Complex<T>, which: Conj| match which {
        Conj::Id => c,
        Conj::Conj => c.conj(),
    };
    let mut prod = Vec::with_capacity(m);
    for i in 0..m {
        prod.push(take(fv[i], pattern[0]) * take(gv[i], pattern[1]) * take(hv[i], pattern[2]));
    }
    let spectrum = truncate_to_grid(grid, prod);
    Field::from_spectrum(grid, spectrum)
}

// ---------------------------------------------------------------------------
// Energy functionals
// ---------------------------------------------------------------------------

fn require_real<T: Real>(f: &Field<T>) -> Result<()> {
    if f.is_real() {
        Ok(())
    } else {
        Err(CoreError::ComplexInput)
    }
}

fn l2_sq_derivative<T: Real>(f: &Field<T>) -> T {
    let grid = f.grid();
    let sum: T = f
        .spectrum()
        .iter()
        .zip(grid.freqs())
        .map(|(c, &xi)| xi * xi * c.norm_sqr())
        .sum();
    grid.length() * sum
}

fn l4_quartic<T: Real>(f: &Field<T>) -> T {
    let grid = f.grid();
    let dx = grid.length() / T::from_usize(grid.n()).unwrap();
    f.values().iter().map(|c| { let a = c.norm_sqr(); a * a }).sum::<T>() * dx
}

/// Conserved energy of the physical wave equation:
/// `1/2 (||u_x||^2 + ||u_t||^2 + ||u||^2) + 1/4 ||u||_{L^4}^4`.
pub fn energy_physical<T: Real>(u: &Field<T>, u_t: &Field<T>) -> Result<T> {
    require_real(u)?;
    require_real(u_t)?;
    u.check_same_grid(u_t)?;
    let half = T::from_f64_c(0.5);
    let quarter = T::from_f64_c(0.25);
    Ok(half * (l2_sq_derivative(u) + u_t.l2_norm().powi(2) + u.l2_norm().powi(2))
        + quarter * l4_quartic(u))
}

/// Conserved energy of the rescaled wave equation:
/// `eps^2/2 ||v_x||^2 + 1/2 ||v||^2 + eps^4/2 ||v_t||^2 + eps^2/4 ||v||_{L^4}^4`.
pub fn energy_rescaled<T: Real>(v: &Field<T>, v_t: &Field<T>, eps: T) -> Result<T> {
    require_real(v)?;
    require_real(v_t)?;
    v.check_same_grid(v_t)?;
    check_eps(eps)?;
    let half = T::from_f64_c(0.5);
    let quarter = T::from_f64_c(0.25);
    let e2 = eps * eps;
    Ok(e2 * half * l2_sq_derivative(v)
        + half * v.l2_norm().powi(2)
        + e2 * e2 * half * v_t.l2_norm().powi(2)
        + e2 * quarter * l4_quartic(v))
}
