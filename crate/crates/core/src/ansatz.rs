//! Wave-packet initial data, envelope profile families, evaluation of the
//! Schroedinger approximant on the physical grid, and the error functionals
//! of the convergence studies.
//!
//! Two grids appear throughout: the slow grid carrying envelopes and a
//! physical grid that refines it by `1/eps`. All transport between them is
//! exact spectral re-indexing (the slow mode `j` is the physical mode `j`
//! before the carrier shift), so no interpolation error enters anywhere.

use crate::propagators::{schrodinger_symbol, WavePacketParams};
use crate::solvers::{KgState, NlsState, Trajectory};
use crate::spectral::{self, h_eps_norm};
use crate::{CoreError, Field, Real, Result, TorusGrid};
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Envelope profile family.
#[derive(Debug, Clone, PartialEq)]
pub enum ProfileFamily<T: Real> {
    /// `exp(-((x - L/2)/width)^2 / 2)`.
    Gaussian { width: T },
    /// `sech((x - L/2)/width)`.
    Sech { width: T },
    /// Random-phase spectrum with `|psi_hat(xi)| ~ <xi>^{-s - 1/2 - 0.01}`
    /// up to `cutoff` (the full band when `None`): lies in `H^sigma` for
    /// every `sigma < s`, marginally realising the finite-regularity class.
    FourierTail { s: T, cutoff: Option<T> },
    /// Smooth base plus a localised spectral bump at
    /// `freq_factor * eps^{-1/3}`: keeps the bounded-energy hypothesis while
    /// violating the high-frequency smallness hypothesis by construction.
    HighfreqContaminated { contamination: T, freq_factor: T },
}

/// Profile specification; grid binding happens at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileSpec<T: Real> {
    pub family: ProfileFamily<T>,
    /// Target `H_eps^1` norm after normalisation.
    pub amplitude: T,
    pub seed: u64,
}

impl<T: Real> ProfileSpec<T> {
    pub fn gaussian() -> Self {
        Self { family: ProfileFamily::Gaussian { width: T::one() }, amplitude: T::one(), seed: 1 }
    }

    pub fn fourier_tail(s: T) -> Self {
        Self { family: ProfileFamily::FourierTail { s, cutoff: None }, amplitude: T::one(), seed: 1 }
    }

    pub fn contaminated() -> Self {
        Self {
            family: ProfileFamily::HighfreqContaminated {
                contamination: T::from_f64_c(0.25),
                freq_factor: T::from_f64_c(3.0),
            },
            amplitude: T::one(),
            seed: 1,
        }
    }
}

/// Width of the contamination envelope in slow-space units; narrow in
/// frequency (sigma = 1/4) so the bump stays above the probed cutoffs.
const CONTAMINATION_WIDTH: f64 = 4.0;

/// Build a centred profile on `grid`, normalised so its `H_eps^1` norm
/// equals the spec amplitude at the requested `eps`. Deterministic for a
/// fixed seed.
pub fn make_profile<T: Real>(
    spec: &ProfileSpec<T>,
    grid: &TorusGrid<T>,
    eps: T,
) -> Result<Field<T>> {
    spectral::check_eps(eps)?;
    let nyq = grid.nyquist();
    let mid = grid.length() * T::from_f64_c(0.5);
    let raw = match spec.family {
        ProfileFamily::Gaussian { width } => {
            require_resolved_width(width, nyq, "gaussian")?;
            Field::from_fn_real(grid, |x| {
                let z = (x - mid) / width;
                (-z * z * T::from_f64_c(0.5)).exp()
            })?
        }
        ProfileFamily::Sech { width } => {
            require_resolved_width(width, nyq, "sech")?;
            Field::from_fn_real(grid, |x| {
                let z = (x - mid) / width;
                T::one() / z.cosh()
            })?
        }
        ProfileFamily::FourierTail { s, cutoff } => {
            let cut = cutoff.unwrap_or_else(|| grid.nyquist());
            if cut > grid.nyquist() {
                return Err(CoreError::InvalidParam(format!(
                    "tail cutoff {cut} exceeds the grid Nyquist {}",
                    grid.nyquist()
                )));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            let expo = -(s + T::from_f64_c(0.51));
            let two_pi = T::from_f64_c(2.0) * T::PI();
            let spec_vec: Vec<Complex<T>> = grid
                .freqs()
                .iter()
                .map(|&xi| {
                    // draw a phase for every slot to keep the stream aligned
                    let phase = T::from_f64_c(rng.gen::<f64>()) * two_pi;
                    if xi.abs() <= cut {
                        Complex::from_polar(xi.bracket().powf(expo), phase)
                    } else {
                        Complex::default()
                    }
                })
                .collect();
            // centre at mid-domain like the localised families
            let f = Field::from_spectrum(grid, spec_vec)?;
            crate::propagators::evolve_linear(
                &f,
                T::one(),
                crate::propagators::LinearFlow::Translation { shift: mid },
            )?
        }
        ProfileFamily::HighfreqContaminated { contamination, freq_factor } => {
            let base = Field::from_fn_real(grid, |x| {
                let z = x - mid;
                (-z * z * T::from_f64_c(0.5)).exp()
            })?;
            let third = T::one() / T::from_f64_c(3.0);
            let target = freq_factor * eps.powf(-third);
            let mode = (target / grid.freq_spacing()).round();
            let mode_i = mode
                .to_i64()
                .ok_or_else(|| CoreError::InvalidParam("contamination mode overflow".into()))?;
            let wc = T::from_f64_c(CONTAMINATION_WIDTH);
            // spectral width ~ 4/wc above the bump frequency must stay resolved
            let top = target + T::from_f64_c(4.0) / wc;
            if top >= grid.nyquist() {
                return Err(CoreError::InvalidParam(format!(
                    "contamination at {target} is not resolved (Nyquist {})",
                    grid.nyquist()
                )));
            }
            let bump_env = Field::from_fn_real(grid, |x| {
                let z = (x - mid) / wc;
                (-z * z * T::from_f64_c(0.5)).exp()
            })?;
            let bump = crate::solvers::shift_spectrum(&bump_env, mode_i);
            base.add_scaled(Complex::new(contamination, T::zero()), &bump)?
        }
    };
    let norm = h_eps_norm(&raw, T::one(), eps);
    if !(norm > T::zero()) {
        return Err(CoreError::InvalidParam("profile has zero norm".into()));
    }
    Ok(raw.scale(Complex::new(spec.amplitude / norm, T::zero())))
}

fn require_resolved_width<T: Real>(width: T, nyquist: T, what: &str) -> Result<()> {
    // a localized profile of width w has spectral content out to ~6/w;
    // demand that the grid resolves it
    if width * nyquist < T::from_f64_c(6.0) {
        return Err(CoreError::InvalidParam(format!(
            "{what} width {width} is unresolved at Nyquist {nyquist}"
        )));
    }
    Ok(())
}

/// Validated pairing of a slow grid and its `1/eps`-refined physical grid.
#[derive(Debug, Clone)]
pub struct GridPair<T: Real> {
    pub slow: TorusGrid<T>,
    pub physical: TorusGrid<T>,
    pub eps: T,
    /// Carrier mode index on the physical grid (`k = 1`).
    carrier: i64,
}

impl<T: Real> GridPair<T> {
    /// Check `L_phys = L_slow / eps`, that the carrier sits on the physical
    /// lattice and that shifted slow content fits under the Nyquist mode.
    pub fn new(slow: &TorusGrid<T>, physical: &TorusGrid<T>, eps: T) -> Result<Self> {
        spectral::check_eps(eps)?;
        let want = T::from_u64(slow.periods()).unwrap() / eps;
        let have = T::from_u64(physical.periods()).unwrap();
        if ((want - have) / have).abs() > T::from_f64_c(1e-12) {
            return Err(CoreError::InvalidParam(format!(
                "physical domain must refine the slow one by 1/eps: expected {want} periods, got {have}"
            )));
        }
        let carrier = physical.lattice_mode(T::one())?;
        if physical.n() / 2 <= slow.n() / 2 + carrier as usize {
            return Err(CoreError::InvalidParam(
                "physical grid too coarse: carrier-shifted envelope spills past Nyquist".into(),
            ));
        }
        Ok(Self { slow: slow.clone(), physical: physical.clone(), eps, carrier })
    }

    pub fn carrier_mode(&self) -> i64 {
        self.carrier
    }
}

/// Evaluate `psi(eps x)` on the physical grid by exact re-indexing: slow
/// mode `j` carries frequency `eps xi_j`, which is physical mode `j`.
pub fn transport_to_physical<T: Real>(psi: &Field<T>, pair: &GridPair<T>) -> Field<T> {
    let mut spec = vec![Complex::default(); pair.physical.n()];
    for i in 0..pair.slow.n() {
        let j = pair.slow.mode_of_slot(i);
        let dst = pair.physical.slot_of_mode(j).expect("validated headroom");
        spec[dst] = psi.spectrum()[i];
    }
    Field::from_spectrum_unchecked(&pair.physical, spec)
}

/// Wave-packet initial data on the physical grid:
/// `u(0) = eps psi0(eps x) e^{ix} + c.c.`,
/// `u_t(0) = <D>(-i eps psi0(eps x) e^{ix} + c.c.)`.
///
/// Both outputs are real-flagged; construction is purely spectral.
pub fn build_initial_data<T: Real>(
    psi0: &Field<T>,
    pair: &GridPair<T>,
) -> Result<(Field<T>, Field<T>)> {
    if psi0.grid() != &pair.slow {
        return Err(CoreError::GridMismatch { left: psi0.n(), right: pair.slow.n() });
    }
    let phys = &pair.physical;
    let eps = pair.eps;
    let mut u0 = vec![Complex::default(); phys.n()];
    let mut ut0 = vec![Complex::default(); phys.n()];
    let minus_i = Complex::new(T::zero(), -T::one());
    for i in 0..pair.slow.n() {
        let c = psi0.spectrum()[i] * eps;
        if c.norm_sqr() == T::zero() {
            continue;
        }
        let j = pair.slow.mode_of_slot(i);
        let up = phys.slot_of_mode(j + pair.carrier).expect("validated headroom");
        let down = phys.slot_of_mode(-j - pair.carrier).expect("validated headroom");
        let xi = phys.freqs()[up];
        u0[up] += c;
        u0[down] += c.conj();
        let d = minus_i * c * xi.bracket();
        ut0[up] += d;
        ut0[down] += d.conj();
    }
    let u = Field::from_spectrum_unchecked(phys, u0).flag_real();
    let ut = Field::from_spectrum_unchecked(phys, ut0).flag_real();
    Ok((u, ut))
}

/// Envelope value of an NLS trajectory at slow time `tau`, using the exact
/// free flow to bridge between stored snapshots.
pub fn nls_at_slow_time<T: Real>(
    traj: &Trajectory<T, NlsState<T>>,
    tau: T,
) -> Result<Field<T>> {
    let tol = T::from_f64_c(1e-9);
    let last = traj
        .states
        .last()
        .ok_or_else(|| CoreError::CoverageMismatch("empty envelope trajectory".into()))?;
    if tau < -tol || tau > last.t + tol {
        return Err(CoreError::CoverageMismatch(format!(
            "slow time {tau} outside stored range [0, {}]",
            last.t
        )));
    }
    // nearest snapshot at or below tau
    let mut best = &traj.states[0];
    for s in &traj.states {
        if s.t <= tau + tol {
            best = s;
        } else {
            break;
        }
    }
    let gap = tau - best.t;
    if gap.abs() <= tol {
        return Ok(best.psi.clone());
    }
    spectral::apply_multiplier(&best.psi, |xi| {
        Complex::from_polar(T::one(), -gap * schrodinger_symbol(xi))
    })
}

/// The wave-packet approximant
/// `eps psi(eps^2 t, eps (x - c_g t)) e^{i(x - sqrt2 t)} + c.c.`
/// evaluated on the physical grid at physical time `t`.
pub fn nls_approximant<T: Real>(
    traj: &Trajectory<T, NlsState<T>>,
    t_phys: T,
    pair: &GridPair<T>,
) -> Result<Field<T>> {
    let params = WavePacketParams::new(pair.eps)?;
    let tau = pair.eps * pair.eps * t_phys;
    let psi = nls_at_slow_time(traj, tau)?;
    let eps = pair.eps;
    let cg_t = params.group_velocity() * t_phys;
    let carrier_phase = Complex::from_polar(eps, -params.omega() * t_phys);
    let phys = &pair.physical;
    let mut out = vec![Complex::default(); phys.n()];
    for i in 0..pair.slow.n() {
        let c = psi.spectrum()[i];
        if c.norm_sqr() == T::zero() {
            continue;
        }
        let j = pair.slow.mode_of_slot(i);
        let xi_s = pair.slow.freqs()[i];
        // translation by c_g t in physical space is eps c_g t in slow space
        let shift = Complex::from_polar(T::one(), -xi_s * eps * cg_t);
        let d = c * shift * carrier_phase;
        let up = phys.slot_of_mode(j + pair.carrier).expect("validated headroom");
        let down = phys.slot_of_mode(-j - pair.carrier).expect("validated headroom");
        out[up] += d;
        out[down] += d.conj();
    }
    Ok(Field::from_spectrum_unchecked(phys, out).flag_real())
}

/// Norm mode of the approximation-error functional.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorNorm {
    /// `H^1` norm divided by `sqrt(eps)` (limit-theorem mode).
    H1OverSqrtEps,
    /// Plain `L^2` (rate-theorem mode).
    L2,
}

/// Error functional: which norm, over the sampled times of the wave
/// trajectory (the horizon `T` is fixed by the sweep configuration).
#[derive(Debug, Clone, Copy)]
pub struct ErrorFunctionalSpec {
    pub norm: ErrorNorm,
}

/// `max_t || u(t) - approximant(t) ||` over the sampled wave states.
pub fn approximation_error<T: Real>(
    kg_traj: &Trajectory<T, KgState<T>>,
    nls_traj: &Trajectory<T, NlsState<T>>,
    pair: &GridPair<T>,
    spec: ErrorFunctionalSpec,
) -> Result<T> {
    if kg_traj.states.is_empty() {
        return Err(CoreError::CoverageMismatch("empty wave trajectory".into()));
    }
    let mut worst = T::zero();
    for state in &kg_traj.states {
        let u = state.field();
        let approx = nls_approximant(nls_traj, state.t, pair)?;
        let diff = u.sub(&approx)?;
        let v = match spec.norm {
            ErrorNorm::L2 => diff.l2_norm(),
            ErrorNorm::H1OverSqrtEps => {
                h_eps_norm(&diff, T::one(), T::one()) / pair.eps.sqrt()
            }
        };
        worst = worst.max(v);
    }
    Ok(worst)
}
