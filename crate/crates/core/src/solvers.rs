//! Nonlinear time integration of the cubic wave equation (physical and
//! rescaled), the coupled core/remainder envelope system, and the cubic NLS,
//! plus exact demodulation between the wave and envelope representations.
//!
//! All solvers integrate the complexified first-order form
//! `W' = -i sigma(D) W + N(W, t)` with the linear phase applied exactly, so
//! the arbitrarily stiff linear part imposes no step restriction; `dt` only
//! has to resolve the oscillation of the nonlinear forcing.

use crate::propagators::{rescaled_symbol, schrodinger_symbol, LinearFlow, WavePacketParams};
use crate::schemes::{Scheme, Stepper, StiffSystem};
use crate::spectral;
use crate::{CoreError, Field, Real, Result, TorusGrid};
use num_complex::Complex;

/// Which scaling of the cubic wave equation a [`KgState`] evolves under.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KgScale<T: Real> {
    /// `u_tt - u_xx + u + u^3 = 0`: linear symbol `<xi>`, unit cubic.
    Physical,
    /// `v_tt + eps^{-4}(1 - eps^2 dxx) v + eps^{-2} v^3 = 0`:
    /// linear symbol `<eps xi>/eps^2`, defocusing cubic throughout.
    Rescaled { eps: T },
}

impl<T: Real> KgScale<T> {
    fn sigma(&self, xi: T) -> T {
        match *self {
            KgScale::Physical => xi.bracket(),
            KgScale::Rescaled { eps } => (eps * xi).bracket() / (eps * eps),
        }
    }

    /// Multiplier `m~(xi)` with `W = (u + i m~(D) u_t)/2`.
    fn half_wave_weight(&self, xi: T) -> T {
        match *self {
            KgScale::Physical => T::one() / xi.bracket(),
            KgScale::Rescaled { eps } => eps * eps / (eps * xi).bracket(),
        }
    }

    /// Coefficient multiplier of the cubic forcing in the `W` equation:
    /// `N(W) = -(i/2) m(D) (2 Re W)^3` with `m = 1/<xi>` or `1/<eps xi>`.
    fn forcing_weight(&self, xi: T) -> T {
        match *self {
            KgScale::Physical => T::one() / xi.bracket(),
            KgScale::Rescaled { eps } => T::one() / (eps * xi).bracket(),
        }
    }
}

/// Complexified wave state: `u = 2 Re W`.
#[derive(Debug, Clone)]
pub struct KgState<T: Real> {
    pub t: T,
    pub w: Field<T>,
    pub scale: KgScale<T>,
}

impl<T: Real> KgState<T> {
    /// Reconstruct the real field `u = W + conj(W)`.
    pub fn field(&self) -> Field<T> {
        self.w.two_re()
    }
}

/// Core/remainder envelope pair; the full amplitude is `psi + r`.
#[derive(Debug, Clone)]
pub struct AmplitudeState<T: Real> {
    pub t: T,
    pub psi: Field<T>,
    pub r: Field<T>,
    pub eps: T,
}

impl<T: Real> AmplitudeState<T> {
    /// Full amplitude `A = psi + r`.
    pub fn amplitude(&self) -> Field<T> {
        self.psi.add_scaled(Complex::new(T::one(), T::zero()), &self.r).expect("same grid")
    }
}

/// Cubic Schroedinger envelope state.
#[derive(Debug, Clone)]
pub struct NlsState<T: Real> {
    pub t: T,
    pub psi: Field<T>,
}

/// Solver configuration.
///
/// Products are always evaluated dealiased; the flag exists so configs can
/// state it explicitly, and anything else is rejected.
#[derive(Debug, Clone)]
pub struct SolverConfig<T: Real> {
    pub dt: T,
    pub scheme: Scheme,
    pub dealias: bool,
    /// Number of stored snapshots including both endpoints.
    pub sample_count: usize,
    /// Certified relative energy-drift target; a trajectory exceeding 100x
    /// this value is flagged in its metadata.
    pub energy_tol: T,
    /// Amplitude system only: drop the remainder equation and the
    /// oscillatory forcing, evolving the core profile alone.
    pub core_only: bool,
}

impl<T: Real> SolverConfig<T> {
    pub fn new(dt: T) -> Self {
        Self {
            dt,
            scheme: Scheme::LawsonRk4,
            dealias: true,
            sample_count: 65,
            energy_tol: T::from_f64_c(1e-7),
            core_only: false,
        }
    }

    pub fn with_scheme(mut self, scheme: Scheme) -> Self {
        self.scheme = scheme;
        self
    }

    pub fn with_samples(mut self, sample_count: usize) -> Self {
        self.sample_count = sample_count;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.dt > T::zero()) || !self.dt.is_finite() {
            return Err(CoreError::InvalidParam(format!("dt must be positive, got {}", self.dt)));
        }
        if !self.dealias {
            return Err(CoreError::InvalidParam(
                "dealiasing cannot be disabled: products are evaluated on padded grids".into(),
            ));
        }
        if self.sample_count < 2 {
            return Err(CoreError::InvalidParam("sample_count must be at least 2".into()));
        }
        Ok(())
    }

    /// Total step count and effective dt: the requested dt is shrunk so the
    /// horizon divides evenly into `sample_count - 1` equal blocks.
    fn plan(&self, t_end: T) -> Result<(usize, usize, T)> {
        if !(t_end > T::zero()) || !t_end.is_finite() {
            return Err(CoreError::InvalidParam(format!("t_end must be positive, got {t_end}")));
        }
        let intervals = self.sample_count - 1;
        let per = (t_end / (self.dt * T::from_usize(intervals).unwrap()))
            .ceil()
            .to_usize()
            .ok_or_else(|| CoreError::InvalidParam("step count overflow".into()))?
            .max(1);
        let steps = per * intervals;
        let dt = t_end / T::from_usize(steps).unwrap();
        Ok((steps, per, dt))
    }
}

/// Running spectral observable: `sqrt(L * sum_j weight_j |c_j|^2)` of one
/// solution component, evaluated at every step.
#[derive(Debug, Clone)]
pub struct SpectralTracker<T: Real> {
    pub name: String,
    pub component: TrackComponent,
    weights: Vec<T>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrackComponent {
    Core,
    Remainder,
    Amplitude,
}

impl<T: Real> SpectralTracker<T> {
    /// Weighted `H_eps^s` observable with an extra frequency multiplier.
    pub fn weighted(
        name: impl Into<String>,
        grid: &TorusGrid<T>,
        component: TrackComponent,
        s: T,
        eps: T,
        multiplier: impl Fn(T) -> T,
    ) -> Self {
        let two_s = s + s;
        let weights = grid
            .freqs()
            .iter()
            .map(|&xi| {
                let m = multiplier(xi);
                (eps * xi).bracket().powf(two_s) * m * m
            })
            .collect();
        Self { name: name.into(), component, weights }
    }

    fn value(&self, grid: &TorusGrid<T>, psi: &[Complex<T>], r: &[Complex<T>]) -> T {
        let n = grid.n();
        let mut sum = T::zero();
        for i in 0..n {
            let c = match self.component {
                TrackComponent::Core => psi[i],
                TrackComponent::Remainder => r[i],
                TrackComponent::Amplitude => psi[i] + r[i],
            };
            sum += self.weights[i] * c.norm_sqr();
        }
        (grid.length() * sum).sqrt()
    }
}

/// Observable series produced by a [`SpectralTracker`].
#[derive(Debug, Clone)]
pub struct TrackedMax<T: Real> {
    pub name: String,
    /// Running maximum over every step of the run.
    pub max: T,
    /// Values at snapshot times.
    pub series: Vec<(T, T)>,
}

/// Solver output: sampled states plus running diagnostics.
#[derive(Debug, Clone)]
pub struct Trajectory<T: Real, St> {
    pub states: Vec<St>,
    pub meta: TrajectoryMeta<T>,
}

#[derive(Debug, Clone)]
pub struct TrajectoryMeta<T: Real> {
    pub dt: T,
    pub steps: usize,
    pub scheme: Scheme,
    /// Conserved-energy samples `(t, E)` for the wave solvers.
    pub energy: Vec<(T, T)>,
    /// Mass samples `(t, ||psi||_L2)` for the Schroedinger solver.
    pub mass: Vec<(T, T)>,
    pub max_rel_energy_drift: Option<T>,
    /// Set when the drift exceeds 100x the certified tolerance.
    pub energy_flagged: bool,
    pub tracked: Vec<TrackedMax<T>>,
}

impl<T: Real> TrajectoryMeta<T> {
    fn new(dt: T, steps: usize, scheme: Scheme) -> Self {
        Self {
            dt,
            steps,
            scheme,
            energy: Vec::new(),
            mass: Vec::new(),
            max_rel_energy_drift: None,
            energy_flagged: false,
            tracked: Vec::new(),
        }
    }
}

// ---------------------------------------------------------------------------
// Complexification
// ---------------------------------------------------------------------------

/// Half-wave variable `W = (u + i m~(D) u_t)/2` with `m~ = <D>^{-1}`
/// (physical) or `eps^2 <eps D>^{-1}` (rescaled).
///
/// Along the nonlinear flow this is exactly the complex half whose double
/// real part reconstructs the wave field.
pub fn complexify<T: Real>(u: &Field<T>, u_t: &Field<T>, scale: KgScale<T>) -> Result<Field<T>> {
    if !u.is_real() || !u_t.is_real() {
        return Err(CoreError::ComplexInput);
    }
    u.check_same_grid(u_t)?;
    if let KgScale::Rescaled { eps } = scale {
        spectral::check_eps(eps)?;
    }
    let grid = u.grid();
    let half = T::from_f64_c(0.5);
    let spec = grid
        .freqs()
        .iter()
        .enumerate()
        .map(|(i, &xi)| {
            let m = scale.half_wave_weight(xi);
            (u.spectrum()[i] + Complex::new(T::zero(), m) * u_t.spectrum()[i]) * half
        })
        .collect();
    Field::from_spectrum(grid, spec)
}

/// Invert [`complexify`] along the flow: `u = 2 Re W` and
/// `u_t = 2 Re(dW/dt)` with `dW/dt` read off the evolution equation.
///
/// The cubic forcing in `dW/dt` is purely imaginary, so only the linear
/// rotation contributes to `u_t`; the round trip with `complexify` is exact.
pub fn decomplexify<T: Real>(w: &Field<T>, scale: KgScale<T>) -> Result<(Field<T>, Field<T>)> {
    if let KgScale::Rescaled { eps } = scale {
        spectral::check_eps(eps)?;
    }
    let u = w.two_re();
    let minus_i_sigma_w = spectral::apply_multiplier(w, |xi| {
        Complex::new(T::zero(), -scale.sigma(xi))
    })?;
    let u_t = minus_i_sigma_w.two_re();
    Ok((u, u_t))
}

/// Move every Fourier coefficient by `shift` lattice modes; content pushed
/// beyond the retained band is dropped.
pub fn shift_spectrum<T: Real>(f: &Field<T>, shift: i64) -> Field<T> {
    let grid = f.grid();
    let n = grid.n();
    let mut out = vec![Complex::default(); n];
    for i in 0..n {
        let j = grid.mode_of_slot(i);
        if let Some(dst) = grid.slot_of_mode(j + shift) {
            out[dst] = f.spectrum()[i];
        }
    }
    Field::from_spectrum_unchecked(grid, out)
}

/// Lattice mode count of the carrier frequency `1/eps`; errors when the
/// carrier is off the lattice.
pub fn carrier_mode<T: Real>(grid: &TorusGrid<T>, eps: T) -> Result<i64> {
    grid.lattice_mode(T::one() / eps)
}

/// Initial half-wave state of the rescaled equation for envelope data
/// `psi0`: `W(0) = exp(i x / eps) psi0`, an exact lattice shift.
pub fn kg_rescaled_initial_state<T: Real>(psi0: &Field<T>, eps: T) -> Result<KgState<T>> {
    spectral::check_eps(eps)?;
    let mode = carrier_mode(psi0.grid(), eps)?;
    let top = psi0.grid().n() as i64 / 2;
    let mut clipped = T::zero();
    let mut total = T::zero();
    for i in 0..psi0.grid().n() {
        let j = psi0.grid().mode_of_slot(i);
        let m = psi0.spectrum()[i].norm_sqr();
        total += m;
        if j + mode >= top || j + mode < -top {
            clipped += m;
        }
    }
    if clipped > T::from_f64_c(1e-20) * total {
        return Err(CoreError::InvalidParam(format!(
            "carrier shift pushes envelope content beyond the grid (clipped mass fraction {})",
            (clipped / total).sqrt()
        )));
    }
    Ok(KgState { t: T::zero(), w: shift_spectrum(psi0, mode), scale: KgScale::Rescaled { eps } })
}

/// Real initial pair `(v(0), v_t(0))` of the rescaled wave equation for
/// envelope data `psi0`:
/// `v(0) = 2 Re(e^{ix/eps} psi0)`,
/// `v_t(0) = (2/eps^2) <eps D> Im(e^{ix/eps} psi0)`.
pub fn rescaled_wave_data<T: Real>(psi0: &Field<T>, eps: T) -> Result<(Field<T>, Field<T>)> {
    spectral::check_eps(eps)?;
    let mode = carrier_mode(psi0.grid(), eps)?;
    let g = shift_spectrum(psi0, mode);
    let v0 = g.two_re();
    let im_vals: Vec<T> = g.values().iter().map(|c| c.im).collect();
    let im = Field::from_real_samples(psi0.grid(), &im_vals)?;
    let two_over_e2 = T::from_f64_c(2.0) / (eps * eps);
    let vt0 = spectral::apply_real_multiplier(&im, |xi| two_over_e2 * (eps * xi).bracket())?
        .flag_real();
    Ok((v0, vt0))
}

/// Recover the complex amplitude from a rescaled wave state:
/// undo the frame translation by `a = t/(eps sqrt 2)`, then strip the
/// carrier and frame phase. Exact along the nonlinear flow.
pub fn demodulate<T: Real>(state: &KgState<T>, params: &WavePacketParams<T>) -> Result<Field<T>> {
    let eps = match state.scale {
        KgScale::Rescaled { eps } => eps,
        KgScale::Physical => {
            return Err(CoreError::InvalidParam(
                "demodulate expects a rescaled-scale state".into(),
            ))
        }
    };
    if (eps - params.eps).abs() > T::from_f64_c(1e-15) {
        return Err(CoreError::EpsilonMismatch {
            state: eps.to_f64().unwrap_or(f64::NAN),
            given: params.eps.to_f64().unwrap_or(f64::NAN),
        });
    }
    let mode = carrier_mode(state.w.grid(), eps)?;
    let a = state.t / (eps * T::sqrt2());
    let translated =
        crate::propagators::evolve_linear(&state.w, T::one(), LinearFlow::Translation { shift: -a })?;
    let stripped = shift_spectrum(&translated, -mode);
    let phase = Complex::from_polar(T::one(), a / eps);
    Ok(stripped.scale(phase))
}

// ---------------------------------------------------------------------------
// Systems
// ---------------------------------------------------------------------------

/// Precomputed slot mapping from a grid band into a padded buffer.
fn padded_slots<T: Real>(grid: &TorusGrid<T>, m: usize) -> Vec<usize> {
    (0..grid.n())
        .map(|i| {
            let j = grid.mode_of_slot(i);
            if j >= 0 {
                j as usize
            } else {
                (j + m as i64) as usize
            }
        })
        .collect()
}

struct KgSystem<T: Real> {
    grid: TorusGrid<T>,
    phases: Vec<T>,
    /// `-(i/2) m(xi)` applied to the truncated cubic spectrum.
    coeff: Vec<Complex<T>>,
    slots: Vec<usize>,
    pad: Vec<Complex<T>>,
}

impl<T: Real> KgSystem<T> {
    fn new(grid: &TorusGrid<T>, scale: KgScale<T>) -> Self {
        let phases = grid.freqs().iter().map(|&xi| scale.sigma(xi)).collect();
        let half = T::from_f64_c(0.5);
        let mut coeff: Vec<Complex<T>> = grid
            .freqs()
            .iter()
            .map(|&xi| Complex::new(T::zero(), -half * scale.forcing_weight(xi)))
            .collect();
        // the unpaired -n/2 mode is kept empty throughout the evolution
        coeff[grid.n() / 2] = Complex::default();
        let m = 2 * grid.n();
        Self {
            grid: grid.clone(),
            phases,
            coeff,
            slots: padded_slots(grid, m),
            pad: vec![Complex::default(); m],
        }
    }
}

impl<T: Real> StiffSystem<T> for KgSystem<T> {
    fn linear_phases(&self) -> &[T] {
        &self.phases
    }

    fn nonlinear(&mut self, w: &[Complex<T>], _t: T, out: &mut [Complex<T>]) {
        let m = self.pad.len();
        self.pad.iter_mut().for_each(|c| *c = Complex::default());
        for (i, &slot) in self.slots.iter().enumerate() {
            self.pad[slot] = w[i];
        }
        self.grid.inverse(&mut self.pad);
        for c in self.pad.iter_mut() {
            let u = c.re + c.re; // u = 2 Re W on the padded nodes
            *c = Complex::new(u * u * u, T::zero());
        }
        self.grid.forward(&mut self.pad);
        let scale = T::one() / T::from_usize(m).unwrap();
        for (i, &slot) in self.slots.iter().enumerate() {
            out[i] = self.coeff[i] * self.pad[slot] * scale;
        }
    }
}

struct NlsSystem<T: Real> {
    grid: TorusGrid<T>,
    phases: Vec<T>,
    /// cubic coupling 3/(2 sqrt 2)
    coupling: T,
    slots: Vec<usize>,
    pad: Vec<Complex<T>>,
    phys: Vec<Complex<T>>,
}

impl<T: Real> NlsSystem<T> {
    fn new(grid: &TorusGrid<T>) -> Self {
        let phases = grid.freqs().iter().map(|&xi| schrodinger_symbol(xi)).collect();
        let m = 2 * grid.n();
        Self {
            grid: grid.clone(),
            phases,
            coupling: T::from_f64_c(3.0) / (T::from_f64_c(2.0) * T::sqrt2()),
            slots: padded_slots(grid, m),
            pad: vec![Complex::default(); m],
            phys: vec![Complex::default(); grid.n()],
        }
    }
}

impl<T: Real> StiffSystem<T> for NlsSystem<T> {
    fn linear_phases(&self) -> &[T] {
        &self.phases
    }

    fn nonlinear(&mut self, w: &[Complex<T>], _t: T, out: &mut [Complex<T>]) {
        let m = self.pad.len();
        self.pad.iter_mut().for_each(|c| *c = Complex::default());
        for (i, &slot) in self.slots.iter().enumerate() {
            self.pad[slot] = w[i];
        }
        self.grid.inverse(&mut self.pad);
        for c in self.pad.iter_mut() {
            *c = *c * c.norm_sqr();
        }
        self.grid.forward(&mut self.pad);
        let scale = T::one() / T::from_usize(m).unwrap();
        let minus_i_g = Complex::new(T::zero(), -self.coupling);
        for (i, &slot) in self.slots.iter().enumerate() {
            out[i] = minus_i_g * self.pad[slot] * scale;
        }
        out[self.grid.n() / 2] = Complex::default();
    }

    fn nonlinear_exact_step(&mut self, w: &mut [Complex<T>], _t: T, dt: T) -> bool {
        // exact pointwise rotation psi -> psi exp(-i g |psi|^2 dt)
        let n = self.grid.n();
        self.phys.copy_from_slice(w);
        self.grid.inverse(&mut self.phys);
        for c in self.phys.iter_mut() {
            let theta = -self.coupling * c.norm_sqr() * dt;
            *c = *c * Complex::from_polar(T::one(), theta);
        }
        self.grid.forward(&mut self.phys);
        let scale = T::one() / T::from_usize(n).unwrap();
        for (o, &c) in w.iter_mut().zip(self.phys.iter()) {
            *o = c * scale;
        }
        w[n / 2] = Complex::default();
        true
    }
}

/// State layout: `[psi | r]`, both in spectral slots.
struct AmplitudeSystem<T: Real> {
    grid: TorusGrid<T>,
    eps: T,
    phases: Vec<T>,
    /// `-(3i/2) / <1 + eps xi>` applied to both truncated forcings.
    coeff: Vec<Complex<T>>,
    core_only: bool,
    slots: Vec<usize>,
    /// `exp(2 i x / eps)` on the padded nodes.
    carrier2: Vec<Complex<T>>,
    pad_psi: Vec<Complex<T>>,
    pad_a: Vec<Complex<T>>,
}

impl<T: Real> AmplitudeSystem<T> {
    fn new(grid: &TorusGrid<T>, eps: T, core_only: bool) -> Self {
        // both equations share the linear propagator; the state stacks
        // [psi | r], so the phase table is duplicated
        let single: Vec<T> = grid.freqs().iter().map(|&xi| rescaled_symbol(xi, eps)).collect();
        let mut phases = single.clone();
        phases.extend(single);
        let three_half = T::from_f64_c(1.5);
        let mut coeff: Vec<Complex<T>> = grid
            .freqs()
            .iter()
            .map(|&xi| {
                Complex::new(T::zero(), -three_half / (T::one() + eps * xi).bracket())
            })
            .collect();
        coeff[grid.n() / 2] = Complex::default();
        let m = 4 * grid.n();
        let two_over_eps = T::from_f64_c(2.0) / eps;
        let l = grid.length();
        let carrier2 = (0..m)
            .map(|k| {
                let x = l * T::from_usize(k).unwrap() / T::from_usize(m).unwrap();
                Complex::from_polar(T::one(), two_over_eps * x)
            })
            .collect();
        Self {
            grid: grid.clone(),
            eps,
            phases,
            coeff,
            core_only,
            slots: padded_slots(grid, m),
            carrier2,
            pad_psi: vec![Complex::default(); m],
            pad_a: vec![Complex::default(); m],
        }
    }
}

impl<T: Real> StiffSystem<T> for AmplitudeSystem<T> {
    fn linear_phases(&self) -> &[T] {
        &self.phases
    }

    fn nonlinear(&mut self, w: &[Complex<T>], t: T, out: &mut [Complex<T>]) {
        let n = self.grid.n();
        let m = self.pad_psi.len();
        let (psi, r) = w.split_at(n);
        let third = T::one() / T::from_f64_c(3.0);

        self.pad_psi.iter_mut().for_each(|c| *c = Complex::default());
        for (i, &slot) in self.slots.iter().enumerate() {
            self.pad_psi[slot] = psi[i];
        }
        self.grid.inverse(&mut self.pad_psi);

        if !self.core_only {
            self.pad_a.iter_mut().for_each(|c| *c = Complex::default());
            for (i, &slot) in self.slots.iter().enumerate() {
                self.pad_a[slot] = psi[i] + r[i];
            }
            self.grid.inverse(&mut self.pad_a);

            // Frame phases of the oscillatory forcing, evaluated analytically:
            // exp(+-2 i Theta) = exp(+-2ix/eps) exp(-+ i sqrt2 t / eps^2),
            // exp(-4 i Theta) = exp(-4ix/eps) exp(+2 i sqrt2 t / eps^2).
            let omega = T::sqrt2() * t / (self.eps * self.eps);
            let ph2 = Complex::from_polar(T::one(), -omega);
            let ph2c = ph2.conj();
            let ph4 = ph2c * ph2c;
            for k in 0..m {
                let p = self.pad_psi[k];
                let a = self.pad_a[k];
                let cube_psi = p * p.norm_sqr();
                let cube_a = a * a.norm_sqr();
                let c2 = self.carrier2[k];
                let ac = a.conj();
                let osc = c2 * ph2 * (a * a * a) * third
                    + c2.conj() * ph2c * (ac * a.norm_sqr())
                    + (c2 * c2).conj() * ph4 * (ac * ac * ac) * third;
                self.pad_a[k] = cube_a - cube_psi + osc;
                self.pad_psi[k] = cube_psi;
            }
            self.grid.forward(&mut self.pad_a);
        } else {
            for k in 0..m {
                let p = self.pad_psi[k];
                self.pad_psi[k] = p * p.norm_sqr();
            }
        }
        self.grid.forward(&mut self.pad_psi);

        let scale = T::one() / T::from_usize(m).unwrap();
        let (out_psi, out_r) = out.split_at_mut(n);
        for (i, &slot) in self.slots.iter().enumerate() {
            out_psi[i] = self.coeff[i] * self.pad_psi[slot] * scale;
            out_r[i] = if self.core_only {
                Complex::default()
            } else {
                self.coeff[i] * self.pad_a[slot] * scale
            };
        }
    }
}

// ---------------------------------------------------------------------------
// Drivers
// ---------------------------------------------------------------------------

fn check_finite<T: Real>(w: &[Complex<T>], t: T) -> Result<()> {
    if w.iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
        Ok(())
    } else {
        Err(CoreError::NumericalFailure {
            t_last: t.to_f64().unwrap_or(f64::NAN),
            reason: "non-finite state (NaN/overflow)".into(),
        })
    }
}

/// Integrate the cubic wave equation in half-wave form from `state0` to
/// `state0.t + t_end`.
pub fn solve_kg<T: Real>(
    state0: &KgState<T>,
    t_end: T,
    cfg: &SolverConfig<T>,
) -> Result<Trajectory<T, KgState<T>>> {
    cfg.validate()?;
    let (steps, per, dt) = cfg.plan(t_end)?;
    let grid = state0.w.grid().clone();
    let mut sys = KgSystem::new(&grid, state0.scale);
    let mut stepper = Stepper::new(cfg.scheme, grid.n());
    let mut w: Vec<Complex<T>> = state0.w.spectrum().to_vec();
    w[grid.n() / 2] = Complex::default();
    let t0 = state0.t;

    let mut meta = TrajectoryMeta::new(dt, steps, cfg.scheme);
    let mut states = Vec::with_capacity(cfg.sample_count);
    let mut e0: Option<T> = None;
    let mut drift = T::zero();

    let sample = |k: usize,
                      w: &[Complex<T>],
                      meta: &mut TrajectoryMeta<T>,
                      states: &mut Vec<KgState<T>>,
                      e0: &mut Option<T>,
                      drift: &mut T|
     -> Result<()> {
        let t = t0 + dt * T::from_usize(k).unwrap();
        let f = Field::from_spectrum_unchecked(&grid, w.to_vec());
        let state = KgState { t, w: f, scale: state0.scale };
        let energy = state_energy(&state)?;
        meta.energy.push((t, energy));
        if let Some(base) = *e0 {
            let d = if base.abs() > T::zero() {
                (energy - base).abs() / base.abs()
            } else {
                (energy - base).abs()
            };
            *drift = (*drift).max(d);
        } else {
            *e0 = Some(energy);
        }
        states.push(state);
        Ok(())
    };

    sample(0, &w, &mut meta, &mut states, &mut e0, &mut drift)?;
    for k in 0..steps {
        let t = t0 + dt * T::from_usize(k).unwrap();
        stepper.step(&mut sys, &mut w, t, dt);
        check_finite(&w, t + dt)?;
        if (k + 1) % per == 0 {
            sample(k + 1, &w, &mut meta, &mut states, &mut e0, &mut drift)?;
        }
    }
    meta.max_rel_energy_drift = Some(drift);
    meta.energy_flagged = drift > T::from_f64_c(100.0) * cfg.energy_tol;
    Ok(Trajectory { states, meta })
}

/// Conserved energy of a wave state, in its own scaling.
pub fn state_energy<T: Real>(state: &KgState<T>) -> Result<T> {
    let (u, u_t) = decomplexify(&state.w, state.scale)?;
    match state.scale {
        KgScale::Physical => spectral::energy_physical(&u, &u_t),
        KgScale::Rescaled { eps } => spectral::energy_rescaled(&u, &u_t, eps),
    }
}

/// Integrate the coupled core/remainder system from envelope data `psi0`
/// with `r(0) = 0`.
///
/// Requires `dt <= eps^2/8` (the oscillatory forcing turns at `~sqrt2/eps^2`)
/// and a grid whose lattice carries `2/eps` exactly and resolves the
/// `-4/eps` band.
pub fn solve_amplitude<T: Real>(
    psi0: &Field<T>,
    eps: T,
    t_end: T,
    cfg: &SolverConfig<T>,
    trackers: &[SpectralTracker<T>],
) -> Result<Trajectory<T, AmplitudeState<T>>> {
    cfg.validate()?;
    spectral::check_eps(eps)?;
    let grid = psi0.grid().clone();
    let shift2 = grid.lattice_mode(T::from_f64_c(2.0) / eps)?;
    if cfg.dt > eps * eps / T::from_f64_c(8.0) {
        return Err(CoreError::InvalidParam(format!(
            "amplitude system needs dt <= eps^2/8 = {}, got {}",
            eps * eps / T::from_f64_c(8.0),
            cfg.dt
        )));
    }
    if !cfg.core_only && 2 * shift2 >= grid.n() as i64 / 2 {
        return Err(CoreError::InvalidParam(format!(
            "grid Nyquist does not hold the 4/eps band (needs > {} modes)",
            4 * shift2
        )));
    }
    let (steps, per, dt) = cfg.plan(t_end)?;
    let n = grid.n();

    let mut sys = AmplitudeSystem::new(&grid, eps, cfg.core_only);
    let mut stepper = Stepper::new(cfg.scheme, 2 * n);
    let mut w = vec![Complex::default(); 2 * n];
    w[..n].copy_from_slice(psi0.spectrum());
    w[n / 2] = Complex::default();

    let mut meta = TrajectoryMeta::new(dt, steps, cfg.scheme);
    let mut tracked: Vec<TrackedMax<T>> = trackers
        .iter()
        .map(|tr| TrackedMax { name: tr.name.clone(), max: T::zero(), series: Vec::new() })
        .collect();
    let mut states = Vec::with_capacity(cfg.sample_count);

    let observe = |k: usize, w: &[Complex<T>], tracked: &mut Vec<TrackedMax<T>>, sample: bool, states: &mut Vec<AmplitudeState<T>>| {
        let t = dt * T::from_usize(k).unwrap();
        let (psi, r) = w.split_at(n);
        for (tr, acc) in trackers.iter().zip(tracked.iter_mut()) {
            let v = tr.value(&grid, psi, r);
            acc.max = acc.max.max(v);
            if sample {
                acc.series.push((t, v));
            }
        }
        if sample {
            states.push(AmplitudeState {
                t,
                psi: Field::from_spectrum_unchecked(&grid, psi.to_vec()),
                r: Field::from_spectrum_unchecked(&grid, r.to_vec()),
                eps,
            });
        }
    };

    observe(0, &w, &mut tracked, true, &mut states);
    for k in 0..steps {
        let t = dt * T::from_usize(k).unwrap();
        stepper.step(&mut sys, &mut w, t, dt);
        check_finite(&w, t + dt)?;
        observe(k + 1, &w, &mut tracked, (k + 1) % per == 0, &mut states);
    }
    meta.tracked = tracked;
    Ok(Trajectory { states, meta })
}

/// Integrate the cubic Schroedinger envelope equation.
pub fn solve_nls<T: Real>(
    psi0: &Field<T>,
    t_end: T,
    cfg: &SolverConfig<T>,
) -> Result<Trajectory<T, NlsState<T>>> {
    cfg.validate()?;
    let (steps, per, dt) = cfg.plan(t_end)?;
    let grid = psi0.grid().clone();
    let mut sys = NlsSystem::new(&grid);
    let mut stepper = Stepper::new(cfg.scheme, grid.n());
    let mut w: Vec<Complex<T>> = psi0.spectrum().to_vec();
    w[grid.n() / 2] = Complex::default();

    let mut meta = TrajectoryMeta::new(dt, steps, cfg.scheme);
    let mut states = Vec::with_capacity(cfg.sample_count);
    let l = grid.length();
    let mass = |w: &[Complex<T>]| (l * w.iter().map(|c| c.norm_sqr()).sum::<T>()).sqrt();

    states.push(NlsState { t: T::zero(), psi: psi0.clone() });
    meta.mass.push((T::zero(), mass(&w)));
    for k in 0..steps {
        let t = dt * T::from_usize(k).unwrap();
        stepper.step(&mut sys, &mut w, t, dt);
        check_finite(&w, t + dt)?;
        if (k + 1) % per == 0 {
            let t1 = dt * T::from_usize(k + 1).unwrap();
            meta.mass.push((t1, mass(&w)));
            states.push(NlsState { t: t1, psi: Field::from_spectrum_unchecked(&grid, w.clone()) });
        }
    }
    Ok(Trajectory { states, meta })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    type C = Complex<f64>;

    fn grid() -> TorusGrid<f64> {
        TorusGrid::new(16, 1024).unwrap()
    }

    fn gaussian(g: &TorusGrid<f64>, width: f64) -> Field<f64> {
        let mid = g.length() / 2.0;
        Field::from_fn_real(g, |x| (-((x - mid) / width).powi(2) / 2.0).exp()).unwrap()
    }

    #[test]
    fn complexify_of_static_cosine() {
        let g = grid();
        let u = Field::from_fn_real(&g, |x| 2.0 * x.cos()).unwrap();
        let z = Field::zero(&g);
        let w = complexify(&u, &z, KgScale::Physical).unwrap();
        // u_t = 0 => W = u/2 = cos x; doubling the real part recovers u
        let back = w.two_re();
        for (a, b) in back.values().iter().zip(u.values()) {
            assert_relative_eq!(a.re, b.re, epsilon = 1e-12);
        }
    }

    #[test]
    fn complexify_is_linear() {
        let g = grid();
        let u = Field::from_fn_real(&g, |x| (2.0 * x).sin()).unwrap();
        let ut = Field::from_fn_real(&g, |x| 0.3 * x.cos()).unwrap();
        let alpha = 1.7;
        let ua = Field::from_fn_real(&g, |x| alpha * (2.0 * x).sin()).unwrap();
        let uta = Field::from_fn_real(&g, |x| alpha * 0.3 * x.cos()).unwrap();
        let w = complexify(&u, &ut, KgScale::Physical).unwrap();
        let wa = complexify(&ua, &uta, KgScale::Physical).unwrap();
        for i in 0..g.n() {
            assert!((wa.spectrum()[i] - w.spectrum()[i] * alpha).norm() < 1e-13);
        }
    }

    #[test]
    fn initial_data_demodulates_exactly() {
        // complexify of the rescaled wave data equals the carrier-shifted
        // envelope, coefficient by coefficient
        let g = grid();
        let eps = 0.25;
        let psi0 = gaussian(&g, 1.0);
        let (v0, vt0) = rescaled_wave_data(&psi0, eps).unwrap();
        let w = complexify(&v0, &vt0, KgScale::Rescaled { eps }).unwrap();
        let expect = kg_rescaled_initial_state(&psi0, eps).unwrap().w;
        let err: f64 = w
            .spectrum()
            .iter()
            .zip(expect.spectrum())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!(err < 1e-12 * expect.l2_norm(), "err = {err}");
    }

    #[test]
    fn decomplexify_round_trips() {
        let g = grid();
        let eps = 0.25;
        // a band-limited complex W with both carrier bands occupied
        let psi0 = gaussian(&g, 1.0);
        let mut w0 = kg_rescaled_initial_state(&psi0, eps).unwrap().w;
        w0 = w0
            .add_scaled(C::new(0.3, 0.1), &shift_spectrum(&psi0, -g.lattice_mode(1.0 / eps).unwrap()))
            .unwrap();
        let scale = KgScale::Rescaled { eps };
        let (u, ut) = decomplexify(&w0, scale).unwrap();
        assert!(u.is_real() && ut.is_real());
        let w1 = complexify(&u, &ut, scale).unwrap();
        let err: f64 = w1
            .spectrum()
            .iter()
            .zip(w0.spectrum())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!(err < 1e-10 * w0.l2_norm(), "round trip err {err}");
    }

    #[test]
    fn decomplexify_zero_and_linear_mode() {
        let g = grid();
        let z = Field::zero(&g);
        let (u, ut) = decomplexify(&z, KgScale::Physical).unwrap();
        assert_eq!(u.l2_norm(), 0.0);
        assert_eq!(ut.l2_norm(), 0.0);

        // W a tiny single mode: u_t ~ 2 Re(-i <xi0> W)
        let amp = 1e-8;
        let w = Field::from_mode(&g, 16, C::new(amp, 0.0)).unwrap(); // xi0 = 1
        let (_, ut) = decomplexify(&w, KgScale::Physical).unwrap();
        let expect = Field::from_fn_real(&g, |x| 2.0 * amp * 2f64.sqrt() * x.sin()).unwrap();
        for (a, b) in ut.values().iter().zip(expect.values()) {
            assert!((a.re - b.re).abs() < 1e-20 + 1e-10 * amp);
        }
    }

    #[test]
    fn uniform_state_reduces_to_ode() {
        // u(0) = 0.5, u_t(0) = 0, spatially uniform: u'' + u + u^3 = 0.
        // Reference from a dense classical RK4 integration of the 2d ODE
        // (independent of the spectral path; 1e-10-converged).
        let g = TorusGrid::new(1, 16).unwrap();
        let u0 = Field::from_fn_real(&g, |_| 0.5).unwrap();
        let z = Field::zero(&g);
        let w0 = complexify(&u0, &z, KgScale::Physical).unwrap();
        let state0 = KgState { t: 0.0, w: w0, scale: KgScale::Physical };
        let mut cfg = SolverConfig::new(1e-3);
        cfg.sample_count = 2;
        let traj = solve_kg(&state0, 10.0, &cfg).unwrap();
        let u_end = traj.states.last().unwrap().field();

        // ODE oracle: classical RK4 with tiny fixed step
        let mut y = [0.5f64, 0.0];
        let f = |y: [f64; 2]| [y[1], -y[0] - y[0] * y[0] * y[0]];
        let h = 1e-5;
        for _ in 0..1_000_000 {
            let k1 = f(y);
            let k2 = f([y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]]);
            let k3 = f([y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]]);
            let k4 = f([y[0] + h * k3[0], y[1] + h * k3[1]]);
            y[0] += h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
            y[1] += h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]);
        }
        for v in u_end.values() {
            assert!((v.re - y[0]).abs() < 1e-8, "{} vs {}", v.re, y[0]);
        }
    }

    #[test]
    fn zero_data_stays_zero() {
        let g = grid();
        let z = Field::zero(&g);
        let state0 = KgState { t: 0.0, w: z.clone(), scale: KgScale::Rescaled { eps: 0.25 } };
        let traj = solve_kg(&state0, 1.0, &SolverConfig::new(1e-2)).unwrap();
        assert_eq!(traj.states.last().unwrap().w.l2_norm(), 0.0);

        let tr = solve_amplitude(&z, 0.25, 0.5, &SolverConfig::new(0.25 * 0.25 / 8.0), &[])
            .unwrap();
        let last = tr.states.last().unwrap();
        assert_eq!(last.psi.l2_norm(), 0.0);
        assert_eq!(last.r.l2_norm(), 0.0);

        let trn = solve_nls(&z, 1.0, &SolverConfig::new(1e-2)).unwrap();
        assert_eq!(trn.states.last().unwrap().psi.l2_norm(), 0.0);
    }

    #[test]
    fn nls_plane_wave_closed_form() {
        // psi0 = a = 0.1: psi(t) = a exp(-i lambda t), lambda = 3 a^2 /(2 sqrt2)
        let g = grid();
        let a = 0.1;
        let psi0 = Field::from_mode(&g, 0, C::new(a, 0.0)).unwrap();
        let mut cfg = SolverConfig::new(1e-3).with_scheme(Scheme::StrangSplit4);
        cfg.sample_count = 2;
        let traj = solve_nls(&psi0, 1.0, &cfg).unwrap();
        let lam = 0.010606601717798213;
        let want = C::from_polar(a, -lam);
        let got = traj.states.last().unwrap().psi.spectrum()[0];
        assert!((got - want).norm() < 1e-9, "delta {}", (got - want).norm());
    }

    #[test]
    fn nls_mass_conserved() {
        let g = grid();
        let mid = g.length() / 2.0;
        let psi0 = Field::from_fn_real(&g, |x| 0.8 * (-((x - mid) / 2.0).powi(2)).exp()).unwrap();
        for scheme in [Scheme::StrangSplit, Scheme::StrangSplit4] {
            let cfg = SolverConfig::new(1e-3).with_scheme(scheme).with_samples(9);
            let traj = solve_nls(&psi0, 1.0, &cfg).unwrap();
            let m0 = traj.meta.mass[0].1;
            for &(_, m) in &traj.meta.mass {
                assert!((m - m0).abs() <= 1e-10 * m0, "{scheme:?}: drift {}", (m - m0) / m0);
            }
        }
    }

    #[test]
    fn amplitude_rejects_bad_configs() {
        let g = grid();
        let psi0 = gaussian(&g, 1.0);
        // dt too large
        let cfg = SolverConfig::new(0.25 * 0.25);
        assert!(solve_amplitude(&psi0, 0.25, 0.1, &cfg, &[]).is_err());
        // eps off the lattice
        let cfg = SolverConfig::new(1e-4);
        assert!(solve_amplitude(&psi0, 0.3, 0.1, &cfg, &[]).is_err());
        // dealias cannot be disabled
        let mut cfg = SolverConfig::new(1e-4);
        cfg.dealias = false;
        assert!(solve_amplitude(&psi0, 0.25, 0.1, &cfg, &[]).is_err());
    }

    #[test]
    fn demodulate_constant_envelope_under_linear_flow() {
        // A constant in x: v is a pure carrier; with the nonlinearity off the
        // envelope stays that constant for all t.
        let g = grid();
        let eps = 0.25;
        let c = C::new(0.7, -0.2);
        let psi0 = Field::from_mode(&g, 0, c).unwrap();
        let w0 = kg_rescaled_initial_state(&psi0, eps).unwrap().w;
        let params = WavePacketParams::new(eps).unwrap();
        for &t in &[0.0, 0.3, 1.7] {
            let sigma = |xi: f64| (eps * xi).bracket() / (eps * eps);
            let evolved = spectral::apply_multiplier(&w0, |xi| {
                Complex::from_polar(1.0, -t * sigma(xi))
            })
            .unwrap();
            let state = KgState { t, w: evolved, scale: KgScale::Rescaled { eps } };
            let a = demodulate(&state, &params).unwrap();
            assert!((a.spectrum()[0] - c).norm() < 1e-12, "t = {t}");
            let rest: f64 = a.spectrum()[1..].iter().map(|z| z.norm_sqr()).sum();
            assert!(rest < 1e-24);
        }
    }

    #[test]
    fn demodulate_at_zero_returns_data() {
        let g = grid();
        let eps = 0.125;
        let psi0 = gaussian(&g, 1.0);
        let state = kg_rescaled_initial_state(&psi0, eps).unwrap();
        let params = WavePacketParams::new(eps).unwrap();
        let a = demodulate(&state, &params).unwrap();
        let err: f64 = a
            .spectrum()
            .iter()
            .zip(psi0.spectrum())
            .map(|(x, y)| (x - y).norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!(err < 1e-12 * psi0.l2_norm());
    }

    #[test]
    fn demodulate_checks_scale_and_eps() {
        let g = grid();
        let psi0 = gaussian(&g, 1.0);
        let state = kg_rescaled_initial_state(&psi0, 0.25).unwrap();
        let params = WavePacketParams::new(0.125).unwrap();
        assert!(matches!(
            demodulate(&state, &params),
            Err(CoreError::EpsilonMismatch { .. })
        ));
        let phys = KgState { t: 0.0, w: psi0, scale: KgScale::Physical };
        assert!(demodulate(&phys, &WavePacketParams::new(0.25).unwrap()).is_err());
    }

    #[test]
    fn kg_self_convergence_order() {
        // halving dt shrinks the terminal error by at least 8x
        let g = TorusGrid::new(16, 512).unwrap();
        let eps = 0.25;
        let psi0 = gaussian(&g, 1.0);
        let state0 = kg_rescaled_initial_state(&psi0, eps).unwrap();
        let run = |dt: f64| {
            let cfg = SolverConfig::new(dt).with_samples(2);
            solve_kg(&state0, 0.25, &cfg).unwrap().states.last().unwrap().w.clone()
        };
        let base_dt = eps * eps / 16.0;
        let reference = run(base_dt / 8.0);
        let dist = |a: &Field<f64>, b: &Field<f64>| {
            a.spectrum()
                .iter()
                .zip(b.spectrum())
                .map(|(x, y)| (x - y).norm_sqr())
                .sum::<f64>()
                .sqrt()
        };
        let e1 = dist(&run(base_dt), &reference);
        let e2 = dist(&run(base_dt / 2.0), &reference);
        assert!(e1 / e2 >= 8.0, "ratio {}", e1 / e2);
    }

    #[test]
    fn amplitude_core_only_self_convergence() {
        let g = TorusGrid::new(16, 512).unwrap();
        let eps = 0.25;
        let psi0 = gaussian(&g, 1.0);
        let run = |dt: f64| {
            let mut cfg = SolverConfig::new(dt).with_samples(2);
            cfg.core_only = true;
            solve_amplitude(&psi0, eps, 0.25, &cfg, &[]).unwrap().states.last().unwrap().psi.clone()
        };
        let base_dt = eps * eps / 16.0;
        let reference = run(base_dt / 8.0);
        let dist = |a: &Field<f64>, b: &Field<f64>| {
            a.spectrum()
                .iter()
                .zip(b.spectrum())
                .map(|(x, y)| (x - y).norm_sqr())
                .sum::<f64>()
                .sqrt()
        };
        let e1 = dist(&run(base_dt), &reference);
        let e2 = dist(&run(base_dt / 2.0), &reference);
        assert!(e1 / e2 >= 8.0, "ratio {}", e1 / e2);
        // core-only mass conservation is only approximate (the bracket
        // multiplier skews the cubic): check it is nevertheless tiny
        let psi = run(base_dt);
        assert_relative_eq!(psi.l2_norm(), psi0.l2_norm(), max_relative = 1e-3);
    }

    #[test]
    fn remainder_bands_after_one_step() {
        // after one step from low-frequency data, r lives near
        // {+2/eps, -2/eps, -4/eps} shifted bands and near zero
        let g = TorusGrid::new(16, 1024).unwrap();
        let eps = 0.25;
        let psi0 = gaussian(&g, 1.0);
        let dt = eps * eps / 8.0;
        let cfg = SolverConfig::new(dt).with_samples(2);
        let traj = solve_amplitude(&psi0, eps, dt, &cfg, &[]).unwrap();
        let r = &traj.states.last().unwrap().r;
        // data bandwidth: where |psi0_hat| exceeds 1e-12 of its peak
        let peak = psi0.spectrum().iter().map(|c| c.norm()).fold(0.0, f64::max);
        let bw = g
            .freqs()
            .iter()
            .zip(psi0.spectrum())
            .filter(|(_, c)| c.norm() > 1e-12 * peak)
            .map(|(&xi, _)| xi.abs())
            .fold(0.0, f64::max);
        let centers = [0.0, 2.0 / eps, -2.0 / eps, -4.0 / eps];
        let halfwidth = 3.0 * bw + 4.0 * g.freq_spacing();
        let mut inside = 0.0;
        let mut total = 0.0;
        for (i, c) in r.spectrum().iter().enumerate() {
            let xi = g.freqs()[i];
            let m = c.norm_sqr();
            total += m;
            if centers.iter().any(|&c0| (xi - c0).abs() <= halfwidth) {
                inside += m;
            }
        }
        assert!(total > 0.0, "remainder should be excited");
        assert!(inside / total >= 0.999, "band mass fraction {}", inside / total);
    }

    #[test]
    fn trajectory_metadata_energy_samples() {
        let g = grid();
        let psi0 = gaussian(&g, 1.0);
        let state0 = kg_rescaled_initial_state(&psi0, 0.25).unwrap();
        let cfg = SolverConfig::new(0.25 * 0.25 / 32.0).with_samples(5);
        let traj = solve_kg(&state0, 0.2, &cfg).unwrap();
        assert_eq!(traj.states.len(), 5);
        assert_eq!(traj.meta.energy.len(), 5);
        assert!(traj.meta.max_rel_energy_drift.unwrap() < 1e-8);
        assert!(!traj.meta.energy_flagged);
        // flagging trips when the certified target is set absurdly tight
        let mut tight = SolverConfig::new(0.25 * 0.25 / 32.0).with_samples(5);
        tight.energy_tol = 1e-16;
        let traj = solve_kg(&state0, 0.2, &tight).unwrap();
        assert!(traj.meta.energy_flagged);
    }
}
