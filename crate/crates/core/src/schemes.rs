//! Time steppers for stiff systems `W' = -i sigma(D) W + N(W, t)` whose
//! linear part is diagonal in spectral space.
//!
//! The linear phase is always applied exactly; the schemes differ only in
//! how the nonlinear part is advanced. `LawsonRk4` (classical Runge-Kutta on
//! the integrating-factor variable) is the workhorse; `EtdRk4` is the
//! Cox-Matthews exponential integrator; `StrangSplit` alternates the exact
//! linear phase with a nonlinear substep, optionally Richardson-extrapolated
//! to fourth order.

use crate::Real;
use num_complex::Complex;
use serde::{Deserialize, Serialize};

/// Right-hand-side description consumed by [`Stepper`].
pub trait StiffSystem<T: Real> {
    /// Linear phase angles `sigma(xi_j)` per storage slot; the linear flow
    /// multiplies slot `j` by `exp(-i t sigma_j)`.
    fn linear_phases(&self) -> &[T];

    /// Evaluate the nonlinear term `N(w, t)` into `out`.
    fn nonlinear(&mut self, w: &[Complex<T>], t: T, out: &mut [Complex<T>]);

    /// Advance the pure nonlinear subflow exactly in place, when the system
    /// admits a closed-form substep (the cubic Schroedinger phase rotation
    /// does). Returns `false` when unavailable; the splitting stepper then
    /// integrates the substep with one Runge-Kutta sweep.
    fn nonlinear_exact_step(&mut self, _w: &mut [Complex<T>], _t: T, _dt: T) -> bool {
        false
    }
}

/// Time-integration scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Exact linear phase with classical RK4 on the integrating-factor
    /// variable. Fourth order, no stiffness restriction.
    #[default]
    LawsonRk4,
    /// Cox-Matthews exponential time differencing, fourth order.
    EtdRk4,
    /// Plain Strang splitting, second order.
    StrangSplit,
    /// Strang splitting with Richardson extrapolation, fourth order.
    StrangSplit4,
}

/// Reusable stepper: owns scratch buffers and per-`dt` phase tables.
pub struct Stepper<T: Real> {
    scheme: Scheme,
    dim: usize,
    cached_dt: Option<T>,
    /// exp(-i sigma dt / 2), exp(-i sigma dt)
    e_half: Vec<Complex<T>>,
    e_full: Vec<Complex<T>>,
    /// ETD tables: phi1(z/2) dt/2 and the three Cox-Matthews weights (x dt).
    etd_a: Vec<Complex<T>>,
    etd_f1: Vec<Complex<T>>,
    etd_f2: Vec<Complex<T>>,
    etd_f3: Vec<Complex<T>>,
    scratch: Vec<Vec<Complex<T>>>,
}

impl<T: Real> Stepper<T> {
    pub fn new(scheme: Scheme, dim: usize) -> Self {
        Self {
            scheme,
            dim,
            cached_dt: None,
            e_half: Vec::new(),
            e_full: Vec::new(),
            etd_a: Vec::new(),
            etd_f1: Vec::new(),
            etd_f2: Vec::new(),
            etd_f3: Vec::new(),
            scratch: (0..6).map(|_| vec![Complex::default(); dim]).collect(),
        }
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    /// Advance `w` from `t` to `t + dt` in place.
    pub fn step<S: StiffSystem<T>>(&mut self, sys: &mut S, w: &mut [Complex<T>], t: T, dt: T) {
        debug_assert_eq!(w.len(), self.dim);
        self.prepare(sys, dt);
        match self.scheme {
            Scheme::LawsonRk4 => self.step_lawson(sys, w, t, dt),
            Scheme::EtdRk4 => self.step_etd(sys, w, t, dt),
            Scheme::StrangSplit => self.step_strang(sys, w, t, dt),
            Scheme::StrangSplit4 => self.step_strang4(sys, w, t, dt),
        }
    }

    fn prepare<S: StiffSystem<T>>(&mut self, sys: &mut S, dt: T) {
        if self.cached_dt == Some(dt) {
            return;
        }
        let phases = sys.linear_phases();
        debug_assert_eq!(phases.len(), self.dim);
        let half = T::from_f64_c(0.5);
        self.e_half = phases
            .iter()
            .map(|&s| Complex::from_polar(T::one(), -s * dt * half))
            .collect();
        self.e_full = phases
            .iter()
            .map(|&s| Complex::from_polar(T::one(), -s * dt))
            .collect();
        if self.scheme == Scheme::EtdRk4 {
            let (mut a, mut f1, mut f2, mut f3) = (
                Vec::with_capacity(self.dim),
                Vec::with_capacity(self.dim),
                Vec::with_capacity(self.dim),
                Vec::with_capacity(self.dim),
            );
            for &s in phases {
                let z = Complex::new(T::zero(), -s * dt);
                let (p1h, _, _) = phi123(z * half);
                let (p1, p2, p3) = phi123(z);
                let four = T::from_f64_c(4.0);
                let three = T::from_f64_c(3.0);
                let two = T::from_f64_c(2.0);
                a.push(p1h * (dt * half));
                f1.push((p1 - p2 * three + p3 * four) * dt);
                // the (N2 + N3) weight carries the factor 2 of the scheme
                f2.push((p2 - p3 * two) * (dt * two));
                f3.push((p3 * four - p2) * dt);
            }
            self.etd_a = a;
            self.etd_f1 = f1;
            self.etd_f2 = f2;
            self.etd_f3 = f3;
        }
        self.cached_dt = Some(dt);
    }

    fn step_lawson<S: StiffSystem<T>>(&mut self, sys: &mut S, w: &mut [Complex<T>], t: T, dt: T) {
        let n = self.dim;
        let half_dt = dt * T::from_f64_c(0.5);
        let sixth = dt / T::from_f64_c(6.0);
        let two = T::from_f64_c(2.0);
        let t_half = t + half_dt;
        let mut bufs = std::mem::take(&mut self.scratch);
        let (k1, rest) = bufs.split_at_mut(1);
        let (n2, rest) = rest.split_at_mut(1);
        let (n3, rest) = rest.split_at_mut(1);
        let (n4, rest) = rest.split_at_mut(1);
        let (stage, _) = rest.split_at_mut(1);
        let k1 = &mut k1[0];
        let n2 = &mut n2[0];
        let n3 = &mut n3[0];
        let n4 = &mut n4[0];
        let stage = &mut stage[0];

        sys.nonlinear(w, t, k1);
        // stage a = E_half (w + dt/2 k1)
        for i in 0..n {
            stage[i] = self.e_half[i] * (w[i] + k1[i] * half_dt);
        }
        sys.nonlinear(stage, t_half, n2);
        // stage b = E_half w + dt/2 n2
        for i in 0..n {
            stage[i] = self.e_half[i] * w[i] + n2[i] * half_dt;
        }
        sys.nonlinear(stage, t_half, n3);
        // stage c = E_full w + dt E_half n3
        for i in 0..n {
            stage[i] = self.e_full[i] * w[i] + self.e_half[i] * n3[i] * dt;
        }
        sys.nonlinear(stage, t + dt, n4);
        for i in 0..n {
            let acc = self.e_full[i] * k1[i]
                + self.e_half[i] * (n2[i] + n3[i]) * two
                + n4[i];
            w[i] = self.e_full[i] * w[i] + acc * sixth;
        }
        self.scratch = bufs;
    }

    fn step_etd<S: StiffSystem<T>>(&mut self, sys: &mut S, w: &mut [Complex<T>], t: T, dt: T) {
        let n = self.dim;
        let half_dt = dt * T::from_f64_c(0.5);
        let t_half = t + half_dt;
        let two = T::from_f64_c(2.0);
        let mut bufs = std::mem::take(&mut self.scratch);
        let (n1, rest) = bufs.split_at_mut(1);
        let (n2, rest) = rest.split_at_mut(1);
        let (n3, rest) = rest.split_at_mut(1);
        let (n4, rest) = rest.split_at_mut(1);
        let (an, rest) = rest.split_at_mut(1);
        let (bn, _) = rest.split_at_mut(1);
        let n1 = &mut n1[0];
        let n2 = &mut n2[0];
        let n3 = &mut n3[0];
        let n4 = &mut n4[0];
        let an = &mut an[0];
        let bn = &mut bn[0];

        sys.nonlinear(w, t, n1);
        for i in 0..n {
            an[i] = self.e_half[i] * w[i] + self.etd_a[i] * n1[i];
        }
        sys.nonlinear(an, t_half, n2);
        for i in 0..n {
            bn[i] = self.e_half[i] * w[i] + self.etd_a[i] * n2[i];
        }
        sys.nonlinear(bn, t_half, n3);
        for i in 0..n {
            bn[i] = self.e_half[i] * an[i] + self.etd_a[i] * (n3[i] * two - n1[i]);
        }
        sys.nonlinear(bn, t + dt, n4);
        for i in 0..n {
            w[i] = self.e_full[i] * w[i]
                + self.etd_f1[i] * n1[i]
                + self.etd_f2[i] * (n2[i] + n3[i])
                + self.etd_f3[i] * n4[i];
        }
        self.scratch = bufs;
    }

    fn apply_half_linear(&self, w: &mut [Complex<T>]) {
        for (c, e) in w.iter_mut().zip(&self.e_half) {
            *c = *c * *e;
        }
    }

    fn step_strang<S: StiffSystem<T>>(&mut self, sys: &mut S, w: &mut [Complex<T>], t: T, dt: T) {
        self.apply_half_linear(w);
        if !sys.nonlinear_exact_step(w, t, dt) {
            self.rk4_nonlinear_substep(sys, w, t, dt);
        }
        self.apply_half_linear(w);
    }

    fn step_strang4<S: StiffSystem<T>>(&mut self, sys: &mut S, w: &mut [Complex<T>], t: T, dt: T) {
        let coarse_scheme = Scheme::StrangSplit;
        let mut coarse = w.to_vec();
        {
            let saved = self.scheme;
            self.scheme = coarse_scheme;
            // full step at dt
            self.cached_dt = None;
            self.step(sys, &mut coarse, t, dt);
            // two half steps on w
            self.cached_dt = None;
            let half = dt * T::from_f64_c(0.5);
            self.step(sys, w, t, half);
            self.step(sys, w, t + half, half);
            self.scheme = saved;
            self.cached_dt = None;
        }
        let third = T::one() / T::from_f64_c(3.0);
        let four = T::from_f64_c(4.0);
        for i in 0..self.dim {
            w[i] = (w[i] * four - coarse[i]) * third;
        }
    }

    fn rk4_nonlinear_substep<S: StiffSystem<T>>(
        &mut self,
        sys: &mut S,
        w: &mut [Complex<T>],
        t: T,
        dt: T,
    ) {
        let n = self.dim;
        let half_dt = dt * T::from_f64_c(0.5);
        let sixth = dt / T::from_f64_c(6.0);
        let two = T::from_f64_c(2.0);
        let mut bufs = std::mem::take(&mut self.scratch);
        let (k1, rest) = bufs.split_at_mut(1);
        let (k2, rest) = rest.split_at_mut(1);
        let (k3, rest) = rest.split_at_mut(1);
        let (k4, rest) = rest.split_at_mut(1);
        let (stage, _) = rest.split_at_mut(1);
        let k1 = &mut k1[0];
        let k2 = &mut k2[0];
        let k3 = &mut k3[0];
        let k4 = &mut k4[0];
        let stage = &mut stage[0];

        sys.nonlinear(w, t, k1);
        for i in 0..n {
            stage[i] = w[i] + k1[i] * half_dt;
        }
        sys.nonlinear(stage, t + half_dt, k2);
        for i in 0..n {
            stage[i] = w[i] + k2[i] * half_dt;
        }
        sys.nonlinear(stage, t + half_dt, k3);
        for i in 0..n {
            stage[i] = w[i] + k3[i] * dt;
        }
        sys.nonlinear(stage, t + dt, k4);
        for i in 0..n {
            w[i] += (k1[i] + (k2[i] + k3[i]) * two + k4[i]) * sixth;
        }
        self.scratch = bufs;
    }
}

/// `phi_1, phi_2, phi_3` at complex `z`, Taylor-stabilised near the origin.
fn phi123<T: Real>(z: Complex<T>) -> (Complex<T>, Complex<T>, Complex<T>) {
    if z.norm() < T::from_f64_c(0.25) {
        // phi_k(z) = sum_{m>=0} z^m / (m + k)!
        let mut p1 = Complex::new(T::zero(), T::zero());
        let mut p2 = p1;
        let mut p3 = p1;
        let mut term = Complex::new(T::one(), T::zero());
        let mut fact = 1.0f64;
        for m in 0..18u32 {
            // term = z^m, fact = m!
            let f1 = T::from_f64_c(fact * f64::from(m + 1));
            let f2 = T::from_f64_c(fact * f64::from(m + 1) * f64::from(m + 2));
            let f3 = T::from_f64_c(fact * f64::from(m + 1) * f64::from(m + 2) * f64::from(m + 3));
            p1 += term / f1;
            p2 += term / f2;
            p3 += term / f3;
            term = term * z;
            fact *= f64::from(m + 1);
        }
        (p1, p2, p3)
    } else {
        let one = Complex::new(T::one(), T::zero());
        let ez = z.exp();
        let z2 = z * z;
        let half = T::from_f64_c(0.5);
        let p1 = (ez - one) / z;
        let p2 = (ez - one - z) / z2;
        let p3 = (ez - one - z - z2 * half) / (z2 * z);
        (p1, p2, p3)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    type C = Complex<f64>;

    /// Scalar test system: w' = -i w + a w (linear phase 1, "nonlinear" a w).
    struct Scalar {
        phases: Vec<f64>,
        a: C,
    }
    impl StiffSystem<f64> for Scalar {
        fn linear_phases(&self) -> &[f64] {
            &self.phases
        }
        fn nonlinear(&mut self, w: &[C], _t: f64, out: &mut [C]) {
            out[0] = self.a * w[0];
        }
    }

    #[test]
    fn phi_functions_match_series_and_formula() {
        for &x in &[0.2499, 0.2501, 1.0, 10.0] {
            let z = Complex::new(0.0, x);
            let (p1, p2, p3) = phi123::<f64>(z);
            let ez = z.exp();
            assert_relative_eq!(((ez - 1.0) / z).re, p1.re, epsilon = 1e-12);
            assert_relative_eq!(((ez - 1.0) / z).im, p1.im, epsilon = 1e-12);
            assert!(((ez - 1.0 - z) / (z * z) - p2).norm() < 1e-10);
            assert!(((ez - 1.0 - z - z * z * 0.5) / (z * z * z) - p3).norm() < 1e-8);
        }
        let (p1, p2, p3) = phi123::<f64>(Complex::new(0.0, 0.0));
        assert_relative_eq!(p1.re, 1.0, epsilon = 1e-15);
        assert_relative_eq!(p2.re, 0.5, epsilon = 1e-15);
        assert_relative_eq!(p3.re, 1.0 / 6.0, epsilon = 1e-15);
    }

    #[test]
    fn exact_linear_problem_solved_exactly() {
        // a = 0: every scheme applies the exact phase
        for scheme in [Scheme::LawsonRk4, Scheme::EtdRk4, Scheme::StrangSplit, Scheme::StrangSplit4]
        {
            let mut sys = Scalar { phases: vec![2.0], a: C::new(0.0, 0.0) };
            let mut stepper = Stepper::new(scheme, 1);
            let mut w = vec![C::new(1.0, 0.0)];
            let dt = 0.1;
            for k in 0..10 {
                stepper.step(&mut sys, &mut w, k as f64 * dt, dt);
            }
            let want = C::from_polar(1.0, -2.0);
            assert!((w[0] - want).norm() < 1e-13, "{scheme:?}");
        }
    }

    #[test]
    fn convergence_orders() {
        // w' = -i w + (0.3 - 0.1 i) w has exact solution exp((0.3 - 1.1 i) t)
        let lam = C::new(0.3, -1.1);
        let run = |scheme: Scheme, steps: usize| -> f64 {
            let mut sys = Scalar { phases: vec![1.0], a: C::new(0.3, -0.1) };
            let mut stepper = Stepper::new(scheme, 1);
            let mut w = vec![C::new(1.0, 0.0)];
            let dt = 1.0 / steps as f64;
            for k in 0..steps {
                stepper.step(&mut sys, &mut w, k as f64 * dt, dt);
            }
            (w[0] - (lam * 1.0).exp()).norm()
        };
        for (scheme, min_order) in [
            (Scheme::LawsonRk4, 3.7),
            (Scheme::EtdRk4, 3.7),
            (Scheme::StrangSplit, 1.8),
            (Scheme::StrangSplit4, 3.7),
        ] {
            let e1 = run(scheme, 16);
            let e2 = run(scheme, 32);
            let order = (e1 / e2).log2();
            assert!(order > min_order, "{scheme:?}: observed order {order}");
        }
    }

    #[test]
    fn time_dependent_forcing_is_sampled_at_stage_times() {
        // w' = -i w + exp(i t): compare against the closed form
        // w(t) = e^{-it} (w0 + integral of e^{2is} ds)
        struct Forced {
            phases: Vec<f64>,
        }
        impl StiffSystem<f64> for Forced {
            fn linear_phases(&self) -> &[f64] {
                &self.phases
            }
            fn nonlinear(&mut self, _w: &[C], t: f64, out: &mut [C]) {
                out[0] = C::from_polar(1.0, t);
            }
        }
        let t_end = 2.0f64;
        let exact = C::from_polar(1.0, -t_end)
            * (C::new(1.0, 0.0)
                + (C::from_polar(1.0, 2.0 * t_end) - 1.0) / C::new(0.0, 2.0));
        for scheme in [Scheme::LawsonRk4, Scheme::EtdRk4] {
            let mut sys = Forced { phases: vec![1.0] };
            let mut stepper = Stepper::new(scheme, 1);
            let mut w = vec![C::new(1.0, 0.0)];
            let steps = 200;
            let dt = t_end / steps as f64;
            for k in 0..steps {
                stepper.step(&mut sys, &mut w, k as f64 * dt, dt);
            }
            assert!((w[0] - exact).norm() < 1e-8, "{scheme:?}: {}", (w[0] - exact).norm());
        }
    }
}
