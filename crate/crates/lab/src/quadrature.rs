//! Tensor Gauss-Legendre quadrature of the resonance kernel integrals.
//!
//! The integrand is
//! `1 / < tau + eps^{-2} (s <1 + eps x1> + <1 + eps x2> + <1 + eps (xi - x1 - x2)>) >^{2(1-eta)}`
//! with `s = +1` or `-1`, over the region where all three convolution
//! frequencies are capped at `1/(50 eps)`. The region is a hexagon; for a
//! fixed outer variable the inner range is an exact interval, so panels
//! never straddle the indicator's edge.

use crate::{LabError, Result};

/// Gauss-Legendre nodes and weights on `[-1, 1]`, computed by Newton
/// iteration on the Legendre recurrence.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(order >= 2);
    let mut nodes = vec![0.0; order];
    let mut weights = vec![0.0; order];
    let n = order;
    for k in 0..n {
        // Chebyshev-like initial guess
        let mut x = (std::f64::consts::PI * (k as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            // Legendre P_n(x) and derivative by recurrence
            let (mut p0, mut p1) = (1.0f64, x);
            for m in 2..=n {
                let p2 = ((2 * m - 1) as f64 * x * p1 - (m - 1) as f64 * p0) / m as f64;
                p0 = p1;
                p1 = p2;
            }
            let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (mut p0, mut p1) = (1.0f64, x);
        for m in 2..=n {
            let p2 = ((2 * m - 1) as f64 * x * p1 - (m - 1) as f64 * p0) / m as f64;
            p0 = p1;
            p1 = p2;
        }
        let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
        nodes[k] = x;
        weights[k] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

/// Which resonance branch: the sign in front of the first bracket.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelSign {
    Plus,
    Minus,
}

impl KernelSign {
    pub fn as_char(self) -> char {
        match self {
            KernelSign::Plus => '+',
            KernelSign::Minus => '-',
        }
    }

    fn factor(self) -> f64 {
        match self {
            KernelSign::Plus => 1.0,
            KernelSign::Minus => -1.0,
        }
    }

    /// Bracket-sum constant at the resonance centre: `2 sqrt2 +- sqrt2`.
    pub fn center_constant(self) -> f64 {
        2.0 * std::f64::consts::SQRT_2 + self.factor() * std::f64::consts::SQRT_2
    }
}

fn bracket(x: f64) -> f64 {
    (1.0 + x * x).sqrt()
}

/// Quadrature outcome for one `(tau, xi)` sample.
#[derive(Debug, Clone, Copy)]
pub struct KernelValue {
    pub value: f64,
    pub converged: bool,
    pub panels: usize,
}

/// Adaptive tensor quadrature of the kernel integral: the panel count per
/// axis doubles until two successive refinements agree to `rel_tol`
/// relative (with a tiny absolute floor), up to `max_panels`.
pub fn kernel_integral(
    sign: KernelSign,
    tau: f64,
    xi: f64,
    eps: f64,
    eta: f64,
    rel_tol: f64,
    max_panels: usize,
) -> Result<KernelValue> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(LabError::Config(format!("eps must lie in (0,1], got {eps}")));
    }
    if !(eta > 0.0 && eta < 0.25) {
        return Err(LabError::Config(format!("eta must lie in (0, 0.25), got {eta}")));
    }
    let mut panels = 4usize;
    let mut prev = kernel_fixed(sign, tau, xi, eps, eta, panels, false);
    loop {
        let next_panels = panels * 2;
        let next = kernel_fixed(sign, tau, xi, eps, eta, next_panels, false);
        let scale = next.abs().max(1e-300);
        if (next - prev).abs() <= rel_tol * scale + 1e-14 {
            return Ok(KernelValue { value: next, converged: true, panels: next_panels });
        }
        if next_panels >= max_panels {
            return Ok(KernelValue { value: next, converged: false, panels: next_panels });
        }
        panels = next_panels;
        prev = next;
    }
}

/// Fixed-panel tensor rule; `swap_order` exchanges which convolution
/// variable is the outer one (a Fubini self-check).
pub fn kernel_fixed(
    sign: KernelSign,
    tau: f64,
    xi: f64,
    eps: f64,
    eta: f64,
    panels: usize,
    swap_order: bool,
) -> f64 {
    let b = 1.0 / (50.0 * eps);
    let (nodes, weights) = gauss_legendre(16);
    let expo = 2.0 * (1.0 - eta);
    let inv_e2 = 1.0 / (eps * eps);
    let s = sign.factor();
    // integrand as a function of (x1, x2) with the sign on the x1 bracket
    let f = |x1: f64, x2: f64| -> f64 {
        let arg = tau
            + inv_e2
                * (s * bracket(1.0 + eps * x1)
                    + bracket(1.0 + eps * x2)
                    + bracket(1.0 + eps * (xi - x1 - x2)));
        (1.0 + arg * arg).powf(-0.5 * expo)
    };
    let mut total = 0.0;
    let hx = 2.0 * b / panels as f64;
    for px in 0..panels {
        let ax = -b + px as f64 * hx;
        for (&nx, &wx) in nodes.iter().zip(&weights) {
            let outer = ax + 0.5 * hx * (nx + 1.0);
            // inner interval from the third-frequency cap
            let lo = (-b).max(xi - outer - b);
            let hi = b.min(xi - outer + b);
            if lo >= hi {
                continue;
            }
            let hy = (hi - lo) / panels as f64;
            let mut inner_sum = 0.0;
            for py in 0..panels {
                let ay = lo + py as f64 * hy;
                for (&ny, &wy) in nodes.iter().zip(&weights) {
                    let inner = ay + 0.5 * hy * (ny + 1.0);
                    let v = if swap_order { f(inner, outer) } else { f(outer, inner) };
                    inner_sum += wy * v;
                }
            }
            total += wx * inner_sum * 0.5 * hy;
        }
    }
    total * 0.5 * hx
}

/// Right-hand comparison value of the kernel estimate:
/// `max over +-1/10 of < tau + (2 sqrt2 +- sqrt2 +- 1/10)/eps^2 >^{-(1-2 eta)}`.
pub fn kernel_bound(sign: KernelSign, tau: f64, eps: f64, eta: f64) -> f64 {
    let c = sign.center_constant();
    let expo = 1.0 - 2.0 * eta;
    let v1 = bracket(tau + (c + 0.1) / (eps * eps)).powf(-expo);
    let v2 = bracket(tau + (c - 0.1) / (eps * eps)).powf(-expo);
    v1.max(v2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gauss_legendre_five_point() {
        let (nodes, weights) = gauss_legendre(5);
        // classical values
        let mut sorted: Vec<(f64, f64)> =
            nodes.iter().cloned().zip(weights.iter().cloned()).collect();
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
        assert_relative_eq!(sorted[0].0, -0.9061798459386640, epsilon = 1e-12);
        assert_relative_eq!(sorted[2].0, 0.0, epsilon = 1e-14);
        assert_relative_eq!(sorted[2].1, 0.5688888888888889, epsilon = 1e-12);
        let total: f64 = weights.iter().sum();
        assert_relative_eq!(total, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let (nodes, weights) = gauss_legendre(8);
        // exact for degree <= 15
        let val: f64 = nodes.iter().zip(&weights).map(|(&x, &w)| w * x.powi(14)).sum();
        assert_relative_eq!(val, 2.0 / 15.0, epsilon = 1e-12);
    }

    #[test]
    fn kernel_positive_and_convergent() {
        let eps = 0.125;
        let eta = 0.05;
        for sign in [KernelSign::Plus, KernelSign::Minus] {
            let tau = -sign.center_constant() / (eps * eps);
            let kv = kernel_integral(sign, tau, 0.0, eps, eta, 1e-4, 64).unwrap();
            assert!(kv.converged);
            assert!(kv.value >= 0.0);
        }
    }

    #[test]
    fn fubini_symmetry() {
        // swapping the integration order leaves the value unchanged to
        // quadrature tolerance, including the asymmetric minus branch
        let eps = 0.125;
        let eta = 0.05;
        for sign in [KernelSign::Plus, KernelSign::Minus] {
            for &xi in &[0.0, 0.05, -0.11] {
                let tau = -sign.center_constant() / (eps * eps) + 1.7;
                let a = kernel_fixed(sign, tau, xi, eps, eta, 16, false);
                let b = kernel_fixed(sign, tau, xi, eps, eta, 16, true);
                assert_relative_eq!(a, b, max_relative = 1e-6);
            }
        }
    }

    #[test]
    fn off_resonance_value_matches_area_estimate() {
        // far from resonance the integrand is nearly constant: value ~
        // area * <arg>^{-2(1-eta)}; check within a few percent
        let eps = 0.125f64;
        let eta = 0.05;
        let b = 1.0 / (50.0 * eps);
        let delta = 30.0; // distance from resonance in bracket units
        let tau = -KernelSign::Plus.center_constant() / (eps * eps) + delta;
        let kv = kernel_integral(KernelSign::Plus, tau, 0.0, eps, eta, 1e-6, 128).unwrap();
        let hex_area = 3.0 * b * b;
        let approx = hex_area * (1.0 + delta * delta).powf(-(1.0 - eta));
        assert!((kv.value / approx - 1.0).abs() < 0.05, "{} vs {approx}", kv.value);
    }
}
