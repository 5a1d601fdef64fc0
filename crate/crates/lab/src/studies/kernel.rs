//! Kernel-bound study: adaptive quadrature of the two resonance kernel
//! integrals over a `(tau, xi)` sample grid, each sample's value compared
//! against the stated right-hand bound.

use crate::criteria;
use crate::pool::map_ordered;
use crate::quadrature::{kernel_bound, kernel_fixed, kernel_integral, KernelSign};
use crate::report::{CheckResult, KernelReport, KernelSample};
use crate::{LabError, Result, RunConfig};

const GRID_POINTS: usize = 17;
const REL_TOL: f64 = 1e-4;
const MAX_PANELS: usize = 64;

pub fn run(cfg: &RunConfig) -> Result<KernelReport> {
    cfg.validate()?;
    for &eps in &cfg.eps {
        if eps < 1.0 / 32.0 - 1e-12 {
            return Err(LabError::Config(format!(
                "kernel study restricted to eps >= 1/32 (quadrature cost), got {eps}"
            )));
        }
    }
    let mut eps_list = cfg.eps.clone();
    eps_list.sort_by(|a, b| b.total_cmp(a));
    eps_list.dedup();

    // every (eps, sign, tau-row) is independent work
    let mut jobs = Vec::new();
    for &eps in &eps_list {
        for sign in [KernelSign::Plus, KernelSign::Minus] {
            for it in 0..GRID_POINTS {
                jobs.push((eps, sign, it));
            }
        }
    }
    let rows: Vec<Result<Vec<KernelSample>>> = map_ordered(&jobs, |&(eps, sign, it)| {
        let inv_e2 = 1.0 / (eps * eps);
        let center = -sign.center_constant() * inv_e2;
        let tau =
            center + (it as f64 / (GRID_POINTS - 1) as f64 * 2.0 - 1.0) * 4.0 * inv_e2;
        let mut out = Vec::with_capacity(GRID_POINTS);
        for ix in 0..GRID_POINTS {
            let xi_max = 3.0 / (50.0 * eps);
            let xi = (ix as f64 / (GRID_POINTS - 1) as f64 * 2.0 - 1.0) * xi_max;
            let kv = kernel_integral(sign, tau, xi, eps, cfg.eta, REL_TOL, MAX_PANELS)?;
            let bound = kernel_bound(sign, tau, eps, cfg.eta);
            out.push(KernelSample {
                eps,
                eta: cfg.eta,
                sign: sign.as_char(),
                tau,
                xi,
                value: kv.value,
                bound,
                ratio: kv.value / bound,
                converged: kv.converged,
                panels: kv.panels,
            });
        }
        Ok(out)
    });

    let mut samples = Vec::new();
    for row in rows {
        samples.extend(row?);
    }

    let mut report = KernelReport {
        study: "kernel-bound".into(),
        crate_version: env!("CARGO_PKG_VERSION").to_string(),
        config_hash: cfg.hash(),
        eta: cfg.eta,
        samples,
        max_ratio_by_eps: Vec::new(),
        checks: Vec::new(),
    };

    let all_converged = report.samples.iter().all(|s| s.converged);
    report.checks.push(CheckResult {
        name: "quadrature_converged".into(),
        pass: all_converged,
        detail: format!(
            "{} of {} samples converged (non-converged samples are flagged, not silently included)",
            report.samples.iter().filter(|s| s.converged).count(),
            report.samples.len()
        ),
    });
    let all_nonnegative = report.samples.iter().all(|s| s.value >= 0.0);
    report.checks.push(CheckResult {
        name: "integrand_positivity".into(),
        pass: all_nonnegative,
        detail: "every quadrature value nonnegative".into(),
    });

    for &eps in &eps_list {
        let max_ratio = report
            .samples
            .iter()
            .filter(|s| s.eps == eps && s.converged)
            .map(|s| s.ratio)
            .fold(0.0f64, f64::max);
        report.max_ratio_by_eps.push((eps, max_ratio));
    }
    let finite = report.max_ratio_by_eps.iter().all(|&(_, r)| r.is_finite());
    report.checks.push(CheckResult {
        name: "max_ratio_finite".into(),
        pass: finite,
        detail: format!("{:?}", report.max_ratio_by_eps),
    });
    if report.max_ratio_by_eps.len() >= 2 {
        let ratios: Vec<f64> = report.max_ratio_by_eps.iter().map(|&(_, r)| r).collect();
        let spread = ratios.iter().cloned().fold(0.0f64, f64::max)
            / ratios.iter().cloned().fold(f64::INFINITY, f64::min);
        report.checks.push(CheckResult {
            name: "max_ratio_spread".into(),
            pass: spread < criteria::KERNEL_RATIO_SPREAD_MAX,
            detail: format!(
                "max/min of per-eps max ratios = {spread:.3} (threshold {}); per-eps values {:?}",
                criteria::KERNEL_RATIO_SPREAD_MAX, report.max_ratio_by_eps
            ),
        });
    }

    // Fubini self-check: integrating in the swapped order at the resonance
    // sample agrees to quadrature tolerance
    let mut fubini_ok = true;
    let mut fubini_detail = String::new();
    for &eps in &eps_list {
        for sign in [KernelSign::Plus, KernelSign::Minus] {
            let tau = -sign.center_constant() / (eps * eps);
            let a = kernel_fixed(sign, tau, 0.0, eps, cfg.eta, 16, false);
            let b = kernel_fixed(sign, tau, 0.0, eps, cfg.eta, 16, true);
            let rel = (a - b).abs() / a.abs().max(1e-300);
            fubini_ok &= rel <= 1e-3;
            fubini_detail.push_str(&format!("eps {eps} {}: rel gap {rel:.2e}; ", sign.as_char()));
        }
    }
    report.checks.push(CheckResult {
        name: "fubini_symmetry".into(),
        pass: fubini_ok,
        detail: fubini_detail,
    });

    Ok(report)
}
