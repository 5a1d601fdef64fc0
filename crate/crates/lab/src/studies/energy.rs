//! Energy-conservation study: the conserved functional of the rescaled wave
//! flow along the full slow horizon, with a dt-refinement factor
//! certifying the integrator's order.

use crate::criteria;
use crate::pool::map_ordered;
use crate::report::{CheckResult, ConvergenceReport};
use crate::studies::{eps_descending, sweep_point};
use crate::{LabError, Result, RunConfig};
use envelope_core::ansatz::make_profile;
use envelope_core::solvers::{kg_rescaled_initial_state, solve_kg, SolverConfig};

pub fn run(cfg: &RunConfig) -> Result<ConvergenceReport> {
    cfg.validate()?;
    let eps_list = eps_descending(&cfg.eps);

    let outcomes: Vec<Result<(f64, f64)>> = map_ordered(&eps_list, |&eps| {
        let grid = cfg.envelope_grid(eps)?;
        let psi0 = make_profile(&cfg.profile.to_spec(cfg.seed), &grid, eps)?;
        let state0 = kg_rescaled_initial_state(&psi0, eps)?;
        let dt = eps * eps / cfg.slow_dt_divisor;
        let run_at = |dt: f64| -> Result<f64> {
            let solver = SolverConfig::new(dt)
                .with_scheme(cfg.scheme)
                .with_samples(cfg.time_samples);
            let traj = solve_kg(&state0, cfg.t_slow, &solver)?;
            Ok(traj.meta.max_rel_energy_drift.unwrap_or(f64::NAN))
        };
        Ok((run_at(dt)?, run_at(dt / 2.0)?))
    });

    let mut report = ConvergenceReport::new("energy-drift", &cfg.hash(), cfg.seed);
    for (&eps, out) in eps_list.iter().zip(outcomes) {
        match out {
            Ok((drift, drift_half)) => {
                let factor = if drift_half > 0.0 { drift / drift_half } else { f64::INFINITY };
                report.points.push(sweep_point(
                    eps,
                    &[
                        ("energy_drift", drift),
                        ("energy_drift_half_dt", drift_half),
                        ("refinement_factor", factor),
                    ],
                ));
                report.checks.push(CheckResult {
                    name: format!("drift_within_tolerance_eps{eps}"),
                    pass: drift <= criteria::ENERGY_DRIFT_MAX,
                    detail: format!("drift {drift:.3e} against {}", criteria::ENERGY_DRIFT_MAX),
                });
                report.checks.push(CheckResult {
                    name: format!("refinement_factor_eps{eps}"),
                    pass: factor >= criteria::ORDER_FACTOR_MIN,
                    detail: format!(
                        "halving dt reduced the drift by {factor:.1}x (needs >= {})",
                        criteria::ORDER_FACTOR_MIN
                    ),
                });
            }
            Err(e) => report.failures.push(format!("eps = {eps}: {e}")),
        }
    }
    if report.points.is_empty() && !report.failures.is_empty() {
        return Err(LabError::Numerical(report.failures.join("; ")));
    }
    Ok(report)
}
