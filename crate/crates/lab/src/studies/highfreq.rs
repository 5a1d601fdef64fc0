//! High-frequency smallness of the core profile: per epsilon and per cutoff
//! factor delta, the running maximum of the sharp projection
//! `||P_{> delta eps^{-1/3}} psi||_{H_eps^1}` along the envelope flow, plus
//! the ramp-weighted variant of the same cutoff. Smooth-data sweeps must
//! decrease strictly in epsilon; the contaminated probe must not collapse.

use crate::pool::map_ordered;
use crate::report::{CheckResult, ConvergenceReport};
use crate::studies::{eps_descending, sweep_point};
use crate::{LabError, ProfileConfig, Result, RunConfig};
use envelope_core::ansatz::make_profile;
use envelope_core::solvers::{solve_amplitude, SolverConfig, SpectralTracker, TrackComponent};
use envelope_core::spectral::ramp_multiplier;

pub fn run(cfg: &RunConfig) -> Result<ConvergenceReport> {
    cfg.validate()?;
    if cfg.deltas.is_empty() {
        return Err(LabError::Config("highfreq-core needs a nonempty delta list".into()));
    }
    let eps_list = eps_descending(&cfg.eps);

    let outcomes: Vec<Result<Vec<(String, f64)>>> =
        map_ordered(&eps_list, |&eps| run_one(cfg, eps));

    let mut report = ConvergenceReport::new("highfreq-core", &cfg.hash(), cfg.seed);
    for (&eps, out) in eps_list.iter().zip(outcomes) {
        match out {
            Ok(vals) => {
                let pairs: Vec<(&str, f64)> =
                    vals.iter().map(|(k, v)| (k.as_str(), *v)).collect();
                report.points.push(sweep_point(eps, &pairs));
            }
            Err(e) => report.failures.push(format!("eps = {eps}: {e}")),
        }
    }

    let contaminated = matches!(cfg.profile, ProfileConfig::Contaminated { .. });
    for &delta in &cfg.deltas {
        let name = format!("sharp_proj_d{delta}");
        let series = report.series(&name);
        if series.len() >= 2 {
            let decreasing = series.windows(2).all(|w| w[1].1 < w[0].1);
            report.checks.push(CheckResult {
                name: format!("strict_decrease_d{delta}"),
                pass: decreasing,
                detail: format!("{:?}", series.iter().map(|p| p.1).collect::<Vec<_>>()),
            });
            let first = series.first().unwrap().1;
            let last = series.last().unwrap().1;
            let bounded = last >= 0.25 * first;
            report.checks.push(CheckResult {
                name: format!("bounded_below_d{delta}"),
                pass: bounded,
                detail: format!("first {first:.4e}, last {last:.4e}"),
            });
            // ramp variant is recorded alongside; for smooth data it must
            // decrease as well
            let ramp = report.series(&format!("ramp_d{delta}"));
            if !contaminated && ramp.len() >= 2 {
                let dec = ramp.windows(2).all(|w| w[1].1 < w[0].1);
                report.checks.push(CheckResult {
                    name: format!("ramp_decrease_d{delta}"),
                    pass: dec,
                    detail: format!("{:?}", ramp.iter().map(|p| p.1).collect::<Vec<_>>()),
                });
            }
        }
    }
    if report.points.is_empty() && !report.failures.is_empty() {
        return Err(LabError::Numerical(report.failures.join("; ")));
    }
    Ok(report)
}

fn run_one(cfg: &RunConfig, eps: f64) -> Result<Vec<(String, f64)>> {
    let grid = cfg.envelope_grid(eps)?;
    let psi0 = make_profile(&cfg.profile.to_spec(cfg.seed), &grid, eps)?;
    let dt = eps * eps / cfg.slow_dt_divisor;
    let solver = SolverConfig::new(dt)
        .with_scheme(cfg.scheme)
        .with_samples(cfg.time_samples);
    let mut trackers = Vec::new();
    for &delta in &cfg.deltas {
        let cutoff = delta * eps.powf(-1.0 / 3.0);
        trackers.push(SpectralTracker::weighted(
            format!("sharp_proj_d{delta}"),
            &grid,
            TrackComponent::Core,
            1.0,
            eps,
            move |xi| if xi.abs() > cutoff { 1.0 } else { 0.0 },
        ));
        trackers.push(SpectralTracker::weighted(
            format!("ramp_d{delta}"),
            &grid,
            TrackComponent::Core,
            1.0,
            eps,
            move |xi| ramp_multiplier(xi, cutoff),
        ));
    }
    let traj = solve_amplitude(&psi0, eps, cfg.t_slow, &solver, &trackers)?;
    Ok(traj.meta.tracked.iter().map(|t| (t.name.clone(), t.max)).collect())
}
