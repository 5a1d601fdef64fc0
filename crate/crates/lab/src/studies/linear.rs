//! Linear-flow convergence study: the sup over a fixed time window of the
//! `L^2` gap between the rescaled wave propagator and its Schroedinger
//! limit, swept over epsilon and fitted against the `s/3` rate.

use crate::criteria::{self, in_band};
use crate::fit::fit_slope;
use crate::pool::map_ordered;
use crate::report::{ConvergenceReport, FitResult, RatePrediction};
use crate::studies::{eps_descending, sweep_point};
use crate::{ProfileConfig, Result, RunConfig};
use envelope_core::ansatz::make_profile;
use envelope_core::propagators::linear_deviation;
use envelope_core::Grid64;

pub fn run(cfg: &RunConfig) -> Result<ConvergenceReport> {
    cfg.validate()?;
    let eps_list = eps_descending(&cfg.eps);
    // the rate probes frequencies ~ eps^{-1/3}: resolve a generous band
    let grid = Grid64::new(cfg.periods, cfg.slow_modes.max(4096))?;

    let deviations: Vec<Result<f64>> = map_ordered(&eps_list, |&eps| {
        let psi0 = make_profile(&cfg.profile.to_spec(cfg.seed), &grid, eps)?;
        linear_deviation(&psi0, eps, cfg.t_slow, cfg.time_samples.max(129)).map_err(Into::into)
    });

    let mut report = ConvergenceReport::new("converge-linear", &cfg.hash(), cfg.seed);
    for (&eps, dev) in eps_list.iter().zip(deviations) {
        match dev {
            Ok(d) => report.points.push(sweep_point(eps, &[("linear_deviation", d)])),
            Err(e) => report.failures.push(format!("eps = {eps}: {e}")),
        }
    }

    let series = report.series("linear_deviation");
    if series.len() >= 3 {
        let (slope, residual) = fit_slope(&series)?;
        let (prediction, pass) = match cfg.profile {
            ProfileConfig::FourierTail { s, .. } => (
                Some(RatePrediction {
                    exponent: s / 3.0,
                    label: format!("finite-regularity linear rate s/3 with s = {s}"),
                }),
                if (s - 1.5).abs() < 1e-12 {
                    Some(in_band(slope, criteria::LINEAR_TAIL_SLOPE))
                } else {
                    None
                },
            ),
            _ => (
                Some(RatePrediction {
                    exponent: 1.0,
                    label: "Taylor-dominated regime for smooth data (bounded window)".into(),
                }),
                Some(slope >= criteria::LINEAR_SMOOTH_SLOPE_MIN),
            ),
        };
        report.fits.push(FitResult {
            name: "linear_deviation".into(),
            slope,
            residual,
            prediction,
            pass,
        });
    }
    Ok(report)
}
