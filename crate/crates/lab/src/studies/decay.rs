//! Sup-norm dispersive decay probe: the band-projected near-delta evolved
//! under the rescaled wave propagator, sup-norm sampled at log-spaced times
//! and fitted against the stationary-phase `t^{-1/2}` prediction.

use crate::criteria::{self, in_band};
use crate::fit::fit_slope;
use crate::report::{ConvergenceReport, FitResult, RatePrediction};
use crate::studies::sweep_point;
use crate::{LabError, Result, RunConfig};
use envelope_core::propagators::decay_probe;
use envelope_core::Grid64;

/// Fixed probe geometry: band `N = 1`, times in `[1e2, 1e4]`.
pub const BAND: f64 = 1.0;
pub const T_MIN: f64 = 1e2;
pub const T_MAX: f64 = 1e4;
const TIME_POINTS: usize = 17;

pub fn run(cfg: &RunConfig) -> Result<ConvergenceReport> {
    cfg.validate()?;
    let eps = *cfg.eps.first().ok_or_else(|| LabError::Config("empty epsilon list".into()))?;
    // the torus must outrun the fastest group speed (~3) for t <= T_MAX
    let grid = Grid64::new(4096, 65536)?;
    let times: Vec<f64> = (0..TIME_POINTS)
        .map(|k| T_MIN * (T_MAX / T_MIN).powf(k as f64 / (TIME_POINTS - 1) as f64))
        .collect();
    let values = decay_probe(&grid, BAND, eps, &times)?;

    let mut report = ConvergenceReport::new("decay-probe", &cfg.hash(), cfg.seed);
    report.abscissa = "t".into();
    for (&t, &v) in times.iter().zip(&values) {
        report.points.push(sweep_point(t, &[("sup_norm", v)]));
    }
    let series = report.series("sup_norm");
    let (slope, residual) = fit_slope(&series)?;
    report.fits.push(FitResult {
        name: "sup_norm".into(),
        slope,
        residual,
        prediction: Some(RatePrediction {
            exponent: -0.5,
            label: "stationary-phase sup-norm decay t^{-1/2}".into(),
        }),
        pass: Some(in_band(slope, criteria::DECAY_SLOPE)),
    });
    Ok(report)
}
