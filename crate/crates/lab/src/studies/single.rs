//! Single-run driver with snapshot dumps: one solve of any route, sampled
//! states written in the binary snapshot format with its JSON sidecar.

use crate::{LabError, Result, RunConfig};
use envelope_core::ansatz::make_profile;
use envelope_core::snapshot::write_snapshots;
use envelope_core::solvers::{
    kg_rescaled_initial_state, solve_amplitude, solve_kg, solve_nls, SolverConfig,
};
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

/// Which evolution a `solve` run integrates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Route {
    /// Rescaled wave equation in half-wave form (field dumped is `W`).
    KgRescaled,
    /// Core/remainder pair (field dumped is the full amplitude `psi + r`).
    Amplitude,
    /// Cubic Schroedinger envelope.
    Nls,
}

impl Route {
    pub fn parse(text: &str) -> Result<Self> {
        match text.to_ascii_lowercase().as_str() {
            "kg-rescaled" => Ok(Route::KgRescaled),
            "amplitude" => Ok(Route::Amplitude),
            "nls" => Ok(Route::Nls),
            other => Err(LabError::Config(format!(
                "unknown route '{other}' (expected kg-rescaled | amplitude | nls)"
            ))),
        }
    }
}

/// Run one solve and dump its sampled states. Returns the payload path.
pub fn run(cfg: &RunConfig, route: Route) -> Result<PathBuf> {
    cfg.validate()?;
    let eps = *cfg.eps.first().ok_or_else(|| LabError::Config("empty epsilon list".into()))?;
    let grid = cfg.envelope_grid(eps)?;
    let psi0 = make_profile(&cfg.profile.to_spec(cfg.seed), &grid, eps)?;
    let dt = eps * eps / cfg.slow_dt_divisor;
    let solver = SolverConfig::new(dt)
        .with_scheme(cfg.scheme)
        .with_samples(cfg.time_samples);
    std::fs::create_dir_all(&cfg.out_dir)
        .map_err(|e| LabError::Io { path: cfg.out_dir.display().to_string(), source: e })?;
    let scheme = format!("{:?}", cfg.scheme).to_ascii_lowercase();
    let path = cfg.out_dir.join(format!("solve-{}-eps{}.bin", label(route), eps));
    match route {
        Route::KgRescaled => {
            let traj = solve_kg(&kg_rescaled_initial_state(&psi0, eps)?, cfg.t_slow, &solver)?;
            let records: Vec<_> = traj.states.iter().map(|s| (s.t, &s.w)).collect();
            write_snapshots(&path, &records, Some(eps), &scheme, traj.meta.dt)?;
        }
        Route::Amplitude => {
            let traj = solve_amplitude(&psi0, eps, cfg.t_slow, &solver, &[])?;
            let fields: Vec<_> = traj.states.iter().map(|s| (s.t, s.amplitude())).collect();
            let records: Vec<_> = fields.iter().map(|(t, f)| (*t, f)).collect();
            write_snapshots(&path, &records, Some(eps), &scheme, traj.meta.dt)?;
        }
        Route::Nls => {
            let nls_cfg = SolverConfig::new(cfg.nls_dt)
                .with_scheme(cfg.nls_scheme)
                .with_samples(cfg.time_samples);
            let traj = solve_nls(&psi0, cfg.t_slow, &nls_cfg)?;
            let records: Vec<_> = traj.states.iter().map(|s| (s.t, &s.psi)).collect();
            let scheme = format!("{:?}", cfg.nls_scheme).to_ascii_lowercase();
            write_snapshots(&path, &records, Some(eps), &scheme, traj.meta.dt)?;
        }
    }
    Ok(path)
}

fn label(route: Route) -> &'static str {
    match route {
        Route::KgRescaled => "kg-rescaled",
        Route::Amplitude => "amplitude",
        Route::Nls => "nls",
    }
}
