//! Serializable study results.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Predicted convergence exponent with a descriptive label stating which
/// estimate it comes from.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RatePrediction {
    pub exponent: f64,
    pub label: String,
}

/// One abscissa of a sweep; named values keep a deterministic order.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SweepPoint {
    pub x: f64,
    pub values: BTreeMap<String, f64>,
}

/// A fitted log-log slope over the sweep.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct FitResult {
    pub name: String,
    pub slope: f64,
    pub residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prediction: Option<RatePrediction>,
    /// Pass/fail against the pinned acceptance band, when one applies.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pass: Option<bool>,
}

/// A named boolean check with human-readable detail.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

/// Full study report; serializes losslessly to JSON (floats round-trip by
/// shortest representation).
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ConvergenceReport {
    pub study: String,
    pub crate_version: String,
    pub config_hash: String,
    pub seed: u64,
    /// Name of the sweep abscissa (`eps` for parameter sweeps, `t` for the
    /// decay probe).
    pub abscissa: String,
    pub points: Vec<SweepPoint>,
    /// Fits are only recorded when at least three sweep points exist.
    pub fits: Vec<FitResult>,
    pub checks: Vec<CheckResult>,
    /// Per-epsilon solver failures (study continues past them).
    pub failures: Vec<String>,
}

impl ConvergenceReport {
    pub fn new(study: &str, config_hash: &str, seed: u64) -> Self {
        Self {
            study: study.to_string(),
            crate_version: env!("CARGO_PKG_VERSION").to_string(),
            config_hash: config_hash.to_string(),
            seed,
            abscissa: "eps".to_string(),
            points: Vec::new(),
            fits: Vec::new(),
            checks: Vec::new(),
            failures: Vec::new(),
        }
    }

    /// Pairs `(x, values[name])` for the points carrying `name`.
    pub fn series(&self, name: &str) -> Vec<(f64, f64)> {
        self.points
            .iter()
            .filter_map(|p| p.values.get(name).map(|&v| (p.x, v)))
            .collect()
    }

    pub fn all_pass(&self) -> bool {
        self.fits.iter().all(|f| f.pass.unwrap_or(true))
            && self.checks.iter().all(|c| c.pass)
            && self.failures.is_empty()
    }
}

/// One quadrature sample of a kernel integral.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct KernelSample {
    pub eps: f64,
    pub eta: f64,
    /// `+` or `-` branch of the resonance kernel.
    pub sign: char,
    pub tau: f64,
    pub xi: f64,
    /// Quadrature value of the kernel integral (nonnegative).
    pub value: f64,
    /// Right-hand comparison value.
    pub bound: f64,
    pub ratio: f64,
    /// Two successive panel refinements agreed to tolerance.
    pub converged: bool,
    /// Panel count per axis at acceptance.
    pub panels: usize,
}

/// Kernel study output: all samples plus per-epsilon summaries.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct KernelReport {
    pub study: String,
    pub crate_version: String,
    pub config_hash: String,
    pub eta: f64,
    pub samples: Vec<KernelSample>,
    /// `(eps, max ratio over the sample grid)`, ascending in eps.
    pub max_ratio_by_eps: Vec<(f64, f64)>,
    pub checks: Vec<CheckResult>,
}
