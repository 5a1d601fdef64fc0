//! Study drivers: one module per CLI subcommand.

pub mod decay;
pub mod energy;
pub mod highfreq;
pub mod kernel;
pub mod linear;
pub mod main_convergence;
pub mod remainder;
pub mod single;

use crate::report::SweepPoint;
use std::collections::BTreeMap;

pub(crate) fn sweep_point(x: f64, pairs: &[(&str, f64)]) -> SweepPoint {
    let mut values = BTreeMap::new();
    for (k, v) in pairs {
        values.insert((*k).to_string(), *v);
    }
    SweepPoint { x, values }
}

/// Sorted copy of the epsilon list, largest first (plots and strictness
/// checks read sweeps in decreasing epsilon).
pub(crate) fn eps_descending(eps: &[f64]) -> Vec<f64> {
    let mut v = eps.to_vec();
    v.sort_by(|a, b| b.total_cmp(a));
    v.dedup();
    v
}
