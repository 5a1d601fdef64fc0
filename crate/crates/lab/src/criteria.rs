//! Pinned acceptance thresholds used by `--check` and by the acceptance
//! test suite. Every band is fixed here, in code; nothing is deferred to
//! later calibration.

/// Slope band for the limit-rate study with smooth data (target `3/2 - eta`).
pub const MAIN_SMOOTH_SLOPE: (f64, f64) = (1.3, 1.7);
/// Slope band for the limit-rate study with `s = 3/2` tail data
/// (target `s/3 + 1/2 = 1`).
pub const MAIN_ROUGH_SLOPE: (f64, f64) = (0.85, 1.15);
/// Slope band for the linear-flow study with `s = 3/2` tail data
/// (target `s/3 = 1/2`).
pub const LINEAR_TAIL_SLOPE: (f64, f64) = (0.35, 0.65);
/// Smooth-data linear rate is Taylor-dominated: slope at least this.
pub const LINEAR_SMOOTH_SLOPE_MIN: f64 = 0.9;
/// Remainder slope band for smooth data (target `1 - eta`).
pub const REMAINDER_SMOOTH_SLOPE: (f64, f64) = (0.8, 1.2);
/// Remainder slope band for `s = 1/2` tail data (target `s = 1/2`).
pub const REMAINDER_ROUGH_SLOPE: (f64, f64) = (0.35, 0.65);
/// Reduction-inequality headroom: measured remainder must stay within this
/// multiple of `eps^{1-2 eta} + high-frequency core mass`.
pub const REDUCTION_HEADROOM: f64 = 10.0;
/// Relative energy drift ceiling over the full horizon at `eps = 1/8`.
pub const ENERGY_DRIFT_MAX: f64 = 1e-7;
/// Halving dt must shrink the drift (and terminal self-error) at least this.
pub const ORDER_FACTOR_MIN: f64 = 8.0;
/// Schroedinger mass drift per unit slow time.
pub const NLS_MASS_DRIFT_MAX: f64 = 1e-10;
/// Plane-wave closed-form tolerance at `t = 1`.
pub const NLS_PLANE_WAVE_TOL: f64 = 1e-9;
/// Uniform-data wave ODE tolerance at `t = 10`.
pub const KG_UNIFORM_ODE_TOL: f64 = 1e-8;
/// Dual-route agreement: relative L2 gap between the demodulated wave and
/// the core + remainder pair.
pub const DUAL_ROUTE_TOL: f64 = 1e-5;
/// Sup-norm decay slope band (target `-1/2`).
pub const DECAY_SLOPE: (f64, f64) = (-0.55, -0.45);
/// Kernel-ratio stability: max ratio may vary at most this factor between
/// the two reference epsilons.
pub const KERNEL_RATIO_SPREAD_MAX: f64 = 3.0;
/// Exact-arithmetic infrastructure tolerance.
pub const EXACT_TOL: f64 = 1e-12;

/// Inclusive band check.
pub fn in_band(value: f64, band: (f64, f64)) -> bool {
    value >= band.0 && value <= band.1
}
