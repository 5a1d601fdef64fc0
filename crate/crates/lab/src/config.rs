//! Run configuration: defaults, file loading (JSON or TOML), validation and
//! content hashing.

use crate::{LabError, Result};
use envelope_core::ansatz::{ProfileFamily, ProfileSpec};
use envelope_core::schemes::Scheme;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

/// Study selector, one per CLI subcommand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Study {
    ConvergeMain,
    ConvergeLinear,
    RemainderDecay,
    HighfreqCore,
    KernelBound,
    EnergyDrift,
    DecayProbe,
    Solve,
}

impl Study {
    pub fn name(self) -> &'static str {
        match self {
            Study::ConvergeMain => "converge-main",
            Study::ConvergeLinear => "converge-linear",
            Study::RemainderDecay => "remainder-decay",
            Study::HighfreqCore => "highfreq-core",
            Study::KernelBound => "kernel-bound",
            Study::EnergyDrift => "energy-drift",
            Study::DecayProbe => "decay-probe",
            Study::Solve => "solve",
        }
    }
}

/// Output format selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

/// Profile description in configuration files and on the command line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum ProfileConfig {
    Gaussian { width: f64 },
    Sech { width: f64 },
    FourierTail { s: f64, cutoff: Option<f64> },
    Contaminated { contamination: f64, freq_factor: f64 },
}

impl ProfileConfig {
    /// Parse the CLI shorthand: `gaussian`, `sech`, `tail:<s>`,
    /// `contaminated`.
    pub fn parse(text: &str) -> Result<Self> {
        let lower = text.to_ascii_lowercase();
        if lower == "gaussian" {
            return Ok(Self::Gaussian { width: 1.0 });
        }
        if lower == "sech" {
            return Ok(Self::Sech { width: 1.0 });
        }
        if lower == "contaminated" {
            return Ok(Self::Contaminated { contamination: 0.25, freq_factor: 3.0 });
        }
        if let Some(s) = lower.strip_prefix("tail:") {
            let s: f64 = s
                .parse()
                .map_err(|_| LabError::Config(format!("bad tail exponent in profile '{text}'")))?;
            if !(s > 0.0) {
                return Err(LabError::Config("tail exponent must be positive".into()));
            }
            return Ok(Self::FourierTail { s, cutoff: None });
        }
        Err(LabError::Config(format!(
            "unknown profile '{text}' (expected gaussian | sech | tail:<s> | contaminated)"
        )))
    }

    pub fn to_spec(&self, seed: u64) -> ProfileSpec<f64> {
        let family = match *self {
            ProfileConfig::Gaussian { width } => ProfileFamily::Gaussian { width },
            ProfileConfig::Sech { width } => ProfileFamily::Sech { width },
            ProfileConfig::FourierTail { s, cutoff } => ProfileFamily::FourierTail { s, cutoff },
            ProfileConfig::Contaminated { contamination, freq_factor } => {
                ProfileFamily::HighfreqContaminated { contamination, freq_factor }
            }
        };
        ProfileSpec { family, amplitude: 1.0, seed }
    }

    /// Regularity exponent the rate predictions use (`None` = smooth).
    pub fn sobolev_exponent(&self) -> Option<f64> {
        match *self {
            ProfileConfig::FourierTail { s, .. } => Some(s),
            _ => None,
        }
    }

    pub fn label(&self) -> String {
        match *self {
            ProfileConfig::Gaussian { .. } => "gaussian".into(),
            ProfileConfig::Sech { .. } => "sech".into(),
            ProfileConfig::FourierTail { s, .. } => format!("tail-s{s}"),
            ProfileConfig::Contaminated { .. } => "contaminated".into(),
        }
    }
}

/// Sweep configuration. Defaults follow the shipped studies; every field can
/// be overridden from a JSON/TOML file or the CLI.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    /// Epsilon sweep (descending or ascending; stored as given).
    pub eps: Vec<f64>,
    pub profile: ProfileConfig,
    /// Slow-time horizon `T` (fixed across the sweep).
    pub t_slow: f64,
    /// Slow domain periods `P` (length `2 pi P`).
    pub periods: u64,
    /// Slow-grid points.
    pub slow_modes: usize,
    /// Envelope/rescaled solvers use `dt = eps^2 / slow_dt_divisor`.
    pub slow_dt_divisor: f64,
    /// Physical wave solver step (its clock runs to `T/eps^2`).
    pub physical_dt: f64,
    /// Schroedinger solver step on the slow clock.
    pub nls_dt: f64,
    pub scheme: Scheme,
    pub nls_scheme: Scheme,
    /// Cutoff factors `delta` for the high-frequency studies.
    pub deltas: Vec<f64>,
    /// Rate-shaving parameter.
    pub eta: f64,
    /// Snapshots per run (time samples for sup norms = this count).
    pub time_samples: usize,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub formats: Vec<Format>,
    /// Enforce acceptance thresholds (exit code 4 on failure).
    pub check: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            eps: vec![0.25, 0.125, 0.0625],
            profile: ProfileConfig::Gaussian { width: 1.0 },
            t_slow: 1.0,
            periods: 16,
            slow_modes: 1024,
            slow_dt_divisor: 16.0,
            physical_dt: 1.0 / 16.0,
            nls_dt: 1.0 / 4096.0,
            scheme: Scheme::LawsonRk4,
            nls_scheme: Scheme::StrangSplit4,
            deltas: vec![0.5, 1.0, 2.0],
            eta: 0.05,
            time_samples: 65,
            seed: 1,
            out_dir: PathBuf::from("out"),
            formats: vec![Format::Csv, Format::Json, Format::Svg],
            check: false,
        }
    }
}

impl RunConfig {
    /// Load from a JSON or TOML file, decided by extension (``.json`` /
    /// anything else tries TOML).
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| LabError::Io { path: path.display().to_string(), source: e })?;
        let cfg: RunConfig = if path.extension().and_then(|s| s.to_str()) == Some("json") {
            serde_json::from_str(&text)
                .map_err(|e| LabError::Config(format!("{}: {e}", path.display())))?
        } else {
            toml::from_str(&text)
                .map_err(|e| LabError::Config(format!("{}: {e}", path.display())))?
        };
        Ok(cfg)
    }

    /// Commensurability and sanity validation shared by all studies.
    pub fn validate(&self) -> Result<()> {
        if self.eps.is_empty() {
            return Err(LabError::Config("epsilon list is empty".into()));
        }
        for &eps in &self.eps {
            if !(eps > 0.0 && eps <= 1.0) {
                return Err(LabError::Config(format!("epsilon {eps} outside (0, 1]")));
            }
            // the amplitude-system phases at 2/eps (hence 4/eps) must sit on
            // the slow lattice: 2 P / eps integral
            let steps = 2.0 * self.periods as f64 / eps;
            if (steps - steps.round()).abs() > 1e-9 * steps.max(1.0) {
                return Err(LabError::Config(format!(
                    "epsilon {eps} is incommensurate: 2P/eps = {steps} is not an integer"
                )));
            }
        }
        if !(self.t_slow > 0.0) {
            return Err(LabError::Config("t_slow must be positive".into()));
        }
        if self.slow_modes < 16 || !self.slow_modes.is_power_of_two() {
            return Err(LabError::Config("slow_modes must be a power of two >= 16".into()));
        }
        if !(self.eta > 0.0 && self.eta < 0.25) {
            return Err(LabError::Config(format!("eta must lie in (0, 0.25), got {}", self.eta)));
        }
        if self.time_samples < 2 {
            return Err(LabError::Config("time_samples must be at least 2".into()));
        }
        if self.slow_dt_divisor < 8.0 {
            return Err(LabError::Config(
                "slow_dt_divisor must be >= 8 (dt <= eps^2/8 resolves the forcing)".into(),
            ));
        }
        Ok(())
    }

    /// The wave-packet stays clear of its own wake: the physical domain must
    /// hold the packet plus its group-velocity excursion,
    /// `L_phys >= 2 (packet width + c_g T / eps^2)`.
    pub fn validate_physical_span(&self, eps: f64, width: f64) -> Result<()> {
        let l_phys = 2.0 * std::f64::consts::PI * self.periods as f64 / eps;
        let packet = 4.0 * width / eps;
        let travel = self.t_slow / (std::f64::consts::SQRT_2 * eps * eps);
        if l_phys < 2.0 * (packet + travel) {
            return Err(LabError::Config(format!(
                "physical domain {l_phys:.1} too short for packet {packet:.1} + travel {travel:.1} at eps = {eps}"
            )));
        }
        Ok(())
    }

    /// SHA-256 over the canonical JSON of the configuration.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        format!("sha256:{}", hex::encode(Sha256::digest(json.as_bytes())))
    }

    /// Envelope grid for a given epsilon: Nyquist must clear the `4/eps`
    /// band plus bandwidth margin.
    pub fn envelope_grid(&self, eps: f64) -> Result<envelope_core::Grid64> {
        let needed = 2.0 * self.periods as f64 * (4.0 / eps + 32.0);
        let n = (needed.ceil() as usize).next_power_of_two().max(self.slow_modes);
        envelope_core::Grid64::new(self.periods, n).map_err(Into::into)
    }

    /// Slow grid for envelope-only work (profiles, NLS runs).
    pub fn slow_grid(&self) -> Result<envelope_core::Grid64> {
        envelope_core::Grid64::new(self.periods, self.slow_modes).map_err(Into::into)
    }

    /// Physical grid refining the slow one by `1/eps`.
    pub fn physical_grid(&self, eps: f64) -> Result<envelope_core::Grid64> {
        let periods = self.periods as f64 / eps;
        let rounded = periods.round();
        if (periods - rounded).abs() > 1e-9 {
            return Err(LabError::Config(format!(
                "P/eps = {periods} must be an integer to carry the carrier"
            )));
        }
        let n = ((self.slow_modes as f64 / eps).round() as usize).next_power_of_two();
        envelope_core::Grid64::new(rounded as u64, n).map_err(Into::into)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        RunConfig::default().validate().unwrap();
    }

    #[test]
    fn incommensurate_eps_rejected() {
        let cfg = RunConfig { eps: vec![0.3], ..Default::default() };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn profile_shorthand() {
        assert_eq!(ProfileConfig::parse("gaussian").unwrap(), ProfileConfig::Gaussian {
            width: 1.0
        });
        assert_eq!(
            ProfileConfig::parse("tail:1.5").unwrap(),
            ProfileConfig::FourierTail { s: 1.5, cutoff: None }
        );
        assert!(ProfileConfig::parse("tail:-1").is_err());
        assert!(ProfileConfig::parse("mystery").is_err());
    }

    #[test]
    fn hash_changes_with_config() {
        let a = RunConfig::default();
        let b = RunConfig { seed: 2, ..Default::default() };
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash(), RunConfig::default().hash());
    }

    #[test]
    fn toml_and_json_load() {
        let dir = tempfile::tempdir().unwrap();
        let toml_path = dir.path().join("cfg.toml");
        std::fs::write(&toml_path, "eps = [0.5, 0.25]\nseed = 9\n").unwrap();
        let cfg = RunConfig::load(&toml_path).unwrap();
        assert_eq!(cfg.eps, vec![0.5, 0.25]);
        assert_eq!(cfg.seed, 9);

        let json_path = dir.path().join("cfg.json");
        std::fs::write(&json_path, r#"{"eps": [0.125], "eta": 0.1}"#).unwrap();
        let cfg = RunConfig::load(&json_path).unwrap();
        assert_eq!(cfg.eps, vec![0.125]);
        assert_eq!(cfg.eta, 0.1);
    }

    #[test]
    fn physical_span_guard() {
        let cfg = RunConfig::default();
        cfg.validate_physical_span(0.0625, 1.0).unwrap();
        assert!(cfg.validate_physical_span(1.0 / 128.0, 1.0).is_err());
    }
}
