//! Result persistence: CSV/JSON tables, SVG plots and a manifest listing
//! every artifact with its content hash. All writes are atomic
//! (write-temp-then-rename) and byte-deterministic for a fixed report.

use crate::fit::fit_line;
use crate::report::{ConvergenceReport, KernelReport};
use crate::svg::LogLogPlot;
use crate::{Format, LabError, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ManifestEntry {
    pub name: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Manifest {
    pub study: String,
    pub config_hash: String,
    pub artifacts: Vec<ManifestEntry>,
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension("tmp-partial");
    std::fs::write(&tmp, bytes)
        .map_err(|e| LabError::Io { path: tmp.display().to_string(), source: e })?;
    std::fs::rename(&tmp, path)
        .map_err(|e| LabError::Io { path: path.display().to_string(), source: e })?;
    Ok(())
}

fn push_artifact(dir: &Path, name: &str, bytes: &[u8], manifest: &mut Manifest) -> Result<()> {
    write_atomic(&dir.join(name), bytes)?;
    manifest.artifacts.push(ManifestEntry {
        name: name.to_string(),
        bytes: bytes.len() as u64,
        sha256: hex::encode(Sha256::digest(bytes)),
    });
    Ok(())
}

/// Render the sweep table: `eps` then every named value in sorted order.
/// Floats use the shortest round-trip representation, so re-parsing the
/// table reproduces the report numbers exactly.
pub fn report_csv(report: &ConvergenceReport) -> String {
    let keys: BTreeSet<&str> =
        report.points.iter().flat_map(|p| p.values.keys().map(|s| s.as_str())).collect();
    let mut out = String::from(report.abscissa.as_str());
    for k in &keys {
        out.push(',');
        out.push_str(k);
    }
    out.push('\n');
    for p in &report.points {
        out.push_str(&format!("{}", p.x));
        for k in &keys {
            out.push(',');
            if let Some(v) = p.values.get(*k) {
                out.push_str(&format!("{v}"));
            }
        }
        out.push('\n');
    }
    out
}

pub fn kernel_csv(report: &KernelReport) -> String {
    let mut out = String::from("eps,eta,sign,tau,xi,value,bound,ratio,converged,panels\n");
    for s in &report.samples {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            s.eps, s.eta, s.sign, s.tau, s.xi, s.value, s.bound, s.ratio, s.converged, s.panels
        ));
    }
    out
}

/// Emit a convergence report in the requested formats plus the manifest.
///
/// An empty report (no sweep points) produces a manifest listing zero data
/// files. Returns the manifest.
pub fn emit_report(
    dir: &Path,
    report: &ConvergenceReport,
    formats: &[Format],
) -> Result<Manifest> {
    std::fs::create_dir_all(dir)
        .map_err(|e| LabError::Io { path: dir.display().to_string(), source: e })?;
    let base = report.study.replace(' ', "-");
    let mut manifest = Manifest {
        study: report.study.clone(),
        config_hash: report.config_hash.clone(),
        artifacts: Vec::new(),
    };
    if !report.points.is_empty() {
        if formats.contains(&Format::Csv) {
            push_artifact(dir, &format!("{base}.csv"), report_csv(report).as_bytes(), &mut manifest)?;
        }
        if formats.contains(&Format::Json) {
            let json = serde_json::to_string_pretty(report)
                .map_err(|e| LabError::Config(e.to_string()))?;
            push_artifact(dir, &format!("{base}.json"), json.as_bytes(), &mut manifest)?;
        }
        if formats.contains(&Format::Svg) {
            for f in &report.fits {
                let pts = report.series(&f.name);
                if pts.len() < 2 {
                    continue;
                }
                let fitted = fit_line(&pts).ok();
                let plot = LogLogPlot {
                    title: &format!("{} : {}", report.study, f.name),
                    x_label: &report.abscissa,
                    y_label: &f.name,
                    points: &pts,
                    fit: fitted,
                    guide: f.prediction.as_ref().map(|p| p.exponent),
                };
                push_artifact(
                    dir,
                    &format!("{base}-{}.svg", f.name.replace('/', "-")),
                    plot.render().as_bytes(),
                    &mut manifest,
                )?;
            }
        }
    }
    let manifest_json =
        serde_json::to_string_pretty(&manifest).map_err(|e| LabError::Config(e.to_string()))?;
    write_atomic(&dir.join(format!("{base}.manifest.json")), manifest_json.as_bytes())?;
    Ok(manifest)
}

/// Emit a kernel report (CSV/JSON only; there is no log-log sweep to plot).
pub fn emit_kernel_report(
    dir: &Path,
    report: &KernelReport,
    formats: &[Format],
) -> Result<Manifest> {
    std::fs::create_dir_all(dir)
        .map_err(|e| LabError::Io { path: dir.display().to_string(), source: e })?;
    let base = report.study.clone();
    let mut manifest = Manifest {
        study: report.study.clone(),
        config_hash: report.config_hash.clone(),
        artifacts: Vec::new(),
    };
    if !report.samples.is_empty() {
        if formats.contains(&Format::Csv) {
            push_artifact(dir, &format!("{base}.csv"), kernel_csv(report).as_bytes(), &mut manifest)?;
        }
        if formats.contains(&Format::Json) {
            let json = serde_json::to_string_pretty(report)
                .map_err(|e| LabError::Config(e.to_string()))?;
            push_artifact(dir, &format!("{base}.json"), json.as_bytes(), &mut manifest)?;
        }
    }
    let manifest_json =
        serde_json::to_string_pretty(&manifest).map_err(|e| LabError::Config(e.to_string()))?;
    write_atomic(&dir.join(format!("{base}.manifest.json")), manifest_json.as_bytes())?;
    Ok(manifest)
}

/// Return the full path of an emitted artifact.
pub fn artifact_path(dir: &Path, name: &str) -> PathBuf {
    dir.join(name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::SweepPoint;
    use std::collections::BTreeMap;

    fn demo_report() -> ConvergenceReport {
        let mut rep = ConvergenceReport::new("demo-study", "sha256:aa", 3);
        for &(eps, v) in &[(0.25, 0.04), (0.125, 0.011)] {
            let mut values = BTreeMap::new();
            values.insert("err".to_string(), v);
            rep.points.push(SweepPoint { x: eps, values });
        }
        rep
    }

    #[test]
    fn csv_round_trips_exact_decimals() {
        let rep = demo_report();
        let csv = report_csv(&rep);
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "eps,err");
        for (line, p) in lines.zip(&rep.points) {
            let mut parts = line.split(',');
            let eps: f64 = parts.next().unwrap().parse().unwrap();
            let err: f64 = parts.next().unwrap().parse().unwrap();
            assert_eq!(eps, p.x);
            assert_eq!(err, p.values["err"]);
        }
    }

    #[test]
    fn empty_report_manifest_has_zero_artifacts() {
        let dir = tempfile::tempdir().unwrap();
        let rep = ConvergenceReport::new("empty", "sha256:bb", 1);
        let manifest = emit_report(
            dir.path(),
            &rep,
            &[Format::Csv, Format::Json, Format::Svg],
        )
        .unwrap();
        assert!(manifest.artifacts.is_empty());
        assert!(dir.path().join("empty.manifest.json").exists());
    }

    #[test]
    fn emission_is_byte_identical_across_runs() {
        let dir1 = tempfile::tempdir().unwrap();
        let dir2 = tempfile::tempdir().unwrap();
        let rep = demo_report();
        emit_report(dir1.path(), &rep, &[Format::Csv, Format::Json]).unwrap();
        emit_report(dir2.path(), &rep, &[Format::Csv, Format::Json]).unwrap();
        for name in ["demo-study.csv", "demo-study.json", "demo-study.manifest.json"] {
            let a = std::fs::read(dir1.path().join(name)).unwrap();
            let b = std::fs::read(dir2.path().join(name)).unwrap();
            assert_eq!(a, b, "{name}");
        }
    }
}
