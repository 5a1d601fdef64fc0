//! Binary snapshot dumps with a JSON sidecar.
//!
//! Record layout (little endian): `t` as an 8-byte float, `n` as a 4-byte
//! unsigned count, then `n` complex pairs of 8-byte floats. Records are
//! concatenated in one `.bin` file; the sidecar carries grid and solver
//! metadata plus a SHA-256 content hash of the binary payload.

use crate::{CoreError, Field, Real, Result, TorusGrid};
use num_complex::Complex;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::io::{Read, Write};
use std::path::Path;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SnapshotSidecar {
    pub format_version: u32,
    pub grid_periods: u64,
    pub grid_points: usize,
    pub epsilon: Option<f64>,
    pub scheme: String,
    pub dt: f64,
    pub record_count: usize,
    /// `sha256:<hex>` over the binary payload.
    pub content_hash: String,
}

fn io_err(path: &Path, source: std::io::Error) -> CoreError {
    CoreError::Io { path: path.display().to_string(), source }
}

/// Write a series of `(t, field)` records and the sidecar.
///
/// The sidecar lands next to the payload with `.json` appended to the file
/// name. Returns the sidecar value.
pub fn write_snapshots<T: Real>(
    path: &Path,
    records: &[(T, &Field<T>)],
    epsilon: Option<f64>,
    scheme: &str,
    dt: f64,
) -> Result<SnapshotSidecar> {
    let mut payload = Vec::new();
    let mut grid: Option<&TorusGrid<T>> = None;
    for (t, field) in records {
        if let Some(g) = grid {
            if g != field.grid() {
                return Err(CoreError::GridMismatch { left: g.n(), right: field.n() });
            }
        } else {
            grid = Some(field.grid());
        }
        payload.extend_from_slice(&t.to_f64().unwrap().to_le_bytes());
        payload.extend_from_slice(&(field.n() as u32).to_le_bytes());
        for c in field.values() {
            payload.extend_from_slice(&c.re.to_f64().unwrap().to_le_bytes());
            payload.extend_from_slice(&c.im.to_f64().unwrap().to_le_bytes());
        }
    }
    let grid = grid.ok_or_else(|| CoreError::SnapshotFormat("no records to write".into()))?;
    let hash = Sha256::digest(&payload);
    let sidecar = SnapshotSidecar {
        format_version: 1,
        grid_periods: grid.periods(),
        grid_points: grid.n(),
        epsilon,
        scheme: scheme.to_string(),
        dt,
        record_count: records.len(),
        content_hash: format!("sha256:{}", hex::encode(hash)),
    };
    let mut f = std::fs::File::create(path).map_err(|e| io_err(path, e))?;
    f.write_all(&payload).map_err(|e| io_err(path, e))?;
    let sidecar_path = sidecar_path_for(path);
    let json = serde_json::to_string_pretty(&sidecar)
        .map_err(|e| CoreError::SnapshotFormat(e.to_string()))?;
    std::fs::write(&sidecar_path, json).map_err(|e| io_err(&sidecar_path, e))?;
    Ok(sidecar)
}

/// Sidecar path convention: `<payload>.json`.
pub fn sidecar_path_for(path: &Path) -> std::path::PathBuf {
    let mut name = path.as_os_str().to_os_string();
    name.push(".json");
    std::path::PathBuf::from(name)
}

/// Read records back and verify the content hash against the sidecar.
pub fn read_snapshots(
    path: &Path,
) -> Result<(Vec<(f64, Vec<Complex<f64>>)>, SnapshotSidecar)> {
    let mut payload = Vec::new();
    std::fs::File::open(path)
        .map_err(|e| io_err(path, e))?
        .read_to_end(&mut payload)
        .map_err(|e| io_err(path, e))?;
    let sidecar_path = sidecar_path_for(path);
    let sidecar: SnapshotSidecar = serde_json::from_str(
        &std::fs::read_to_string(&sidecar_path).map_err(|e| io_err(&sidecar_path, e))?,
    )
    .map_err(|e| CoreError::SnapshotFormat(e.to_string()))?;
    let hash = format!("sha256:{}", hex::encode(Sha256::digest(&payload)));
    if hash != sidecar.content_hash {
        return Err(CoreError::SnapshotFormat(format!(
            "content hash mismatch: payload {hash}, sidecar {}",
            sidecar.content_hash
        )));
    }
    let mut records = Vec::new();
    let mut off = 0usize;
    while off < payload.len() {
        if payload.len() - off < 12 {
            return Err(CoreError::SnapshotFormat("truncated record header".into()));
        }
        let t = f64::from_le_bytes(payload[off..off + 8].try_into().unwrap());
        let n = u32::from_le_bytes(payload[off + 8..off + 12].try_into().unwrap()) as usize;
        off += 12;
        if payload.len() - off < 16 * n {
            return Err(CoreError::SnapshotFormat("truncated record body".into()));
        }
        let mut vals = Vec::with_capacity(n);
        for k in 0..n {
            let re = f64::from_le_bytes(payload[off + 16 * k..off + 16 * k + 8].try_into().unwrap());
            let im =
                f64::from_le_bytes(payload[off + 16 * k + 8..off + 16 * k + 16].try_into().unwrap());
            vals.push(Complex::new(re, im));
        }
        off += 16 * n;
        records.push((t, vals));
    }
    if records.len() != sidecar.record_count {
        return Err(CoreError::SnapshotFormat(format!(
            "record count mismatch: payload {}, sidecar {}",
            records.len(),
            sidecar.record_count
        )));
    }
    Ok((records, sidecar))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.bin");
        let g = TorusGrid::<f64>::new(4, 32).unwrap();
        let f1 = Field::from_fn_real(&g, |x| x.sin()).unwrap();
        let f2 = Field::from_fn_real(&g, |x| (2.0 * x).cos()).unwrap();
        let sidecar =
            write_snapshots(&path, &[(0.0, &f1), (0.5, &f2)], Some(0.25), "lawson_rk4", 1e-3)
                .unwrap();
        assert_eq!(sidecar.record_count, 2);
        let (records, sc2) = read_snapshots(&path).unwrap();
        assert_eq!(sc2, sidecar);
        assert_eq!(records.len(), 2);
        assert_eq!(records[0].0, 0.0);
        assert_eq!(records[1].0, 0.5);
        for (a, b) in records[1].1.iter().zip(f2.values()) {
            assert_eq!(a.re, b.re);
            assert_eq!(a.im, b.im);
        }
    }

    #[test]
    fn tampering_detected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.bin");
        let g = TorusGrid::<f64>::new(4, 32).unwrap();
        let f = Field::from_fn_real(&g, |x| x.cos()).unwrap();
        write_snapshots(&path, &[(0.0, &f)], None, "strang_split", 1e-2).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        bytes[20] ^= 0xff;
        std::fs::write(&path, bytes).unwrap();
        assert!(read_snapshots(&path).is_err());
    }
}
