//! Least-squares power-law fitting in log-log coordinates.

use crate::{LabError, Result};

/// Fit `value ~ C * h^slope` through `(h, value)` pairs by least squares on
/// `(ln h, ln value)`. Returns `(slope, residual)` with the residual the RMS
/// deviation in log space. Requires at least two points, all positive.
pub fn fit_slope(points: &[(f64, f64)]) -> Result<(f64, f64)> {
    if points.len() < 2 {
        return Err(LabError::Config(format!(
            "slope fit needs at least two points, got {}",
            points.len()
        )));
    }
    for &(h, v) in points {
        if !(h > 0.0) || !(v > 0.0) || !h.is_finite() || !v.is_finite() {
            return Err(LabError::Config(format!(
                "slope fit needs positive finite inputs, got ({h}, {v})"
            )));
        }
    }
    let n = points.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(h, v) in points {
        let x = h.ln();
        let y = v.ln();
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-300 {
        return Err(LabError::Config("slope fit needs distinct abscissae".into()));
    }
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    let ss: f64 = points
        .iter()
        .map(|&(h, v)| {
            let d = v.ln() - (intercept + slope * h.ln());
            d * d
        })
        .sum();
    Ok((slope, (ss / n).sqrt()))
}

/// Intercept companion for plot annotation: `ln C` of the fitted line.
pub fn fit_line(points: &[(f64, f64)]) -> Result<(f64, f64)> {
    let (slope, _) = fit_slope(points)?;
    let n = points.len() as f64;
    let sx: f64 = points.iter().map(|p| p.0.ln()).sum();
    let sy: f64 = points.iter().map(|p| p.1.ln()).sum();
    Ok((slope, (sy - slope * sx) / n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn exact_power_law() {
        let (slope, res) = fit_slope(&[(0.1, 0.01), (0.2, 0.04)]).unwrap();
        assert_relative_eq!(slope, 2.0, epsilon = 1e-12);
        assert!(res < 1e-12);
    }

    #[test]
    fn constant_values_give_zero_slope() {
        let (slope, _) = fit_slope(&[(0.1, 3.0), (0.2, 3.0), (0.4, 3.0)]).unwrap();
        assert!(slope.abs() < 1e-12);
    }

    #[test]
    fn collinear_triple_has_tiny_residual() {
        let pts: Vec<(f64, f64)> = [0.5, 0.25, 0.125]
            .iter()
            .map(|&h: &f64| (h, 1.7 * h.powf(1.5)))
            .collect();
        let (slope, res) = fit_slope(&pts).unwrap();
        assert_relative_eq!(slope, 1.5, epsilon = 1e-10);
        assert!(res < 1e-12);
    }

    #[test]
    fn rejects_nonpositive() {
        assert!(fit_slope(&[(0.1, 0.0), (0.2, 1.0)]).is_err());
        assert!(fit_slope(&[(-0.1, 1.0), (0.2, 1.0)]).is_err());
        assert!(fit_slope(&[(0.1, 1.0)]).is_err());
    }
}
