//! Small least-squares helpers for empirical exponent and envelope fits.

use crate::error::{Error, Result};

/// Result of a simple linear regression `y = slope * x + intercept`.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope estimate.
    pub slope_std_err: f64,
    /// Coefficient of determination.
    pub r_squared: f64,
    pub points: usize,
}

/// Ordinary least squares on `(x, y)` pairs. Needs at least `min_points`.
pub fn linear_fit(points: &[(f64, f64)], min_points: usize) -> Result<LinearFit> {
    let n = points.len();
    if n < min_points.max(2) {
        return Err(Error::InsufficientData {
            have: n,
            need: min_points.max(2),
        });
    }
    let nf = n as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / nf;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / nf;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for &(x, y) in points {
        sxx += (x - mean_x) * (x - mean_x);
        sxy += (x - mean_x) * (y - mean_y);
    }
    if sxx == 0.0 {
        return Err(Error::Invalid("degenerate fit: all x equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let mut ss_res = 0.0;
    let mut ss_tot = 0.0;
    for &(x, y) in points {
        let r = y - (slope * x + intercept);
        ss_res += r * r;
        ss_tot += (y - mean_y) * (y - mean_y);
    }
    let r_squared = if ss_tot > 0.0 {
        1.0 - ss_res / ss_tot
    } else {
        1.0
    };
    let slope_std_err = if n > 2 {
        (ss_res / (nf - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Ok(LinearFit {
        slope,
        intercept,
        slope_std_err,
        r_squared,
        points: n,
    })
}

/// Least-squares slope of `log|y|` against `log x`, dropping zero values of
/// `y` (exact zeros carry no magnitude information).
pub fn log_log_fit(points: &[(f64, f64)], min_points: usize) -> Result<LinearFit> {
    let usable: Vec<(f64, f64)> = points
        .iter()
        .filter(|&&(x, y)| x > 0.0 && y != 0.0)
        .map(|&(x, y)| (x.ln(), y.abs().ln()))
        .collect();
    if usable.len() < min_points.max(2) {
        return Err(Error::InsufficientData {
            have: usable.len(),
            need: min_points.max(2),
        });
    }
    linear_fit(&usable, min_points)
}
