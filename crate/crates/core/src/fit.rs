//! Log-log least-squares rate fitting.

use serde::Serialize;

use crate::error::{Error, Result};

/// Errors below this are treated as exactly zero and excluded from fits.
pub const EXACT_ERROR_FLOOR: f64 = 1e-14;

/// Ordinary least squares of `log error` against `log n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub n_used: usize,
    pub n_excluded: usize,
}

/// Outcome of a rate fit: either a genuine fit or the exact-zero sentinel
/// (every row below [`EXACT_ERROR_FLOOR`]).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FitOutcome {
    Exact,
    Fit(RateFit),
}

impl FitOutcome {
    pub fn slope(&self) -> Option<f64> {
        match self {
            FitOutcome::Exact => None,
            FitOutcome::Fit(fit) => Some(fit.slope),
        }
    }

    pub fn r_squared(&self) -> Option<f64> {
        match self {
            FitOutcome::Exact => None,
            FitOutcome::Fit(fit) => Some(fit.r_squared),
        }
    }
}

/// Fit `error ≈ C · n^slope` on the rows with `error >= 1e-14`; rows below
/// the floor are excluded as exact zeros (and only those).
pub fn fit_rate(ns: &[f64], errors: &[f64]) -> Result<FitOutcome> {
    if ns.len() != errors.len() {
        return Err(Error::Parameter(format!(
            "rate fit needs matching lengths, got {} and {}",
            ns.len(),
            errors.len()
        )));
    }
    if ns.is_empty() {
        return Err(Error::Parameter("rate fit needs at least one row".into()));
    }
    let mut xs = Vec::with_capacity(ns.len());
    let mut ys = Vec::with_capacity(ns.len());
    let mut excluded = 0usize;
    for (&n, &e) in ns.iter().zip(errors.iter()) {
        if !(n > 0.0) || !e.is_finite() || e < 0.0 {
            return Err(Error::Parameter(format!(
                "rate fit rows need n > 0 and finite error >= 0, got ({n}, {e})"
            )));
        }
        if e < EXACT_ERROR_FLOOR {
            excluded += 1;
        } else {
            xs.push(n.ln());
            ys.push(e.ln());
        }
    }
    if xs.is_empty() {
        return Ok(FitOutcome::Exact);
    }
    if xs.len() < 2 {
        return Err(Error::Parameter(
            "rate fit needs at least two rows above the exact-zero floor".into(),
        ));
    }

    let n = xs.len() as f64;
    let mean_x = xs.iter().sum::<f64>() / n;
    let mean_y = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (x, y) in xs.iter().zip(ys.iter()) {
        let dx = x - mean_x;
        let dy = y - mean_y;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return Err(Error::Parameter(
            "rate fit needs at least two distinct n values".into(),
        ));
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_res = syy - slope * sxy;
    let r_squared = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };

    Ok(FitOutcome::Fit(RateFit {
        slope,
        intercept,
        r_squared,
        n_used: xs.len(),
        n_excluded: excluded,
    }))
}

/// Median of a slice (averages the middle pair for even lengths).
pub fn median(values: &[f64]) -> f64 {
    assert!(!values.is_empty(), "median of empty slice");
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    }
}
