//! Rough lifts of G-Brownian samples.
//!
//! In one dimension both canonical lifts have closed-form cell blocks:
//! the Stratonovich lift carries `(ΔB)²/2` per cell, the Itô lift
//! `(ΔB)²/2 - Δ⟨B⟩/2`, and the lift of the piecewise-linear interpolation
//! carries `(ΔB^{(n)})²/2` on the fine grid. Chen composition then gives
//! `𝔹_{s,t} = B_{s,t}²/2` for every pair, the identity the distance
//! experiments lean on.

use crate::error::{Error, Result};
use crate::gbm::GbmSample;
use crate::path::GridPath;
use crate::rough::{rough_distance, RoughPath};

/// Which enhancement of a sample to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LiftKind {
    Stratonovich,
    Ito,
    /// Piecewise-linear interpolation on `n` coarse cells, lifted on the
    /// fine grid. `n` must divide the fine step count.
    PiecewiseLinear(usize),
}

/// Blocks `(ΔX_i)²/2` for a first-level path.
fn square_blocks(path: &GridPath) -> Vec<f64> {
    path.values()
        .windows(2)
        .map(|w| (w[1] - w[0]).powi(2) / 2.0)
        .collect()
}

/// Stratonovich lift: first level `B`, cell blocks `(ΔB)²/2`.
pub fn strat_lift(sample: &GbmSample, alpha: f64) -> Result<RoughPath> {
    RoughPath::from_blocks(sample.b().clone(), square_blocks(sample.b()), alpha)
}

/// Itô lift: cell blocks `(ΔB)²/2 - Δ⟨B⟩/2`.
pub fn ito_lift(sample: &GbmSample, alpha: f64) -> Result<RoughPath> {
    let blocks = (0..sample.n_steps())
        .map(|i| (sample.b_increment(i).powi(2) - sample.qv_increment(i)) / 2.0)
        .collect();
    RoughPath::from_blocks(sample.b().clone(), blocks, alpha)
}

/// Piecewise-linear interpolation of `B` through the `n_coarse`-cell
/// sub-partition, returned on the fine grid. Anchored exactly at the
/// coarse nodes.
pub fn pw_linear(sample: &GbmSample, n_coarse: usize) -> Result<GridPath> {
    let n_fine = sample.n_steps();
    if n_coarse == 0 || n_fine % n_coarse != 0 {
        return Err(Error::Parameter(format!(
            "n_coarse {n_coarse} must divide the fine step count {n_fine}"
        )));
    }
    let q = n_fine / n_coarse;
    let b = sample.b().values();
    let mut values = Vec::with_capacity(n_fine + 1);
    for i in 0..=n_fine {
        let j = (i / q).min(n_coarse - 1);
        let frac = (i - j * q) as f64 / q as f64;
        values.push(b[j * q] + frac * (b[(j + 1) * q] - b[j * q]));
    }
    GridPath::new(*sample.grid(), values)
}

/// Canonical lift of a bounded-variation path: Riemann-Stieltjes blocks
/// `(ΔX_i)²/2` on the fine grid.
pub fn pw_linear_lift(bn: &GridPath, alpha: f64) -> Result<RoughPath> {
    RoughPath::from_blocks(bn.clone(), square_blocks(bn), alpha)
}

/// Build the requested lift of a sample.
pub fn build_lift(sample: &GbmSample, kind: LiftKind, alpha: f64) -> Result<RoughPath> {
    match kind {
        LiftKind::Stratonovich => strat_lift(sample, alpha),
        LiftKind::Ito => ito_lift(sample, alpha),
        LiftKind::PiecewiseLinear(n) => pw_linear_lift(&pw_linear(sample, n)?, alpha),
    }
}

/// Rough distance between two lifts; recorded per `(sample, n)` by the
/// harness rate fit.
pub fn lift_distance(a: &RoughPath, b: &RoughPath) -> Result<f64> {
    rough_distance(a, b)
}
