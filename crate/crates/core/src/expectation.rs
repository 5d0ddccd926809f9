//! Upper-expectation and capacity estimators over a finite scenario
//! family.
//!
//! The estimator is the maximum of per-scenario Monte Carlo means. Since
//! the true supremum ranges over all progressively measurable controls,
//! this is a lower-bound estimate by construction; reports always carry
//! the per-scenario breakdown so the gap stays visible. For convex and
//! concave terminal payoffs the constant extreme scenarios attain the
//! supremum and a closed-form Gaussian oracle is available.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gbm::{derive_seed, sample_control, sample_gbm, ControlKind, GbmSample, UncertaintyInterval};
use crate::path::TimeGrid;

/// Terminal payoffs with closed-form G-normal expectations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PayoffKind {
    X2,
    NegX2,
    X4,
    NegX4,
    Abs,
    NegAbs,
}

impl PayoffKind {
    pub const ALL: [PayoffKind; 6] = [
        PayoffKind::X2,
        PayoffKind::NegX2,
        PayoffKind::X4,
        PayoffKind::NegX4,
        PayoffKind::Abs,
        PayoffKind::NegAbs,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            PayoffKind::X2 => "x2",
            PayoffKind::NegX2 => "neg_x2",
            PayoffKind::X4 => "x4",
            PayoffKind::NegX4 => "neg_x4",
            PayoffKind::Abs => "abs",
            PayoffKind::NegAbs => "neg_abs",
        }
    }

    pub fn is_convex(&self) -> bool {
        matches!(self, PayoffKind::X2 | PayoffKind::X4 | PayoffKind::Abs)
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            PayoffKind::X2 => x * x,
            PayoffKind::NegX2 => -x * x,
            PayoffKind::X4 => x.powi(4),
            PayoffKind::NegX4 => -x.powi(4),
            PayoffKind::Abs => x.abs(),
            PayoffKind::NegAbs => -x.abs(),
        }
    }
}

impl fmt::Display for PayoffKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for PayoffKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "x2" => Ok(PayoffKind::X2),
            "neg_x2" => Ok(PayoffKind::NegX2),
            "x4" => Ok(PayoffKind::X4),
            "neg_x4" => Ok(PayoffKind::NegX4),
            "abs" => Ok(PayoffKind::Abs),
            "neg_abs" => Ok(PayoffKind::NegAbs),
            other => Err(Error::Parameter(format!(
                "unknown payoff '{other}'; expected one of x2, neg_x2, x4, neg_x4, abs, neg_abs"
            ))),
        }
    }
}

/// Exact upper expectation of the catalogue payoff at `B_1`: the Gaussian
/// integral at `σ_hi` for convex entries and at `σ_lo` for concave ones.
pub fn gnormal_exact(kind: PayoffKind, interval: &UncertaintyInterval) -> f64 {
    let hi = interval.sigma_hi();
    let lo = interval.sigma_lo();
    match kind {
        PayoffKind::X2 => hi * hi,
        PayoffKind::NegX2 => -(lo * lo),
        PayoffKind::X4 => 3.0 * hi.powi(4),
        PayoffKind::NegX4 => -3.0 * lo.powi(4),
        PayoffKind::Abs => hi * (2.0 / PI).sqrt(),
        PayoffKind::NegAbs => -lo * (2.0 / PI).sqrt(),
    }
}

/// One scenario's Monte Carlo summary.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ScenarioStat {
    pub kind: ControlKind,
    pub mean: f64,
    pub stderr: f64,
    pub n: usize,
}

/// Per-scenario means with the max-of-means estimator. A lower-bound
/// estimate of the supremum over all controls: the scenario family is
/// finite.
#[derive(Debug, Clone, Serialize)]
pub struct EstimateReport {
    pub scenarios: Vec<ScenarioStat>,
    pub estimator: f64,
    pub argmax_scenario: ControlKind,
    pub paths_per_scenario: usize,
    pub seed_base: u64,
}

impl EstimateReport {
    pub fn scenario(&self, kind: ControlKind) -> Option<&ScenarioStat> {
        self.scenarios.iter().find(|s| s.kind == kind)
    }

    /// Standard error attached to the argmax scenario.
    pub fn estimator_stderr(&self) -> f64 {
        self.scenario(self.argmax_scenario)
            .map(|s| s.stderr)
            .unwrap_or(f64::NAN)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

const CHUNK: usize = 512;

/// Mean and standard error of `value(sample)` under one scenario.
/// Chunked fan-out with per-path seeds; the reduction is a sequential
/// fold over ordered chunk sums, so results are bit-stable regardless of
/// scheduling.
fn scenario_moments<F>(
    value: &F,
    kind: ControlKind,
    interval: UncertaintyInterval,
    grid: TimeGrid,
    paths: usize,
    seed_base: u64,
) -> (f64, f64)
where
    F: Fn(&GbmSample) -> f64 + Sync,
{
    let scenario_tag = kind as u64;
    let n_chunks = paths.div_ceil(CHUNK);
    let partials: Vec<(f64, f64)> = (0..n_chunks)
        .into_par_iter()
        .map(|chunk| {
            let lo = chunk * CHUNK;
            let hi = (lo + CHUNK).min(paths);
            let mut sum = 0.0;
            let mut sum_sq = 0.0;
            for path_idx in lo..hi {
                let seed = derive_seed(seed_base, &[scenario_tag, path_idx as u64]);
                let control = sample_control(kind, interval, grid, derive_seed(seed, &[1]));
                let sample = sample_gbm(&control, derive_seed(seed, &[2]));
                let v = value(&sample);
                sum += v;
                sum_sq += v * v;
            }
            (sum, sum_sq)
        })
        .collect();
    let (sum, sum_sq) = partials
        .iter()
        .fold((0.0, 0.0), |(a, b), (s, q)| (a + s, b + q));
    let mean = sum / paths as f64;
    let var = (sum_sq / paths as f64 - mean * mean).max(0.0);
    let stderr = (var / paths as f64).sqrt();
    (mean, stderr)
}

/// Estimate the upper expectation of a path functional over the scenario
/// family: simulate each scenario, average, and take the max of means.
pub fn estimate_upper_expectation<F>(
    phi: F,
    scenario_kinds: &[ControlKind],
    interval: UncertaintyInterval,
    grid: TimeGrid,
    paths_per_scenario: usize,
    seed_base: u64,
) -> Result<EstimateReport>
where
    F: Fn(&GbmSample) -> f64 + Sync,
{
    if scenario_kinds.is_empty() {
        return Err(Error::Parameter("need at least one scenario kind".into()));
    }
    if paths_per_scenario < 100 {
        return Err(Error::Parameter(format!(
            "need at least 100 paths per scenario, got {paths_per_scenario}"
        )));
    }
    let mut scenarios = Vec::with_capacity(scenario_kinds.len());
    for &kind in scenario_kinds {
        let (mean, stderr) =
            scenario_moments(&phi, kind, interval, grid, paths_per_scenario, seed_base);
        scenarios.push(ScenarioStat {
            kind,
            mean,
            stderr,
            n: paths_per_scenario,
        });
    }
    let argmax = scenarios
        .iter()
        .max_by(|a, b| a.mean.total_cmp(&b.mean))
        .expect("non-empty");
    Ok(EstimateReport {
        estimator: argmax.mean,
        argmax_scenario: argmax.kind,
        scenarios: scenarios.clone(),
        paths_per_scenario,
        seed_base,
    })
}

/// Terminal-value payoff adapter for the catalogue.
pub fn terminal_payoff(kind: PayoffKind) -> impl Fn(&GbmSample) -> f64 + Sync {
    move |sample: &GbmSample| kind.eval(sample.b().terminal())
}

/// Capacity estimate `max over scenarios of the empirical frequency`;
/// a lower bound of `sup_P P(A)` for the same reason as the expectation
/// estimator.
pub fn capacity_estimate<E>(
    event: E,
    scenario_kinds: &[ControlKind],
    interval: UncertaintyInterval,
    grid: TimeGrid,
    paths_per_scenario: usize,
    seed_base: u64,
) -> Result<f64>
where
    E: Fn(&GbmSample) -> bool + Sync,
{
    let indicator = |sample: &GbmSample| if event(sample) { 1.0 } else { 0.0 };
    let report = estimate_upper_expectation(
        indicator,
        scenario_kinds,
        interval,
        grid,
        paths_per_scenario,
        seed_base,
    )?;
    Ok(report.estimator.clamp(0.0, 1.0))
}
