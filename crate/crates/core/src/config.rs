//! Flat `key=value` configuration files and their merge with CLI flags.
//!
//! Flags override file entries, which override defaults. Lines starting
//! with `#` and blank lines are ignored.

use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::expectation::PayoffKind;
use crate::experiment::ExperimentConfig;
use crate::gbm::{ControlKind, UncertaintyInterval};

/// Partial settings; `None` means "not given here".
#[derive(Debug, Clone, Default)]
pub struct ConfigOverrides {
    pub sigma_lo: Option<f64>,
    pub sigma_hi: Option<f64>,
    pub alpha: Option<f64>,
    pub theta: Option<f64>,
    pub n_fine: Option<usize>,
    pub ladder: Option<Vec<usize>>,
    pub seeds: Option<usize>,
    pub scenarios: Option<Vec<ControlKind>>,
    pub coeffs: Option<String>,
    pub x0: Option<f64>,
    pub seed_base: Option<u64>,
    pub out: Option<PathBuf>,
    /// Monte Carlo paths per scenario (expectation runs).
    pub paths: Option<usize>,
    /// Payoff catalogue entries (expectation runs).
    pub payoffs: Option<Vec<PayoffKind>>,
}

impl ConfigOverrides {
    /// `self` wins over `weaker` field by field.
    pub fn or(self, weaker: ConfigOverrides) -> ConfigOverrides {
        ConfigOverrides {
            sigma_lo: self.sigma_lo.or(weaker.sigma_lo),
            sigma_hi: self.sigma_hi.or(weaker.sigma_hi),
            alpha: self.alpha.or(weaker.alpha),
            theta: self.theta.or(weaker.theta),
            n_fine: self.n_fine.or(weaker.n_fine),
            ladder: self.ladder.or(weaker.ladder),
            seeds: self.seeds.or(weaker.seeds),
            scenarios: self.scenarios.or(weaker.scenarios),
            coeffs: self.coeffs.or(weaker.coeffs),
            x0: self.x0.or(weaker.x0),
            seed_base: self.seed_base.or(weaker.seed_base),
            out: self.out.or(weaker.out),
            paths: self.paths.or(weaker.paths),
            payoffs: self.payoffs.or(weaker.payoffs),
        }
    }

    /// Apply on top of the defaults and validate.
    pub fn into_experiment_config(self) -> Result<ExperimentConfig> {
        let defaults = ExperimentConfig::default();
        let interval = UncertaintyInterval::new(
            self.sigma_lo.unwrap_or(defaults.interval.sigma_lo()),
            self.sigma_hi.unwrap_or(defaults.interval.sigma_hi()),
        )?;
        let cfg = ExperimentConfig {
            interval,
            alpha: self.alpha.unwrap_or(defaults.alpha),
            theta: self.theta.unwrap_or(defaults.theta),
            n_fine: self.n_fine.unwrap_or(defaults.n_fine),
            ladder: self.ladder.unwrap_or(defaults.ladder),
            seeds: self.seeds.unwrap_or(defaults.seeds),
            scenarios: self.scenarios.unwrap_or(defaults.scenarios),
            coeffs: self.coeffs.unwrap_or(defaults.coeffs),
            x0: self.x0.unwrap_or(defaults.x0),
            seed_base: self.seed_base.unwrap_or(defaults.seed_base),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

pub fn parse_usize_list(input: &str) -> Result<Vec<usize>> {
    input
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .map_err(|e| Error::Parameter(format!("bad integer '{s}': {e}")))
        })
        .collect()
}

pub fn parse_scenarios(input: &str) -> Result<Vec<ControlKind>> {
    input
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.trim().parse::<ControlKind>())
        .collect()
}

pub fn parse_payoffs(input: &str) -> Result<Vec<PayoffKind>> {
    input
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.trim().parse::<PayoffKind>())
        .collect()
}

/// Parse a flat `key=value` file.
pub fn load_config_file(path: &Path) -> Result<ConfigOverrides> {
    let text = std::fs::read_to_string(path)?;
    parse_config_text(&text)
}

pub fn parse_config_text(text: &str) -> Result<ConfigOverrides> {
    let mut cfg = ConfigOverrides::default();
    for (line_no, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::Parameter(format!(
                "config line {} is not key=value: '{raw}'",
                line_no + 1
            ))
        })?;
        let key = key.trim();
        let value = value.trim();
        let bad = |e: std::num::ParseFloatError| {
            Error::Parameter(format!("config key '{key}': {e}"))
        };
        let bad_int = |e: std::num::ParseIntError| {
            Error::Parameter(format!("config key '{key}': {e}"))
        };
        match key {
            "sigma_lo" => cfg.sigma_lo = Some(value.parse().map_err(bad)?),
            "sigma_hi" => cfg.sigma_hi = Some(value.parse().map_err(bad)?),
            "alpha" => cfg.alpha = Some(value.parse().map_err(bad)?),
            "theta" => cfg.theta = Some(value.parse().map_err(bad)?),
            "x0" => cfg.x0 = Some(value.parse().map_err(bad)?),
            "n_fine" => cfg.n_fine = Some(value.parse().map_err(bad_int)?),
            "seeds" => cfg.seeds = Some(value.parse().map_err(bad_int)?),
            "seed_base" => cfg.seed_base = Some(value.parse().map_err(bad_int)?),
            "paths" => cfg.paths = Some(value.parse().map_err(bad_int)?),
            "ladder" => cfg.ladder = Some(parse_usize_list(value)?),
            "scenarios" => cfg.scenarios = Some(parse_scenarios(value)?),
            "payoffs" => cfg.payoffs = Some(parse_payoffs(value)?),
            "coeffs" => cfg.coeffs = Some(value.to_string()),
            "out" => cfg.out = Some(PathBuf::from(value)),
            other => {
                return Err(Error::Parameter(format!(
                    "unknown config key '{other}' on line {}",
                    line_no + 1
                )))
            }
        }
    }
    Ok(cfg)
}
