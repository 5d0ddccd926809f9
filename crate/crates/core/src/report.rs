//! Experiment artifacts: row-oriented CSV and a JSON summary with fitted
//! rates. Output is byte-stable for a fixed config: rows are emitted in
//! sorted key order and wall-clock time never enters the serialized body.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::error::Result;
use crate::fit::FitOutcome;

/// Version stamp placed in every output header.
pub fn version_string() -> String {
    format!("grough {}", env!("CARGO_PKG_VERSION"))
}

/// One measurement row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub scenario: String,
    pub seed: u64,
    pub n: usize,
    pub metric: String,
    pub value: f64,
}

/// A ladder of aggregated values with its fitted rate.
#[derive(Debug, Clone, Serialize)]
pub struct LadderSummary {
    pub label: String,
    pub ns: Vec<usize>,
    pub values: Vec<f64>,
    pub fit: FitOutcome,
}

/// Everything one experiment produces.
#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceReport {
    pub experiment: String,
    pub version: String,
    pub seed_base: u64,
    pub alpha: f64,
    /// Which pair set Hölder suprema ranged over ("n/a" for terminal-value
    /// experiments).
    pub pair_mode: String,
    pub rows: Vec<Row>,
    pub summaries: Vec<LadderSummary>,
    pub extras: BTreeMap<String, f64>,
    /// Wall-clock seconds; excluded from serialized output so reports stay
    /// bit-reproducible.
    #[serde(skip)]
    pub runtime_secs: f64,
}

impl ConvergenceReport {
    pub fn summary(&self, label: &str) -> Option<&LadderSummary> {
        self.summaries.iter().find(|s| s.label == label)
    }

    /// Sort rows by (metric, scenario, seed, n) so output files do not
    /// depend on scheduling.
    pub fn sort_rows(&mut self) {
        self.rows.sort_by(|a, b| {
            (&a.metric, &a.scenario, a.seed, a.n).cmp(&(&b.metric, &b.scenario, b.seed, b.n))
        });
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "# {} experiment={} seed_base={} alpha={} pair_mode={}",
            self.version, self.experiment, self.seed_base, self.alpha, self.pair_mode
        );
        out.push_str("experiment,scenario,seed,n,metric,value\n");
        for row in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                self.experiment, row.scenario, row.seed, row.n, row.metric, row.value
            );
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_csv_string())?;
        Ok(())
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json())?;
        Ok(())
    }

    /// Gnuplot-friendly two-column data ("n value") for one summary.
    pub fn plot_data(&self, label: &str) -> Option<String> {
        let summary = self.summary(label)?;
        let mut out = String::new();
        let _ = writeln!(out, "# {} {} {}", self.version, self.experiment, label);
        for (n, v) in summary.ns.iter().zip(summary.values.iter()) {
            let _ = writeln!(out, "{n} {v}");
        }
        Some(out)
    }

    /// One human line per summary, for the CLI.
    pub fn console_summary(&self) -> String {
        let mut out = String::new();
        for s in &self.summaries {
            match s.fit {
                FitOutcome::Exact => {
                    let _ = writeln!(out, "{}: {} -> exact (all errors below floor)", self.experiment, s.label);
                }
                FitOutcome::Fit(fit) => {
                    let _ = writeln!(
                        out,
                        "{}: {} -> slope {:.4}, r2 {:.4} over {} points",
                        self.experiment, s.label, fit.slope, fit.r_squared, fit.n_used
                    );
                }
            }
        }
        for (k, v) in &self.extras {
            let _ = writeln!(out, "{}: {} = {}", self.experiment, k, v);
        }
        let _ = writeln!(out, "{}: runtime {:.2}s", self.experiment, self.runtime_secs);
        out
    }
}
