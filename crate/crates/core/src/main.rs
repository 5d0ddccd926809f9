use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use grough::config::{
    load_config_file, parse_payoffs, parse_scenarios, parse_usize_list, ConfigOverrides,
};
use grough::error::Result;
use grough::expectation::{
    estimate_upper_expectation, gnormal_exact, terminal_payoff, PayoffKind,
};
use grough::experiment::{
    run_integral_rate, run_lift_distance, run_rde_vs_sde, run_wz_l2, ExperimentConfig,
};
use grough::gbm::{derive_seed, sample_control, sample_gbm};
use grough::report::{version_string, ConvergenceReport};

/// Rough-path calculus driven by G-Brownian motion: simulation, lifts,
/// schemes and convergence-rate experiments.
#[derive(Parser)]
#[command(name = "grough", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonFlags {
    /// Flat key=value config file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Lower volatility bound.
    #[arg(long)]
    sigma_lo: Option<f64>,
    /// Upper volatility bound.
    #[arg(long)]
    sigma_hi: Option<f64>,
    /// Hölder exponent in (1/3, 1/2).
    #[arg(long)]
    alpha: Option<f64>,
    /// Rate exponent, constrained to theta < 1/2 - alpha.
    #[arg(long)]
    theta: Option<f64>,
    /// Fine-grid cell count.
    #[arg(long)]
    n_fine: Option<usize>,
    /// Comma-separated coarse mesh counts, each dividing n_fine.
    #[arg(long)]
    ladder: Option<String>,
    /// Number of seeds per scenario.
    #[arg(long)]
    seeds: Option<usize>,
    /// Comma-separated scenario kinds.
    #[arg(long)]
    scenarios: Option<String>,
    /// Coefficient preset (zero, const, linear, sin, cos, tanh, sin_gh).
    #[arg(long)]
    coeffs: Option<String>,
    /// Initial condition.
    #[arg(long)]
    x0: Option<f64>,
    /// Base seed every stream is derived from.
    #[arg(long)]
    seed_base: Option<u64>,
    /// Output CSV path; a JSON summary lands next to it. Stdout if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write gnuplot-friendly .dat files per summary (needs --out).
    #[arg(long)]
    plot_data: bool,
}

impl CommonFlags {
    fn overrides(&self) -> Result<ConfigOverrides> {
        let flags = ConfigOverrides {
            sigma_lo: self.sigma_lo,
            sigma_hi: self.sigma_hi,
            alpha: self.alpha,
            theta: self.theta,
            n_fine: self.n_fine,
            ladder: self.ladder.as_deref().map(parse_usize_list).transpose()?,
            seeds: self.seeds,
            scenarios: self.scenarios.as_deref().map(parse_scenarios).transpose()?,
            coeffs: self.coeffs.clone(),
            x0: self.x0,
            seed_base: self.seed_base,
            out: self.out.clone(),
            paths: None,
            payoffs: None,
        };
        Ok(match &self.config {
            Some(path) => flags.or(load_config_file(path)?),
            None => flags,
        })
    }
}

#[derive(Subcommand)]
enum Command {
    /// Write one simulated sample as CSV columns (t, a, B, qv).
    Simulate(CommonFlags),
    /// Rough distance between the Stratonovich lift and the lifted
    /// polygonal interpolation across the coarse ladder.
    LiftDistance(CommonFlags),
    /// Squared terminal error of the polygonal ODE scheme against the
    /// fine-grid reference solution.
    WongZakai(CommonFlags),
    /// Hölder distance between the rough solution, the fine reference and
    /// the ladder of ODE solutions.
    RdeVsSde(CommonFlags),
    /// Upper-expectation estimates for terminal payoffs over the scenario
    /// family.
    Expectation {
        #[command(flatten)]
        common: CommonFlags,
        /// Monte Carlo paths per scenario.
        #[arg(long)]
        paths: Option<usize>,
        /// Comma-separated payoffs (x2, neg_x2, x4, neg_x4, abs, neg_abs).
        #[arg(long)]
        payoffs: Option<String>,
    },
    /// Window-scaling exponent of the compensated-sum rough integral.
    RoughIntegralRate(CommonFlags),
}

fn emit_report(report: &ConvergenceReport, flags: &CommonFlags, out: Option<&PathBuf>) -> Result<()> {
    match out {
        Some(path) => {
            report.write_csv(path)?;
            report.write_json(&path.with_extension("json"))?;
            if flags.plot_data {
                for summary in &report.summaries {
                    if let Some(data) = report.plot_data(&summary.label) {
                        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("report");
                        let label = summary.label.replace(':', "_");
                        let dat = path.with_file_name(format!("{stem}_{label}.dat"));
                        std::fs::write(dat, data)?;
                    }
                }
            }
            print!("{}", report.console_summary());
        }
        None => {
            print!("{}", report.to_csv_string());
            eprint!("{}", report.console_summary());
        }
    }
    Ok(())
}

fn run_experiment(
    flags: &CommonFlags,
    runner: impl Fn(&ExperimentConfig) -> Result<ConvergenceReport>,
) -> Result<()> {
    let overrides = flags.overrides()?;
    let out = overrides.out.clone();
    let cfg = overrides.into_experiment_config()?;
    let report = runner(&cfg)?;
    emit_report(&report, flags, out.as_ref())
}

fn run_simulate(flags: &CommonFlags) -> Result<()> {
    let overrides = flags.overrides()?;
    let out = overrides.out.clone();
    let cfg = overrides.into_experiment_config()?;
    let grid = cfg.grid()?;
    let kind = cfg.scenarios[0];
    let seed = derive_seed(cfg.seed_base, &[0x51]);
    let control = sample_control(kind, cfg.interval, grid, derive_seed(seed, &[1]));
    let sample = sample_gbm(&control, derive_seed(seed, &[2]));

    let mut csv = String::new();
    let _ = writeln!(
        csv,
        "# {} experiment=simulate scenario={} seed_base={} n_fine={}",
        version_string(),
        kind.label(),
        cfg.seed_base,
        cfg.n_fine
    );
    csv.push_str("t,a,B,qv\n");
    let n = grid.n_steps();
    for i in 0..=n {
        let a = control.a_values()[i.min(n - 1)];
        let _ = writeln!(
            csv,
            "{},{},{},{}",
            grid.node(i),
            a,
            sample.b().value(i),
            sample.qv().value(i)
        );
    }
    match out {
        Some(path) => std::fs::write(path, csv)?,
        None => print!("{csv}"),
    }
    Ok(())
}

fn run_expectation(
    common: &CommonFlags,
    paths: Option<usize>,
    payoffs: Option<&str>,
) -> Result<()> {
    let mut overrides = common.overrides()?;
    if let Some(p) = paths {
        overrides.paths = Some(p);
    }
    if let Some(p) = payoffs {
        overrides.payoffs = Some(parse_payoffs(p)?);
    }
    let out = overrides.out.clone();
    let n_paths = overrides.paths.unwrap_or(100_000);
    let payoff_kinds = overrides
        .payoffs
        .clone()
        .unwrap_or_else(|| vec![PayoffKind::X2, PayoffKind::NegX2, PayoffKind::X4, PayoffKind::NegX4]);
    let cfg = overrides.into_experiment_config()?;
    let grid = cfg.grid()?;

    let mut entries = Vec::new();
    for kind in payoff_kinds {
        let report = estimate_upper_expectation(
            terminal_payoff(kind),
            &cfg.scenarios,
            cfg.interval,
            grid,
            n_paths,
            derive_seed(cfg.seed_base, &[0xE5, kind as u64]),
        )?;
        entries.push(serde_json::json!({
            "payoff": kind.label(),
            "exact": gnormal_exact(kind, &cfg.interval),
            "report": report,
        }));
    }
    let doc = serde_json::json!({
        "version": version_string(),
        "seed_base": cfg.seed_base,
        "interval": cfg.interval,
        "paths_per_scenario": n_paths,
        "estimates": entries,
    });
    let text = serde_json::to_string_pretty(&doc).expect("serializable");
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => println!("{text}"),
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<()> {
    match &cli.command {
        Command::Simulate(flags) => run_simulate(flags),
        Command::LiftDistance(flags) => run_experiment(flags, run_lift_distance),
        Command::WongZakai(flags) => run_experiment(flags, run_wz_l2),
        Command::RdeVsSde(flags) => run_experiment(flags, run_rde_vs_sde),
        Command::RoughIntegralRate(flags) => run_experiment(flags, run_integral_rate),
        Command::Expectation {
            common,
            paths,
            payoffs,
        } => run_expectation(common, *paths, payoffs.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
