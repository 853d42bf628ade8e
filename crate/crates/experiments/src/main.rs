use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use tickshare_core::metrics::Summary;
use tickshare_experiments::scenario::{create_dir, load_config, run_scenario};
use tickshare_experiments::spec::{SweepSpec, VolCurveSpec};
use tickshare_experiments::sweep::{run_sweep, run_volatility_curve};
use tickshare_experiments::{output, plot};

#[derive(Parser)]
#[command(
    name = "tickshare",
    version,
    about = "Two-exchange tick size competition simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write its price path, trades and summary.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the seed in the config file.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Run a (dP_A, dP_B) grid and classify it against the borderlines.
    Sweep {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value_t = default_jobs())]
        jobs: usize,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Volatility and market share against dP_A with dP_B fixed.
    Volcurve {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value_t = default_jobs())]
        jobs: usize,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

fn default_jobs() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Run { config, seed, out } => {
            let mut cfg = load_config(&config)?;
            if let Some(seed) = seed {
                cfg.seed = seed;
            }
            let (_, summary) =
                run_scenario(&cfg, &out).with_context(|| format!("run {}", config.display()))?;
            println!(
                "W_A(day {}) = {:.4}, sigma_t = {}",
                cfg.days().min(500),
                summary.w_a_500d,
                summary
                    .sigma_t_pct
                    .map_or("n/a".to_string(), |s| format!("{s:.5}%"))
            );
        }
        Command::Sweep { spec, jobs, out } => {
            let spec = SweepSpec::load(&spec)?;
            let report = run_sweep(&spec, jobs)?;
            create_dir(&out)?;
            output::write_grid(&out.join("grid.csv"), &report)?;
            let runs: Vec<Summary> = report.cells.iter().flat_map(|c| c.runs.clone()).collect();
            output::write_summary(&out.join("summary.csv"), &runs)?;
            output::write_summary(&out.join("reference.csv"), &report.reference)?;
            output::write_failures(&out.join("failures.csv"), &report)?;
            plot::grid_heatmap(&out.join("grid_heatmap.svg"), &report)?;
            let failed = report.failures().count();
            println!(
                "sigma_bar = {:.5}%, {} cells, {} failed runs",
                report.sigma_bar,
                report.cells.len(),
                failed
            );
        }
        Command::Volcurve { spec, jobs, out } => {
            let spec = VolCurveSpec::load(&spec)?;
            let report = run_volatility_curve(&spec, jobs)?;
            create_dir(&out)?;
            output::write_volcurve(&out.join("vol_curve.csv"), &report)?;
            plot::vol_curve(&out.join("vol_curve.svg"), &report)?;
            println!(
                "sigma_bar = {:.5}%, {} rows",
                report.sigma_bar,
                report.rows.len()
            );
        }
    }
    Ok(())
}
