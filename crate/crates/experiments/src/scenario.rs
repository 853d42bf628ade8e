//! A single run and everything it writes to disk.

use std::path::{Path, PathBuf};

use tickshare_core::metrics::{summarize, MeasureOptions, Summary};
use tickshare_core::{run, ScenarioConfig, SimulationOutput};

use crate::{output, plot, ExperimentError};

pub fn load_config(path: &Path) -> Result<ScenarioConfig, ExperimentError> {
    ScenarioConfig::from_toml_str(&crate::read_text(path)?)
        .map_err(|e| ExperimentError::InvalidSpec(format!("{}: {e}", path.display())))
}

/// Files written by [`run_scenario`].
pub const RUN_FILES: [&str; 7] = [
    "prices.csv",
    "trades_A.csv",
    "trades_B.csv",
    "share.csv",
    "summary.csv",
    "population.csv",
    "share_evolution.svg",
];

pub fn create_dir(dir: &Path) -> Result<(), ExperimentError> {
    std::fs::create_dir_all(dir).map_err(|e| ExperimentError::io(dir, e))
}

/// Runs `config` and writes its outputs into `dir`.
pub fn run_scenario(
    config: &ScenarioConfig,
    dir: &Path,
) -> Result<(SimulationOutput, Summary), ExperimentError> {
    let out = run(config).map_err(|e| ExperimentError::InvalidSpec(e.to_string()))?;
    let summary = summarize(&out, &MeasureOptions::default());
    write_run(&out, &summary, dir)?;
    Ok((out, summary))
}

pub fn write_run(
    out: &SimulationOutput,
    summary: &Summary,
    dir: &Path,
) -> Result<(), ExperimentError> {
    create_dir(dir)?;
    let path = |name: &str| -> PathBuf { dir.join(name) };
    let p_f = out.config.p_f;
    output::write_prices(&path("prices.csv"), out)?;
    output::write_trades(&path("trades_A.csv"), &out.trades[0], p_f)?;
    output::write_trades(&path("trades_B.csv"), &out.trades[1], p_f)?;
    output::write_share(&path("share.csv"), &out.daily)?;
    output::write_summary(&path("summary.csv"), std::slice::from_ref(summary))?;
    output::write_population(&path("population.csv"), &out.population)?;
    let label = format!("dP_A={}%, dP_B={}%", out.config.dp_a, out.config.dp_b);
    plot::share_evolution(&path("share_evolution.svg"), &[(label, out.daily.clone())])
}
