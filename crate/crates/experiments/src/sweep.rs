//! Parallel execution of many independent runs.
//!
//! Every run owns its simulation and RNG, so results do not depend on the
//! number of workers or on the order runs are scheduled in.

use rayon::prelude::*;
use tickshare_core::metrics::{summarize, MeasureOptions, Summary};
use tickshare_core::{run, ScenarioConfig};

use crate::spec::{SweepSpec, VolCurveSpec};
use crate::ExperimentError;

/// Runs every config and summarizes it, preserving input order.
pub fn run_summaries(
    configs: &[ScenarioConfig],
    options: &MeasureOptions,
    jobs: usize,
) -> Result<Vec<Result<Summary, String>>, ExperimentError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| ExperimentError::Other(e.to_string()))?;
    Ok(pool.install(|| {
        configs
            .par_iter()
            .map(|config| {
                run(config)
                    .map(|out| summarize(&out, options))
                    .map_err(|e| e.to_string())
            })
            .collect()
    }))
}

#[derive(Clone, Debug, PartialEq)]
pub struct CellFailure {
    pub seed: u64,
    pub message: String,
}

/// All runs of one `(dp_a, dp_b)` cell.
#[derive(Clone, Debug, PartialEq)]
pub struct CellResult {
    pub dp_a: f64,
    pub dp_b: f64,
    pub runs: Vec<Summary>,
    pub failures: Vec<CellFailure>,
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

impl CellResult {
    /// Seed-averaged `W_A` at the measurement day.
    pub fn mean_w_a(&self) -> Option<f64> {
        mean(self.runs.iter().map(|s| s.w_a_500d))
    }

    pub fn mean_sigma(&self) -> Option<f64> {
        mean(self.runs.iter().filter_map(|s| s.sigma_t_pct))
    }

    /// `dp_a <= dp_b`.
    pub fn satisfies_tick_order(&self) -> bool {
        self.dp_a <= self.dp_b
    }

    /// `dp_a < sigma_bar`, both in percent.
    pub fn satisfies_volatility_bound(&self, sigma_bar: f64) -> bool {
        self.dp_a < sigma_bar
    }
}

/// Cell results with the two borderline conditions evaluated against the
/// measured baseline volatility.
#[derive(Clone, Debug, PartialEq)]
pub struct BorderlineReport {
    pub sigma_bar: f64,
    pub measurement_day: u64,
    pub reference: Vec<Summary>,
    pub cells: Vec<CellResult>,
}

impl BorderlineReport {
    pub fn eq5(&self, cell: &CellResult) -> bool {
        cell.satisfies_tick_order()
    }

    pub fn eq6(&self, cell: &CellResult) -> bool {
        cell.satisfies_volatility_bound(self.sigma_bar)
    }

    /// Whether A is expected to keep its share: either condition holds.
    pub fn share_protected(&self, cell: &CellResult) -> bool {
        self.eq5(cell) || self.eq6(cell)
    }

    pub fn failures(&self) -> impl Iterator<Item = (&CellResult, &CellFailure)> {
        self.cells
            .iter()
            .flat_map(|c| c.failures.iter().map(move |f| (c, f)))
    }
}

fn measure_options(day: u64) -> MeasureOptions {
    MeasureOptions {
        measurement_day: day,
        ..MeasureOptions::default()
    }
}

/// Runs the reference fine-tick runs plus every cell of the grid.
pub fn run_sweep(spec: &SweepSpec, jobs: usize) -> Result<BorderlineReport, ExperimentError> {
    spec.validate()?;
    let seeds: Vec<u64> = spec.seeds().collect();
    let cells = spec.cells();
    let reference = spec.reference_dp;

    let mut configs: Vec<ScenarioConfig> = seeds
        .iter()
        .map(|&s| spec.cell_config(reference, reference, s))
        .collect();
    for &(a, b) in &cells {
        configs.extend(seeds.iter().map(|&s| spec.cell_config(a, b, s)));
    }
    let results = run_summaries(&configs, &measure_options(spec.measurement_day), jobs)?;
    let mut results = results.into_iter();

    let reference_runs: Vec<Summary> = results
        .by_ref()
        .take(seeds.len())
        .collect::<Result<_, _>>()
        .map_err(|e| ExperimentError::Other(format!("reference run failed: {e}")))?;
    let sigma_bar = mean(reference_runs.iter().filter_map(|s| s.sigma_t_pct)).ok_or_else(|| {
        ExperimentError::Other("reference runs too short to measure volatility".into())
    })?;

    let cells = cells
        .into_iter()
        .map(|(dp_a, dp_b)| {
            let mut cell = CellResult {
                dp_a,
                dp_b,
                runs: Vec::new(),
                failures: Vec::new(),
            };
            for (&seed, result) in seeds.iter().zip(results.by_ref()) {
                match result {
                    Ok(summary) => cell.runs.push(summary),
                    Err(message) => cell.failures.push(CellFailure { seed, message }),
                }
            }
            cell
        })
        .collect();

    Ok(BorderlineReport {
        sigma_bar,
        measurement_day: spec.measurement_day,
        reference: reference_runs,
        cells,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct VolCurveReport {
    pub sigma_bar: f64,
    pub dp_b: f64,
    pub rows: Vec<CellResult>,
}

pub fn run_volatility_curve(
    spec: &VolCurveSpec,
    jobs: usize,
) -> Result<VolCurveReport, ExperimentError> {
    spec.validate()?;
    let report = run_sweep(&spec.as_sweep(), jobs)?;
    Ok(VolCurveReport {
        sigma_bar: report.sigma_bar,
        dp_b: spec.dp_b,
        rows: report.cells,
    })
}
