//! Sweep and volatility-curve specification files (TOML).

use std::path::Path;

use serde::{Deserialize, Serialize};
use tickshare_core::{Price, ScenarioConfig};

use crate::ExperimentError;

/// Log-spaced tick grid, in percent of the fundamental value.
pub const DEFAULT_GRID: [f64; 10] = [
    0.0001, 0.0002, 0.0005, 0.001, 0.002, 0.005, 0.01, 0.02, 0.05, 0.1,
];

/// Finest tick in the default grid; used for the reference volatility run.
pub const REFERENCE_TICK: f64 = 0.0001;

fn default_grid() -> Vec<f64> {
    DEFAULT_GRID.to_vec()
}

fn default_seeds() -> u32 {
    3
}

fn default_day() -> u64 {
    500
}

fn default_reference() -> f64 {
    REFERENCE_TICK
}

fn default_fixed_b() -> f64 {
    0.0001
}

/// A grid of `(dp_a, dp_b)` cells, each run for `seeds_per_cell` seeds
/// `base.seed, base.seed + 1, ...`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    #[serde(default)]
    pub base: ScenarioConfig,
    #[serde(default = "default_grid")]
    pub dp_a: Vec<f64>,
    #[serde(default = "default_grid")]
    pub dp_b: Vec<f64>,
    #[serde(default = "default_seeds")]
    pub seeds_per_cell: u32,
    #[serde(default = "default_day")]
    pub measurement_day: u64,
    /// Tick used in both markets for the run that measures the baseline
    /// one-tick volatility.
    #[serde(default = "default_reference")]
    pub reference_dp: f64,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            base: ScenarioConfig::default(),
            dp_a: default_grid(),
            dp_b: default_grid(),
            seeds_per_cell: default_seeds(),
            measurement_day: default_day(),
            reference_dp: default_reference(),
        }
    }
}

/// `sigma_t` and `W_A` against `dp_a` with `dp_b` held fixed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VolCurveSpec {
    #[serde(default)]
    pub base: ScenarioConfig,
    #[serde(default = "default_grid")]
    pub dp_a: Vec<f64>,
    #[serde(default = "default_fixed_b")]
    pub dp_b: f64,
    #[serde(default = "default_seeds")]
    pub seeds_per_cell: u32,
    #[serde(default = "default_day")]
    pub measurement_day: u64,
    #[serde(default = "default_reference")]
    pub reference_dp: f64,
}

impl Default for VolCurveSpec {
    fn default() -> Self {
        Self {
            base: ScenarioConfig::default(),
            dp_a: default_grid(),
            dp_b: default_fixed_b(),
            seeds_per_cell: default_seeds(),
            measurement_day: default_day(),
            reference_dp: default_reference(),
        }
    }
}

fn check_tick(field: &'static str, value: f64) -> Result<(), ExperimentError> {
    Price::from_percent_of_fundamental(value)
        .map(|_| ())
        .ok_or(ExperimentError::InvalidSpec(format!(
            "{field} value {value}% is not an exact number of price quanta"
        )))
}

fn check_common(base: &ScenarioConfig, seeds: u32, reference: f64) -> Result<(), ExperimentError> {
    base.validate()
        .map_err(|e| ExperimentError::InvalidSpec(format!("base: {e}")))?;
    if seeds == 0 {
        return Err(ExperimentError::InvalidSpec(
            "seeds_per_cell must be at least 1".into(),
        ));
    }
    check_tick("reference_dp", reference)
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), ExperimentError> {
        check_common(&self.base, self.seeds_per_cell, self.reference_dp)?;
        if self.dp_a.is_empty() || self.dp_b.is_empty() {
            return Err(ExperimentError::InvalidSpec("empty tick grid".into()));
        }
        for &v in &self.dp_a {
            check_tick("dp_a", v)?;
        }
        for &v in &self.dp_b {
            check_tick("dp_b", v)?;
        }
        Ok(())
    }

    pub fn from_toml_str(text: &str) -> Result<Self, ExperimentError> {
        let spec: Self =
            toml::from_str(text).map_err(|e| ExperimentError::InvalidSpec(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<Self, ExperimentError> {
        Self::from_toml_str(&crate::read_text(path)?)
    }

    /// Cells in row-major order (`dp_a` outer, `dp_b` inner).
    pub fn cells(&self) -> Vec<(f64, f64)> {
        self.dp_a
            .iter()
            .flat_map(|&a| self.dp_b.iter().map(move |&b| (a, b)))
            .collect()
    }

    pub fn seeds(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.seeds_per_cell as u64).map(|r| self.base.seed.wrapping_add(r))
    }

    /// Config of one run of cell `(dp_a, dp_b)`.
    pub fn cell_config(&self, dp_a: f64, dp_b: f64, seed: u64) -> ScenarioConfig {
        ScenarioConfig {
            dp_a,
            dp_b,
            seed,
            ..self.base.clone()
        }
    }
}

impl VolCurveSpec {
    pub fn validate(&self) -> Result<(), ExperimentError> {
        check_common(&self.base, self.seeds_per_cell, self.reference_dp)?;
        if self.dp_a.is_empty() {
            return Err(ExperimentError::InvalidSpec("empty dp_a list".into()));
        }
        for &v in &self.dp_a {
            check_tick("dp_a", v)?;
        }
        check_tick("dp_b", self.dp_b)
    }

    pub fn from_toml_str(text: &str) -> Result<Self, ExperimentError> {
        let spec: Self =
            toml::from_str(text).map_err(|e| ExperimentError::InvalidSpec(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<Self, ExperimentError> {
        Self::from_toml_str(&crate::read_text(path)?)
    }

    /// The equivalent one-column sweep.
    pub fn as_sweep(&self) -> SweepSpec {
        SweepSpec {
            base: self.base.clone(),
            dp_a: self.dp_a.clone(),
            dp_b: vec![self.dp_b],
            seeds_per_cell: self.seeds_per_cell,
            measurement_day: self.measurement_day,
            reference_dp: self.reference_dp,
        }
    }
}
