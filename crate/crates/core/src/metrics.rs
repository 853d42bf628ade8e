//! Observables computed from finished runs.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{DailyRecord, SimulationOutput};
use crate::orderbook::{BookCounters, Market};

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("insufficient data: need at least {needed}, got {got}")]
    InsufficientData { needed: usize, got: usize },
    #[error("day {day} outside recorded range 1..={days}")]
    DayOutOfRange { day: u64, days: usize },
    #[error("no orders were submitted")]
    NoSubmissions,
    #[error("series has zero variance")]
    ZeroVariance,
    #[error("non-positive or non-finite price at index {0}")]
    BadPrice(usize),
}

/// Minimum number of sampled returns for kurtosis and autocorrelations.
pub const MIN_STYLIZED_SAMPLES: usize = 10_000;

/// Per-tick log returns of one price series.
#[derive(Clone, Debug, PartialEq)]
pub struct ReturnSeries {
    label: String,
    returns: Vec<f64>,
}

impl ReturnSeries {
    pub fn from_prices(label: impl Into<String>, prices: &[f64]) -> Result<Self, MetricsError> {
        if let Some(i) = prices.iter().position(|p| !(p.is_finite() && *p > 0.0)) {
            return Err(MetricsError::BadPrice(i));
        }
        let returns = prices.windows(2).map(|w| (w[1] / w[0]).ln()).collect();
        Ok(Self {
            label: label.into(),
            returns,
        })
    }

    pub fn from_returns(label: impl Into<String>, returns: Vec<f64>) -> Self {
        debug_assert!(returns.iter().all(|r| r.is_finite()));
        Self {
            label: label.into(),
            returns,
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn returns(&self) -> &[f64] {
        &self.returns
    }

    pub fn len(&self) -> usize {
        self.returns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.returns.is_empty()
    }

    /// Non-overlapping `k`-tick returns. A trailing partial block is dropped.
    pub fn sampled(&self, k: usize) -> ReturnSeries {
        assert!(k > 0, "sampling interval must be positive");
        ReturnSeries {
            label: format!("{} (every {k})", self.label),
            returns: self
                .returns
                .chunks_exact(k)
                .map(|c| c.iter().sum())
                .collect(),
        }
    }
}

// Welford's update; stable for long series without a second pass.
fn mean_and_m2(xs: &[f64]) -> (f64, f64) {
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let delta = x - mean;
        mean += delta / (i + 1) as f64;
        m2 += delta * (x - mean);
    }
    (mean, m2)
}

/// Sample standard deviation of one-tick log returns, in percent.
pub fn one_tick_volatility(series: &ReturnSeries) -> Result<f64, MetricsError> {
    let n = series.len();
    if n < 2 {
        return Err(MetricsError::InsufficientData { needed: 2, got: n });
    }
    let (_, m2) = mean_and_m2(series.returns());
    Ok((m2 / (n - 1) as f64).sqrt() * 100.0)
}

/// Volume share of A during `day` (1-based), from that day's trades.
///
/// A day without trades carries the previous day's value forward; before
/// any traded day, `initial` is used.
pub fn market_share_at(day: u64, daily: &[DailyRecord], initial: f64) -> Result<f64, MetricsError> {
    if day == 0 || day as usize > daily.len() {
        return Err(MetricsError::DayOutOfRange {
            day,
            days: daily.len(),
        });
    }
    let share = daily[..day as usize]
        .iter()
        .rev()
        .find(|d| d.trades_a + d.trades_b > 0)
        .map_or(initial, |d| {
            d.trades_a as f64 / (d.trades_a + d.trades_b) as f64
        });
    Ok(share)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrderRates {
    pub exec_rate: f64,
    pub cancel_rate: f64,
    pub resting_fraction: f64,
}

/// Fractions of submitted orders that were filled, expired, or still rest.
pub fn execution_and_cancel_rates(counters: &BookCounters) -> Result<OrderRates, MetricsError> {
    let submitted = counters.submitted();
    if submitted == 0 {
        return Err(MetricsError::NoSubmissions);
    }
    let n = submitted as f64;
    Ok(OrderRates {
        exec_rate: counters.filled() as f64 / n,
        cancel_rate: counters.canceled() as f64 / n,
        resting_fraction: counters.resting() as f64 / n,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StylizedFacts {
    pub samples: usize,
    pub excess_kurtosis: f64,
    /// Autocorrelation of squared returns at lags `1..=L`.
    pub acf_squared: Vec<f64>,
}

impl StylizedFacts {
    /// Two-sided 95% band for an autocorrelation under the i.i.d. null.
    pub fn null_band(&self) -> f64 {
        2.0 / (self.samples as f64).sqrt()
    }
}

pub fn excess_kurtosis(xs: &[f64]) -> Result<f64, MetricsError> {
    if xs.len() < 4 {
        return Err(MetricsError::InsufficientData {
            needed: 4,
            got: xs.len(),
        });
    }
    let n = xs.len() as f64;
    let (mean, m2) = mean_and_m2(xs);
    let var = m2 / n;
    if var <= 0.0 {
        return Err(MetricsError::ZeroVariance);
    }
    let m4 = xs.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / n;
    Ok(m4 / (var * var) - 3.0)
}

/// Sample autocorrelations at lags `1..=max_lag`.
pub fn autocorrelation(xs: &[f64], max_lag: usize) -> Result<Vec<f64>, MetricsError> {
    if xs.len() <= max_lag {
        return Err(MetricsError::InsufficientData {
            needed: max_lag + 1,
            got: xs.len(),
        });
    }
    let (mean, m2) = mean_and_m2(xs);
    if m2 <= 0.0 {
        return Err(MetricsError::ZeroVariance);
    }
    let dev: Vec<f64> = xs.iter().map(|x| x - mean).collect();
    Ok((1..=max_lag)
        .map(|lag| dev.iter().zip(&dev[lag..]).map(|(a, b)| a * b).sum::<f64>() / m2)
        .collect())
}

/// Excess kurtosis of `k`-tick returns and ACF of their squares.
pub fn stylized_facts(
    series: &ReturnSeries,
    k: usize,
    lags: usize,
) -> Result<StylizedFacts, MetricsError> {
    let sampled = series.sampled(k);
    if sampled.len() < MIN_STYLIZED_SAMPLES {
        return Err(MetricsError::InsufficientData {
            needed: MIN_STYLIZED_SAMPLES,
            got: sampled.len(),
        });
    }
    let xs = sampled.returns();
    let excess_kurtosis = excess_kurtosis(xs)?;
    let squared: Vec<f64> = xs.iter().map(|x| x * x).collect();
    Ok(StylizedFacts {
        samples: xs.len(),
        excess_kurtosis,
        acf_squared: autocorrelation(&squared, lags)?,
    })
}

/// Measurement settings for [`summarize`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureOptions {
    pub measurement_day: u64,
    pub sampling_interval: usize,
    pub acf_lags: usize,
    /// Source of `sigma_t`; `None` uses the consolidated tape.
    pub volatility_market: Option<Market>,
}

impl Default for MeasureOptions {
    fn default() -> Self {
        Self {
            measurement_day: 500,
            sampling_interval: 100,
            acf_lags: 20,
            volatility_market: Some(Market::A),
        }
    }
}

/// One row of `summary.csv`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    #[serde(rename = "dP_A")]
    pub dp_a: f64,
    #[serde(rename = "dP_B")]
    pub dp_b: f64,
    pub seed: u64,
    /// Share of A at the measurement day, or at the last recorded day if
    /// the run is shorter.
    #[serde(rename = "W_A_500d")]
    pub w_a_500d: f64,
    pub sigma_t_pct: Option<f64>,
    pub exec_rate: Option<f64>,
    pub cancel_rate: Option<f64>,
    /// Absent when the run is too short for stylized-fact statistics.
    pub kurtosis: Option<f64>,
    pub acf1: Option<f64>,
}

pub fn summarize(output: &SimulationOutput, options: &MeasureOptions) -> Summary {
    let config = &output.config;
    let day = options.measurement_day.min(output.daily.len() as u64);
    let w_a = if day == 0 {
        config.initial_w_a
    } else {
        market_share_at(day, &output.daily, config.initial_w_a).expect("day in range")
    };
    let vol_series =
        ReturnSeries::from_prices("sigma_t", &output.price_path(options.volatility_market))
            .expect("trade prices are positive");
    let sigma = one_tick_volatility(&vol_series).ok();
    let rates = execution_and_cancel_rates(&output.total_counters()).ok();
    let tape = ReturnSeries::from_prices("tape", &output.price_path(None))
        .expect("trade prices are positive");
    let facts = stylized_facts(&tape, options.sampling_interval, options.acf_lags.max(1)).ok();
    Summary {
        dp_a: config.dp_a,
        dp_b: config.dp_b,
        seed: config.seed,
        w_a_500d: w_a,
        sigma_t_pct: sigma,
        exec_rate: rates.map(|r| r.exec_rate),
        cancel_rate: rates.map(|r| r.cancel_rate),
        kurtosis: facts.as_ref().map(|f| f.excess_kurtosis),
        acf1: facts.as_ref().map(|f| f.acf_squared[0]),
    }
}
