//! CSV writers for run and sweep outputs.

use std::io::Write;
use std::path::Path;

use serde::Serialize;
use tickshare_core::agents::Population;
use tickshare_core::engine::DailyRecord;
use tickshare_core::metrics::Summary;
use tickshare_core::orderbook::Trade;
use tickshare_core::SimulationOutput;

use crate::sweep::{BorderlineReport, VolCurveReport};
use crate::ExperimentError;

fn writer(path: &Path) -> Result<csv::Writer<std::fs::File>, ExperimentError> {
    csv::Writer::from_path(path).map_err(|e| ExperimentError::io(path, e))
}

fn finish<W: Write>(path: &Path, mut w: csv::Writer<W>) -> Result<(), ExperimentError> {
    w.flush().map_err(|e| ExperimentError::io(path, e))
}

fn write_rows<T: Serialize>(
    path: &Path,
    rows: impl IntoIterator<Item = T>,
) -> Result<(), ExperimentError> {
    let mut w = writer(path)?;
    for row in rows {
        w.serialize(row).map_err(|e| ExperimentError::io(path, e))?;
    }
    finish(path, w)
}

#[derive(Serialize)]
struct PriceRow {
    t: u64,
    price_quanta: i64,
    price: f64,
    #[serde(rename = "price_A")]
    price_a: f64,
    #[serde(rename = "price_B")]
    price_b: f64,
}

/// `prices.csv`: consolidated and per-market last prices per tick.
pub fn write_prices(path: &Path, out: &SimulationOutput) -> Result<(), ExperimentError> {
    let p_f = out.config.p_f;
    let rows = out.prices.iter().enumerate().map(|(i, p)| PriceRow {
        t: i as u64 + 1,
        price_quanta: p.quanta(),
        price: p.to_units(p_f),
        price_a: out.market_prices[0][i].to_units(p_f),
        price_b: out.market_prices[1][i].to_units(p_f),
    });
    write_rows(path, rows)
}

#[derive(Serialize)]
struct TradeRow {
    t: u64,
    market: &'static str,
    price_quanta: i64,
    price: f64,
    aggressor_side: &'static str,
    buy_agent: u32,
    sell_agent: u32,
}

/// Trade log: `t,market,price_quanta,price,aggressor_side,buy_agent,sell_agent`.
pub fn write_trades(path: &Path, trades: &[Trade], p_f: f64) -> Result<(), ExperimentError> {
    let rows = trades.iter().map(|t| TradeRow {
        t: t.t,
        market: t.market.as_str(),
        price_quanta: t.price.quanta(),
        price: t.price.to_units(p_f),
        aggressor_side: t.aggressor.as_str(),
        buy_agent: t.buy_agent,
        sell_agent: t.sell_agent,
    });
    write_rows(path, rows)
}

#[derive(Serialize)]
struct ShareRow {
    day: u64,
    #[serde(rename = "W_A")]
    w_a: f64,
}

/// `share.csv`: the routing share of A at the end of each day.
pub fn write_share(path: &Path, daily: &[DailyRecord]) -> Result<(), ExperimentError> {
    write_rows(
        path,
        daily.iter().map(|d| ShareRow {
            day: d.day,
            w_a: d.w_a,
        }),
    )
}

pub fn write_summary(path: &Path, rows: &[Summary]) -> Result<(), ExperimentError> {
    write_rows(path, rows)
}

/// `agent_id,w1,w2,w3,tau`
pub fn write_population(path: &Path, population: &Population) -> Result<(), ExperimentError> {
    #[derive(Serialize)]
    struct Row {
        agent_id: u32,
        w1: f64,
        w2: f64,
        w3: f64,
        tau: usize,
    }
    write_rows(
        path,
        population.profiles().iter().map(|p| Row {
            agent_id: p.id,
            w1: p.w1,
            w2: p.w2,
            w3: p.w3,
            tau: p.tau,
        }),
    )
}

#[derive(Serialize)]
struct GridRow {
    #[serde(rename = "dP_A")]
    dp_a: f64,
    #[serde(rename = "dP_B")]
    dp_b: f64,
    #[serde(rename = "W_A")]
    w_a: Option<f64>,
    sigma_t_pct: Option<f64>,
    eq5: bool,
    eq6: bool,
    seeds_ok: usize,
    seeds_failed: usize,
}

/// Per-cell averages with borderline flags evaluated at write time.
pub fn write_grid(path: &Path, report: &BorderlineReport) -> Result<(), ExperimentError> {
    write_rows(
        path,
        report.cells.iter().map(|c| GridRow {
            dp_a: c.dp_a,
            dp_b: c.dp_b,
            w_a: c.mean_w_a(),
            sigma_t_pct: c.mean_sigma(),
            eq5: report.eq5(c),
            eq6: report.eq6(c),
            seeds_ok: c.runs.len(),
            seeds_failed: c.failures.len(),
        }),
    )
}

pub fn write_volcurve(path: &Path, report: &VolCurveReport) -> Result<(), ExperimentError> {
    #[derive(Serialize)]
    struct Row {
        #[serde(rename = "dP_A")]
        dp_a: f64,
        #[serde(rename = "dP_B")]
        dp_b: f64,
        sigma_t_pct: Option<f64>,
        #[serde(rename = "W_A")]
        w_a: Option<f64>,
        seeds_ok: usize,
    }
    write_rows(
        path,
        report.rows.iter().map(|c| Row {
            dp_a: c.dp_a,
            dp_b: c.dp_b,
            sigma_t_pct: c.mean_sigma(),
            w_a: c.mean_w_a(),
            seeds_ok: c.runs.len(),
        }),
    )
}

/// One line per failed run; empty file when everything succeeded.
pub fn write_failures(path: &Path, report: &BorderlineReport) -> Result<(), ExperimentError> {
    #[derive(Serialize)]
    struct Row<'a> {
        #[serde(rename = "dP_A")]
        dp_a: f64,
        #[serde(rename = "dP_B")]
        dp_b: f64,
        seed: u64,
        error: &'a str,
    }
    write_rows(
        path,
        report.failures().map(|(c, f)| Row {
            dp_a: c.dp_a,
            dp_b: c.dp_b,
            seed: f.seed,
            error: &f.message,
        }),
    )
}
