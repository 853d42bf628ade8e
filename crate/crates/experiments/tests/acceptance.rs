//! Model acceptance checks. Runs full-length simulations, prints one
//! PASS/FAIL line per criterion and exits nonzero if any fails.

#[path = "../../core/tests/support/brute_matcher.rs"]
mod brute_matcher;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use brute_matcher::BruteMatcher;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tickshare_core::metrics::{summarize, MeasureOptions, ReturnSeries, Summary};
use tickshare_core::orderbook::{ExecutionReport, LimitOrderBook, Market, Order, Price, Side};
use tickshare_core::{run, ScenarioConfig};
use tickshare_experiments::scenario::run_scenario;
use tickshare_experiments::spec::{SweepSpec, DEFAULT_GRID};
use tickshare_experiments::sweep::{run_sweep, BorderlineReport};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn jobs() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

fn fmt_list(xs: &[f64], digits: usize) -> String {
    let parts: Vec<String> = xs.iter().map(|x| format!("{x:.digits$}")).collect();
    format!("[{}]", parts.join(", "))
}

fn config(dp_a: f64, dp_b: f64, seed: u64) -> ScenarioConfig {
    ScenarioConfig {
        dp_a,
        dp_b,
        seed,
        ..ScenarioConfig::default()
    }
}

fn summary(config: &ScenarioConfig) -> Summary {
    summarize(
        &run(config).expect("valid config"),
        &MeasureOptions::default(),
    )
}

fn baseline_volatility() -> Outcome {
    let mut sigmas = Vec::new();
    let mut slowest = Duration::ZERO;
    for seed in 1..=3 {
        let start = Instant::now();
        let s = summary(&config(0.0001, 0.0001, seed));
        slowest = slowest.max(start.elapsed());
        sigmas.push(s.sigma_t_pct.expect("long run"));
    }
    let mean = sigmas.iter().sum::<f64>() / sigmas.len() as f64;
    let pass = (0.025..=0.10).contains(&mean) && slowest < Duration::from_secs(60);
    outcome(
        pass,
        format!(
            "sigma_bar = {mean:.4}% (seeds {}), target [0.025, 0.10]; slowest run {:.2} s",
            fmt_list(&sigmas, 4),
            slowest.as_secs_f64()
        ),
    )
}

fn median_share(dp_a: f64, dp_b: f64) -> (f64, Vec<f64>) {
    let shares: Vec<f64> = (1..=5)
        .map(|seed| summary(&config(dp_a, dp_b, seed)).w_a_500d)
        .collect();
    (median(shares.clone()), shares)
}

fn share_check(dp_a: f64, dp_b: f64, at_least: bool, bound: f64) -> Outcome {
    let (m, shares) = median_share(dp_a, dp_b);
    let pass = if at_least { m >= bound } else { m <= bound };
    outcome(
        pass,
        format!(
            "dP_A={dp_a}% dP_B={dp_b}%: median W_A(500d) = {m:.3} (seeds {}), need {} {bound}",
            fmt_list(&shares, 3),
            if at_least { ">=" } else { "<=" }
        ),
    )
}

fn borderline(report: &BorderlineReport) -> Outcome {
    let mut correct = 0;
    let mut wrong = Vec::new();
    for cell in &report.cells {
        let w = cell.mean_w_a().unwrap_or(f64::NAN);
        let ok = if report.share_protected(cell) {
            w >= 0.6
        } else {
            w <= 0.5
        };
        if ok {
            correct += 1;
        } else {
            wrong.push(format!("({}, {}): {w:.3}", cell.dp_a, cell.dp_b));
        }
    }
    let total = report.cells.len();
    let fraction = correct as f64 / total as f64;
    outcome(
        fraction >= 0.9,
        format!(
            "{correct}/{total} cells classified correctly ({:.0}%), sigma_bar = {:.4}%; misclassified (dP_A, dP_B): W_A = {}",
            100.0 * fraction,
            report.sigma_bar,
            if wrong.is_empty() { "none".into() } else { wrong.join("; ") }
        ),
    )
}

fn volatility_curve(report: &BorderlineReport) -> Outcome {
    let sigma = |dp_a: f64| {
        report
            .cells
            .iter()
            .find(|c| c.dp_a == dp_a && c.dp_b == 0.0001)
            .and_then(|c| c.mean_sigma())
            .unwrap_or(f64::NAN)
    };
    let curve: Vec<f64> = DEFAULT_GRID.iter().map(|&a| sigma(a)).collect();
    let (fine, small) = (sigma(0.0001), sigma(0.001));
    let flat = ((fine - small) / fine).abs() < 0.2;
    let rises = sigma(0.1) > 2.0 * report.sigma_bar;
    let coarse: Vec<f64> = DEFAULT_GRID
        .iter()
        .filter(|&&a| a >= 0.05)
        .map(|&a| sigma(a))
        .collect();
    let monotone = coarse.windows(2).all(|w| w[1] >= w[0]);
    outcome(
        flat && rises && monotone,
        format!(
            "sigma_t over dP_A {:?} = {}; flat at small ticks: {flat}; sigma_t(0.1%) = {:.4}% > 2 x {:.4}%: {rises}; non-decreasing from 0.05%: {monotone}",
            DEFAULT_GRID,
            fmt_list(&curve, 4),
            sigma(0.1),
            report.sigma_bar
        ),
    )
}

fn single_market() -> ScenarioConfig {
    ScenarioConfig {
        dp_a: 0.0001,
        dp_b: 0.0001,
        initial_w_a: 1.0,
        ..ScenarioConfig::default()
    }
}

fn stylized_facts() -> Outcome {
    let out = run(&single_market()).expect("valid config");
    assert!(out.trades[1].is_empty(), "market B must stay empty");
    let s = summarize(&out, &MeasureOptions::default());
    let tape = ReturnSeries::from_prices("tape", &out.price_path(None)).expect("positive prices");
    let samples = tape.sampled(100).len();
    let band = 2.0 / (samples as f64).sqrt();
    let (k, acf1) = (s.kurtosis.unwrap_or(f64::NAN), s.acf1.unwrap_or(f64::NAN));
    outcome(
        k > 0.0 && acf1 > band,
        format!(
            "N = {samples}, excess kurtosis = {k:.3} > 0, ACF(r^2, lag 1) = {acf1:.4} > {band:.4}"
        ),
    )
}

fn matching_oracle() -> Outcome {
    let tick = Price(10);
    let mut book = LimitOrderBook::new(Market::A, tick, 1_000).unwrap();
    let mut brute = BruteMatcher::new(1_000);
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut mismatch = None;
    for now in 1..=10_000u64 {
        book.purge_expired(now);
        brute.purge(now);
        let order = Order {
            id: now,
            agent_id: rng.random_range(1..=1000),
            side: if rng.random() { Side::Buy } else { Side::Sell },
            price: Price(tick.0 * rng.random_range(980..1020)),
            submitted_at: now,
            market: Market::A,
        };
        let fast = match book.submit(order, now).unwrap() {
            ExecutionReport::Filled(t) => Some(t),
            ExecutionReport::Resting => None,
        };
        let agrees = fast == brute.submit(order, now)
            && book.best_bid() == brute.best(Side::Buy)
            && book.best_ask() == brute.best(Side::Sell)
            && book.resting_count() == brute.resting_len();
        if !agrees && mismatch.is_none() {
            mismatch = Some(now);
        }
    }
    let identical = mismatch.is_none() && book.trades() == &brute.trades[..];
    outcome(
        identical,
        format!(
            "10000 orders, {} trades, logs identical: {identical}",
            book.trades().len()
        ),
    )
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().expect("temp dir");
    let cfg = config(0.01, 0.001, 7);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    run_scenario(&cfg, &a).expect("first run");
    run_scenario(&cfg, &b).expect("second run");
    let files = ["trades_A.csv", "trades_B.csv", "summary.csv"];
    let same: Vec<bool> = files
        .iter()
        .map(|f| std::fs::read(a.join(f)).unwrap() == std::fs::read(b.join(f)).unwrap())
        .collect();
    outcome(
        same.iter().all(|&s| s),
        format!("byte-identical {files:?}: {same:?}"),
    )
}

fn mean_reversion() -> Outcome {
    let out = run(&single_market()).expect("valid config");
    let p_f = out.config.p_f;
    let path = out.price_path(None);
    let mean = path.iter().map(|p| (p / p_f).ln()).sum::<f64>() / path.len() as f64;
    outcome(
        mean.abs() < 0.05,
        format!("time-average ln(P/P_f) = {mean:.5}, need |.| < 0.05"),
    )
}

fn main() -> ExitCode {
    // Accept and ignore libtest arguments passed through by `cargo test`.
    let filter: Option<String> = std::env::args().skip(1).find(|a| !a.starts_with('-'));
    let wanted = |id: usize| filter.as_deref().is_none_or(|f| f == id.to_string());

    let grid = std::sync::OnceLock::new();
    let grid = || {
        grid.get_or_init(|| run_sweep(&SweepSpec::default(), jobs()).expect("default grid runs"))
    };

    let criteria: [(usize, &str, &dyn Fn() -> Outcome); 10] = [
        (1, "baseline volatility", &baseline_volatility),
        (2, "equal-tick stability", &|| {
            share_check(0.01, 0.01, true, 0.7)
        }),
        (3, "share capture", &|| share_check(0.1, 0.01, false, 0.5)),
        (4, "small-tick immunity", &|| {
            share_check(0.001, 0.0001, true, 0.7)
        }),
        (5, "borderline structure", &|| borderline(grid())),
        (6, "volatility curve", &|| volatility_curve(grid())),
        (7, "stylized facts", &stylized_facts),
        (8, "matching oracle", &matching_oracle),
        (9, "determinism", &determinism),
        (10, "mean reversion", &mean_reversion),
    ];

    let mut failed = 0;
    for (id, name, check) in criteria {
        if !wanted(id) {
            continue;
        }
        let start = Instant::now();
        let result = check();
        if !result.pass {
            failed += 1;
        }
        println!(
            "{} [{id:>2}] {name}: {} ({:.1} s)",
            if result.pass { "PASS" } else { "FAIL" },
            result.detail,
            start.elapsed().as_secs_f64()
        );
    }
    if failed > 0 {
        println!("acceptance: {failed} criterion(s) failed");
        ExitCode::FAILURE
    } else {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    }
}
