use proptest::prelude::*;
use tickshare_core::agents::PriceHistory;
use tickshare_core::engine::Simulation;
use tickshare_core::orderbook::{Market, Side};
use tickshare_core::{run, ScenarioConfig};

fn small(seed: u64) -> ScenarioConfig {
    ScenarioConfig {
        n: 100,
        tau_max: 500,
        t_c: 2_000,
        t_ab: 1_000,
        ticks_per_day: 200,
        total_steps: 20_000,
        seed,
        ..ScenarioConfig::default()
    }
}

#[test]
fn agents_act_in_rotation() {
    let sim = Simulation::new(small(1)).unwrap();
    for t in 1..=350u64 {
        assert_eq!(sim.agent_at(t) as u64, (t - 1) % 100 + 1);
    }
    let out = run(&small(1)).unwrap();
    for trade in out.trades.iter().flatten() {
        let agent = ((trade.t - 1) % 100 + 1) as u32;
        match trade.aggressor {
            Side::Buy => assert_eq!(trade.buy_agent, agent),
            Side::Sell => assert_eq!(trade.sell_agent, agent),
        }
    }
}

#[test]
fn same_seed_same_run() {
    let a = run(&small(5)).unwrap();
    let b = run(&small(5)).unwrap();
    assert_eq!(a.trades, b.trades);
    assert_eq!(a.prices, b.prices);
    assert_eq!(a.daily, b.daily);
    let c = run(&small(6)).unwrap();
    assert_ne!(a.prices, c.prices);
}

#[test]
fn step_by_step_equals_run() {
    let config = small(9);
    let mut sim = Simulation::new(config.clone()).unwrap();
    let mut trades = Vec::new();
    while !sim.is_finished() {
        trades.extend(sim.step());
    }
    let stepped = sim.finish();
    let whole = run(&config).unwrap();
    assert_eq!(stepped.prices, whole.prices);
    let mut all: Vec<_> = whole.trades.iter().flatten().copied().collect();
    all.sort_by_key(|t| t.t);
    assert_eq!(trades, all);
}

#[test]
fn warmup_builds_resting_depth() {
    for seed in 1..=10 {
        let config = ScenarioConfig {
            total_steps: 20_000,
            seed,
            ..ScenarioConfig::default()
        };
        let mut sim = Simulation::new(config).unwrap();
        while sim.t() < 20_000 {
            sim.step();
        }
        let depth: usize = Market::BOTH
            .iter()
            .map(|&m| sim.book(m).resting_count())
            .sum();
        assert!(depth >= 100, "seed {seed}: {depth} resting orders at t_c");
    }
}

#[test]
fn volume_and_orders_are_conserved() {
    let out = run(&small(2)).unwrap();
    let daily_a: u64 = out.daily.iter().map(|d| d.trades_a).sum();
    let daily_b: u64 = out.daily.iter().map(|d| d.trades_b).sum();
    assert_eq!(daily_a as usize, out.trades[0].len());
    assert_eq!(daily_b as usize, out.trades[1].len());
    let c = out.total_counters();
    assert_eq!(c.submitted(), out.turns.submitted);
    assert_eq!(c.filled(), 2 * (daily_a + daily_b));
    let turns = out.turns;
    assert_eq!(
        turns.submitted + turns.skipped + turns.no_side + turns.discarded,
        out.config.total_steps
    );
    assert_eq!(
        turns.submitted,
        turns.routed_best_price + turns.routed_by_share
    );
}

#[test]
fn prices_stay_on_each_grid() {
    let config = ScenarioConfig {
        dp_a: 0.1,
        dp_b: 0.001,
        ..small(4)
    };
    let out = run(&config).unwrap();
    for m in Market::BOTH {
        let tick = config.tick(m).unwrap();
        assert!(out.trades[m.index()]
            .iter()
            .all(|t| t.price.is_multiple_of(tick)));
    }
}

#[test]
fn price_reverts_toward_fundamental() {
    let out = run(&ScenarioConfig {
        total_steps: 200_000,
        ..ScenarioConfig::default()
    })
    .unwrap();
    let p_f = out.config.p_f;
    let tail = &out.prices[100_000..];
    let mean_log: f64 = tail
        .iter()
        .map(|p| (p.to_units(p_f) / p_f).ln())
        .sum::<f64>()
        / tail.len() as f64;
    assert!(mean_log.abs() < 0.05, "mean log deviation {mean_log}");
}

proptest! {
    #[test]
    fn historical_return_matches_definition(
        prices in prop::collection::vec(9_000.0f64..11_000.0, 1..60),
        tau in 1usize..40,
    ) {
        let mut h = PriceHistory::new(10_000.0, 40);
        let mut all = vec![10_000.0];
        for &p in &prices {
            h.push(p);
            all.push(p);
        }
        let t = all.len() - 1;
        let expected = if t < tau { 0.0 } else { (all[t] / all[t - tau]).ln() };
        prop_assert!((h.historical_return(tau) - expected).abs() < 1e-15);
    }
}
