//! Round-robin simulation driver.
//!
//! At tick `t` agent `((t - 1) mod n) + 1` acts. Each step runs in a fixed
//! order: purge expired orders in both books, form the agent's intent,
//! route it, submit it, record any trade, then append the consolidated
//! price (carried forward when nothing traded).
//!
//! A single ChaCha8 generator seeded from `seed` drives everything. The
//! population is drawn first; after that each tick consumes, in order, the
//! noise draw, the order-price draw and, only when the order is routed by
//! volume share, one uniform draw.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::agents::{form_intent, BehaviorParams, Population, PopulationParams, PriceHistory};
use crate::orderbook::{
    round_to_tick, BookCounters, ExecutionReport, LimitOrderBook, Market, Order, Price, Tick, Trade,
};
use crate::router::{select_market, Quote, Route, VolumeWindow};

pub type SimRng = ChaCha8Rng;

/// Every model parameter of one run. Tick sizes are percentages of `p_f`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub n: u32,
    pub w1_max: f64,
    pub w2_max: f64,
    pub w3_max: f64,
    pub tau_max: u32,
    pub sigma_eps: f64,
    pub p_sigma: f64,
    pub t_c: u64,
    pub p_f: f64,
    pub t_ab: u64,
    pub dp_a: f64,
    pub dp_b: f64,
    pub initial_w_a: f64,
    pub total_steps: u64,
    pub ticks_per_day: u64,
    pub seed: u64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            n: 1000,
            w1_max: 1.0,
            w2_max: 10.0,
            w3_max: 1.0,
            tau_max: 10_000,
            sigma_eps: 0.06,
            p_sigma: 30.0,
            t_c: 20_000,
            p_f: 10_000.0,
            t_ab: 10_000,
            dp_a: 0.01,
            dp_b: 0.01,
            initial_w_a: 0.9,
            total_steps: 1_000_000,
            ticks_per_day: 2_000,
            seed: 1,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("`{field}` must be positive, got {value}")]
    NotPositive { field: &'static str, value: f64 },
    #[error("`{field}` = {value}% is not an exact positive number of price quanta")]
    TickNotRepresentable { field: &'static str, value: f64 },
    #[error("`initial_w_a` must lie in [0, 1], got {0}")]
    ShareOutOfRange(f64),
    #[error("invalid config file: {0}")]
    Parse(String),
}

impl ScenarioConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let config: ScenarioConfig =
            toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let positive: [(&'static str, f64); 11] = [
            ("n", self.n as f64),
            ("w1_max", self.w1_max),
            ("w2_max", self.w2_max),
            ("w3_max", self.w3_max),
            ("tau_max", self.tau_max as f64),
            ("sigma_eps", self.sigma_eps),
            ("p_sigma", self.p_sigma),
            ("t_c", self.t_c as f64),
            ("p_f", self.p_f),
            ("t_ab", self.t_ab as f64),
            ("ticks_per_day", self.ticks_per_day as f64),
        ];
        for (field, value) in positive {
            if !(value > 0.0 && value.is_finite()) {
                return Err(ConfigError::NotPositive { field, value });
            }
        }
        self.tick(Market::A)?;
        self.tick(Market::B)?;
        if !(0.0..=1.0).contains(&self.initial_w_a) {
            return Err(ConfigError::ShareOutOfRange(self.initial_w_a));
        }
        Ok(())
    }

    /// Tick size of `market` in quanta.
    pub fn tick(&self, market: Market) -> Result<Price, ConfigError> {
        let (field, value) = match market {
            Market::A => ("dp_a", self.dp_a),
            Market::B => ("dp_b", self.dp_b),
        };
        Price::from_percent_of_fundamental(value)
            .ok_or(ConfigError::TickNotRepresentable { field, value })
    }

    pub fn population_params(&self) -> PopulationParams {
        PopulationParams {
            n: self.n,
            w1_max: self.w1_max,
            w2_max: self.w2_max,
            w3_max: self.w3_max,
            tau_max: self.tau_max,
        }
    }

    pub fn behavior_params(&self) -> BehaviorParams {
        BehaviorParams {
            sigma_eps: self.sigma_eps,
            p_sigma: self.p_sigma,
            t_c: self.t_c,
            p_f: self.p_f,
        }
    }

    /// Number of complete days in the run.
    pub fn days(&self) -> u64 {
        self.total_steps / self.ticks_per_day
    }
}

/// End-of-day snapshot of routing state and that day's volume.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DailyRecord {
    pub day: u64,
    /// Volume share the router uses (trailing `t_AB` window).
    pub w_a: f64,
    pub trades_a: u64,
    pub trades_b: u64,
}

/// What happened to agent turns.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TurnCounters {
    pub submitted: u64,
    /// Zero weight sum or a non-positive order price.
    pub skipped: u64,
    /// Order price exactly equal to the reference price.
    pub no_side: u64,
    /// Rounded onto a non-positive grid price.
    pub discarded: u64,
    pub routed_best_price: u64,
    pub routed_by_share: u64,
}

#[derive(Clone, Debug)]
pub struct SimulationOutput {
    pub config: ScenarioConfig,
    pub population: Population,
    /// Consolidated price after each tick `1..=T`.
    pub prices: Vec<Price>,
    /// Last trade price of each market after each tick, `P_f` before its first trade.
    pub market_prices: [Vec<Price>; 2],
    pub trades: [Vec<Trade>; 2],
    pub daily: Vec<DailyRecord>,
    pub counters: [BookCounters; 2],
    pub turns: TurnCounters,
}

impl SimulationOutput {
    /// Price path in units, `P^0 = P_f` followed by the per-tick prices,
    /// of the consolidated tape (`None`) or one market.
    pub fn price_path(&self, market: Option<Market>) -> Vec<f64> {
        let p_f = self.config.p_f;
        let series = match market {
            None => &self.prices,
            Some(m) => &self.market_prices[m.index()],
        };
        std::iter::once(p_f)
            .chain(series.iter().map(|p| p.to_units(p_f)))
            .collect()
    }

    pub fn total_counters(&self) -> BookCounters {
        self.counters[0].merged(&self.counters[1])
    }
}

/// Mutable state of one run.
#[derive(Clone, Debug)]
pub struct Simulation {
    config: ScenarioConfig,
    behavior: BehaviorParams,
    population: Population,
    history: PriceHistory,
    books: [LimitOrderBook; 2],
    window: VolumeWindow,
    rng: SimRng,
    t: Tick,
    next_order_id: u64,
    tape: Price,
    market_last: [Price; 2],
    day_trades: [u64; 2],
    turns: TurnCounters,
    prices: Vec<Price>,
    market_prices: [Vec<Price>; 2],
    daily: Vec<DailyRecord>,
}

impl Simulation {
    pub fn new(config: ScenarioConfig) -> Result<Self, ConfigError> {
        config.validate()?;
        let mut rng = SimRng::seed_from_u64(config.seed);
        let population = Population::init(&config.population_params(), &mut rng);
        let book = |m: Market| -> Result<LimitOrderBook, ConfigError> {
            let tick = config.tick(m)?;
            Ok(LimitOrderBook::new(m, tick, config.t_c).expect("validated tick"))
        };
        let books = [book(Market::A)?, book(Market::B)?];
        let steps = config.total_steps as usize;
        Ok(Self {
            behavior: config.behavior_params(),
            history: PriceHistory::new(config.p_f, config.tau_max as usize),
            window: VolumeWindow::new(config.t_ab, config.initial_w_a),
            population,
            books,
            rng,
            t: 0,
            next_order_id: 1,
            tape: Price::FUNDAMENTAL,
            market_last: [Price::FUNDAMENTAL; 2],
            day_trades: [0; 2],
            turns: TurnCounters::default(),
            prices: Vec::with_capacity(steps),
            market_prices: [Vec::with_capacity(steps), Vec::with_capacity(steps)],
            daily: Vec::with_capacity(config.days() as usize),
            config,
        })
    }

    pub fn config(&self) -> &ScenarioConfig {
        &self.config
    }

    /// Last completed tick.
    pub fn t(&self) -> Tick {
        self.t
    }

    pub fn population(&self) -> &Population {
        &self.population
    }

    pub fn book(&self, market: Market) -> &LimitOrderBook {
        &self.books[market.index()]
    }

    pub fn consolidated_price(&self) -> Price {
        self.tape
    }

    pub fn history(&self) -> &PriceHistory {
        &self.history
    }

    pub fn turns(&self) -> &TurnCounters {
        &self.turns
    }

    pub fn is_finished(&self) -> bool {
        self.t >= self.config.total_steps
    }

    /// Agent acting at tick `t`.
    pub fn agent_at(&self, t: Tick) -> u32 {
        ((t - 1) % self.config.n as u64) as u32 + 1
    }

    /// Advances one tick. Returns the trade, if any.
    pub fn step(&mut self) -> Option<Trade> {
        let t = self.t + 1;
        self.t = t;
        for book in &mut self.books {
            book.purge_expired(t);
        }

        let trade = self.act(t);
        if let Some(trade) = trade {
            let m = trade.market.index();
            self.tape = trade.price;
            self.market_last[m] = trade.price;
            self.day_trades[m] += 1;
            self.window.record_trade(trade.market, t);
        }

        self.history.push(self.tape.to_units(self.config.p_f));
        self.prices.push(self.tape);
        for m in Market::BOTH {
            self.market_prices[m.index()].push(self.market_last[m.index()]);
        }
        if t.is_multiple_of(self.config.ticks_per_day) {
            self.daily.push(DailyRecord {
                day: t / self.config.ticks_per_day,
                w_a: self.window.share_a(t),
                trades_a: self.day_trades[0],
                trades_b: self.day_trades[1],
            });
            self.day_trades = [0; 2];
        }
        trade
    }

    fn act(&mut self, t: Tick) -> Option<Trade> {
        let agent_id = self.agent_at(t);
        let profile = *self
            .population
            .get(agent_id)
            .expect("agent ids cover 1..=n");
        let Some(intent) = form_intent(&profile, &self.history, t, &self.behavior, &mut self.rng)
        else {
            self.turns.skipped += 1;
            return None;
        };
        let Some(side) = intent.side else {
            self.turns.no_side += 1;
            return None;
        };

        let raw = Price::quanta_from_units(intent.raw_price, self.config.p_f);
        let (Some(price_a), Some(price_b)) = (
            round_to_tick(raw, side, self.books[0].tick()),
            round_to_tick(raw, side, self.books[1].tick()),
        ) else {
            self.turns.discarded += 1;
            return None;
        };
        let candidates = [price_a, price_b];
        let quotes = [0, 1].map(|i| Quote {
            bid: self.books[i].best_bid(),
            ask: self.books[i].best_ask(),
        });
        let share_a = self.window.share_a(t);
        let route = select_market(side, candidates, quotes, share_a, &mut self.rng);
        match route {
            Route::BestPrice(_) => self.turns.routed_best_price += 1,
            Route::ByShare(_) => self.turns.routed_by_share += 1,
        }
        let market = route.market();

        let order = Order {
            id: self.next_order_id,
            agent_id,
            side,
            price: candidates[market.index()],
            submitted_at: t,
            market,
        };
        self.next_order_id += 1;
        self.turns.submitted += 1;
        match self.books[market.index()].submit(order, t) {
            Ok(ExecutionReport::Filled(trade)) => Some(trade),
            Ok(ExecutionReport::Resting) => None,
            Err(e) => unreachable!("engine only submits rounded orders: {e}"),
        }
    }

    /// Runs the remaining ticks.
    pub fn run_to_end(&mut self) {
        while !self.is_finished() {
            self.step();
        }
    }

    pub fn finish(self) -> SimulationOutput {
        let counters = [*self.books[0].counters(), *self.books[1].counters()];
        let [a, b] = self.books;
        SimulationOutput {
            config: self.config,
            population: self.population,
            prices: self.prices,
            market_prices: self.market_prices,
            trades: [a.into_trades(), b.into_trades()],
            daily: self.daily,
            counters,
            turns: self.turns,
        }
    }
}

/// Runs a whole scenario.
pub fn run(config: &ScenarioConfig) -> Result<SimulationOutput, ConfigError> {
    let mut sim = Simulation::new(config.clone())?;
    sim.run_to_end();
    Ok(sim.finish())
}
