//! Agent population and order formation.
//!
//! Each agent mixes a fundamental, a technical and a noise term into an
//! expected log return, turns it into an expected price, scatters an order
//! price around it and chooses a side by comparing the two.
//!
//! RNG consumption per agent turn is fixed: one standard-normal draw for the
//! noise term, then one standard-normal draw for the order price. A turn
//! skipped because of a zero weight sum consumes nothing.

use std::collections::VecDeque;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::orderbook::{Side, Tick};

/// Strategy weights and lookback of one agent, fixed at initialization.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AgentProfile {
    pub id: u32,
    pub w1: f64,
    pub w2: f64,
    pub w3: f64,
    pub tau: usize,
}

impl AgentProfile {
    pub fn weight_sum(&self) -> f64 {
        self.w1 + self.w2 + self.w3
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PopulationParams {
    pub n: u32,
    pub w1_max: f64,
    pub w2_max: f64,
    pub w3_max: f64,
    pub tau_max: u32,
}

/// The immutable agent population, indexed by agent id `1..=n`.
#[derive(Clone, Debug, PartialEq)]
pub struct Population {
    profiles: Vec<AgentProfile>,
}

impl Population {
    /// Draws every profile: for agent 1 first `w1, w2, w3` uniform on
    /// `[0, w_max)` and then `tau` uniform on `{1, ..., tau_max}`, then
    /// agent 2, and so on.
    pub fn init<R: Rng + ?Sized>(params: &PopulationParams, rng: &mut R) -> Population {
        let profiles = (1..=params.n)
            .map(|id| {
                let w1 = rng.random::<f64>() * params.w1_max;
                let w2 = rng.random::<f64>() * params.w2_max;
                let w3 = rng.random::<f64>() * params.w3_max;
                let tau = rng.random_range(1..=params.tau_max) as usize;
                AgentProfile {
                    id,
                    w1,
                    w2,
                    w3,
                    tau,
                }
            })
            .collect();
        Population { profiles }
    }

    pub fn from_profiles(profiles: Vec<AgentProfile>) -> Population {
        Population { profiles }
    }

    pub fn len(&self) -> usize {
        self.profiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.profiles.is_empty()
    }

    /// Profile of agent `id` (1-based).
    pub fn get(&self, id: u32) -> Option<&AgentProfile> {
        id.checked_sub(1)
            .and_then(|i| self.profiles.get(i as usize))
    }

    pub fn profiles(&self) -> &[AgentProfile] {
        &self.profiles
    }

    pub fn max_tau(&self) -> usize {
        self.profiles.iter().map(|p| p.tau).max().unwrap_or(0)
    }
}

/// Consolidated price history `P^0, P^1, ..., P^t` with bounded memory.
///
/// `P^0` is the fundamental value. Only the most recent `capacity + 1`
/// prices are retained, so any lag up to `capacity` can be looked up.
#[derive(Clone, Debug)]
pub struct PriceHistory {
    buf: VecDeque<f64>,
    capacity: usize,
    // Index of the most recent price.
    t: u64,
}

impl PriceHistory {
    pub fn new(initial: f64, capacity: usize) -> Self {
        debug_assert!(initial > 0.0);
        let mut buf = VecDeque::with_capacity(capacity + 2);
        buf.push_back(initial);
        Self {
            buf,
            capacity,
            t: 0,
        }
    }

    pub fn push(&mut self, price: f64) {
        debug_assert!(price > 0.0);
        if self.buf.len() > self.capacity {
            self.buf.pop_front();
        }
        self.buf.push_back(price);
        self.t += 1;
    }

    /// Time index of the current price.
    pub fn t(&self) -> u64 {
        self.t
    }

    pub fn current(&self) -> f64 {
        *self.buf.back().expect("history is never empty")
    }

    /// `P^{t - lag}`, or `None` if it precedes `P^0` or was evicted.
    pub fn lagged(&self, lag: usize) -> Option<f64> {
        let len = self.buf.len();
        (lag < len).then(|| self.buf[len - 1 - lag])
    }

    /// Historical log return over `tau` ticks, zero while `t < tau`.
    pub fn historical_return(&self, tau: usize) -> f64 {
        if self.t < tau as u64 {
            return 0.0;
        }
        match self.lagged(tau) {
            Some(past) => (self.current() / past).ln(),
            None => 0.0,
        }
    }
}

/// Expected log return for a given noise realization.
///
/// Returns `None` when all weights are zero and the agent must skip.
pub fn expected_return_with_noise(
    profile: &AgentProfile,
    history: &PriceHistory,
    p_f: f64,
    noise: f64,
) -> Option<f64> {
    let sum = profile.weight_sum();
    if sum <= 0.0 {
        return None;
    }
    let fundamental = (p_f / history.current()).ln();
    let technical = history.historical_return(profile.tau);
    Some((profile.w1 * fundamental + profile.w2 * technical + profile.w3 * noise) / sum)
}

/// Expected log return with a fresh noise draw `N(0, sigma_eps)`.
///
/// No draw is consumed when the agent skips.
pub fn expected_return<R: Rng + ?Sized>(
    profile: &AgentProfile,
    history: &PriceHistory,
    p_f: f64,
    sigma_eps: f64,
    rng: &mut R,
) -> Option<f64> {
    if profile.weight_sum() <= 0.0 {
        return None;
    }
    let z: f64 = StandardNormal.sample(rng);
    expected_return_with_noise(profile, history, p_f, sigma_eps * z)
}

pub fn expected_price(current: f64, expected_return: f64) -> f64 {
    current * expected_return.exp()
}

/// Order price drawn from `N(expected, p_sigma)`; `None` if not positive.
pub fn draw_order_price<R: Rng + ?Sized>(expected: f64, p_sigma: f64, rng: &mut R) -> Option<f64> {
    let z: f64 = StandardNormal.sample(rng);
    let price = expected + p_sigma * z;
    (price > 0.0).then_some(price)
}

/// Buy below the expected price, sell above it. During warmup
/// (`t < t_c`) the fundamental value replaces the expected price.
pub fn decide_side(expected: f64, order_price: f64, t: Tick, t_c: Tick, p_f: f64) -> Option<Side> {
    let reference = if t < t_c { p_f } else { expected };
    if reference > order_price {
        Some(Side::Buy)
    } else if reference < order_price {
        Some(Side::Sell)
    } else {
        None
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrderIntent {
    pub agent_id: u32,
    pub side: Option<Side>,
    /// Unrounded order price in price units.
    pub raw_price: f64,
    pub expected_price: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BehaviorParams {
    pub sigma_eps: f64,
    pub p_sigma: f64,
    pub t_c: Tick,
    pub p_f: f64,
}

/// Runs one agent turn up to the side decision.
///
/// Returns `None` for a skipped turn (zero weights or a non-positive
/// order price).
pub fn form_intent<R: Rng + ?Sized>(
    profile: &AgentProfile,
    history: &PriceHistory,
    t: Tick,
    params: &BehaviorParams,
    rng: &mut R,
) -> Option<OrderIntent> {
    let r_e = expected_return(profile, history, params.p_f, params.sigma_eps, rng)?;
    let p_e = expected_price(history.current(), r_e);
    let p_o = draw_order_price(p_e, params.p_sigma, rng)?;
    Some(OrderIntent {
        agent_id: profile.id,
        side: decide_side(p_e, p_o, t, params.t_c, params.p_f),
        raw_price: p_o,
        expected_price: p_e,
    })
}
