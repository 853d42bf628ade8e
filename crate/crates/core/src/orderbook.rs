//! Continuous double auction for a single market.
//!
//! Every order is for exactly one share, so an incoming order either
//! crosses the single best resting order on the opposite side or rests.
//! Resting orders are kept per price level in submission order; since
//! orders only ever leave a level from its front (by fill or by expiry),
//! each level is a plain `VecDeque`.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Number of price quanta in one fundamental value.
///
/// One quantum is 10^-7 of `P_f`, so a tick of 0.0001% of `P_f` is
/// exactly 10 quanta and every tick size used by the experiments is an
/// exact integer.
pub const QUANTA_PER_FUNDAMENTAL: i64 = 10_000_000;

/// Tick-time. The engine runs `t = 1..=T`.
pub type Tick = u64;

/// A price as an integer count of quanta.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Price(pub i64);

impl Price {
    pub const FUNDAMENTAL: Price = Price(QUANTA_PER_FUNDAMENTAL);

    #[inline]
    pub fn quanta(self) -> i64 {
        self.0
    }

    /// Converts to price units given the fundamental value `p_f`.
    #[inline]
    pub fn to_units(self, p_f: f64) -> f64 {
        self.0 as f64 * (p_f / QUANTA_PER_FUNDAMENTAL as f64)
    }

    /// Converts a price in units into (fractional) quanta.
    #[inline]
    pub fn quanta_from_units(units: f64, p_f: f64) -> f64 {
        units * (QUANTA_PER_FUNDAMENTAL as f64 / p_f)
    }

    /// Tick size for a percentage of the fundamental value, if it is an
    /// exact positive number of quanta.
    pub fn from_percent_of_fundamental(pct: f64) -> Option<Price> {
        if !pct.is_finite() || pct <= 0.0 {
            return None;
        }
        let raw = pct / 100.0 * QUANTA_PER_FUNDAMENTAL as f64;
        let q = raw.round();
        if q < 1.0 || (raw - q).abs() > 1e-6 * q.max(1.0) {
            return None;
        }
        Some(Price(q as i64))
    }

    pub fn is_multiple_of(self, tick: Price) -> bool {
        tick.0 > 0 && self.0 % tick.0 == 0
    }
}

impl fmt::Display for Price {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    Buy,
    Sell,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::Buy => Side::Sell,
            Side::Sell => Side::Buy,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Side::Buy => "buy",
            Side::Sell => "sell",
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Market {
    A,
    B,
}

impl Market {
    pub const BOTH: [Market; 2] = [Market::A, Market::B];

    #[inline]
    pub fn index(self) -> usize {
        match self {
            Market::A => 0,
            Market::B => 1,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Market::A => "A",
            Market::B => "B",
        }
    }
}

impl fmt::Display for Market {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Rounds a raw price (in quanta) onto the tick grid without making the
/// order more aggressive: buys round down, sells round up.
///
/// Returns `None` when the result is not a positive price, in which case
/// the order is discarded.
pub fn round_to_tick(raw_quanta: f64, side: Side, tick: Price) -> Option<Price> {
    debug_assert!(tick.0 > 0);
    if !raw_quanta.is_finite() {
        return None;
    }
    let steps = raw_quanta / tick.0 as f64;
    let steps = match side {
        Side::Buy => steps.floor(),
        Side::Sell => steps.ceil(),
    };
    // Far outside any meaningful price range.
    if steps > (i64::MAX / tick.0) as f64 {
        return None;
    }
    let price = steps as i64 * tick.0;
    (price > 0).then_some(Price(price))
}

/// A one-share limit order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Order {
    pub id: u64,
    pub agent_id: u32,
    pub side: Side,
    pub price: Price,
    pub submitted_at: Tick,
    pub market: Market,
}

impl Order {
    /// Agents always trade a single share.
    pub const QUANTITY: u32 = 1;

    pub fn quantity(&self) -> u32 {
        Self::QUANTITY
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trade {
    pub t: Tick,
    pub market: Market,
    pub price: Price,
    pub aggressor: Side,
    pub buy_agent: u32,
    pub sell_agent: u32,
    pub buy_order: u64,
    pub sell_order: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExecutionReport {
    Filled(Trade),
    Resting,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OrderBookError {
    #[error("order price {price} is not a positive multiple of tick {tick}")]
    OffGrid { price: Price, tick: Price },
    #[error("order {id} submitted for market {got} but book is market {expected}")]
    WrongMarket {
        id: u64,
        got: Market,
        expected: Market,
    },
    #[error("tick size must be positive, got {0}")]
    InvalidTick(Price),
}

/// Per-side order flow counters of one book.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SideCounters {
    pub submitted: u64,
    pub filled: u64,
    pub canceled: u64,
}

impl SideCounters {
    pub fn resting(&self) -> u64 {
        self.submitted - self.filled - self.canceled
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BookCounters {
    pub buys: SideCounters,
    pub sells: SideCounters,
}

impl BookCounters {
    fn side_mut(&mut self, side: Side) -> &mut SideCounters {
        match side {
            Side::Buy => &mut self.buys,
            Side::Sell => &mut self.sells,
        }
    }

    pub fn side(&self, side: Side) -> &SideCounters {
        match side {
            Side::Buy => &self.buys,
            Side::Sell => &self.sells,
        }
    }

    pub fn submitted(&self) -> u64 {
        self.buys.submitted + self.sells.submitted
    }

    pub fn filled(&self) -> u64 {
        self.buys.filled + self.sells.filled
    }

    pub fn canceled(&self) -> u64 {
        self.buys.canceled + self.sells.canceled
    }

    pub fn resting(&self) -> u64 {
        self.buys.resting() + self.sells.resting()
    }

    pub fn merged(&self, other: &BookCounters) -> BookCounters {
        let add = |a: &SideCounters, b: &SideCounters| SideCounters {
            submitted: a.submitted + b.submitted,
            filled: a.filled + b.filled,
            canceled: a.canceled + b.canceled,
        };
        BookCounters {
            buys: add(&self.buys, &other.buys),
            sells: add(&self.sells, &other.sells),
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct ExpiryEntry {
    submitted_at: Tick,
    id: u64,
    side: Side,
    price: Price,
}

/// Limit order book with price-time priority and time-based expiry.
#[derive(Clone, Debug)]
pub struct LimitOrderBook {
    market: Market,
    tick: Price,
    lifetime: Tick,
    bids: BTreeMap<Price, VecDeque<Order>>,
    asks: BTreeMap<Price, VecDeque<Order>>,
    // All resting-or-filled orders in submission order; filled ones are
    // skipped lazily when they reach the front.
    expiry: VecDeque<ExpiryEntry>,
    last_trade_price: Option<Price>,
    trades: Vec<Trade>,
    counters: BookCounters,
}

impl LimitOrderBook {
    /// Creates an empty book. Resting orders are canceled once their age
    /// reaches `lifetime` ticks.
    pub fn new(market: Market, tick: Price, lifetime: Tick) -> Result<Self, OrderBookError> {
        if tick.0 <= 0 {
            return Err(OrderBookError::InvalidTick(tick));
        }
        Ok(Self {
            market,
            tick,
            lifetime,
            bids: BTreeMap::new(),
            asks: BTreeMap::new(),
            expiry: VecDeque::new(),
            last_trade_price: None,
            trades: Vec::new(),
            counters: BookCounters::default(),
        })
    }

    pub fn market(&self) -> Market {
        self.market
    }

    pub fn tick(&self) -> Price {
        self.tick
    }

    pub fn lifetime(&self) -> Tick {
        self.lifetime
    }

    pub fn best_bid(&self) -> Option<Price> {
        self.bids.keys().next_back().copied()
    }

    pub fn best_ask(&self) -> Option<Price> {
        self.asks.keys().next().copied()
    }

    /// Best price on the side an incoming order of `side` would trade against.
    pub fn best_opposite(&self, side: Side) -> Option<Price> {
        match side {
            Side::Buy => self.best_ask(),
            Side::Sell => self.best_bid(),
        }
    }

    pub fn last_trade_price(&self) -> Option<Price> {
        self.last_trade_price
    }

    pub fn trades(&self) -> &[Trade] {
        &self.trades
    }

    pub fn into_trades(self) -> Vec<Trade> {
        self.trades
    }

    pub fn counters(&self) -> &BookCounters {
        &self.counters
    }

    pub fn resting_count(&self) -> usize {
        self.counters.resting() as usize
    }

    /// Resting orders on one side, best price first, FIFO within a level.
    pub fn resting(&self, side: Side) -> Vec<Order> {
        match side {
            Side::Buy => self.bids.values().rev().flatten().copied().collect(),
            Side::Sell => self.asks.values().flatten().copied().collect(),
        }
    }

    /// Whether an order of `side` at `price` would execute immediately.
    pub fn is_marketable(&self, side: Side, price: Price) -> bool {
        match side {
            Side::Buy => self.best_ask().is_some_and(|ask| price >= ask),
            Side::Sell => self.best_bid().is_some_and(|bid| price <= bid),
        }
    }

    /// Cancels every resting order whose age `now - submitted_at` has
    /// reached the book lifetime. Returns the number canceled.
    pub fn purge_expired(&mut self, now: Tick) -> usize {
        let mut removed = 0;
        while let Some(entry) = self.expiry.front().copied() {
            if now.saturating_sub(entry.submitted_at) < self.lifetime {
                break;
            }
            self.expiry.pop_front();
            let levels = match entry.side {
                Side::Buy => &mut self.bids,
                Side::Sell => &mut self.asks,
            };
            // The oldest live order in the whole book is necessarily at the
            // front of its level. A filled order is simply absent.
            if let Some(level) = levels.get_mut(&entry.price) {
                if level.front().is_some_and(|o| o.id == entry.id) {
                    level.pop_front();
                    if level.is_empty() {
                        levels.remove(&entry.price);
                    }
                    self.counters.side_mut(entry.side).canceled += 1;
                    removed += 1;
                }
            }
        }
        removed
    }

    /// Submits a one-share order at time `now`.
    ///
    /// If the best opposite order is at or better than the order's limit,
    /// the two trade at the resting order's price. Otherwise the order rests.
    pub fn submit(&mut self, order: Order, now: Tick) -> Result<ExecutionReport, OrderBookError> {
        if order.price.0 <= 0 || !order.price.is_multiple_of(self.tick) {
            return Err(OrderBookError::OffGrid {
                price: order.price,
                tick: self.tick,
            });
        }
        if order.market != self.market {
            return Err(OrderBookError::WrongMarket {
                id: order.id,
                got: order.market,
                expected: self.market,
            });
        }
        self.counters.side_mut(order.side).submitted += 1;

        let contra = match order.side {
            Side::Buy => self.asks.first_entry().filter(|e| *e.key() <= order.price),
            Side::Sell => self.bids.last_entry().filter(|e| *e.key() >= order.price),
        };
        if let Some(mut level) = contra {
            let resting = level
                .get_mut()
                .pop_front()
                .expect("price levels are never left empty");
            if level.get().is_empty() {
                level.remove();
            }
            let (buy, sell) = match order.side {
                Side::Buy => (&order, &resting),
                Side::Sell => (&resting, &order),
            };
            let trade = Trade {
                t: now,
                market: self.market,
                price: resting.price,
                aggressor: order.side,
                buy_agent: buy.agent_id,
                sell_agent: sell.agent_id,
                buy_order: buy.id,
                sell_order: sell.id,
            };
            self.counters.side_mut(order.side).filled += 1;
            self.counters.side_mut(resting.side).filled += 1;
            self.last_trade_price = Some(trade.price);
            self.trades.push(trade);
            return Ok(ExecutionReport::Filled(trade));
        }

        let levels = match order.side {
            Side::Buy => &mut self.bids,
            Side::Sell => &mut self.asks,
        };
        levels.entry(order.price).or_default().push_back(order);
        self.expiry.push_back(ExpiryEntry {
            submitted_at: order.submitted_at,
            id: order.id,
            side: order.side,
            price: order.price,
        });
        Ok(ExecutionReport::Resting)
    }
}
