//! Market selection between A and B.
//!
//! An order goes to the market with the better best price when the two
//! best prices differ and the order would execute immediately in at least
//! one market. Otherwise it goes to A with probability `W_A`, the share of
//! trades executed in A over the trailing `t_AB` ticks.

use std::collections::VecDeque;

use rand::Rng;

use crate::orderbook::{Market, Price, Side, Tick};

/// Rolling per-market trade counts over the trailing window `(t - span, t]`.
#[derive(Clone, Debug)]
pub struct VolumeWindow {
    span: Tick,
    events: VecDeque<(Tick, Market)>,
    counts: [u64; 2],
    last_known_share: f64,
}

impl VolumeWindow {
    /// `initial_share` is used until the first trade lands in the window.
    pub fn new(span: Tick, initial_share: f64) -> Self {
        debug_assert!((0.0..=1.0).contains(&initial_share));
        Self {
            span,
            events: VecDeque::new(),
            counts: [0; 2],
            last_known_share: initial_share,
        }
    }

    pub fn span(&self) -> Tick {
        self.span
    }

    fn evict(&mut self, now: Tick) {
        while let Some(&(t, market)) = self.events.front() {
            if t + self.span > now {
                break;
            }
            self.events.pop_front();
            self.counts[market.index()] -= 1;
        }
    }

    /// Records one trade in `market` at time `t`. Times must not decrease.
    pub fn record_trade(&mut self, market: Market, t: Tick) {
        debug_assert!(self.events.back().is_none_or(|&(last, _)| last <= t));
        self.evict(t);
        self.events.push_back((t, market));
        self.counts[market.index()] += 1;
    }

    /// Trade counts `(T_A, T_B)` inside the window ending at `now`.
    pub fn counts(&mut self, now: Tick) -> (u64, u64) {
        self.evict(now);
        (self.counts[0], self.counts[1])
    }

    /// `T_A / (T_A + T_B)` at `now`, falling back to the last known share
    /// when the window holds no trades.
    pub fn share_a(&mut self, now: Tick) -> f64 {
        let (a, b) = self.counts(now);
        if a + b > 0 {
            self.last_known_share = a as f64 / (a + b) as f64;
        }
        self.last_known_share
    }

    pub fn last_known_share(&self) -> f64 {
        self.last_known_share
    }
}

/// Best bid and ask of one market.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Quote {
    pub bid: Option<Price>,
    pub ask: Option<Price>,
}

impl Quote {
    /// Best price an order of `side` would trade against.
    pub fn contra(&self, side: Side) -> Option<Price> {
        match side {
            Side::Buy => self.ask,
            Side::Sell => self.bid,
        }
    }

    pub fn is_marketable(&self, side: Side, price: Price) -> bool {
        match side {
            Side::Buy => self.ask.is_some_and(|ask| price >= ask),
            Side::Sell => self.bid.is_some_and(|bid| price <= bid),
        }
    }
}

/// How a routing decision was reached.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Route {
    BestPrice(Market),
    ByShare(Market),
}

impl Route {
    pub fn market(self) -> Market {
        match self {
            Route::BestPrice(m) | Route::ByShare(m) => m,
        }
    }
}

/// The market with the strictly better contra price for `side`, if any.
/// An empty side is worse than any price.
fn better_market(side: Side, a: Option<Price>, b: Option<Price>) -> Option<Market> {
    match (a, b) {
        (Some(pa), Some(pb)) if pa == pb => None,
        (Some(pa), Some(pb)) => {
            let a_better = match side {
                Side::Buy => pa < pb,
                Side::Sell => pa > pb,
            };
            Some(if a_better { Market::A } else { Market::B })
        }
        (Some(_), None) => Some(Market::A),
        (None, Some(_)) => Some(Market::B),
        (None, None) => None,
    }
}

/// Chooses the market for an order of `side`.
///
/// `candidates` holds the order price rounded to each market's grid
/// (indexed by [`Market::index`]) and `quotes` the two books' best prices.
/// A uniform draw is consumed only when the share-weighted branch is taken.
pub fn select_market<R: Rng + ?Sized>(
    side: Side,
    candidates: [Price; 2],
    quotes: [Quote; 2],
    share_a: f64,
    rng: &mut R,
) -> Route {
    let marketable = Market::BOTH
        .iter()
        .any(|m| quotes[m.index()].is_marketable(side, candidates[m.index()]));
    if marketable {
        if let Some(m) = better_market(side, quotes[0].contra(side), quotes[1].contra(side)) {
            return Route::BestPrice(m);
        }
    }
    let u: f64 = rng.random();
    Route::ByShare(if u < share_a { Market::A } else { Market::B })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn q(bid: Option<i64>, ask: Option<i64>) -> Quote {
        Quote {
            bid: bid.map(Price),
            ask: ask.map(Price),
        }
    }

    #[test]
    fn counts_trades_in_window() {
        let mut w = VolumeWindow::new(100, 0.9);
        for t in 1..=3 {
            w.record_trade(Market::A, t);
        }
        w.record_trade(Market::B, 4);
        assert_eq!(w.counts(4), (3, 1));
        assert_eq!(w.share_a(4), 0.75);
    }

    #[test]
    fn eviction_boundary() {
        let mut w = VolumeWindow::new(10_000, 0.9);
        w.record_trade(Market::B, 0);
        assert_eq!(w.counts(9_999), (0, 1));
        assert_eq!(w.counts(10_001), (0, 0));
        // Share falls back to the last computed value, not the initial one.
        assert_eq!(w.last_known_share(), 0.9);
        let mut w = VolumeWindow::new(10_000, 0.9);
        w.record_trade(Market::B, 0);
        assert_eq!(w.share_a(5), 0.0);
        assert_eq!(w.share_a(10_001), 0.0);
    }

    #[test]
    fn empty_window() {
        let mut w = VolumeWindow::new(50, 0.9);
        assert_eq!(w.counts(1_000), (0, 0));
        assert_eq!(w.share_a(1_000), 0.9);
    }

    #[test]
    fn share_from_counts() {
        let mut w = VolumeWindow::new(10_000, 0.5);
        for t in 0..1000 {
            w.record_trade(if t < 900 { Market::A } else { Market::B }, t);
        }
        assert!((w.share_a(999) - 0.9).abs() < 1e-15);

        let mut w = VolumeWindow::new(10_000, 0.9);
        for t in 0..50 {
            w.record_trade(Market::B, t);
        }
        assert_eq!(w.share_a(50), 0.0);
    }

    #[test]
    fn better_ask_wins_when_marketable() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let before = rng.clone();
        let route = select_market(
            Side::Buy,
            [Price(10_000), Price(10_005)],
            [q(None, Some(10_010)), q(None, Some(10_005))],
            0.9,
            &mut rng,
        );
        assert_eq!(route, Route::BestPrice(Market::B));
        assert_eq!(rng, before);
    }

    #[test]
    fn better_bid_wins_for_sells() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let route = select_market(
            Side::Sell,
            [Price(9_990), Price(9_995)],
            [q(Some(9_990), None), q(Some(9_995), None)],
            1.0,
            &mut rng,
        );
        assert_eq!(route, Route::BestPrice(Market::B));
    }

    #[test]
    fn empty_side_is_worst() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let route = select_market(
            Side::Buy,
            [Price(10_000), Price(10_000)],
            [q(None, None), q(None, Some(9_000))],
            1.0,
            &mut rng,
        );
        assert_eq!(route, Route::BestPrice(Market::B));
    }

    #[test]
    fn equal_best_prices_use_share() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let route = select_market(
            Side::Buy,
            [Price(10_010), Price(10_010)],
            [q(None, Some(10_010)), q(None, Some(10_010))],
            1.0,
            &mut rng,
        );
        assert_eq!(route, Route::ByShare(Market::A));
    }

    #[test]
    fn limit_in_both_uses_share() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let route = select_market(
            Side::Buy,
            [Price(9_000), Price(9_005)],
            [q(None, Some(10_010)), q(None, Some(10_005))],
            0.0,
            &mut rng,
        );
        assert_eq!(route, Route::ByShare(Market::B));
    }

    #[test]
    fn share_routing_frequencies() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let quotes = [q(Some(9_990), Some(10_010)); 2];
        let n = 10_000;
        let a = (0..n)
            .filter(|_| {
                select_market(Side::Buy, [Price(10_000); 2], quotes, 0.9, &mut rng).market()
                    == Market::A
            })
            .count() as f64;
        let (ea, eb) = (0.9 * n as f64, 0.1 * n as f64);
        let chi2 = (a - ea).powi(2) / ea + ((n as f64 - a) - eb).powi(2) / eb;
        // chi-square with 1 dof, p = 0.001
        assert!(chi2 < 10.828, "chi2 = {chi2}");
    }
}
