//! Reference matcher that rescans every resting order on each event.

use tickshare_core::orderbook::{Order, Side, Tick, Trade};

#[derive(Default)]
pub struct BruteMatcher {
    lifetime: Tick,
    // (arrival sequence, order)
    resting: Vec<(u64, Order)>,
    seq: u64,
    pub trades: Vec<Trade>,
}

impl BruteMatcher {
    pub fn new(lifetime: Tick) -> Self {
        Self {
            lifetime,
            ..Self::default()
        }
    }

    pub fn purge(&mut self, now: Tick) -> usize {
        let before = self.resting.len();
        let lifetime = self.lifetime;
        self.resting
            .retain(|(_, o)| now.saturating_sub(o.submitted_at) < lifetime);
        before - self.resting.len()
    }

    pub fn submit(&mut self, order: Order, now: Tick) -> Option<Trade> {
        let mut best: Option<usize> = None;
        for (i, (seq, o)) in self.resting.iter().enumerate() {
            if o.side == order.side {
                continue;
            }
            let crosses = match order.side {
                Side::Buy => o.price <= order.price,
                Side::Sell => o.price >= order.price,
            };
            if !crosses {
                continue;
            }
            let better = match best {
                None => true,
                Some(j) => {
                    let (bseq, b) = &self.resting[j];
                    let price_better = match order.side {
                        Side::Buy => o.price < b.price,
                        Side::Sell => o.price > b.price,
                    };
                    price_better || (o.price == b.price && seq < bseq)
                }
            };
            if better {
                best = Some(i);
            }
        }
        match best {
            Some(i) => {
                let (_, resting) = self.resting.remove(i);
                let (buy, sell) = match order.side {
                    Side::Buy => (&order, &resting),
                    Side::Sell => (&resting, &order),
                };
                let trade = Trade {
                    t: now,
                    market: order.market,
                    price: resting.price,
                    aggressor: order.side,
                    buy_agent: buy.agent_id,
                    sell_agent: sell.agent_id,
                    buy_order: buy.id,
                    sell_order: sell.id,
                };
                self.trades.push(trade);
                Some(trade)
            }
            None => {
                self.resting.push((self.seq, order));
                self.seq += 1;
                None
            }
        }
    }

    pub fn best(&self, side: Side) -> Option<tickshare_core::Price> {
        let prices = self
            .resting
            .iter()
            .filter(|(_, o)| o.side == side)
            .map(|(_, o)| o.price);
        match side {
            Side::Buy => prices.max(),
            Side::Sell => prices.min(),
        }
    }

    pub fn resting_len(&self) -> usize {
        self.resting.len()
    }
}
