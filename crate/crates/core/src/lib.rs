//! Dual-market artificial market simulator.
//!
//! Heterogeneous agents with fundamental, technical and noise components
//! trade one stock, one share at a time, across two continuous double
//! auction markets that differ only in tick size. Each order is routed to
//! the market with the better best price when it would execute
//! immediately, and otherwise according to recent volume share.
//!
//! - [`orderbook`]: price-time priority matching with order expiry
//! - [`agents`]: population, expectation formation and order intents
//! - [`router`]: volume-share window and market selection
//! - [`engine`]: the round-robin scheduler and scenario configuration
//! - [`metrics`]: volatility, market share, order rates, stylized facts

pub mod agents;
pub mod engine;
pub mod metrics;
pub mod orderbook;
pub mod router;

pub use engine::{run, ScenarioConfig, Simulation, SimulationOutput};
pub use orderbook::{Market, Price, Side, Tick};
