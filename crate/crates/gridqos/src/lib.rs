//! Communication QoS for smart-grid price signaling.
//!
//! Two halves, joined by the requirement they exchange:
//!
//! * **Derivation** — [`market`] models the stochastic load and its
//!   mapping to locational marginal prices; [`consumer`] turns delay and
//!   outage into expected welfare losses for a price-responsive
//!   appliance; [`derivation`] picks the (delay, outage-probability)
//!   requirement minimizing loss plus the network's QoS taxes.
//! * **Routing** — [`graph`] models directed networks with K additive
//!   edge metrics; [`routing`] routes under all K constraints at once
//!   with a greedy scalarization that is a provable K-approximation,
//!   checked against a brute-force oracle.
//!
//! [`scenario`] ships the five-bus pricing data, seeded topology
//! generation and the CSV experiment sweeps. Heavy grid evaluations are
//! data-parallel via rayon (`parallel` feature, on by default) with a
//! bit-identical sequential fallback.

pub mod consumer;
pub mod derivation;
mod error;
pub mod exec;
pub mod graph;
pub mod market;
pub mod numeric;
pub mod routing;
pub mod scenario;

pub use error::{Error, Result};
