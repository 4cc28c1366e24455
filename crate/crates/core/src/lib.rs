//! Byzantine-resilient distributed averaging by value retrieval.
//!
//! Every regular node floods its initial value through the network and
//! accepts other nodes' values either directly from the owner or once `f + 1`
//! in-neighbors relay an identical copy. A first-order filter then drives each
//! node's state to the mean of the retrieved values.
//!
//! The crate is split into:
//!
//! - [`digraph`]: the topology model, generators and edge-list I/O.
//! - [`robustness`]: exhaustive decision procedures for reachability,
//!   (strong) robustness, f-resiliency and connectivity, with operation counters.
//! - [`protocol`]: the per-node retrieval state machine and averaging filter.
//! - [`adversary`]: scripted Byzantine behaviours and admissibility checks.
//! - [`simulator`]: the deterministic round engine producing full traces.
//! - [`sampling`]: seeded random graphs, adversary sets and strategies.

pub mod adversary;
pub mod digraph;
mod error;
pub mod protocol;
pub mod robustness;
pub mod sampling;
pub mod simulator;
mod subsets;

pub use error::{Error, Result};

/// A discrete time step of the network clock.
pub type Round = u64;
