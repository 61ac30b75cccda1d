//! Discrete-time simulator core for RIS-assisted ISAC vehicular networks.
//!
//! The crate is `no_std` (it needs `alloc`) and keeps every source of
//! randomness behind an explicit, seeded RNG, so a `(config, seed)` pair
//! fully determines an episode.
//!
//! - [`scenario`]: configuration, road grid mobility, trajectory playback and sampling
//! - [`channel`]: direct, RIS-segment, composite and echo channel gains
//! - [`radio`]: SINR, Shannon rates, sensing SNR and threshold checks
//! - [`connectivity`]: sliding-window indicators, payload delivery and CCR metrics
//! - [`env`]: the MDP (observation graph, action decoding, step and reward)
//! - [`policies`]: random, random-RIS and greedy baselines
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod channel;
pub mod connectivity;
pub mod env;
mod error;
pub mod policies;
pub mod radio;
pub mod rng;
pub mod scenario;

pub use error::{Error, Result};
