//! Likelihood-free parameter inference with dynamic summary statistic
//! selection.
//!
//! The crate is organised bottom-up:
//!
//! * [`sim`] — reaction networks and an exact Gillespie simulator.
//! * [`summaries`] — a catalog of scalar time-series statistics and pools
//!   drawn from it.
//! * [`metric`] — per-statistic distances, min-max normalization and rewards.
//! * [`bandit`] — arm selection strategies and the reward ledger.
//! * [`abc`] — rejection samplers (bandit-driven and static), priors and
//!   posterior summaries.

pub mod abc;
pub mod bandit;
pub mod error;
pub mod metric;
pub mod rng;
pub mod sim;
pub mod summaries;

pub use error::{Error, Result};
