//! Bidirectional random relaying over a Poisson field of nodes.
//!
//! The crate simulates two sources exchanging packets through a random set of
//! idle relays, either by time-division multihop (TDMH, four slots) or by
//! digital network coding (NC, three slots), and measures how the
//! bidirectional outage probability decays with the mean SINR. Closed-form
//! diversity-multiplexing curves live in [`dmt`]; Monte Carlo estimation,
//! slope fitting and the shot-noise tail check live in [`outage`].
//!
//! All randomness is drawn from counter-based streams ([`rng`]) keyed by a
//! seed, a named substream and a trial index, so results do not depend on how
//! trials are distributed over threads ([`exec`]).

pub mod channel;
pub mod cli;
pub mod config;
pub mod dmt;
mod error;
pub mod exec;
pub mod outage;
pub mod point_process;
pub mod protocols;
pub mod rng;

pub use error::{Error, Result};
