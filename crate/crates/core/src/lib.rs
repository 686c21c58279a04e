//! Cooperation on networks under death-birth updating with weak selection.
//!
//! The exact route solves the coalescing-random-walk meeting-time system for
//! the critical benefit-to-cost ratio; the mean-field route replaces every
//! remeeting time with its network average and yields closed forms in the
//! degree moments. Monte Carlo simulation and exhaustive Markov-chain
//! enumeration provide independent checks on small graphs.

// `!(x > 0.0)` is used on purpose so that NaN is rejected along with the bound.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod coalescence;
pub mod error;
pub mod experiments;
pub mod game;
pub mod generators;
pub mod graph;
pub mod kv;
pub mod meanfield;
pub mod oracle;
pub mod ratio;
pub mod seed;
pub mod sim;

pub use error::{Error, Result};
pub use game::GameMatrix;
pub use graph::{DegreeMoments, Graph};
pub use ratio::CriticalRatio;
