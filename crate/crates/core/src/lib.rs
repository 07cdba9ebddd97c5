//! Energy-efficiency analysis of cache-enabled multi-antenna cellular
//! networks: closed-form throughput and power models, closed-form optima
//! with grid oracles, and a Monte-Carlo link-level simulator.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod grid;
pub mod optimizer;
pub mod popularity;
pub mod scenario;
pub mod sim;
pub mod special;
pub mod stats;

pub use error::{Error, Result};
