//! Verification-based (VB) sparse signal recovery over weighted biregular
//! bipartite sensing graphs, together with a Monte-Carlo density-evolution
//! analyzer for estimating per-iteration decoder state and success thresholds.
//!
//! The crate is organized in three layers:
//!
//! - [`ensembles`]: sampling of `(d_v, d_c)`-biregular sensing graphs and
//!   sparse input signals, and the linear encoding `c = Gv`.
//! - [`decoder`]: the LM and SBB recovery algorithms in their node-based
//!   formulation, plus an equivalent message-passing engine in
//!   [`decoder::mp`].
//! - [`analysis`]: genie-aided state classification, the round-one
//!   verification predictor, Monte-Carlo density evolution, threshold
//!   bisection and the concentration experiment.

pub mod analysis;
pub mod decoder;
pub mod ensembles;
pub mod error;
pub mod rng;

pub use error::{Error, Result};
