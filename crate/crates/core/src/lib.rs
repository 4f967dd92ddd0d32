//! Deterministic simulator for decentralized federated averaging (DecAvg)
//! over Erdős–Rényi, Barabási–Albert and stochastic-block-model networks.
//!
//! The crate is organised bottom-up:
//!
//! - [`topology`]: graph generators and the structural metrics used both for
//!   data placement and for post-hoc analysis.
//! - [`dataset`]: IDX loading, a synthetic digit corpus, and the centrality /
//!   community partitioning strategies.
//! - [`neuralnet`]: a small dense MLP with softmax cross-entropy and
//!   SGD-with-momentum local training.
//! - [`protocol`]: neighbourhood aggregation and the synchronous round engine.
//! - [`analysis`]: subset curves, community tables and group reports computed
//!   from serialized experiment outputs.
//! - [`output`]: the on-disk experiment directory layout.
//!
//! Every random draw goes through [`seeds`], so an experiment is a pure
//! function of its configuration and master seed.

pub mod analysis;
pub mod dataset;
mod error;
pub mod neuralnet;
pub mod output;
pub mod protocol;
pub mod seeds;
pub mod topology;

pub use error::{Error, Result};
