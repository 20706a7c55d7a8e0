//! Bayesian paired-comparison ratings on a discretized strength grid.
//!
//! Each player is a probability distribution over a real-valued strength.
//! After a match both beliefs are updated by Bayes' rule under a luck
//! function `Λ`, then smoothed by a drift kernel `K`. Three engines compute
//! the same updates:
//!
//! - [`naive`]: direct `O(n²)` sums on arbitrary supports.
//! - [`fft`]: convolutions on a shared uniform grid.
//! - [`laplace`]: two-sweep scans for Laplace-mixture `Λ` and `K`.
//!
//! [`store`] runs the sequential match pipeline and persists players;
//! [`eval`] holds log-loss evaluation, curve emission, synthetic data and
//! leaderboards.

pub mod config;
pub mod engine;
pub mod error;
pub mod eval;
pub mod fft;
pub mod grid;
pub mod kernel;
pub mod laplace;
pub mod luck;
pub mod matchlog;
pub mod naive;
pub mod store;

pub use config::{EngineKind, KernelFamily, LuckFamily, SystemConfig};
pub use engine::Engine;
pub use error::{Error, Result};
pub use grid::{default_prior, Belief, DisplayTransform, Grid, GridDistribution, PointDistribution};
pub use kernel::KernelSpec;
pub use luck::{expected_score, luck_eval, LaplaceComponent, LuckFunction, SampledSigmoid};
pub use matchlog::MatchEvent;
pub use naive::MatchScore;
pub use store::{PlayerRecord, RatingStore};
