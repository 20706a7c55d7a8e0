//! Evaluation kit: walk-forward log loss, update curves, synthetic logs and leaderboards.

pub mod curve;
pub mod leaderboard;
pub mod logloss;
pub mod synth;
pub mod table;

pub use curve::{mean_shift, mean_shift_curve, CurveSpec};
pub use leaderboard::{kendall_tau, leaderboard, LeaderboardRow};
pub use logloss::{evaluate_log_loss, loss_density, LogLossReport, MatchLoss};
pub use synth::{generate, generate_with_strengths, SynthSpec, SyntheticLog};
