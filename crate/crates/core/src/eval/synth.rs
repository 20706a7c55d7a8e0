//! Synthetic match logs drawn from the outcome model.
//!
//! Each match picks two distinct players uniformly at random and `A` wins with
//! probability `Λ(x_A, x_B)` at their fixed true strengths.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::luck::LuckFunction;
use crate::matchlog::{write_log, MatchEvent};

#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    pub players: usize,
    pub matches: usize,
    pub seed: u64,
    /// Standard deviation of true strengths in natural units.
    pub strength_sd: f64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        Self { players: 100, matches: 10_000, seed: 0, strength_sd: 0.7 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticLog {
    pub events: Vec<MatchEvent>,
    /// `(player_id, true strength)` in natural units.
    pub truths: Vec<(String, f64)>,
}

impl SyntheticLog {
    pub fn write_events(&self, out: impl Write) -> Result<()> {
        write_log(out, &self.events)
    }

    /// Tab-separated `id  strength` sidecar.
    pub fn write_truths(&self, mut out: impl Write) -> Result<()> {
        writeln!(out, "#id\tstrength")?;
        for (id, x) in &self.truths {
            writeln!(out, "{id}\t{x:e}")?;
        }
        Ok(())
    }
}

pub fn player_id(i: usize) -> String {
    format!("p{i:05}")
}

/// Strengths drawn from `N(0, strength_sd²)`, then matches as in [`generate_with_strengths`].
pub fn generate(spec: &SynthSpec, luck: &LuckFunction) -> Result<SyntheticLog> {
    if !(spec.strength_sd >= 0.0 && spec.strength_sd.is_finite()) {
        return Err(Error::param("strength_sd must be non-negative"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let normal = Normal::new(0.0, spec.strength_sd).map_err(|e| Error::param(e.to_string()))?;
    let strengths: Vec<f64> = (0..spec.players).map(|_| normal.sample(&mut rng)).collect();
    play(&mut rng, &strengths, spec.matches, luck)
}

/// Matches among players with the given true strengths.
pub fn generate_with_strengths(
    strengths: &[f64],
    matches: usize,
    seed: u64,
    luck: &LuckFunction,
) -> Result<SyntheticLog> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    play(&mut rng, strengths, matches, luck)
}

fn play(rng: &mut ChaCha8Rng, strengths: &[f64], matches: usize, luck: &LuckFunction) -> Result<SyntheticLog> {
    let players = strengths.len();
    if players < 2 {
        return Err(Error::param("need at least two players"));
    }
    let mut events = Vec::with_capacity(matches);
    for k in 0..matches {
        let a = rng.random_range(0..players);
        let mut b = rng.random_range(0..players - 1);
        if b >= a {
            b += 1;
        }
        let p = luck.eval(strengths[a], strengths[b])?;
        let score = if rng.random::<f64>() < p { 1.0 } else { 0.0 };
        events.push(MatchEvent {
            match_id: format!("s{k}"),
            timestamp: k as i64,
            player_a: player_id(a),
            player_b: player_id(b),
            score,
        });
    }
    let truths = strengths.iter().enumerate().map(|(i, &x)| (player_id(i), x)).collect();
    Ok(SyntheticLog { events, truths })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bytes(log: &SyntheticLog) -> Vec<u8> {
        let mut out = Vec::new();
        log.write_events(&mut out).unwrap();
        log.write_truths(&mut out).unwrap();
        out
    }

    #[test]
    fn same_seed_same_bytes() {
        let luck = LuckFunction::logistic(0.8).unwrap();
        let spec = SynthSpec { players: 20, matches: 500, seed: 7, ..SynthSpec::default() };
        let a = generate(&spec, &luck).unwrap();
        assert_eq!(bytes(&a), bytes(&generate(&spec, &luck).unwrap()));
        assert_ne!(bytes(&a), bytes(&generate(&SynthSpec { seed: 8, ..spec }, &luck).unwrap()));
    }

    #[test]
    fn no_self_matches() {
        let luck = LuckFunction::logistic(0.8).unwrap();
        let log = generate(&SynthSpec { players: 2, matches: 200, ..SynthSpec::default() }, &luck).unwrap();
        assert!(log.events.iter().all(|e| e.player_a != e.player_b));
    }

    fn within_three_sigma(wins: usize, trials: usize, p: f64) -> bool {
        let sd = (trials as f64 * p * (1.0 - p)).sqrt();
        (wins as f64 - trials as f64 * p).abs() <= 3.0 * sd
    }

    #[test]
    fn beta_zero_is_a_coin_flip() {
        let luck = LuckFunction::logistic(0.0).unwrap();
        let log = generate(&SynthSpec { players: 10, matches: 20_000, seed: 3, strength_sd: 2.0 }, &luck).unwrap();
        let id = player_id(0);
        let (mut played, mut won) = (0, 0);
        for e in &log.events {
            if e.player_a == id {
                played += 1;
                won += (e.score == 1.0) as usize;
            } else if e.player_b == id {
                played += 1;
                won += (e.score == 0.0) as usize;
            }
        }
        assert!(played > 1000);
        assert!(within_three_sigma(won, played, 0.5), "{won}/{played}");
    }

    #[test]
    fn two_player_frequency_matches_luck() {
        let luck = LuckFunction::logistic(0.8).unwrap();
        let (x, y) = (0.9, -0.4);
        let p = luck.eval(x, y).unwrap();
        let log = generate_with_strengths(&[x, y], 10_000, 11, &luck).unwrap();
        let wins = log.events.iter().filter(|e| (e.player_a == player_id(0)) == (e.score == 1.0)).count();
        assert!(within_three_sigma(wins, 10_000, p), "{wins} vs {p}");
    }
}
