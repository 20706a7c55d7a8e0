#![allow(dead_code)]

use gridrate::{Grid, GridDistribution, LaplaceComponent, MatchEvent, PointDistribution};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Mixture of a few Gaussian bumps plus noise, with some exact zeros.
pub fn random_weights(rng: &mut ChaCha8Rng, points: &[f64]) -> Vec<f64> {
    let lo = points[0];
    let hi = points[points.len() - 1];
    let bumps: Vec<(f64, f64, f64)> = (0..rng.random_range(1..4))
        .map(|_| {
            let c = rng.random_range(lo..=hi) * 0.7;
            let s = rng.random_range(0.05..1.0) * (hi - lo) / 6.0;
            (c, s, rng.random_range(0.2..1.0))
        })
        .collect();
    let zero_rate = rng.random_range(0.0..0.3);
    let mut w: Vec<f64> = points
        .iter()
        .map(|&x| {
            if rng.random::<f64>() < zero_rate {
                return 0.0;
            }
            let smooth: f64 = bumps.iter().map(|(c, s, a)| a * (-0.5 * ((x - c) / s).powi(2)).exp()).sum();
            smooth + 1e-3 * rng.random::<f64>()
        })
        .collect();
    if w.iter().all(|&v| v == 0.0) {
        w[points.len() / 2] = 1.0;
    }
    w
}

pub fn random_grid_dist(rng: &mut ChaCha8Rng, grid: Grid) -> GridDistribution {
    let w = random_weights(rng, &grid.points());
    GridDistribution::new(grid, w).unwrap()
}

/// Sorted distinct support of `len` points in `[-span, span]`.
pub fn random_support(rng: &mut ChaCha8Rng, len: usize, span: f64) -> Vec<f64> {
    let mut s: Vec<f64> = (0..len).map(|_| rng.random_range(-span..span)).collect();
    s.sort_by(f64::total_cmp);
    s.dedup();
    s
}

pub fn random_point_dist(rng: &mut ChaCha8Rng, max_len: usize, span: f64) -> PointDistribution {
    let len = rng.random_range(1..=max_len);
    let s = random_support(rng, len, span);
    let w = random_weights(rng, &s);
    PointDistribution::new(s, w).unwrap()
}

pub fn random_mixture(rng: &mut ChaCha8Rng, max_components: usize, scale_range: (f64, f64)) -> Vec<LaplaceComponent> {
    let k = rng.random_range(1..=max_components);
    let raw: Vec<f64> = (0..k).map(|_| rng.random_range(0.1..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let mut comps: Vec<LaplaceComponent> = raw
        .iter()
        .map(|w| LaplaceComponent { weight: w / total, scale: rng.random_range(scale_range.0..scale_range.1) })
        .collect();
    // Force the weights to sum to exactly one.
    let rest: f64 = comps[1..].iter().map(|c| c.weight).sum();
    comps[0].weight = 1.0 - rest;
    comps
}

pub fn random_log(rng: &mut ChaCha8Rng, players: usize, matches: usize, draws: bool) -> Vec<MatchEvent> {
    (0..matches)
        .map(|k| {
            let a = rng.random_range(0..players);
            let mut b = rng.random_range(0..players - 1);
            if b >= a {
                b += 1;
            }
            let score = match rng.random_range(0..if draws { 3 } else { 2 }) {
                0 => 0.0,
                1 => 1.0,
                _ => 0.5,
            };
            MatchEvent {
                match_id: format!("m{k}"),
                timestamp: k as i64,
                player_a: format!("p{a}"),
                player_b: format!("p{b}"),
                score,
            }
        })
        .collect()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
