//! Ranked tables and rank agreement.

use std::cmp::Ordering;

use crate::store::RatingStore;

#[derive(Debug, Clone, PartialEq)]
pub struct LeaderboardRow {
    pub rank: usize,
    pub player_id: String,
    pub rating: f64,
    pub deviation: f64,
    pub matches_played: u64,
}

/// Players with at least `min_matches`, by rating descending, then deviation, then id.
pub fn leaderboard(store: &RatingStore, top_k: Option<usize>, min_matches: u64) -> Vec<LeaderboardRow> {
    let display = store.config().display;
    let mut rows: Vec<LeaderboardRow> = store
        .players()
        .filter(|p| p.matches_played >= min_matches)
        .map(|p| {
            let (rating, deviation) = display.rating(&p.belief);
            LeaderboardRow {
                rank: 0,
                player_id: p.player_id.clone(),
                rating,
                deviation,
                matches_played: p.matches_played,
            }
        })
        .collect();
    rows.sort_by(|a, b| {
        b.rating
            .total_cmp(&a.rating)
            .then(a.deviation.total_cmp(&b.deviation))
            .then_with(|| a.player_id.cmp(&b.player_id))
    });
    rows.truncate(top_k.unwrap_or(usize::MAX));
    for (i, r) in rows.iter_mut().enumerate() {
        r.rank = i + 1;
    }
    rows
}

/// Kendall's tau-b between two paired samples. `NaN` when either side is constant.
pub fn kendall_tau(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "kendall_tau needs paired samples");
    let (mut concordant, mut discordant, mut ties_a, mut ties_b) = (0i64, 0i64, 0i64, 0i64);
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            match (a[i].total_cmp(&a[j]), b[i].total_cmp(&b[j])) {
                (Ordering::Equal, Ordering::Equal) => {}
                (Ordering::Equal, _) => ties_a += 1,
                (_, Ordering::Equal) => ties_b += 1,
                (x, y) if x == y => concordant += 1,
                _ => discordant += 1,
            }
        }
    }
    let n_a = (concordant + discordant + ties_a) as f64;
    let n_b = (concordant + discordant + ties_b) as f64;
    (concordant - discordant) as f64 / (n_a * n_b).sqrt()
}
