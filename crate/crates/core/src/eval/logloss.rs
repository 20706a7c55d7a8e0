//! Walk-forward log-loss evaluation.
//!
//! Every match is predicted from the beliefs held before it, then processed.
//! Only matches where both players' display-unit deviation is below the cap
//! count towards the average.

use statrs::function::erf::erfc;

use crate::error::Result;
use crate::matchlog::MatchEvent;
use crate::naive::MatchScore;
use crate::store::RatingStore;

#[derive(Debug, Clone, PartialEq)]
pub struct MatchLoss {
    pub match_id: String,
    /// `r_A - r_B` in display units before the match.
    pub rating_diff: f64,
    /// Probability assigned to the observed result, `p_win^θ (1 - p_win)^(1-θ)`.
    pub p: f64,
    pub loss: f64,
    pub theta: f64,
    pub included: bool,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct LogLossReport {
    /// Per-match records after burn-in, included or not.
    pub records: Vec<MatchLoss>,
    pub burn_in: usize,
    pub included: usize,
    pub excluded: usize,
    /// Mean loss over all included matches, draws scored with `θ = ½`.
    pub average: f64,
    pub decisive_included: usize,
    /// Mean loss over included matches with `θ ∈ {0, 1}`.
    pub decisive_average: f64,
    pub draws_included: usize,
    /// Mean loss over included matches with fractional `θ`.
    pub draw_average: f64,
}

impl LogLossReport {
    pub fn processed(&self) -> usize {
        self.burn_in + self.included + self.excluded
    }
}

fn mean(sum: f64, count: usize) -> f64 {
    if count == 0 {
        f64::NAN
    } else {
        sum / count as f64
    }
}

/// Predicts then updates every event in order. The first `burn_in` events only update.
pub fn evaluate_log_loss(
    store: &mut RatingStore,
    events: &[MatchEvent],
    var_cap: f64,
    burn_in: usize,
) -> Result<LogLossReport> {
    let display = store.config().display;
    let cap_sq = var_cap * var_cap;
    let mut report = LogLossReport { burn_in: burn_in.min(events.len()), ..Default::default() };
    let (mut total, mut decisive, mut draws) = (0.0, 0.0, 0.0);

    for (idx, ev) in events.iter().enumerate() {
        ev.validate()?;
        if idx >= burn_in {
            let a = store.get_or_default(&ev.player_a)?;
            let b = store.get_or_default(&ev.player_b)?;
            let p_win = store.engine().expected_score(&a.belief, &b.belief)?;
            let score = MatchScore::new(ev.score)?;
            let p = score.likelihood(p_win);
            let (ra, da) = display.rating(&a.belief);
            let (rb, db) = display.rating(&b.belief);
            let included = da * da < cap_sq && db * db < cap_sq;
            let loss = -p.ln();
            if included {
                report.included += 1;
                total += loss;
                if score.is_decisive() {
                    report.decisive_included += 1;
                    decisive += loss;
                } else {
                    report.draws_included += 1;
                    draws += loss;
                }
            } else {
                report.excluded += 1;
            }
            report.records.push(MatchLoss {
                match_id: ev.match_id.clone(),
                rating_diff: ra - rb,
                p,
                loss,
                theta: ev.score,
                included,
            });
        }
        store.process_match(ev)?;
    }

    report.average = mean(total, report.included);
    report.decisive_average = mean(decisive, report.decisive_included);
    report.draw_average = mean(draws, report.draws_included);
    Ok(report)
}

fn std_normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

/// Smoothed share of total loss by absolute rating difference.
///
/// `f(x) ∝ Σ loss · K(x, |Δr|) / ∫_0^∞ K(x, t) dt` with `K` a Gaussian of
/// standard deviation `bandwidth`, on `x = 0, step, ..`, scaled so that its
/// trapezoid integral equals the report's average loss.
pub fn loss_density(report: &LogLossReport, bandwidth: f64, step: f64) -> Vec<(f64, f64)> {
    let included: Vec<&MatchLoss> = report.records.iter().filter(|r| r.included).collect();
    if included.is_empty() || !(bandwidth > 0.0 && step > 0.0) {
        return Vec::new();
    }
    let max_diff = included.iter().map(|r| r.rating_diff.abs()).fold(0.0, f64::max);
    let points = ((max_diff + 5.0 * bandwidth) / step).ceil() as usize + 1;
    let norm = 1.0 / (bandwidth * (2.0 * std::f64::consts::PI).sqrt());
    let mut curve: Vec<(f64, f64)> = (0..points)
        .map(|i| {
            let x = i as f64 * step;
            let half_line = std_normal_cdf(x / bandwidth);
            let v: f64 = included
                .iter()
                .map(|r| {
                    let z = (x - r.rating_diff.abs()) / bandwidth;
                    r.loss * norm * (-0.5 * z * z).exp()
                })
                .sum();
            (x, v / half_line)
        })
        .collect();
    let area = trapezoid(&curve);
    if area > 0.0 {
        let scale = report.average / area;
        for p in &mut curve {
            p.1 *= scale;
        }
    }
    curve
}

pub fn trapezoid(curve: &[(f64, f64)]) -> f64 {
    curve.windows(2).map(|w| 0.5 * (w[1].0 - w[0].0) * (w[0].1 + w[1].1)).sum()
}
