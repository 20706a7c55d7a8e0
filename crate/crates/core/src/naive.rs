//! Reference `O(n·m)` match and kernel processing.
//!
//! Works on any finite supports, including supports that differ between the
//! two players. Every faster engine is tested against these functions.

use crate::error::{Error, Result};
use crate::grid::Belief;
use crate::kernel::KernelSpec;
use crate::luck::LuckFunction;

/// Observed score `θ ∈ [0, 1]` of the first player: 1 win, 0 loss, ½ draw.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct MatchScore(f64);

impl MatchScore {
    pub const WIN: MatchScore = MatchScore(1.0);
    pub const LOSS: MatchScore = MatchScore(0.0);
    pub const DRAW: MatchScore = MatchScore(0.5);

    pub fn new(theta: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&theta) {
            Ok(Self(theta))
        } else {
            Err(Error::param(format!("match score must lie in [0, 1], got {theta}")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// The same match seen from the opponent's side.
    pub fn flipped(self) -> Self {
        Self(1.0 - self.0)
    }

    pub fn is_decisive(self) -> bool {
        self.0 == 0.0 || self.0 == 1.0
    }

    /// `λ^θ (1 - λ)^(1 - θ)` with `0^0 = 1`.
    pub fn likelihood(self, lambda: f64) -> f64 {
        let theta = self.0;
        if theta == 1.0 {
            lambda
        } else if theta == 0.0 {
            1.0 - lambda
        } else {
            lambda.powf(theta) * (1.0 - lambda).powf(1.0 - theta)
        }
    }
}

/// `ℓ(x_i) = Σ_k ρ_B(y_k) Λ(x_i, y_k)^θ (1 - Λ(x_i, y_k))^(1-θ)` for every
/// support point of `a`. Points where `a` has no mass get 0.
pub fn likelihood_naive<A: Belief, B: Belief>(
    luck: &LuckFunction,
    a: &A,
    b: &B,
    score: MatchScore,
) -> Result<Vec<f64>> {
    likelihood_with(|x, y| luck.eval(x, y), a, b, score)
}

/// [`likelihood_naive`] for an arbitrary luck function given as a closure.
pub fn likelihood_with<A, B, F>(luck: F, a: &A, b: &B, score: MatchScore) -> Result<Vec<f64>>
where
    A: Belief,
    B: Belief,
    F: Fn(f64, f64) -> Result<f64>,
{
    let mut out = vec![0.0; a.len()];
    for (i, &wa) in a.weights().iter().enumerate() {
        if wa == 0.0 {
            continue;
        }
        let x = a.point(i);
        let mut acc = 0.0;
        for (k, &wb) in b.weights().iter().enumerate() {
            if wb == 0.0 {
                continue;
            }
            acc += wb * score.likelihood(luck(x, b.point(k))?);
        }
        out[i] = acc;
    }
    Ok(out)
}

/// Posterior of the first player after scoring `score` against the second.
///
/// Returns [`Error::ImpossibleOutcome`] when the evidence is exactly zero.
pub fn posterior_naive<A: Belief, B: Belief>(luck: &LuckFunction, a: &A, b: &B, score: MatchScore) -> Result<A> {
    posterior_with(|x, y| luck.eval(x, y), a, b, score)
}

/// [`posterior_naive`] for an arbitrary luck function given as a closure.
pub fn posterior_with<A, B, F>(luck: F, a: &A, b: &B, score: MatchScore) -> Result<A>
where
    A: Belief,
    B: Belief,
    F: Fn(f64, f64) -> Result<f64>,
{
    let likelihood = likelihood_with(luck, a, b, score)?;
    let mut live = a.weights().iter().zip(&likelihood).filter(|(w, _)| **w > 0.0).map(|(_, l)| *l);
    let first = live.next().unwrap_or(0.0);
    if first > 0.0 && live.all(|l| l == first) {
        // A constant likelihood carries no information.
        return Ok(a.clone());
    }
    let weights = a.weights().iter().zip(&likelihood).map(|(w, l)| w * l).collect();
    a.with_weights(weights)
}

/// `ρ̃(x_i) ∝ Σ_k ρ(x_k) K(x_i, x_k)` on the support of `rho`.
pub fn kernel_naive<D: Belief>(kernel: &KernelSpec, rho: &D) -> Result<D> {
    if matches!(kernel, KernelSpec::Identity) {
        return Ok(rho.clone());
    }
    let n = rho.len();
    let mut out = vec![0.0; n];
    for (i, slot) in out.iter_mut().enumerate() {
        let x = rho.point(i);
        *slot = rho
            .weights()
            .iter()
            .enumerate()
            .filter(|(_, w)| **w != 0.0)
            .map(|(k, w)| w * kernel.eval(x, rho.point(k)))
            .sum();
    }
    rho.with_weights(out)
}
