//! Near-linear match and kernel processing for Laplace-mixture luck functions
//! and kernels on arbitrary finite supports.
//!
//! Both scans merge the support with the query points and sweep once in each
//! direction, carrying an accumulator that only ever decays by `e^{-Δ/b}`
//! with `Δ >= 0`. At equal coordinates support points are visited before
//! queries going up and after queries going down, which yields the
//! `x_k <= y` convention for the left sums.

pub use crate::grid::PointDistribution;

use crate::error::{Error, Result};
use crate::grid::Belief;
use crate::kernel::KernelSpec;
use crate::luck::LuckFunction;
use crate::naive::MatchScore;

/// Indices of `queries` in ascending order. Skips the sort if already sorted.
fn ascending_order(queries: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..queries.len()).collect();
    if queries.windows(2).any(|w| w[0] > w[1]) {
        order.sort_by(|&i, &j| queries[i].total_cmp(&queries[j]));
    }
    order
}

fn decay(delta: f64, scale: f64) -> f64 {
    debug_assert!(delta >= 0.0, "growing exponential in Laplace scan: delta = {delta}");
    (-delta / scale).exp()
}

/// Ascending sweep. Calls `record(query_index, left_accumulator, mass)`.
fn sweep_up(
    support: &[f64],
    weights: &[f64],
    queries: &[f64],
    order: &[usize],
    scale: f64,
    gain: f64,
    mut record: impl FnMut(usize, f64, f64),
) {
    let (mut i, mut q) = (0, 0);
    let mut left = 0.0;
    let mut mass = 0.0;
    let mut prev = match (support.first(), order.first()) {
        (Some(&s), Some(&o)) => s.min(queries[o]),
        (Some(&s), None) => s,
        (None, Some(&o)) => queries[o],
        (None, None) => return,
    };
    while q < order.len() {
        let take_support = i < support.len() && support[i] <= queries[order[q]];
        let z = if take_support { support[i] } else { queries[order[q]] };
        left *= decay(z - prev, scale);
        prev = z;
        if take_support {
            left += gain * weights[i];
            mass += weights[i];
            i += 1;
        } else {
            record(order[q], left, mass);
            q += 1;
        }
    }
}

/// Descending sweep. Calls `record(query_index, right_accumulator)`.
fn sweep_down(
    support: &[f64],
    weights: &[f64],
    queries: &[f64],
    order: &[usize],
    scale: f64,
    gain: f64,
    mut record: impl FnMut(usize, f64),
) {
    let (mut i, mut q) = (support.len(), order.len());
    let mut right = 0.0;
    let mut prev = match (support.last(), order.last()) {
        (Some(&s), Some(&o)) => s.max(queries[o]),
        (Some(&s), None) => s,
        (None, Some(&o)) => queries[o],
        (None, None) => return,
    };
    while q > 0 {
        let take_support = i > 0 && support[i - 1] > queries[order[q - 1]];
        let z = if take_support { support[i - 1] } else { queries[order[q - 1]] };
        right *= decay(prev - z, scale);
        prev = z;
        if take_support {
            right += gain * weights[i - 1];
            i -= 1;
        } else {
            record(order[q - 1], right);
            q -= 1;
        }
    }
}

fn check_scale(scale: f64) -> Result<()> {
    if scale > 0.0 && scale.is_finite() {
        Ok(())
    } else {
        Err(Error::param(format!("Laplace scale must be positive, got {scale}")))
    }
}

fn pdf_scan(support: &[f64], weights: &[f64], scale: f64, queries: &[f64]) -> Vec<f64> {
    let order = ascending_order(queries);
    let gain = 0.5 / scale;
    let mut out = vec![0.0; queries.len()];
    sweep_up(support, weights, queries, &order, scale, gain, |q, left, _| out[q] = left);
    sweep_down(support, weights, queries, &order, scale, gain, |q, right| out[q] += right);
    out
}

fn cdf_scan(support: &[f64], weights: &[f64], scale: f64, queries: &[f64]) -> Vec<f64> {
    let order = ascending_order(queries);
    let mut out = vec![0.0; queries.len()];
    sweep_up(support, weights, queries, &order, scale, 0.5, |q, left, mass| out[q] = mass - left);
    sweep_down(support, weights, queries, &order, scale, 0.5, |q, right| out[q] += right);
    out
}

/// `Q(y) = Σ_k ρ(x_k) f(y - x_k | b)` at every query, `f` the Laplace density.
pub fn laplace_pdf_scan(rho: &PointDistribution, scale: f64, queries: &[f64]) -> Result<Vec<f64>> {
    check_scale(scale)?;
    Ok(pdf_scan(rho.support(), rho.weights(), scale, queries))
}

/// `T(y) = Σ_k ρ(x_k) F(y - x_k | b)` at every query, `F` the Laplace CDF.
pub fn laplace_cdf_scan(rho: &PointDistribution, scale: f64, queries: &[f64]) -> Result<Vec<f64>> {
    check_scale(scale)?;
    Ok(cdf_scan(rho.support(), rho.weights(), scale, queries))
}

fn support_of<B: Belief>(b: &B) -> Vec<f64> {
    (0..b.len()).map(|i| b.point(i)).collect()
}

/// Win (`θ = 1`) or loss (`θ = 0`) likelihood at every support point of `a`.
pub fn likelihood_laplace<A: Belief, B: Belief>(
    luck: &LuckFunction,
    a: &A,
    b: &B,
    score: MatchScore,
) -> Result<Vec<f64>> {
    let LuckFunction::LaplaceMix { beta, components } = luck else {
        return Err(Error::UnsupportedLuck("Laplace engine needs a Laplace-CDF mixture"));
    };
    if !score.is_decisive() {
        return Err(Error::UnsupportedScore(score.value()));
    }
    let queries = support_of(a);
    let b_support = support_of(b);
    let mut mixed = vec![0.0; queries.len()];
    for c in components {
        if c.weight == 0.0 {
            continue;
        }
        let t = cdf_scan(&b_support, b.weights(), c.scale, &queries);
        for (m, v) in mixed.iter_mut().zip(t) {
            *m += c.weight * v;
        }
    }
    let out = if score.value() == 1.0 {
        let base = 0.5 * (1.0 - beta);
        mixed.into_iter().map(|s| base + beta * s).collect()
    } else {
        let base = 0.5 * (1.0 + beta);
        mixed.into_iter().map(|s| (base - beta * s).max(0.0)).collect()
    };
    Ok(out)
}

/// Posterior for a decisive result under a Laplace-mixture luck function.
pub fn posterior_laplace<A: Belief, B: Belief>(luck: &LuckFunction, a: &A, b: &B, score: MatchScore) -> Result<A> {
    let likelihood = likelihood_laplace(luck, a, b, score)?;
    a.with_weights(a.weights().iter().zip(&likelihood).map(|(w, l)| w * l).collect())
}

/// Unnormalized mixture smoothing `Σ_j q_j Σ_k ρ(x_k) f(x - x_k | b_j)` at `points`.
pub fn smooth_laplace<D: Belief>(kernel: &KernelSpec, rho: &D, points: &[f64]) -> Result<Vec<f64>> {
    let KernelSpec::LaplaceMixPdf { components } = kernel else {
        return Err(Error::UnsupportedKernel("Laplace engine needs a Laplace-PDF mixture"));
    };
    let support = support_of(rho);
    let mut out = vec![0.0; points.len()];
    for c in components {
        if c.weight == 0.0 {
            continue;
        }
        for (o, v) in out.iter_mut().zip(pdf_scan(&support, rho.weights(), c.scale, points)) {
            *o += c.weight * v;
        }
    }
    Ok(out)
}

/// Kernel step evaluated on `output_support`, normalized.
pub fn kernel_laplace<D: Belief>(kernel: &KernelSpec, rho: &D, output_support: &[f64]) -> Result<PointDistribution> {
    if output_support.is_empty() {
        return Err(Error::param("output support must not be empty"));
    }
    let weights = smooth_laplace(kernel, rho, output_support)?;
    PointDistribution::new(output_support.to_vec(), weights).map_err(|e| match e {
        Error::InvalidParameter(msg) if msg.contains("weights") => Error::ImpossibleOutcome,
        other => other,
    })
}
