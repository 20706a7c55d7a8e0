//! `O(n log n)` match and kernel processing on a shared uniform grid.
//!
//! With `Λ(x, y) = (1-β)/2 + β F(x - y)` and `K(x, y) = G(x - y)`, both
//! updates become discrete convolutions of a weight vector with a difference
//! table. `F` does not decay, so it is split as `F = R + H` with `H` the
//! Heaviside step: the decaying remainder `R` goes through the FFT and the
//! step part is a running prefix sum.

use std::fmt;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::grid::{Belief, Grid, GridDistribution};
use crate::kernel::KernelSpec;
use crate::luck::LuckFunction;
use crate::naive::MatchScore;

/// Largest negative artifact tolerated before clamping a convolution output to zero.
pub const CLAMP_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TableSource {
    /// `R = F - H` of a difference-form luck function.
    LuckRemainder,
    /// `Λ^θ (1 - Λ)^(1-θ)` as a function of the strength difference.
    ScoreLikelihood(f64),
    /// Drift kernel `G`.
    Kernel,
    Custom,
}

/// A difference function sampled at `d Δ` for `d = -n..=n`.
#[derive(Debug, Clone, PartialEq)]
pub struct DifferenceKernelTable {
    n: usize,
    values: Vec<f64>,
    source: TableSource,
}

impl DifferenceKernelTable {
    /// `values[i] = g((i - n) Δ)`; must have length `2n + 1`.
    pub fn new(n: usize, values: Vec<f64>, source: TableSource) -> Result<Self> {
        if values.len() != 2 * n + 1 {
            return Err(Error::LengthMismatch { expected: 2 * n + 1, actual: values.len() });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::param("difference table values must be finite"));
        }
        Ok(Self { n, values, source })
    }

    pub fn from_fn(grid: &Grid, source: TableSource, g: impl Fn(f64) -> f64) -> Result<Self> {
        let n = grid.intervals();
        let step = grid.step();
        let values = (0..=2 * n).map(|i| g((i as f64 - n as f64) * step)).collect();
        Self::new(n, values, source)
    }

    /// `R(dΔ) = F(dΔ) - H(d)`.
    pub fn luck_remainder(grid: &Grid, luck: &LuckFunction) -> Result<Self> {
        if !luck.is_difference_form() {
            return Err(Error::UnsupportedLuck("FFT engine needs a difference-form luck function"));
        }
        let n = grid.intervals() as isize;
        let step = grid.step();
        let values = (-n..=n)
            .map(|d| {
                let f = luck.sigmoid(d as f64 * step).expect("difference form");
                f - heaviside(d)
            })
            .collect();
        Self::new(grid.intervals(), values, TableSource::LuckRemainder)
    }

    /// `g_θ(dΔ) = Λ(dΔ)^θ (1 - Λ(dΔ))^(1-θ)`.
    pub fn score_likelihood(grid: &Grid, luck: &LuckFunction, score: MatchScore) -> Result<Self> {
        if !luck.is_difference_form() {
            return Err(Error::UnsupportedLuck("FFT engine needs a difference-form luck function"));
        }
        Self::from_fn(grid, TableSource::ScoreLikelihood(score.value()), |d| score.likelihood(luck.eval_diff(d)))
    }

    pub fn kernel(grid: &Grid, kernel: &KernelSpec) -> Result<Self> {
        let n = grid.intervals() as isize;
        let step = grid.step();
        let values = (-n..=n)
            .map(|d| match kernel {
                KernelSpec::Identity => f64::from(u8::from(d == 0)),
                _ => kernel.eval_diff(d as f64 * step),
            })
            .collect();
        Self::new(grid.intervals(), values, TableSource::Kernel)
    }

    pub fn intervals(&self) -> usize {
        self.n
    }

    pub fn source(&self) -> TableSource {
        self.source
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `g(d Δ)` for `-n <= d <= n`.
    pub fn at(&self, d: isize) -> f64 {
        self.values[(d + self.n as isize) as usize]
    }
}

fn heaviside(d: isize) -> f64 {
    match d.signum() {
        -1 => 0.0,
        0 => 0.5,
        _ => 1.0,
    }
}

/// Forward transform of a zero-padded difference table, ready for reuse.
#[derive(Debug, Clone)]
pub struct TableSpectrum {
    n: usize,
    bins: Vec<Complex64>,
}

/// FFT plans for linear convolution of `n + 1` weights with a `2n + 1` table.
///
/// Pads to the next power of two `>= 2(n + 1)`: the full linear convolution
/// has `3n + 1` terms, and with that length the wrapped tail only lands on
/// indices below `n`, which are discarded.
#[derive(Clone)]
pub struct Convolver {
    n: usize,
    len: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for Convolver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Convolver").field("n", &self.n).field("len", &self.len).finish()
    }
}

impl Convolver {
    pub fn new(n: usize) -> Self {
        let len = (2 * (n + 1)).next_power_of_two();
        let mut planner = FftPlanner::new();
        Self { n, len, forward: planner.plan_fft_forward(len), inverse: planner.plan_fft_inverse(len) }
    }

    pub fn padded_len(&self) -> usize {
        self.len
    }

    pub fn spectrum(&self, table: &DifferenceKernelTable) -> Result<TableSpectrum> {
        if table.n != self.n {
            return Err(Error::LengthMismatch { expected: 2 * self.n + 1, actual: table.values.len() });
        }
        let mut bins = vec![Complex64::new(0.0, 0.0); self.len];
        for (slot, &v) in bins.iter_mut().zip(&table.values) {
            slot.re = v;
        }
        self.forward.process(&mut bins);
        Ok(TableSpectrum { n: self.n, bins })
    }

    /// `out(k) = Σ_j rho(j) g(k - j)` for `k = 0..=n`.
    pub fn convolve_spectrum(&self, rho: &[f64], spectrum: &TableSpectrum) -> Result<Vec<f64>> {
        if rho.len() != self.n + 1 {
            return Err(Error::LengthMismatch { expected: self.n + 1, actual: rho.len() });
        }
        if spectrum.n != self.n {
            return Err(Error::LengthMismatch { expected: self.n + 1, actual: spectrum.n + 1 });
        }
        let mut buf = vec![Complex64::new(0.0, 0.0); self.len];
        for (slot, &w) in buf.iter_mut().zip(rho) {
            slot.re = w;
        }
        self.forward.process(&mut buf);
        for (x, g) in buf.iter_mut().zip(&spectrum.bins) {
            *x *= g;
        }
        self.inverse.process(&mut buf);
        let scale = 1.0 / self.len as f64;
        Ok(buf[self.n..=2 * self.n].iter().map(|c| c.re * scale).collect())
    }

    pub fn convolve(&self, rho: &[f64], table: &DifferenceKernelTable) -> Result<Vec<f64>> {
        let spectrum = self.spectrum(table)?;
        self.convolve_spectrum(rho, &spectrum)
    }
}

/// One-off convolution of grid weights with a difference table.
pub fn convolve(rho: &[f64], table: &DifferenceKernelTable) -> Result<Vec<f64>> {
    if rho.len() != table.n + 1 {
        return Err(Error::LengthMismatch { expected: table.n + 1, actual: rho.len() });
    }
    Convolver::new(table.n).convolve(rho, table)
}

/// `L_H(kΔ) = Σ_j ρ_B(jΔ) H((k - j)Δ)` in a single pass.
pub fn heaviside_prefix(rho: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    rho.iter()
        .map(|&w| {
            let half = 0.5 * w;
            acc += half;
            let out = acc;
            acc += half;
            out
        })
        .collect()
}

fn clamp_artifacts(values: &mut [f64]) {
    for v in values {
        if *v < 0.0 {
            debug_assert!(-*v <= CLAMP_TOLERANCE, "convolution artifact {v} exceeds tolerance");
            *v = 0.0;
        }
    }
}

/// Cached tables and transforms for one `(grid, Λ, K)` configuration.
#[derive(Debug, Clone)]
pub struct FftEngine {
    grid: Grid,
    luck: LuckFunction,
    beta: f64,
    convolver: Convolver,
    remainder: TableSpectrum,
    draw: TableSpectrum,
    kernel: Option<TableSpectrum>,
}

impl FftEngine {
    pub fn new(grid: Grid, luck: LuckFunction, kernel: &KernelSpec) -> Result<Self> {
        let beta = luck.beta().ok_or(Error::UnsupportedLuck("FFT engine needs a difference-form luck function"))?;
        let convolver = Convolver::new(grid.intervals());
        let remainder = convolver.spectrum(&DifferenceKernelTable::luck_remainder(&grid, &luck)?)?;
        let draw = convolver.spectrum(&DifferenceKernelTable::score_likelihood(&grid, &luck, MatchScore::DRAW)?)?;
        let kernel = match kernel {
            KernelSpec::Identity => None,
            k => Some(convolver.spectrum(&DifferenceKernelTable::kernel(&grid, k)?)?),
        };
        Ok(Self { grid, luck, beta, convolver, remainder, draw, kernel })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn luck(&self) -> &LuckFunction {
        &self.luck
    }

    /// `L_R + L_H`: the expected sigmoid value against `b` at every grid point.
    pub fn sigmoid_mass(&self, b: &GridDistribution) -> Result<Vec<f64>> {
        self.grid.ensure_compatible(b.grid())?;
        let mut out = self.convolver.convolve_spectrum(b.weights(), &self.remainder)?;
        for (r, h) in out.iter_mut().zip(heaviside_prefix(b.weights())) {
            *r += h;
        }
        Ok(out)
    }

    /// Probability of winning against `b` from each grid point.
    pub fn win_likelihood(&self, b: &GridDistribution) -> Result<Vec<f64>> {
        let base = 0.5 * (1.0 - self.beta);
        let mut out: Vec<f64> = self.sigmoid_mass(b)?.into_iter().map(|s| base + self.beta * s).collect();
        clamp_artifacts(&mut out);
        Ok(out)
    }

    pub fn likelihood(&self, b: &GridDistribution, score: MatchScore) -> Result<Vec<f64>> {
        let theta = score.value();
        if theta == 1.0 {
            return self.win_likelihood(b);
        }
        let mut out = if theta == 0.0 {
            let base = 0.5 * (1.0 + self.beta);
            self.sigmoid_mass(b)?.into_iter().map(|s| base - self.beta * s).collect()
        } else {
            self.grid.ensure_compatible(b.grid())?;
            if theta == 0.5 {
                self.convolver.convolve_spectrum(b.weights(), &self.draw)?
            } else {
                let table = DifferenceKernelTable::score_likelihood(&self.grid, &self.luck, score)?;
                self.convolver.convolve(b.weights(), &table)?
            }
        };
        clamp_artifacts(&mut out);
        Ok(out)
    }

    pub fn posterior(&self, a: &GridDistribution, b: &GridDistribution, score: MatchScore) -> Result<GridDistribution> {
        self.grid.ensure_compatible(a.grid())?;
        let likelihood = self.likelihood(b, score)?;
        a.with_weights(a.weights().iter().zip(&likelihood).map(|(w, l)| w * l).collect())
    }

    /// `L(a, b)`.
    pub fn expected_score(&self, a: &GridDistribution, b: &GridDistribution) -> Result<f64> {
        self.grid.ensure_compatible(a.grid())?;
        let likelihood = self.win_likelihood(b)?;
        Ok(a.weights().iter().zip(&likelihood).map(|(w, l)| w * l).sum())
    }

    pub fn smooth(&self, rho: &GridDistribution) -> Result<GridDistribution> {
        self.grid.ensure_compatible(rho.grid())?;
        match &self.kernel {
            None => Ok(rho.clone()),
            Some(spectrum) => {
                let mut out = self.convolver.convolve_spectrum(rho.weights(), spectrum)?;
                clamp_artifacts(&mut out);
                rho.with_weights(out)
            }
        }
    }
}

/// FFT posterior for a single match; prefer [`FftEngine`] for repeated use.
pub fn posterior_fft(
    luck: &LuckFunction,
    a: &GridDistribution,
    b: &GridDistribution,
    score: MatchScore,
) -> Result<GridDistribution> {
    a.grid().ensure_compatible(b.grid())?;
    FftEngine::new(*a.grid(), luck.clone(), &KernelSpec::Identity)?.posterior(a, b, score)
}

/// FFT kernel step for a single distribution; prefer [`FftEngine`] for repeated use.
pub fn kernel_fft(kernel: &KernelSpec, rho: &GridDistribution) -> Result<GridDistribution> {
    if matches!(kernel, KernelSpec::Identity) {
        return Ok(rho.clone());
    }
    let table = DifferenceKernelTable::kernel(rho.grid(), kernel)?;
    let mut out = convolve(rho.weights(), &table)?;
    clamp_artifacts(&mut out);
    rho.with_weights(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::default_prior;
    use crate::luck::luck_eval;
    use crate::naive::{kernel_naive, posterior_naive};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn direct_convolution(rho: &[f64], table: &DifferenceKernelTable) -> Vec<f64> {
        let n = rho.len() - 1;
        (0..=n).map(|k| (0..=n).map(|j| rho[j] * table.at(k as isize - j as isize)).sum()).collect()
    }

    fn random_weights(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
        (0..len).map(|_| rng.random::<f64>()).collect()
    }

    #[test]
    fn point_mass_reproduces_table() {
        let n = 40;
        let table =
            DifferenceKernelTable::new(n, (0..=2 * n).map(|i| (i as f64 * 0.3).sin()).collect(), TableSource::Custom)
                .unwrap();
        let j0 = 13;
        let mut rho = vec![0.0; n + 1];
        rho[j0] = 1.0;
        let out = convolve(&rho, &table).unwrap();
        for (k, v) in out.iter().enumerate() {
            assert!((v - table.at(k as isize - j0 as isize)).abs() < 1e-14);
        }
    }

    #[test]
    fn zero_table_gives_zeros() {
        let table = DifferenceKernelTable::new(10, vec![0.0; 21], TableSource::Custom).unwrap();
        let out = convolve(&[0.1; 11], &table).unwrap();
        assert!(out.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn random_gaussian_matches_direct_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let grid = Grid::new(256, 3.0).unwrap();
        let table = DifferenceKernelTable::kernel(&grid, &KernelSpec::gaussian(0.2).unwrap()).unwrap();
        let rho = random_weights(&mut rng, 257);
        let fast = convolve(&rho, &table).unwrap();
        let slow = direct_convolution(&rho, &table);
        for (a, b) in fast.iter().zip(&slow) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn length_mismatch_rejected() {
        let table = DifferenceKernelTable::new(10, vec![1.0; 21], TableSource::Custom).unwrap();
        assert!(matches!(convolve(&[0.1; 10], &table), Err(Error::LengthMismatch { .. })));
        assert!(DifferenceKernelTable::new(10, vec![1.0; 20], TableSource::Custom).is_err());
    }

    #[test]
    fn heaviside_prefix_examples() {
        assert_eq!(heaviside_prefix(&[0.25, 0.5, 0.25]), vec![0.125, 0.5, 0.875]);
        assert_eq!(heaviside_prefix(&[0.0, 0.0, 1.0, 0.0]), vec![0.0, 0.0, 0.5, 1.0]);
        let n = 9;
        let uniform = vec![1.0 / (n + 1) as f64; n + 1];
        for (k, v) in heaviside_prefix(&uniform).iter().enumerate() {
            assert!((v - (k as f64 + 0.5) / (n + 1) as f64).abs() < 1e-15);
        }
    }

    #[test]
    fn decomposition_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let grid = Grid::new(300, 7.0).unwrap();
        let luck = LuckFunction::logistic(0.8).unwrap();
        let engine = FftEngine::new(grid, luck.clone(), &KernelSpec::Identity).unwrap();
        for _ in 0..100 {
            let b = GridDistribution::new(grid, random_weights(&mut rng, 301)).unwrap();
            let mass = engine.sigmoid_mass(&b).unwrap();
            for (k, m) in mass.iter().enumerate() {
                let direct: f64 = (0..=300)
                    .map(|j| b.weights()[j] * luck.sigmoid((k as f64 - j as f64) * grid.step()).unwrap())
                    .sum();
                assert!((m - direct).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn posterior_matches_naive_for_all_scores() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let grid = Grid::new(200, 7.0).unwrap();
        for beta in [0.0, 0.8, 0.99, 1.0 - 1e-9, 1.0] {
            let luck = LuckFunction::logistic(beta).unwrap();
            let engine = FftEngine::new(grid, luck.clone(), &KernelSpec::Identity).unwrap();
            for theta in [0.0, 0.3, 0.5, 1.0] {
                let a = GridDistribution::new(grid, random_weights(&mut rng, 201)).unwrap();
                let b = GridDistribution::new(grid, random_weights(&mut rng, 201)).unwrap();
                let score = MatchScore::new(theta).unwrap();
                let fast = engine.posterior(&a, &b, score).unwrap();
                let slow = posterior_naive(&luck, &a, &b, score).unwrap();
                for (x, y) in fast.weights().iter().zip(slow.weights()) {
                    assert!((x - y).abs() <= 1e-9, "beta={beta} theta={theta}");
                }
            }
        }
    }

    #[test]
    fn coin_flip_posterior_is_prior() {
        let grid = Grid::new(100, 7.0).unwrap();
        let a = default_prior(grid, 0.7).unwrap();
        let b = GridDistribution::point_mass(grid, 70).unwrap();
        let post = posterior_fft(&LuckFunction::logistic(0.0).unwrap(), &a, &b, MatchScore::WIN).unwrap();
        for (x, y) in post.weights().iter().zip(a.weights()) {
            assert!((x - y).abs() <= 1e-12);
        }
    }

    #[test]
    fn point_mass_opponent_reduces_to_luck() {
        let grid = Grid::new(100, 7.0).unwrap();
        let luck = LuckFunction::logistic(0.8).unwrap();
        let a = default_prior(grid, 0.7).unwrap();
        let b = GridDistribution::point_mass(grid, 62).unwrap();
        let y = grid.point(62);
        let post = posterior_fft(&luck, &a, &b, MatchScore::WIN).unwrap();
        let direct: Vec<f64> =
            (0..=100).map(|k| a.weights()[k] * luck_eval(&luck, grid.point(k), y).unwrap()).collect();
        let z: f64 = direct.iter().sum();
        for (p, d) in post.weights().iter().zip(&direct) {
            assert!((p - d / z).abs() <= 1e-9);
        }
    }

    #[test]
    fn incompatible_or_ratio_rejected() {
        let a = default_prior(Grid::new(100, 7.0).unwrap(), 0.7).unwrap();
        let b = default_prior(Grid::new(100, 6.0).unwrap(), 0.7).unwrap();
        let luck = LuckFunction::logistic(0.8).unwrap();
        assert!(matches!(posterior_fft(&luck, &a, &b, MatchScore::WIN), Err(Error::IncompatibleGrids(..))));
        assert!(matches!(
            posterior_fft(&LuckFunction::RatioBT, &a, &a, MatchScore::WIN),
            Err(Error::UnsupportedLuck(_))
        ));
    }

    #[test]
    fn kernel_matches_naive_on_deployed_grid() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let grid = Grid::new(1000, 7.0).unwrap();
        let kernel = KernelSpec::gaussian(0.03).unwrap();
        let rho = GridDistribution::new(grid, random_weights(&mut rng, 1001)).unwrap();
        let fast = kernel_fft(&kernel, &rho).unwrap();
        let slow = kernel_naive(&kernel, &rho).unwrap();
        for (x, y) in fast.weights().iter().zip(slow.weights()) {
            assert!((x - y).abs() <= 1e-9);
        }
    }

    #[test]
    fn identity_kernel_is_unchanged() {
        let grid = Grid::new(50, 2.0).unwrap();
        let rho = default_prior(grid, 0.5).unwrap();
        assert_eq!(kernel_fft(&KernelSpec::Identity, &rho).unwrap(), rho);
        // A delta table through the FFT path agrees to rounding.
        let delta = KernelSpec::tabulated(grid.step(), vec![0.0, 1.0, 0.0]).unwrap();
        let out = kernel_fft(&delta, &rho).unwrap();
        for (x, y) in out.weights().iter().zip(rho.weights()) {
            assert!((x - y).abs() < 1e-15);
        }
    }

    #[test]
    fn gaussian_semigroup() {
        let grid = Grid::new(1000, 7.0).unwrap();
        let sigma = 0.03;
        let rho = default_prior(grid, 0.7).unwrap();
        let twice = kernel_fft(
            &KernelSpec::gaussian(sigma).unwrap(),
            &kernel_fft(&KernelSpec::gaussian(sigma).unwrap(), &rho).unwrap(),
        )
        .unwrap();
        let once = kernel_fft(&KernelSpec::gaussian(sigma * 2f64.sqrt()).unwrap(), &rho).unwrap();
        let max = (100..=900).map(|k| (twice.weights()[k] - once.weights()[k]).abs()).fold(0.0, f64::max);
        assert!(max <= 2e-3, "{max}");
    }

    #[test]
    fn engine_is_shareable_across_threads() {
        fn assert_send_sync<T: Send + Sync>() {}
        assert_send_sync::<FftEngine>();
    }
}
