//! Discrete strength distributions.
//!
//! Player beliefs live on a shared uniform [`Grid`] `x_k = -M + (2M/n) k`,
//! `k = 0..=n`. The grid itself is stored implicitly as `(n, M)`, so a
//! [`GridDistribution`] is just its `n + 1` weights. Arbitrary finite
//! supports (used by the naive and Laplace engines) are [`PointDistribution`]s.

use std::f64::consts::LN_10;

use crate::error::{Error, Result};

/// Uniform symmetric grid on `[-M, M]` with `n` intervals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    n: usize,
    half_width: f64,
}

impl Grid {
    pub fn new(n: usize, half_width: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("grid needs at least one interval"));
        }
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::param(format!("grid half-width must be positive, got {half_width}")));
        }
        Ok(Self { n, half_width })
    }

    /// Number of intervals. The support has `n + 1` points.
    pub fn intervals(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.n + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn step(&self) -> f64 {
        2.0 * self.half_width / self.n as f64
    }

    /// `x_k`. Computed as `M (2k - n) / n` so that `x_k == -x_{n-k}` holds bit-exactly.
    pub fn point(&self, k: usize) -> f64 {
        debug_assert!(k <= self.n);
        self.half_width * (2.0 * k as f64 - self.n as f64) / self.n as f64
    }

    pub fn points(&self) -> Vec<f64> {
        (0..=self.n).map(|k| self.point(k)).collect()
    }

    pub fn is_compatible(&self, other: &Grid) -> bool {
        self == other
    }

    pub fn ensure_compatible(&self, other: &Grid) -> Result<()> {
        if self.is_compatible(other) {
            Ok(())
        } else {
            Err(Error::IncompatibleGrids(self.n, self.half_width, other.n, other.half_width))
        }
    }
}

/// Divides by the exact current sum. Fails on negative, non-finite or all-zero input.
pub(crate) fn normalize(mut weights: Vec<f64>) -> Option<Vec<f64>> {
    let mut total = 0.0;
    for &w in &weights {
        if !w.is_finite() || w < 0.0 {
            return None;
        }
        total += w;
    }
    if !total.is_finite() || total <= 0.0 {
        return None;
    }
    for w in &mut weights {
        *w /= total;
    }
    Some(weights)
}

/// A normalized finite distribution over real strengths.
pub trait Belief: Sized + Clone {
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn point(&self, i: usize) -> f64;

    fn weights(&self) -> &[f64];

    /// Same support, new (unnormalized) weights.
    fn with_weights(&self, weights: Vec<f64>) -> Result<Self>;

    fn mean(&self) -> f64 {
        self.weights().iter().enumerate().map(|(i, w)| w * self.point(i)).sum()
    }

    fn variance(&self) -> f64 {
        let mean = self.mean();
        self.weights()
            .iter()
            .enumerate()
            .map(|(i, w)| {
                let d = self.point(i) - mean;
                w * d * d
            })
            .sum()
    }

    fn std_dev(&self) -> f64 {
        self.variance().max(0.0).sqrt()
    }
}

/// Weights over the points of a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridDistribution {
    grid: Grid,
    weights: Vec<f64>,
}

impl GridDistribution {
    /// Normalizes `weights`, which must have one entry per grid point.
    pub fn new(grid: Grid, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != grid.len() {
            return Err(Error::LengthMismatch { expected: grid.len(), actual: weights.len() });
        }
        let weights =
            normalize(weights).ok_or_else(|| Error::param("weights must be finite, non-negative and not all zero"))?;
        Ok(Self { grid, weights })
    }

    /// Wraps weights that already sum to one, checking the sum to `tolerance`.
    pub fn from_normalized(grid: Grid, weights: Vec<f64>, tolerance: f64) -> Result<Self> {
        if weights.len() != grid.len() {
            return Err(Error::LengthMismatch { expected: grid.len(), actual: weights.len() });
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::Integrity("negative or non-finite weight".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > tolerance {
            return Err(Error::Integrity(format!("weights sum to {total}, not 1")));
        }
        Ok(Self { grid, weights })
    }

    pub fn point_mass(grid: Grid, k: usize) -> Result<Self> {
        if k > grid.intervals() {
            return Err(Error::param(format!("index {k} outside grid")));
        }
        let mut weights = vec![0.0; grid.len()];
        weights[k] = 1.0;
        Ok(Self { grid, weights })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn into_weights(self) -> Vec<f64> {
        self.weights
    }

    pub fn to_points(&self) -> PointDistribution {
        PointDistribution { support: self.grid.points(), weights: self.weights.clone() }
    }

    /// Cumulative distribution at each grid point.
    pub fn cdf(&self) -> Vec<f64> {
        let mut acc = 0.0;
        self.weights
            .iter()
            .map(|w| {
                acc += w;
                acc
            })
            .collect()
    }
}

impl Belief for GridDistribution {
    fn len(&self) -> usize {
        self.weights.len()
    }

    fn point(&self, i: usize) -> f64 {
        self.grid.point(i)
    }

    fn weights(&self) -> &[f64] {
        &self.weights
    }

    fn with_weights(&self, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != self.weights.len() {
            return Err(Error::LengthMismatch { expected: self.weights.len(), actual: weights.len() });
        }
        let weights = normalize(weights).ok_or(Error::ImpossibleOutcome)?;
        Ok(Self { grid: self.grid, weights })
    }
}

/// Distribution on an arbitrary strictly increasing finite support.
#[derive(Debug, Clone, PartialEq)]
pub struct PointDistribution {
    support: Vec<f64>,
    weights: Vec<f64>,
}

impl PointDistribution {
    pub fn new(support: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if support.len() != weights.len() {
            return Err(Error::LengthMismatch { expected: support.len(), actual: weights.len() });
        }
        if support.is_empty() {
            return Err(Error::param("support must not be empty"));
        }
        if support.iter().any(|x| !x.is_finite()) {
            return Err(Error::param("support points must be finite"));
        }
        if support.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::param("support must be strictly increasing"));
        }
        let weights =
            normalize(weights).ok_or_else(|| Error::param("weights must be finite, non-negative and not all zero"))?;
        Ok(Self { support, weights })
    }

    /// Builds from `(point, weight)` pairs in any order. Duplicate points are rejected.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        let mut pairs: Vec<(f64, f64)> = pairs.into_iter().collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (support, weights) = pairs.into_iter().unzip();
        Self::new(support, weights)
    }

    pub fn support(&self) -> &[f64] {
        &self.support
    }

    /// Weight at `x`, zero if `x` is not in the support.
    pub fn weight_at(&self, x: f64) -> f64 {
        match self.support.binary_search_by(|p| p.total_cmp(&x)) {
            Ok(i) => self.weights[i],
            Err(_) => 0.0,
        }
    }
}

impl Belief for PointDistribution {
    fn len(&self) -> usize {
        self.support.len()
    }

    fn point(&self, i: usize) -> f64 {
        self.support[i]
    }

    fn weights(&self) -> &[f64] {
        &self.weights
    }

    fn with_weights(&self, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != self.weights.len() {
            return Err(Error::LengthMismatch { expected: self.weights.len(), actual: weights.len() });
        }
        let weights = normalize(weights).ok_or(Error::ImpossibleOutcome)?;
        Ok(Self { support: self.support.clone(), weights })
    }
}

/// Prior for an unknown player: weights proportional to the `N(0, sigma0^2)`
/// density at each grid point.
pub fn default_prior(grid: Grid, sigma0: f64) -> Result<GridDistribution> {
    if !(sigma0 > 0.0 && sigma0.is_finite()) {
        return Err(Error::param(format!("prior deviation must be positive, got {sigma0}")));
    }
    let inv = 1.0 / (2.0 * sigma0 * sigma0);
    let weights = (0..grid.len())
        .map(|k| {
            let x = grid.point(k);
            (-x * x * inv).exp()
        })
        .collect();
    GridDistribution::new(grid, weights)
}

/// Affine map from natural strength units to displayed ratings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DisplayTransform {
    pub scale: f64,
    pub offset: f64,
}

impl Default for DisplayTransform {
    fn default() -> Self {
        Self { scale: 400.0 / LN_10, offset: 1500.0 }
    }
}

impl DisplayTransform {
    pub fn new(scale: f64, offset: f64) -> Result<Self> {
        if !(scale.is_finite() && scale != 0.0 && offset.is_finite()) {
            return Err(Error::param("display scale must be finite and non-zero"));
        }
        Ok(Self { scale, offset })
    }

    pub fn to_display(&self, x: f64) -> f64 {
        self.scale * x + self.offset
    }

    pub fn from_display(&self, rating: f64) -> f64 {
        (rating - self.offset) / self.scale
    }

    /// `(rating, deviation)` in display units.
    pub fn rating<B: Belief>(&self, belief: &B) -> (f64, f64) {
        (self.to_display(belief.mean()), self.scale.abs() * belief.std_dev())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_points_are_symmetric_and_increasing() {
        let grid = Grid::new(1000, 7.0).unwrap();
        assert_eq!(grid.point(0), -7.0);
        assert_eq!(grid.point(1000), 7.0);
        assert_eq!(grid.point(500), 0.0);
        for k in 0..=1000 {
            assert_eq!(grid.point(k), -grid.point(1000 - k));
        }
        assert!(grid.points().windows(2).all(|w| w[0] < w[1]));
        assert!((grid.step() - 0.014).abs() < 1e-15);
    }

    #[test]
    fn grid_rejects_bad_parameters() {
        assert!(Grid::new(0, 1.0).is_err());
        assert!(Grid::new(10, 0.0).is_err());
        assert!(Grid::new(10, f64::NAN).is_err());
    }

    #[test]
    fn compatibility_is_parameter_equality() {
        let a = Grid::new(100, 3.0).unwrap();
        assert!(a.ensure_compatible(&Grid::new(100, 3.0).unwrap()).is_ok());
        assert!(a.ensure_compatible(&Grid::new(101, 3.0).unwrap()).is_err());
        assert!(a.ensure_compatible(&Grid::new(100, 3.5).unwrap()).is_err());
    }

    #[test]
    fn default_prior_moments() {
        let grid = Grid::new(1000, 7.0).unwrap();
        let prior = default_prior(grid, 0.7).unwrap();
        assert!(prior.mean().abs() < 1e-12);
        assert!((prior.variance() - 0.49).abs() < 1e-4, "{}", prior.variance());
        let total: f64 = prior.weights().iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
        for k in 0..=1000 {
            assert!((prior.weights()[k] - prior.weights()[1000 - k]).abs() <= 1e-15);
        }
    }

    #[test]
    fn default_prior_three_points() {
        let grid = Grid::new(2, 1.0).unwrap();
        let prior = default_prior(grid, 1.0).unwrap();
        let e = (-0.5f64).exp();
        let z = 1.0 + 2.0 * e;
        let expected = [e / z, 1.0 / z, e / z];
        for (w, x) in prior.weights().iter().zip(expected) {
            assert!((w - x).abs() < 1e-15);
        }
    }

    #[test]
    fn display_rating_examples() {
        let t = DisplayTransform::default();
        let grid = Grid::new(2, 1.0).unwrap();
        let centre = GridDistribution::point_mass(grid, 1).unwrap();
        assert_eq!(t.rating(&centre), (1500.0, 0.0));

        let ln10 = PointDistribution::new(vec![LN_10], vec![1.0]).unwrap();
        assert!((t.rating(&ln10).0 - 1900.0).abs() < 1e-12);

        let prior = default_prior(Grid::new(1000, 7.0).unwrap(), 0.7).unwrap();
        let (rating, dev) = t.rating(&prior);
        assert!((rating - 1500.0).abs() < 1e-9);
        assert!((dev - 400.0 / LN_10 * 0.7).abs() < 0.1, "{dev}");
        assert!((dev - 121.6).abs() < 0.1);
    }

    #[test]
    fn point_distribution_validation() {
        assert!(PointDistribution::new(vec![1.0, 1.0], vec![0.5, 0.5]).is_err());
        assert!(PointDistribution::new(vec![2.0, 1.0], vec![0.5, 0.5]).is_err());
        assert!(PointDistribution::new(vec![], vec![]).is_err());
        assert!(PointDistribution::new(vec![1.0, 2.0], vec![0.0, 0.0]).is_err());
        let d = PointDistribution::from_pairs([(3.0, 1.0), (1.0, 3.0)]).unwrap();
        assert_eq!(d.support(), &[1.0, 3.0]);
        assert_eq!(d.weights(), &[0.75, 0.25]);
        assert_eq!(d.weight_at(3.0), 0.25);
        assert_eq!(d.weight_at(2.0), 0.0);
    }

    #[test]
    fn with_weights_renormalizes_or_reports_impossible() {
        let grid = Grid::new(4, 1.0).unwrap();
        let d = GridDistribution::new(grid, vec![1.0; 5]).unwrap();
        let e = d.with_weights(vec![2.0, 0.0, 0.0, 0.0, 2.0]).unwrap();
        assert_eq!(e.weights(), &[0.5, 0.0, 0.0, 0.0, 0.5]);
        assert!(matches!(d.with_weights(vec![0.0; 5]), Err(Error::ImpossibleOutcome)));
        assert!(matches!(d.with_weights(vec![f64::NAN; 5]), Err(Error::ImpossibleOutcome)));
    }
}
