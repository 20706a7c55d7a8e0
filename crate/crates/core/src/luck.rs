//! Luck functions and the expected-score functional.
//!
//! A luck function `Λ(x, y)` gives the average score of a player performing
//! at strength `x` against one performing at `y`. Every variant satisfies
//! `Λ(x, y) + Λ(y, x) = 1`. The difference-form variants are
//! `Λ(x, y) = (1 - β)/2 + β F(x - y)` for a sigmoid `F` with asymptotes 0 and 1.

use crate::error::{Error, Result};
use crate::grid::Belief;

pub(crate) fn logistic(d: f64) -> f64 {
    if d >= 0.0 {
        1.0 / (1.0 + (-d).exp())
    } else {
        let e = d.exp();
        e / (1.0 + e)
    }
}

/// CDF of the zero-mean Laplace distribution with scale `b`.
pub fn laplace_cdf(d: f64, b: f64) -> f64 {
    let half_tail = 0.5 * (-d.abs() / b).exp();
    if d >= 0.0 {
        1.0 - half_tail
    } else {
        half_tail
    }
}

/// Density of the zero-mean Laplace distribution with scale `b`.
pub fn laplace_pdf(d: f64, b: f64) -> f64 {
    (-d.abs() / b).exp() / (2.0 * b)
}

/// One component of a Laplace mixture: `weight` and scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaplaceComponent {
    pub weight: f64,
    pub scale: f64,
}

pub(crate) fn validate_mixture(components: &[LaplaceComponent]) -> Result<()> {
    if components.is_empty() {
        return Err(Error::param("Laplace mixture needs at least one component"));
    }
    let mut total = 0.0;
    for c in components {
        if !(c.weight >= 0.0 && c.weight.is_finite()) {
            return Err(Error::param(format!("mixture weight {} is not a valid probability", c.weight)));
        }
        if !(c.scale > 0.0 && c.scale.is_finite()) {
            return Err(Error::param(format!("mixture scale {} must be positive", c.scale)));
        }
        total += c.weight;
    }
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::param(format!("mixture weights sum to {total}, not 1")));
    }
    Ok(())
}

/// Sigmoid sampled at `d = j * step`, `j >= 0`. Negative arguments use
/// `F(-d) = 1 - F(d)`; beyond the table the last sample is held.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSigmoid {
    step: f64,
    values: Vec<f64>,
}

impl SampledSigmoid {
    /// `values[j] = F(j * step)`. `values[0]` must be ½ and the sequence must be
    /// non-decreasing within `[½, 1]`.
    pub fn new(step: f64, values: Vec<f64>) -> Result<Self> {
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::param("sample step must be positive"));
        }
        if values.is_empty() || (values[0] - 0.5).abs() > 1e-12 {
            return Err(Error::param("tabulated sigmoid must start at F(0) = 1/2"));
        }
        if values.iter().any(|v| !(0.5..=1.0).contains(v)) {
            return Err(Error::param("tabulated sigmoid values must lie in [1/2, 1] for d >= 0"));
        }
        if values.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::param("tabulated sigmoid must be non-decreasing"));
        }
        let mut values = values;
        values[0] = 0.5;
        Ok(Self { step, values })
    }

    /// Samples `f` on `0, step, .., (len - 1) * step`.
    pub fn from_fn(step: f64, len: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = (0..len).map(|j| if j == 0 { 0.5 } else { f(j as f64 * step) }).collect();
        Self::new(step, values)
    }

    fn eval_nonneg(&self, d: f64) -> f64 {
        let pos = d / self.step;
        let last = self.values.len() - 1;
        if pos >= last as f64 {
            return self.values[last];
        }
        let j = pos.floor() as usize;
        let t = pos - j as f64;
        if t == 0.0 {
            self.values[j]
        } else {
            self.values[j] + t * (self.values[j + 1] - self.values[j])
        }
    }

    pub fn eval(&self, d: f64) -> f64 {
        if d >= 0.0 {
            self.eval_nonneg(d)
        } else {
            1.0 - self.eval_nonneg(-d)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LuckFunction {
    /// `(1 - β)/2 + β / (1 + exp(y - x))`.
    SigmoidMix { beta: f64 },
    /// `(1 - β)/2 + β Σ p_j F_Laplace(x - y | a_j)`.
    LaplaceMix { beta: f64, components: Vec<LaplaceComponent> },
    /// `(1 - β)/2 + β F(x - y)` for a sampled sigmoid `F`.
    Tabulated { beta: f64, sigmoid: SampledSigmoid },
    /// Bradley–Terry in ratio form, `x / (x + y)` on positive strengths.
    RatioBT,
}

fn check_beta(beta: f64) -> Result<()> {
    if (0.0..=1.0).contains(&beta) {
        Ok(())
    } else {
        Err(Error::param(format!("beta must lie in [0, 1], got {beta}")))
    }
}

impl LuckFunction {
    pub fn logistic(beta: f64) -> Result<Self> {
        check_beta(beta)?;
        Ok(Self::SigmoidMix { beta })
    }

    pub fn laplace_mix(beta: f64, components: Vec<LaplaceComponent>) -> Result<Self> {
        check_beta(beta)?;
        validate_mixture(&components)?;
        Ok(Self::LaplaceMix { beta, components })
    }

    pub fn tabulated(beta: f64, sigmoid: SampledSigmoid) -> Result<Self> {
        check_beta(beta)?;
        Ok(Self::Tabulated { beta, sigmoid })
    }

    /// `β`, or `None` for the ratio form.
    pub fn beta(&self) -> Option<f64> {
        match self {
            Self::SigmoidMix { beta } | Self::LaplaceMix { beta, .. } | Self::Tabulated { beta, .. } => Some(*beta),
            Self::RatioBT => None,
        }
    }

    pub fn is_difference_form(&self) -> bool {
        !matches!(self, Self::RatioBT)
    }

    /// The sigmoid `F(d)` of a difference-form luck function.
    pub fn sigmoid(&self, d: f64) -> Option<f64> {
        match self {
            Self::SigmoidMix { .. } => Some(logistic(d)),
            Self::LaplaceMix { components, .. } => {
                Some(components.iter().map(|c| c.weight * laplace_cdf(d, c.scale)).sum())
            }
            Self::Tabulated { sigmoid, .. } => Some(sigmoid.eval(d)),
            Self::RatioBT => None,
        }
    }

    /// `Λ` as a function of the difference `d = x - y`. Panics on the ratio form.
    pub(crate) fn eval_diff(&self, d: f64) -> f64 {
        let beta = self.beta().expect("difference form");
        let f = self.sigmoid(d).expect("difference form");
        0.5 * (1.0 - beta) + beta * f
    }

    pub fn eval(&self, x: f64, y: f64) -> Result<f64> {
        match self {
            Self::RatioBT => {
                if !(x > 0.0 && y > 0.0) {
                    return Err(Error::param(format!("ratio luck function needs positive strengths, got ({x}, {y})")));
                }
                Ok(x / (x + y))
            }
            _ => Ok(self.eval_diff(x - y)),
        }
    }
}

/// `Λ(x, y)`.
pub fn luck_eval(luck: &LuckFunction, x: f64, y: f64) -> Result<f64> {
    luck.eval(x, y)
}

/// `L(μ_A, μ_B) = Σ_i Σ_j w_A(i) w_B(j) Λ(x_i, y_j)`.
///
/// Sums the centred values `Λ - ½`, which cancel pairwise for self-play.
pub fn expected_score<A: Belief, B: Belief>(luck: &LuckFunction, a: &A, b: &B) -> Result<f64> {
    let mut total = 0.0;
    for (i, &wa) in a.weights().iter().enumerate() {
        if wa == 0.0 {
            continue;
        }
        let x = a.point(i);
        let mut row = 0.0;
        for (j, &wb) in b.weights().iter().enumerate() {
            if wb == 0.0 {
                continue;
            }
            row += wb * (luck.eval(x, b.point(j))? - 0.5);
        }
        total += wa * row;
    }
    Ok(0.5 + total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{default_prior, Grid, GridDistribution, PointDistribution};
    use proptest::prelude::*;

    fn all_variants() -> Vec<LuckFunction> {
        vec![
            LuckFunction::logistic(0.8).unwrap(),
            LuckFunction::logistic(1.0).unwrap(),
            LuckFunction::laplace_mix(
                0.9,
                vec![LaplaceComponent { weight: 0.3, scale: 0.5 }, LaplaceComponent { weight: 0.7, scale: 2.0 }],
            )
            .unwrap(),
            LuckFunction::tabulated(
                0.7,
                SampledSigmoid::from_fn(0.05, 200, |d| statrs::function::erf::erfc(-d / 2f64.sqrt()) / 2.0).unwrap(),
            )
            .unwrap(),
        ]
    }

    #[test]
    fn examples() {
        let l = LuckFunction::logistic(0.8).unwrap();
        assert_eq!(luck_eval(&l, 1.3, 1.3).unwrap(), 0.5);
        assert!((luck_eval(&l, 800.0, 0.0).unwrap() - 0.9).abs() < 1e-15);
        let one = LuckFunction::logistic(1.0).unwrap();
        assert!((luck_eval(&one, 3f64.ln(), 0.0).unwrap() - 0.75).abs() < 1e-15);
        assert_eq!(luck_eval(&LuckFunction::RatioBT, 2.0, 3.0).unwrap(), 0.4);
    }

    #[test]
    fn ratio_rejects_non_positive() {
        assert!(luck_eval(&LuckFunction::RatioBT, 0.0, 3.0).is_err());
        assert!(luck_eval(&LuckFunction::RatioBT, 2.0, -1.0).is_err());
    }

    #[test]
    fn beta_out_of_range() {
        assert!(LuckFunction::logistic(1.01).is_err());
        assert!(LuckFunction::logistic(-0.1).is_err());
        assert!(LuckFunction::laplace_mix(0.5, vec![LaplaceComponent { weight: 0.5, scale: 1.0 }]).is_err());
        assert!(LuckFunction::laplace_mix(0.5, vec![LaplaceComponent { weight: 1.0, scale: 0.0 }]).is_err());
    }

    #[test]
    fn sampled_sigmoid_validation() {
        assert!(SampledSigmoid::new(0.1, vec![0.4, 0.6]).is_err());
        assert!(SampledSigmoid::new(0.1, vec![0.5, 0.8, 0.7]).is_err());
        assert!(SampledSigmoid::new(0.0, vec![0.5]).is_err());
        let s = SampledSigmoid::new(1.0, vec![0.5, 0.7, 0.9]).unwrap();
        assert_eq!(s.eval(0.5), 0.6);
        assert!((s.eval(-1.5) - 0.2).abs() < 1e-15);
        assert_eq!(s.eval(10.0), 0.9);
    }

    #[test]
    fn expected_score_three_point_pair() {
        let a = PointDistribution::new(vec![2.0, 5.0, 13.0], vec![9.0, 3.0, 8.0]).unwrap();
        let b = PointDistribution::new(vec![3.0, 7.0, 11.0], vec![2.0, 4.0, 5.0]).unwrap();
        // direct 3x3 double sum, in exact rationals: 284005 / 686400
        let p = expected_score(&LuckFunction::RatioBT, &a, &b).unwrap();
        assert!((p - 284005.0 / 686400.0).abs() < 1e-12, "{p}");
    }

    #[test]
    fn expected_score_dirac_and_coin_flip() {
        let l = LuckFunction::logistic(0.8).unwrap();
        let a = PointDistribution::new(vec![0.3], vec![1.0]).unwrap();
        let b = PointDistribution::new(vec![-1.1], vec![1.0]).unwrap();
        assert_eq!(expected_score(&l, &a, &b).unwrap(), l.eval(0.3, -1.1).unwrap());

        let coin = LuckFunction::logistic(0.0).unwrap();
        let prior = default_prior(Grid::new(100, 3.0).unwrap(), 0.7).unwrap();
        assert!((expected_score(&coin, &prior, &b).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn bounds_and_monotonicity_on_grid() {
        let grid = Grid::new(200, 7.0).unwrap();
        for luck in all_variants() {
            let beta = luck.beta().unwrap();
            let lo = 0.5 * (1.0 - beta);
            let hi = 0.5 * (1.0 + beta);
            for j in (0..=200).step_by(7) {
                let y = grid.point(j);
                let mut prev = f64::NEG_INFINITY;
                for k in 0..=200 {
                    let v = luck.eval(grid.point(k), y).unwrap();
                    assert!(v >= lo - 1e-15 && v <= hi + 1e-15);
                    assert!(v >= prev - 1e-15, "{luck:?} not monotone");
                    prev = v;
                }
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn skew_symmetry(x in -10.0f64..10.0, y in -10.0f64..10.0) {
            for luck in all_variants() {
                let s = luck.eval(x, y).unwrap() + luck.eval(y, x).unwrap();
                prop_assert!((s - 1.0).abs() <= 1e-12);
            }
            let (px, py) = (x.abs() + 0.01, y.abs() + 0.01);
            let r = LuckFunction::RatioBT;
            prop_assert!((r.eval(px, py).unwrap() + r.eval(py, px).unwrap() - 1.0).abs() <= 1e-12);
        }

        #[test]
        fn self_play_and_bilinearity(
            w1 in prop::collection::vec(0.0f64..1.0, 41),
            w2 in prop::collection::vec(0.0f64..1.0, 41),
            wb in prop::collection::vec(0.0f64..1.0, 41),
            alpha in 0.0f64..1.0,
        ) {
            let grid = Grid::new(40, 4.0).unwrap();
            let eps = 1e-9;
            let m1 = GridDistribution::new(grid, w1.iter().map(|w| w + eps).collect()).unwrap();
            let m2 = GridDistribution::new(grid, w2.iter().map(|w| w + eps).collect()).unwrap();
            let mb = GridDistribution::new(grid, wb.iter().map(|w| w + eps).collect()).unwrap();
            let mix: Vec<f64> = m1.weights().iter().zip(m2.weights())
                .map(|(a, b)| alpha * a + (1.0 - alpha) * b).collect();
            let mix = GridDistribution::new(grid, mix).unwrap();
            for luck in all_variants() {
                let lhs = expected_score(&luck, &mix, &mb).unwrap();
                let rhs = alpha * expected_score(&luck, &m1, &mb).unwrap()
                    + (1.0 - alpha) * expected_score(&luck, &m2, &mb).unwrap();
                prop_assert!((lhs - rhs).abs() <= 1e-12);
                prop_assert!((expected_score(&luck, &m1, &m1).unwrap() - 0.5).abs() <= 1e-12);
            }
        }
    }
}
