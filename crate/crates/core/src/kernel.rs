//! Drift kernels `K(x, y)` for the between-match smoothing step.

use crate::error::{Error, Result};
use crate::luck::{laplace_pdf, validate_mixture, LaplaceComponent};

/// Non-negative difference function sampled at `d = (i - h) * step`,
/// `i = 0..2h`. Linear interpolation inside the table, zero outside.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledDifference {
    step: f64,
    values: Vec<f64>,
}

impl SampledDifference {
    /// `values` has odd length `2h + 1` with the centre at `d = 0`.
    pub fn new(step: f64, values: Vec<f64>) -> Result<Self> {
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::param("sample step must be positive"));
        }
        if values.len().is_multiple_of(2) {
            return Err(Error::param("difference table must have odd length"));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::param("kernel values must be finite and non-negative"));
        }
        if values.iter().all(|v| *v == 0.0) {
            return Err(Error::param("kernel must not be identically zero"));
        }
        Ok(Self { step, values })
    }

    pub fn eval(&self, d: f64) -> f64 {
        let h = (self.values.len() / 2) as f64;
        let pos = d / self.step + h;
        let last = (self.values.len() - 1) as f64;
        if !(pos >= 0.0 && pos <= last) {
            return 0.0;
        }
        let i = pos.floor() as usize;
        let t = pos - i as f64;
        if t == 0.0 {
            self.values[i]
        } else {
            self.values[i] + t * (self.values[i + 1] - self.values[i])
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum KernelSpec {
    /// Unnormalized normal density `exp(-(x - y)^2 / 2σ^2)`.
    GaussianDiff {
        sigma: f64,
    },
    /// `Σ q_j f_Laplace(x - y | b_j)`.
    LaplaceMixPdf {
        components: Vec<LaplaceComponent>,
    },
    TabulatedDiff(SampledDifference),
    Identity,
}

impl KernelSpec {
    pub fn gaussian(sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::param(format!("kernel deviation must be positive, got {sigma}")));
        }
        Ok(Self::GaussianDiff { sigma })
    }

    pub fn laplace_mix(components: Vec<LaplaceComponent>) -> Result<Self> {
        validate_mixture(&components)?;
        Ok(Self::LaplaceMixPdf { components })
    }

    pub fn tabulated(step: f64, values: Vec<f64>) -> Result<Self> {
        Ok(Self::TabulatedDiff(SampledDifference::new(step, values)?))
    }

    /// `G(d)` with `K(x, y) = G(x - y)`. The identity kernel is the indicator of `d == 0`.
    pub fn eval_diff(&self, d: f64) -> f64 {
        match self {
            Self::GaussianDiff { sigma } => {
                let z = d / sigma;
                (-0.5 * z * z).exp()
            }
            Self::LaplaceMixPdf { components } => components.iter().map(|c| c.weight * laplace_pdf(d, c.scale)).sum(),
            Self::TabulatedDiff(table) => table.eval(d),
            Self::Identity => {
                if d == 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.eval_diff(x - y)
    }
}
