//! Posterior mean shift `m' - m` after a single win.
//!
//! The prior is `N(m, σ²)` in display units, the opponent sits at a fixed
//! rating and `Λ = (1-β)/2 + β / (1 + 10^((opp - x)/400))`.

use std::f64::consts::LN_10;

use crate::error::{Error, Result};
use crate::luck::logistic;

#[derive(Debug, Clone, PartialEq)]
pub struct CurveSpec {
    pub beta: f64,
    /// Prior standard deviation in display units.
    pub sigma: f64,
    pub opponent: f64,
    pub m_start: f64,
    pub m_end: f64,
    pub m_step: f64,
    /// Initial Simpson node count; raised to the next odd number and at least 4001.
    pub nodes: usize,
}

impl Default for CurveSpec {
    fn default() -> Self {
        Self { beta: 0.8, sigma: 50.0, opponent: 2000.0, m_start: 0.0, m_end: 4000.0, m_step: 10.0, nodes: 4001 }
    }
}

impl CurveSpec {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.beta) {
            return Err(Error::param(format!("beta {} outside [0, 1]", self.beta)));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::param("sigma must be positive"));
        }
        if !(self.m_step > 0.0 && self.m_step.is_finite()) {
            return Err(Error::param("step must be positive"));
        }
        if !(self.m_start.is_finite() && self.m_end.is_finite() && self.m_start <= self.m_end) {
            return Err(Error::param("m range must be finite and increasing"));
        }
        if !self.opponent.is_finite() {
            return Err(Error::param("opponent rating must be finite"));
        }
        Ok(())
    }

    /// The `m` values the curve is evaluated at.
    pub fn m_values(&self) -> Vec<f64> {
        let count = ((self.m_end - self.m_start) / self.m_step + 1e-9).floor() as usize + 1;
        (0..count).map(|i| self.m_start + i as f64 * self.m_step).collect()
    }
}

const REFINE_TOLERANCE: f64 = 1e-6;
const MAX_REFINEMENTS: usize = 12;

// Simpson sums of β·s(x)·φ(x) and β·s(x)·φ(x)·(x - m) over m ± 8σ.
fn simpson(spec: &CurveSpec, m: f64, intervals: usize) -> (f64, f64) {
    let lo = m - 8.0 * spec.sigma;
    let h = 16.0 * spec.sigma / intervals as f64;
    let norm = 1.0 / (spec.sigma * (2.0 * std::f64::consts::PI).sqrt());
    let (mut mass, mut moment) = (0.0, 0.0);
    for i in 0..=intervals {
        let x = lo + i as f64 * h;
        let z = (x - m) / spec.sigma;
        let f = spec.beta * logistic(LN_10 * (x - spec.opponent) / 400.0) * norm * (-0.5 * z * z).exp();
        let w = if i == 0 || i == intervals {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        mass += w * f;
        moment += w * f * (x - m);
    }
    (mass * h / 3.0, moment * h / 3.0)
}

fn shift_at(spec: &CurveSpec, m: f64, intervals: usize) -> f64 {
    let (mass, moment) = simpson(spec, m, intervals);
    let denom = 0.5 * (1.0 - spec.beta) + mass;
    if denom == 0.0 {
        0.0
    } else {
        moment / denom
    }
}

/// `m' - m` at one prior mean, refined by interval doubling until stable.
pub fn mean_shift(spec: &CurveSpec, m: f64) -> Result<f64> {
    spec.validate()?;
    if spec.beta == 0.0 {
        return Ok(0.0);
    }
    let mut intervals = spec.nodes.max(4001) - 1;
    intervals += intervals % 2;
    let mut value = shift_at(spec, m, intervals);
    for _ in 0..MAX_REFINEMENTS {
        intervals *= 2;
        let next = shift_at(spec, m, intervals);
        let done = (next - value).abs() < REFINE_TOLERANCE;
        value = next;
        if done {
            return Ok(value);
        }
    }
    Err(Error::param(format!("quadrature did not converge at m = {m}")))
}

/// `(m, m' - m)` over the spec's range.
pub fn mean_shift_curve(spec: &CurveSpec) -> Result<Vec<(f64, f64)>> {
    spec.validate()?;
    spec.m_values().into_iter().map(|m| Ok((m, mean_shift(spec, m)?))).collect()
}
