//! Engine selection for grid beliefs.

use crate::config::{EngineKind, SystemConfig};
use crate::error::Result;
use crate::fft::FftEngine;
use crate::grid::{Belief, Grid, GridDistribution};
use crate::kernel::KernelSpec;
use crate::laplace;
use crate::luck::{expected_score, LuckFunction};
use crate::naive::{self, MatchScore};

/// Match and kernel processing on a fixed grid with one of the three engines.
#[derive(Debug, Clone)]
pub struct Engine {
    kind: EngineKind,
    grid: Grid,
    luck: LuckFunction,
    kernel: KernelSpec,
    // Laplace falls back to the FFT route for fractional scores.
    fft: Option<FftEngine>,
}

impl Engine {
    pub fn new(kind: EngineKind, grid: Grid, luck: LuckFunction, kernel: KernelSpec) -> Result<Self> {
        let fft = match kind {
            EngineKind::Naive => None,
            EngineKind::Fft | EngineKind::Laplace => Some(FftEngine::new(grid, luck.clone(), &kernel)?),
        };
        if kind == EngineKind::Laplace {
            if !matches!(luck, LuckFunction::LaplaceMix { .. }) {
                return Err(crate::Error::UnsupportedLuck("Laplace engine needs a Laplace-CDF mixture"));
            }
            if !matches!(kernel, KernelSpec::LaplaceMixPdf { .. }) {
                return Err(crate::Error::UnsupportedKernel("Laplace engine needs a Laplace-PDF mixture"));
            }
        }
        Ok(Self { kind, grid, luck, kernel, fft })
    }

    pub fn from_config(cfg: &SystemConfig) -> Result<Self> {
        Self::new(cfg.engine, cfg.grid()?, cfg.luck_function()?, cfg.kernel_spec()?)
    }

    pub fn kind(&self) -> EngineKind {
        self.kind
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn luck(&self) -> &LuckFunction {
        &self.luck
    }

    pub fn kernel(&self) -> &KernelSpec {
        &self.kernel
    }

    fn fft(&self) -> &FftEngine {
        self.fft.as_ref().expect("fft engine present for fft and laplace kinds")
    }

    pub fn posterior(&self, a: &GridDistribution, b: &GridDistribution, score: MatchScore) -> Result<GridDistribution> {
        self.grid.ensure_compatible(a.grid())?;
        self.grid.ensure_compatible(b.grid())?;
        match self.kind {
            EngineKind::Naive => naive::posterior_naive(&self.luck, a, b, score),
            EngineKind::Fft => self.fft().posterior(a, b, score),
            EngineKind::Laplace if score.is_decisive() => laplace::posterior_laplace(&self.luck, a, b, score),
            EngineKind::Laplace => self.fft().posterior(a, b, score),
        }
    }

    pub fn smooth(&self, rho: &GridDistribution) -> Result<GridDistribution> {
        self.grid.ensure_compatible(rho.grid())?;
        match self.kind {
            EngineKind::Naive => naive::kernel_naive(&self.kernel, rho),
            EngineKind::Fft => self.fft().smooth(rho),
            EngineKind::Laplace => {
                let points = self.grid.points();
                rho.with_weights(laplace::smooth_laplace(&self.kernel, rho, &points)?)
            }
        }
    }

    /// `L(a, b)`: probability that `a` beats `b`.
    pub fn expected_score(&self, a: &GridDistribution, b: &GridDistribution) -> Result<f64> {
        self.grid.ensure_compatible(a.grid())?;
        self.grid.ensure_compatible(b.grid())?;
        match self.kind {
            EngineKind::Naive => expected_score(&self.luck, a, b),
            EngineKind::Fft => self.fft().expected_score(a, b),
            EngineKind::Laplace => {
                let l = laplace::likelihood_laplace(&self.luck, a, b, MatchScore::WIN)?;
                Ok(a.weights().iter().zip(&l).map(|(w, l)| w * l).sum())
            }
        }
    }

    /// Both posteriors from the pre-match beliefs, then the kernel step on each.
    pub fn update_pair(
        &self,
        a: &GridDistribution,
        b: &GridDistribution,
        score: MatchScore,
    ) -> Result<(GridDistribution, GridDistribution)> {
        let post_a = self.posterior(a, b, score)?;
        let post_b = self.posterior(b, a, score.flipped())?;
        Ok((self.smooth(&post_a)?, self.smooth(&post_b)?))
    }
}
