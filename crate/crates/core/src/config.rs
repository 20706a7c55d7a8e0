//! System parameters and the flat `key=value` config file.

use std::f64::consts::LN_10;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::grid::{DisplayTransform, Grid};
use crate::kernel::KernelSpec;
use crate::luck::{LaplaceComponent, LuckFunction};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EngineKind {
    Naive,
    Fft,
    Laplace,
}

impl FromStr for EngineKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "naive" => Ok(Self::Naive),
            "fft" => Ok(Self::Fft),
            "laplace" => Ok(Self::Laplace),
            other => Err(Error::param(format!("unknown engine {other:?} (expected naive, fft or laplace)"))),
        }
    }
}

impl fmt::Display for EngineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Naive => "naive",
            Self::Fft => "fft",
            Self::Laplace => "laplace",
        })
    }
}

/// Which sigmoid the luck function uses.
#[derive(Debug, Clone, PartialEq)]
pub enum LuckFamily {
    Logistic,
    Laplace(Vec<LaplaceComponent>),
}

/// Which drift kernel is applied after each match.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelFamily {
    Gaussian,
    /// Single Laplace density with the same variance as the Gaussian, `b = σ_κ / √2`.
    Laplace,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    pub beta: f64,
    pub n: usize,
    pub half_width: f64,
    pub sigma0: f64,
    pub sigma_kappa: f64,
    pub engine: EngineKind,
    pub display: DisplayTransform,
    /// Display-unit deviation cap for log-loss reporting.
    pub var_cap: f64,
    pub luck: LuckFamily,
    pub kernel: KernelFamily,
}

impl Default for SystemConfig {
    fn default() -> Self {
        Self {
            beta: 0.8,
            n: 1000,
            half_width: 7.0,
            sigma0: 0.7,
            sigma_kappa: 0.03,
            engine: EngineKind::Fft,
            display: DisplayTransform { scale: 400.0 / LN_10, offset: 1500.0 },
            var_cap: 70.0,
            luck: LuckFamily::Logistic,
            kernel: KernelFamily::Gaussian,
        }
    }
}

fn parse_num<T: FromStr>(key: &str, value: &str, line: usize) -> Result<T> {
    value.parse().map_err(|_| Error::Parse { line, message: format!("invalid value {value:?} for {key}") })
}

fn parse_list(key: &str, value: &str, line: usize) -> Result<Vec<f64>> {
    value.split(',').map(|v| parse_num(key, v.trim(), line)).collect()
}

impl SystemConfig {
    /// Parses `key=value` lines. Blank lines and `#` comments are skipped;
    /// unspecified keys keep their defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        let mut scales: Option<Vec<f64>> = None;
        let mut weights: Option<Vec<f64>> = None;
        let mut luck_name = String::from("logistic");
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let (key, value) = trimmed
                .split_once('=')
                .ok_or_else(|| Error::Parse { line, message: format!("expected key=value, got {trimmed:?}") })?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "beta" => cfg.beta = parse_num(key, value, line)?,
                "n" => cfg.n = parse_num(key, value, line)?,
                "half_width" => cfg.half_width = parse_num(key, value, line)?,
                "sigma0" => cfg.sigma0 = parse_num(key, value, line)?,
                "sigma_kappa" => cfg.sigma_kappa = parse_num(key, value, line)?,
                "engine" => {
                    cfg.engine = value.parse().map_err(|e: Error| Error::Parse { line, message: e.to_string() })?
                }
                "display_scale" => cfg.display.scale = parse_num(key, value, line)?,
                "display_offset" => cfg.display.offset = parse_num(key, value, line)?,
                "var_cap" => cfg.var_cap = parse_num(key, value, line)?,
                "luck" => luck_name = value.to_string(),
                "luck_scales" => scales = Some(parse_list(key, value, line)?),
                "luck_weights" => weights = Some(parse_list(key, value, line)?),
                "kernel" => {
                    cfg.kernel = match value {
                        "gaussian" => KernelFamily::Gaussian,
                        "laplace" => KernelFamily::Laplace,
                        other => return Err(Error::Parse { line, message: format!("unknown kernel {other:?}") }),
                    }
                }
                other => return Err(Error::Parse { line, message: format!("unknown key {other:?}") }),
            }
        }
        cfg.luck = match luck_name.as_str() {
            "logistic" => LuckFamily::Logistic,
            "laplace" => {
                let scales = scales.unwrap_or_else(|| vec![1.0]);
                let weights = weights.unwrap_or_else(|| vec![1.0 / scales.len() as f64; scales.len()]);
                if scales.len() != weights.len() {
                    return Err(Error::param("luck_scales and luck_weights differ in length"));
                }
                LuckFamily::Laplace(
                    scales.into_iter().zip(weights).map(|(scale, weight)| LaplaceComponent { weight, scale }).collect(),
                )
            }
            other => return Err(Error::param(format!("unknown luck family {other:?}"))),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        self.grid()?;
        self.luck_function()?;
        self.kernel_spec()?;
        DisplayTransform::new(self.display.scale, self.display.offset)?;
        if !(self.sigma0 > 0.0 && self.sigma0.is_finite()) {
            return Err(Error::param("sigma0 must be positive"));
        }
        if self.var_cap.is_nan() || self.var_cap <= 0.0 {
            return Err(Error::param("var_cap must be positive"));
        }
        if self.engine == EngineKind::Laplace
            && (!matches!(self.luck, LuckFamily::Laplace(_)) || self.kernel != KernelFamily::Laplace)
        {
            return Err(Error::param("the laplace engine needs luck=laplace and kernel=laplace"));
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.n, self.half_width)
    }

    pub fn luck_function(&self) -> Result<LuckFunction> {
        match &self.luck {
            LuckFamily::Logistic => LuckFunction::logistic(self.beta),
            LuckFamily::Laplace(components) => LuckFunction::laplace_mix(self.beta, components.clone()),
        }
    }

    pub fn kernel_spec(&self) -> Result<KernelSpec> {
        match self.kernel {
            KernelFamily::Gaussian => KernelSpec::gaussian(self.sigma_kappa),
            KernelFamily::Laplace => {
                KernelSpec::laplace_mix(vec![LaplaceComponent { weight: 1.0, scale: self.sigma_kappa / 2f64.sqrt() }])
            }
        }
    }
}
