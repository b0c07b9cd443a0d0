//! Run configuration: JSON file values, overridden by flags, resolved to a
//! fully explicit [`RunConfig`] and validated before anything runs.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use penrose_nlw_core::dynamics::DEFAULT_DT;
use penrose_nlw_core::measures::{tail_admissible, MIN_MASS_SAMPLES};
use penrose_nlw_core::spectral::DEFAULT_SIGMA;
use serde::{Deserialize, Serialize};

use crate::verify::CRITERIA;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Experiment {
    /// Draw from μ_N and report norms.
    Sample,
    /// One trajectory with its energy ledger.
    Evolve,
    /// Scattering data and decay fits.
    Scatter,
    /// ρ mass, tail and moment estimates.
    Measure,
    /// The acceptance suite.
    Verify,
    /// Per-draw Monte Carlo over `inner`.
    Ensemble,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Self::Sample => "sample",
            Self::Evolve => "evolve",
            Self::Scatter => "scatter",
            Self::Measure => "measure",
            Self::Verify => "verify",
            Self::Ensemble => "ensemble",
        }
    }
}

/// Initial datum of `evolve`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum InitialData {
    /// Draw `0` of μ_N, scaled by `amplitude`.
    Mu,
    Zero,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadialGrid {
    pub r_min: f64,
    pub r_max: f64,
    pub points: usize,
    pub log_spaced: bool,
}

impl RadialGrid {
    pub fn nodes(&self) -> Vec<f64> {
        if self.log_spaced {
            penrose_nlw_core::stats::geometric_grid(self.r_min, self.r_max, self.points)
        } else {
            let h = (self.r_max - self.r_min) / (self.points - 1) as f64;
            (0..self.points)
                .map(|k| self.r_min + k as f64 * h)
                .collect()
        }
    }
}

impl Default for RadialGrid {
    fn default() -> Self {
        Self {
            r_min: 1e-3,
            r_max: 1e4,
            points: 4096,
            log_spaced: true,
        }
    }
}

/// Every key that can appear in a config file; absent keys take defaults.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartialConfig {
    pub experiment: Option<Experiment>,
    pub alpha: Option<f64>,
    #[serde(rename = "N")]
    pub modes: Option<usize>,
    #[serde(rename = "M")]
    pub grid: Option<usize>,
    pub dt: Option<f64>,
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub s: Option<f64>,
    pub sigma: Option<f64>,
    pub output_dir: Option<PathBuf>,
    pub radial_grid: Option<RadialGrid>,
    pub span: Option<(f64, f64)>,
    pub data: Option<InitialData>,
    pub amplitude: Option<f64>,
    pub inner: Option<Experiment>,
    pub criteria: Option<Vec<u8>>,
    pub workers: Option<usize>,
}

impl PartialConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        serde_json::from_str(text).map_err(|e| ConfigError::new("config", e.to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            ConfigError::new("config", format!("cannot read {}: {e}", path.display()))
        })?;
        Self::from_json(&text)
    }

    /// Values set in `other` win.
    pub fn overlay(self, other: PartialConfig) -> Self {
        macro_rules! pick {
            ($($f:ident),*) => { Self { $($f: other.$f.or(self.$f)),* } };
        }
        pick!(
            experiment,
            alpha,
            modes,
            grid,
            dt,
            seed,
            samples,
            p,
            q,
            s,
            sigma,
            output_dir,
            radial_grid,
            span,
            data,
            amplitude,
            inner,
            criteria,
            workers
        )
    }

    pub fn resolve(self) -> Result<RunConfig, ConfigError> {
        let experiment = self.experiment.ok_or_else(|| {
            ConfigError::new(
                "experiment",
                "missing; expected one of sample, evolve, scatter, measure, verify, ensemble",
            )
        })?;
        let modes = self.modes.unwrap_or(64);
        let p = self.p.unwrap_or(5.6);
        let cfg = RunConfig {
            experiment,
            alpha: self.alpha.unwrap_or(2.0),
            modes,
            grid: self.grid.unwrap_or(4 * modes),
            dt: self.dt.unwrap_or(DEFAULT_DT),
            seed: self.seed.unwrap_or(0),
            samples: self.samples.unwrap_or(20),
            p,
            q: self.q.unwrap_or(0.75 * p),
            s: self.s.unwrap_or(0.0),
            sigma: self.sigma.unwrap_or(DEFAULT_SIGMA),
            output_dir: self.output_dir.unwrap_or_else(|| PathBuf::from("out")),
            radial_grid: self.radial_grid.unwrap_or_default(),
            span: self.span.unwrap_or((-PI, PI)),
            data: self.data.unwrap_or(InitialData::Mu),
            amplitude: self.amplitude.unwrap_or(1.0),
            inner: self.inner.unwrap_or(Experiment::Evolve),
            criteria: self.criteria.unwrap_or_else(|| CRITERIA.to_vec()),
            workers: self.workers.unwrap_or(0),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Fully resolved configuration; echoed verbatim into every report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub experiment: Experiment,
    pub alpha: f64,
    #[serde(rename = "N")]
    pub modes: usize,
    #[serde(rename = "M")]
    pub grid: usize,
    pub dt: f64,
    pub seed: u64,
    pub samples: usize,
    pub p: f64,
    pub q: f64,
    pub s: f64,
    pub sigma: f64,
    pub output_dir: PathBuf,
    pub radial_grid: RadialGrid,
    /// Cylinder-time window of `evolve`, containing `0`.
    pub span: (f64, f64),
    pub data: InitialData,
    pub amplitude: f64,
    /// Per-draw experiment of `ensemble`.
    pub inner: Experiment,
    /// Acceptance criteria run by `verify`.
    pub criteria: Vec<u8>,
    /// Rayon threads; `0` means one per core. Does not affect results.
    pub workers: usize,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("invalid `{key}`: {message}")]
pub struct ConfigError {
    pub key: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(key: &str, message: impl Into<String>) -> Self {
        Self {
            key: key.to_string(),
            message: message.into(),
        }
    }
}

fn ensure(ok: bool, key: &str, message: impl FnOnce() -> String) -> Result<(), ConfigError> {
    if ok {
        Ok(())
    } else {
        Err(ConfigError::new(key, message()))
    }
}

fn finite(x: f64) -> bool {
    x.is_finite()
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        ensure(
            finite(self.alpha) && (2.0..3.0).contains(&self.alpha),
            "alpha",
            || format!("alpha must lie in [2,3) (got {})", self.alpha),
        )?;
        ensure(self.modes >= 1, "N", || "N must be at least 1".into())?;
        ensure(self.grid >= 4 * self.modes, "M", || {
            format!(
                "M must be at least 4N = {} (got {})",
                4 * self.modes,
                self.grid
            )
        })?;
        ensure(
            finite(self.dt) && self.dt > 0.0 && self.dt <= PI,
            "dt",
            || format!("dt must lie in (0, π] (got {})", self.dt),
        )?;
        ensure(self.samples >= 1, "samples", || {
            "samples must be at least 1".into()
        })?;
        ensure(finite(self.p) && self.p > 1.0, "p", || {
            format!("p must exceed 1 (got {})", self.p)
        })?;
        ensure(finite(self.q) && self.q > 1.0, "q", || {
            format!("q must exceed 1 (got {})", self.q)
        })?;
        ensure(finite(self.s), "s", || "s must be finite".into())?;
        ensure(
            finite(self.sigma) && (0.0..0.5).contains(&self.sigma),
            "sigma",
            || format!("sigma must lie in [0, 1/2) (got {})", self.sigma),
        )?;
        let rg = &self.radial_grid;
        ensure(
            finite(rg.r_min)
                && finite(rg.r_max)
                && rg.r_min >= 0.0
                && rg.r_max > rg.r_min
                && rg.points >= 2,
            "radial_grid",
            || "need 0 ≤ r_min < r_max and at least 2 points".into(),
        )?;
        ensure(!rg.log_spaced || rg.r_min > 0.0, "radial_grid", || {
            "a log-spaced grid needs r_min > 0".into()
        })?;
        let (lo, hi) = self.span;
        ensure(
            (-PI..=0.0).contains(&lo) && (0.0..=PI).contains(&hi) && lo < hi,
            "span",
            || format!("span must satisfy -π ≤ lo ≤ 0 ≤ hi ≤ π, lo < hi (got [{lo}, {hi}])"),
        )?;
        ensure(finite(self.amplitude), "amplitude", || {
            "amplitude must be finite".into()
        })?;
        for &c in &self.criteria {
            ensure(CRITERIA.contains(&c), "criteria", || {
                format!("unknown criterion {c}; expected 1..=17")
            })?;
        }
        match self.experiment {
            Experiment::Scatter => self.validate_scatter()?,
            Experiment::Measure => self.validate_measure()?,
            Experiment::Ensemble => {
                ensure(
                    matches!(
                        self.inner,
                        Experiment::Sample | Experiment::Evolve | Experiment::Scatter
                    ),
                    "inner",
                    || {
                        format!(
                            "ensemble runs sample, evolve or scatter per draw (got {})",
                            self.inner.name()
                        )
                    },
                )?;
                if self.inner == Experiment::Scatter {
                    self.validate_scatter()?;
                }
                if self.inner == Experiment::Evolve {
                    ensure(self.p > 2.0 * self.alpha && self.p < 6.0, "p", || {
                        format!(
                            "the flow bound needs 2α < p < 6 (got p = {}, α = {})",
                            self.p, self.alpha
                        )
                    })?;
                }
            }
            _ => {}
        }
        Ok(())
    }

    fn validate_scatter(&self) -> Result<(), ConfigError> {
        let lower = (2.0 * self.alpha).max(16.0 / 3.0);
        ensure(self.p > lower && self.p < 6.0, "p", || {
            format!(
                "scattering needs max(2α, 16/3) < p < 6 (got p = {}, α = {})",
                self.p, self.alpha
            )
        })?;
        ensure(
            (self.q - 0.75 * self.p).abs() <= 1e-12 * self.p,
            "q",
            || {
                format!(
                    "scattering needs q = 3p/4 = {} (got {})",
                    0.75 * self.p,
                    self.q
                )
            },
        )
    }

    fn validate_measure(&self) -> Result<(), ConfigError> {
        ensure(self.grid == 4 * self.modes, "M", || {
            format!(
                "measure estimators use the grid M = 4N = {} (got {})",
                4 * self.modes,
                self.grid
            )
        })?;
        ensure(self.samples >= MIN_MASS_SAMPLES, "samples", || {
            format!(
                "measure needs at least {MIN_MASS_SAMPLES} samples (got {})",
                self.samples
            )
        })?;
        ensure(tail_admissible(self.s, self.p), "s", || {
            format!("(s, p) = ({}, {}) is not tail-admissible: need s < 1/2 for p ≤ 3, s < 3/p - 1/2 for p > 3", self.s, self.p)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn documented_example_is_valid() {
        let cfg =
            PartialConfig::from_json(r#"{"experiment":"evolve","alpha":2.0,"N":64,"dt":0.000767}"#)
                .unwrap()
                .resolve()
                .unwrap();
        assert_eq!(cfg.modes, 64);
        assert_eq!(cfg.grid, 256);
        assert_eq!(cfg.seed, 0);
        assert_eq!(cfg.dt, 0.000767);
    }

    #[test]
    fn alpha_outside_range_names_the_key() {
        let err = PartialConfig::from_json(r#"{"experiment":"evolve","alpha":3.5}"#)
            .unwrap()
            .resolve()
            .unwrap_err();
        assert_eq!(err.key, "alpha");
        assert!(err.message.contains("alpha must lie in [2,3)"));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = PartialConfig::from_json(r#"{"experiment":"evolve","alhpa":2.0}"#).unwrap_err();
        assert!(err.message.contains("alhpa"), "{}", err.message);
    }

    #[test]
    fn flags_override_file() {
        let file = PartialConfig::from_json(r#"{"experiment":"sample","seed":7,"N":8}"#).unwrap();
        let flags = PartialConfig {
            seed: Some(9),
            ..Default::default()
        };
        let cfg = file.overlay(flags).resolve().unwrap();
        assert_eq!((cfg.seed, cfg.modes), (9, 8));
    }

    #[test]
    fn scatter_requires_q_three_quarters_p() {
        let bad = PartialConfig::from_json(r#"{"experiment":"scatter","p":5.6,"q":4.0}"#)
            .unwrap()
            .resolve();
        assert_eq!(bad.unwrap_err().key, "q");
        let good = PartialConfig::from_json(r#"{"experiment":"scatter","p":5.6}"#)
            .unwrap()
            .resolve()
            .unwrap();
        assert!((good.q - 4.2).abs() < 1e-12);
    }
}
