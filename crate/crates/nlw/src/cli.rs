//! Flag parsing; every flag overrides the matching config-file key.

use std::path::PathBuf;

use clap::Parser;

use crate::config::{ConfigError, Experiment, InitialData, PartialConfig, RadialGrid, RunConfig};

#[derive(Debug, Parser)]
#[command(
    name = "penrose-nlw",
    version,
    allow_negative_numbers = true,
    about = "Random-data experiments for the compactified defocusing wave equation"
)]
pub struct Cli {
    /// JSON config file; flags override its keys.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub experiment: Option<Experiment>,
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Number of modes N.
    #[arg(long = "modes", short = 'N')]
    pub modes: Option<usize>,
    /// Collocation grid size M (at least 4N).
    #[arg(long = "grid", short = 'M')]
    pub grid: Option<usize>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long = "out")]
    pub output_dir: Option<PathBuf>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub q: Option<f64>,
    #[arg(long)]
    pub s: Option<f64>,
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Rayon threads; 0 uses one per core.
    #[arg(long)]
    pub workers: Option<usize>,
    /// Smallest radius of the PT grid; the four radial flags go together.
    #[arg(long, requires_all = ["r_max", "r_points", "r_spacing"])]
    pub r_min: Option<f64>,
    #[arg(long, requires = "r_min")]
    pub r_max: Option<f64>,
    #[arg(long, requires = "r_min")]
    pub r_points: Option<usize>,
    #[arg(long, value_parser = ["log", "linear"], requires = "r_min")]
    pub r_spacing: Option<String>,
    /// Evolution window `lo,hi` in cylinder time.
    #[arg(long, value_parser = parse_span, allow_hyphen_values = true)]
    pub span: Option<(f64, f64)>,
    #[arg(long, value_enum)]
    pub data: Option<InitialData>,
    #[arg(long)]
    pub amplitude: Option<f64>,
    /// Per-draw experiment of `ensemble`.
    #[arg(long, value_enum)]
    pub inner: Option<Experiment>,
    /// Comma-separated acceptance criteria for `verify`.
    #[arg(long, value_delimiter = ',')]
    pub criteria: Option<Vec<u8>>,
}

fn parse_span(text: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = text.split_once(',').ok_or("expected `lo,hi`")?;
    let num = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("{x:?}: {e}"));
    Ok((num(lo)?, num(hi)?))
}

impl Cli {
    fn overrides(&self) -> PartialConfig {
        let radial_grid = self.r_min.map(|r_min| RadialGrid {
            r_min,
            r_max: self.r_max.unwrap_or_default(),
            points: self.r_points.unwrap_or_default(),
            log_spaced: self.r_spacing.as_deref() != Some("linear"),
        });
        PartialConfig {
            experiment: self.experiment,
            alpha: self.alpha,
            modes: self.modes,
            grid: self.grid,
            dt: self.dt,
            seed: self.seed,
            samples: self.samples,
            p: self.p,
            q: self.q,
            s: self.s,
            sigma: self.sigma,
            output_dir: self.output_dir.clone(),
            radial_grid,
            span: self.span,
            data: self.data,
            amplitude: self.amplitude,
            inner: self.inner,
            criteria: self.criteria.clone(),
            workers: self.workers,
        }
    }

    /// File values, then flags, then defaults; validated.
    pub fn resolve(&self) -> Result<RunConfig, ConfigError> {
        let base = match &self.config {
            Some(path) => PartialConfig::from_file(path)?,
            None => PartialConfig::default(),
        };
        base.overlay(self.overrides()).resolve()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_map_to_config_keys() {
        let cli = Cli::try_parse_from([
            "penrose-nlw",
            "--experiment",
            "evolve",
            "-N",
            "8",
            "--span",
            "-1,0.5",
            "--data",
            "zero",
            "--criteria",
            "1,3",
        ])
        .unwrap();
        let cfg = cli.resolve().unwrap();
        assert_eq!(cfg.modes, 8);
        assert_eq!(cfg.grid, 32);
        assert_eq!(cfg.span, (-1.0, 0.5));
        assert_eq!(cfg.data, InitialData::Zero);
        assert_eq!(cfg.criteria, vec![1, 3]);
    }

    #[test]
    fn radial_flags_must_come_together() {
        assert!(Cli::try_parse_from(["penrose-nlw", "--r-min", "0.1"]).is_err());
    }
}
