//! Size of sampled trajectories along the truncated flow, measured by
//! `Q(u) = ‖S(·)u‖_{L^p([-π,π]×S³)} + ‖u‖_{H^σ}`.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::dynamics::{evolve, linear_spacetime_norm, FlowConfig, FlowError, Trajectory};
use crate::ensemble::SampleMap;
use crate::measures::sample_mu;
use crate::rng::RngStreamSpec;
use crate::spectral::{sobolev_norm, ZonalCoeffs};

#[derive(Debug, Clone, PartialEq)]
pub struct FlowBoundConfig {
    pub seed: u64,
    pub modes: usize,
    pub alpha: f64,
    /// Space-time exponent, `2α < p < 6`.
    pub p: f64,
    pub sigma: f64,
    pub samples: usize,
    /// `Q` is evaluated at every `stride`-th stored time.
    pub stride: usize,
    /// Ratios `sup Q / Q(0)` whose exceedance fractions are reported.
    pub thresholds: Vec<f64>,
    pub dt: f64,
    pub grid: usize,
}

impl FlowBoundConfig {
    pub fn new(seed: u64, modes: usize, alpha: f64, p: f64, samples: usize) -> Self {
        Self {
            seed,
            modes,
            alpha,
            p,
            sigma: crate::spectral::DEFAULT_SIGMA,
            samples,
            stride: 64,
            thresholds: alloc::vec![1.5, 2.0, 3.0, 5.0, 10.0],
            dt: crate::dynamics::DEFAULT_DT,
            grid: 4 * modes,
        }
    }

    pub fn validate(&self) -> Result<(), FlowError> {
        let bad = |field, message: &str| {
            Err(FlowError::InvalidConfig {
                field,
                message: message.to_string(),
            })
        };
        if !(self.p > 2.0 * self.alpha && self.p < 6.0) {
            return bad("p", "exponent must satisfy 2α < p < 6");
        }
        if !(self.sigma < 0.5) {
            return bad("sigma", "σ must be below 1/2");
        }
        if self.stride == 0 {
            return bad("stride", "stride must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowBoundRecord {
    pub index: u64,
    /// `None` when the trajectory covered `[-π, π]`.
    pub failure: Option<String>,
    pub initial: f64,
    pub sup: f64,
    /// `sup / initial`, `0` for zero data.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowBoundReport {
    pub records: Vec<FlowBoundRecord>,
    pub completed: usize,
    /// Fraction of completed samples with ratio at most 3, and its 95% half-width.
    pub within_three: (f64, f64),
    /// `(threshold, fraction of completed samples exceeding it)`.
    pub exceedance: Vec<(f64, f64)>,
}

fn bound_functional(u: &ZonalCoeffs, cfg: &FlowBoundConfig) -> f64 {
    let points = 4 * cfg.modes;
    linear_spacetime_norm(u, cfg.p, cfg.p, cfg.grid, points) + sobolev_norm(u, cfg.sigma)
}

/// The flow configuration a scan uses: `[-π, π]` at the scan's step, grid and `σ`.
pub fn bound_flow_config(cfg: &FlowBoundConfig) -> FlowConfig {
    let mut flow = FlowConfig::new(cfg.alpha, cfg.modes).with_span(-PI, PI);
    flow.dt = cfg.dt;
    flow.grid = cfg.grid;
    flow.sigma = cfg.sigma;
    flow
}

/// Record for an already computed evolution of `u0` under [`bound_flow_config`].
pub fn flow_bound_from(
    evolution: Result<&Trajectory, &FlowError>,
    u0: &ZonalCoeffs,
    index: u64,
    cfg: &FlowBoundConfig,
) -> FlowBoundRecord {
    let initial = bound_functional(u0, cfg);
    match evolution {
        Ok(traj) => {
            let sup = traj
                .states()
                .iter()
                .step_by(cfg.stride)
                .chain(traj.states().last())
                .map(|u| bound_functional(u, cfg))
                .fold(initial, f64::max);
            FlowBoundRecord {
                index,
                failure: None,
                initial,
                sup,
                ratio: if initial > 0.0 { sup / initial } else { 0.0 },
            }
        }
        Err(e) => FlowBoundRecord {
            index,
            failure: Some(alloc::format!("{e}")),
            initial,
            sup: f64::NAN,
            ratio: f64::NAN,
        },
    }
}

/// Evolves one draw over `[-π, π]` and records `sup_k Q(u(T_k))`.
pub fn flow_bound_record(u0: &ZonalCoeffs, index: u64, cfg: &FlowBoundConfig) -> FlowBoundRecord {
    let evolution = evolve(u0, &bound_flow_config(cfg));
    flow_bound_from(evolution.as_ref(), u0, index, cfg)
}

pub fn flow_bound_scan<E: SampleMap>(
    cfg: &FlowBoundConfig,
    exec: &E,
) -> Result<FlowBoundReport, FlowError> {
    cfg.validate()?;
    bound_flow_config(cfg).validate()?;
    let records = exec.map_indices(cfg.samples, |i| {
        let u0 = sample_mu(RngStreamSpec::new(cfg.seed, i as u64), cfg.modes).coeffs;
        flow_bound_record(&u0, i as u64, cfg)
    });
    let ratios: Vec<f64> = records
        .iter()
        .filter(|r| r.failure.is_none())
        .map(|r| r.ratio)
        .collect();
    let completed = ratios.len();
    let fraction = |pred: &dyn Fn(f64) -> bool| {
        if completed == 0 {
            0.0
        } else {
            ratios.iter().filter(|&&r| pred(r)).count() as f64 / completed as f64
        }
    };
    let within = fraction(&|r| r <= 3.0);
    let exceedance = cfg
        .thresholds
        .iter()
        .map(|&t| (t, fraction(&|r| r > t)))
        .collect();
    Ok(FlowBoundReport {
        records,
        completed,
        within_three: (within, crate::stats::binomial_half_width(within, completed)),
        exceedance,
    })
}
