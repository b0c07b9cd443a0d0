//! Decay of `‖f(t) - L(t) f_∞‖_{L^q(r² dr)}` in the physical time `t`.
//!
//! With `a_n(T) = e^{-inT} c_n(T)` the interaction-picture coefficients,
//! the residual at `(t, r)` is `Ω Re Σ e^{inT} (a_n(T) - a_n(π)) e_n(R)`,
//! since `L(t) f_∞` is the image of the free flow of `u_∞ = a(π)`.

use alloc::string::ToString;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::dynamics::{evolve, phases, scattering_data, FlowConfig, FlowError, Trajectory};
use crate::ensemble::SampleMap;
use crate::measures::sample_mu;
use crate::penrose::{angle_derivative, conformal_factor, forward_map, radius_at_angle};
use crate::rng::RngStreamSpec;
use crate::spectral::{abs_pow, zonal_value};
use crate::stats::{log_log_fit, median, FitResult};

#[derive(Debug, Clone, PartialEq)]
pub struct ScatterFitConfig {
    pub seed: u64,
    pub modes: usize,
    pub alpha: f64,
    pub p: f64,
    /// Space exponent, `q = 3p/4`.
    pub q: f64,
    pub t_grid: Vec<f64>,
    pub samples: usize,
    /// Interior angle nodes of the fixed-`t` slice quadrature.
    pub chart_points: usize,
    pub nonlinear: bool,
    pub dt: f64,
    pub grid: usize,
}

impl ScatterFitConfig {
    pub fn new(seed: u64, modes: usize, alpha: f64, p: f64, samples: usize) -> Self {
        Self {
            seed,
            modes,
            alpha,
            p,
            q: 0.75 * p,
            t_grid: crate::stats::geometric_grid(10.0, 1e3, 16),
            samples,
            chart_points: 1024,
            nonlinear: true,
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
        if !(self.p > 2.0 * self.alpha && self.p < 6.0 && self.p > 16.0 / 3.0) {
            return bad("p", "exponent must satisfy max(2α, 16/3) < p < 6");
        }
        if (self.q - 0.75 * self.p).abs() > 1e-12 {
            return bad("q", "space exponent must equal 3p/4");
        }
        if self.t_grid.len() < 2 || self.t_grid.iter().any(|&t| !(10.0..=1e3).contains(&t)) {
            return bad("t_grid", "times must lie in [10, 1000]");
        }
        if self.chart_points < 16 {
            return bad("chart_points", "at least 16 angle nodes are needed");
        }
        Ok(())
    }
}

/// `‖f(t) - L(t) f_∞‖_{L^q(r² dr)}` by the trapezoid rule in `R` along the
/// slice `{t} × [0, ∞)`, with `r² dr = r² / (dR/dr) dR`.
pub fn scattering_residual_norm(
    traj: &Trajectory,
    t: f64,
    q: f64,
    chart_points: usize,
) -> Result<f64, FlowError> {
    let end = traj.state_at(PI)?;
    let modes = traj.modes();
    let h = PI / chart_points as f64;
    let mut sum = 0.0;
    for j in 1..chart_points {
        let angle = j as f64 * h;
        let r = radius_at_angle(t, angle);
        let cyl_time = forward_map(t, r).cyl_time;
        let current = traj.interpolate(cyl_time);
        let back = phases(modes, cyl_time - PI);
        let diff: Vec<f64> = current
            .as_slice()
            .iter()
            .zip(end.as_slice())
            .zip(&back)
            .map(|((c, e), p)| (c - e * p).re)
            .collect();
        let value = conformal_factor(t, r) * zonal_value(&diff, angle);
        sum += abs_pow(value, q) * r * r / angle_derivative(t, r);
    }
    Ok(libm::pow(h * sum, 1.0 / q))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScatterFitRecord {
    pub index: u64,
    pub norms: Vec<f64>,
    pub fit: Option<FitResult>,
    /// Strictly decreasing over the last quarter of the time grid.
    pub eventually_decreasing: bool,
    /// `‖S(-π)u(π) - Duhamel‖_{H^σ}`.
    pub duhamel_discrepancy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScatterFitReport {
    pub records: Vec<ScatterFitRecord>,
    /// Median over conclusive fits.
    pub median_slope: Option<f64>,
    pub inconclusive: usize,
    pub fraction_decreasing: f64,
    /// Largest residual norm over all samples and times.
    pub max_norm: f64,
}

fn eventually_decreasing(norms: &[f64]) -> bool {
    let tail = (norms.len() / 4 + 1).clamp(2, norms.len());
    norms[norms.len() - tail..].windows(2).all(|w| w[1] < w[0])
}

pub fn scattering_fit<E: SampleMap>(
    cfg: &ScatterFitConfig,
    exec: &E,
) -> Result<ScatterFitReport, FlowError> {
    cfg.validate()?;
    let mut flow = FlowConfig::new(cfg.alpha, cfg.modes);
    flow.nonlinear = cfg.nonlinear;
    flow.dt = cfg.dt;
    flow.grid = cfg.grid;
    flow.validate()?;
    let results = exec.map_indices(cfg.samples, |i| -> Result<ScatterFitRecord, FlowError> {
        let u0 = sample_mu(RngStreamSpec::new(cfg.seed, i as u64), cfg.modes).coeffs;
        let traj = evolve(&u0, &flow)?;
        let data = scattering_data(&traj, &flow)?;
        let norms = cfg
            .t_grid
            .iter()
            .map(|&t| scattering_residual_norm(&traj, t, cfg.q, cfg.chart_points))
            .collect::<Result<Vec<f64>, _>>()?;
        let fit = if norms.iter().all(|&v| v > 0.0) {
            log_log_fit(&cfg.t_grid, &norms)
        } else {
            None
        };
        Ok(ScatterFitRecord {
            index: i as u64,
            eventually_decreasing: eventually_decreasing(&norms),
            norms,
            fit,
            duhamel_discrepancy: data.discrepancy,
        })
    });
    let records = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    let slopes: Vec<f64> = records
        .iter()
        .filter_map(|r| r.fit.and_then(|f| f.conclusive_slope()))
        .collect();
    let decreasing = records.iter().filter(|r| r.eventually_decreasing).count();
    Ok(ScatterFitReport {
        median_slope: median(&slopes),
        inconclusive: records.len() - slopes.len(),
        fraction_decreasing: decreasing as f64 / records.len().max(1) as f64,
        max_norm: records
            .iter()
            .flat_map(|r| r.norms.iter().copied())
            .fold(0.0, f64::max),
        records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::Sequential;

    #[test]
    fn free_flow_has_no_residual() {
        let mut cfg = ScatterFitConfig::new(2, 16, 2.0, 5.6, 2);
        cfg.nonlinear = false;
        cfg.t_grid = alloc::vec![10.0, 100.0];
        let rep = scattering_fit(&cfg, &Sequential).unwrap();
        assert!(rep.max_norm < 1e-12, "{}", rep.max_norm);
    }

    #[test]
    fn config_checks() {
        assert!(ScatterFitConfig::new(0, 16, 2.0, 5.6, 1).validate().is_ok());
        assert!(ScatterFitConfig::new(0, 16, 2.0, 5.0, 1)
            .validate()
            .is_err());
        let mut c = ScatterFitConfig::new(0, 16, 2.0, 5.6, 1);
        c.q = 4.0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn decreasing_tail() {
        assert!(eventually_decreasing(&[
            1.0, 3.0, 2.0, 1.0, 0.5, 0.4, 0.3, 0.2
        ]));
        assert!(!eventually_decreasing(&[
            1.0, 0.9, 0.8, 0.7, 0.6, 0.5, 0.6, 0.4
        ]));
    }
}
