//! Local solution by fixed-point iteration of the Duhamel map.
//!
//! Iterates `a ↦ a_0 + ∫_0^τ i e^{-inσ} N(e^{inσ} a(σ), T_0 + σ) dσ` in the
//! interaction picture on the same uniform grid the integrator uses, with a
//! fourth-order cumulative quadrature in time.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use super::flow::Trajectory;
use super::scattering::linear_spacetime_norm;
use super::{hs_distance, invalid, phases, FlowConfig, FlowError, GalerkinSystem};
use crate::spectral::{sobolev_norm, ZonalCoeffs};

#[derive(Debug, Clone, PartialEq)]
pub struct PicardConfig {
    /// Data size bound `A`.
    pub size_bound: f64,
    pub scale: f64,
    pub exponent: f64,
    /// Local time `τ = scale · (1 + A)^{-exponent}`.
    pub tau: f64,
    pub max_iter: usize,
    /// Iteration stops once the largest `H^σ` increment over the grid drops below this.
    pub contraction_tol: f64,
}

impl PicardConfig {
    pub fn new(size_bound: f64, scale: f64, exponent: f64) -> Self {
        Self {
            size_bound,
            scale,
            exponent,
            tau: scale * libm::pow(1.0 + size_bound, -exponent),
            max_iter: 60,
            contraction_tol: 1e-12,
        }
    }

    pub fn validate(&self) -> Result<(), FlowError> {
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(invalid("tau", "local time must be positive"));
        }
        let expected = self.scale * libm::pow(1.0 + self.size_bound, -self.exponent);
        if (self.tau - expected).abs() > 1e-12 * expected.max(1.0) {
            return Err(invalid(
                "tau",
                "local time differs from scale·(1+A)^(-exponent)",
            ));
        }
        if self.max_iter == 0 || !(self.contraction_tol > 0.0) {
            return Err(invalid(
                "max_iter",
                "iteration cap and tolerance must be positive",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct PicardSolution {
    pub trajectory: Trajectory,
    pub iterations: usize,
    /// Largest `H^σ` change over the grid at each iteration.
    pub increments: Vec<f64>,
}

/// `A = ‖u_0‖_{H^σ} + ‖S(T)u_0‖_{L^4_{T,R}}` over one period.
pub fn linear_size(u0: &ZonalCoeffs, cfg: &FlowConfig) -> f64 {
    let points = 4 * cfg.modes.max(8);
    sobolev_norm(u0, cfg.sigma) + linear_spacetime_norm(u0, 4.0, 4.0, cfg.grid, points)
}

/// `∫_0^{t_k} f` for `k = 0..n` on a uniform grid of signed step `h`,
/// fourth order for four or more nodes.
pub(crate) fn cumulative_integral(values: &[Vec<Complex64>], h: f64) -> Vec<Vec<Complex64>> {
    let n = values.len();
    let modes = values.first().map_or(0, Vec::len);
    let mut out = Vec::with_capacity(n);
    out.push(alloc::vec![Complex64::new(0.0, 0.0); modes]);
    for k in 0..n.saturating_sub(1) {
        let f = |j: usize, m: usize| values[j][m];
        let piece: Vec<Complex64> = (0..modes)
            .map(|m| {
                if n < 4 {
                    (f(k, m) + f(k + 1, m)) * (0.5 * h)
                } else if k == 0 {
                    (f(0, m) * 9.0 + f(1, m) * 19.0 - f(2, m) * 5.0 + f(3, m)) * (h / 24.0)
                } else if k == n - 2 {
                    (f(k - 2, m) - f(k - 1, m) * 5.0 + f(k, m) * 19.0 + f(k + 1, m) * 9.0)
                        * (h / 24.0)
                } else {
                    ((f(k, m) + f(k + 1, m)) * 13.0 - f(k - 1, m) - f(k + 2, m)) * (h / 24.0)
                }
            })
            .collect();
        let next = out[k].iter().zip(&piece).map(|(a, b)| a + b).collect();
        out.push(next);
    }
    out
}

/// One side of the window: nodes `τ_k = k h`, `k = 0..steps`.
struct Side {
    h: f64,
    iterate: Vec<Vec<Complex64>>,
}

impl Side {
    fn new(a0: &[Complex64], h: f64, steps: usize) -> Self {
        Self {
            h,
            iterate: alloc::vec![a0.to_vec(); steps + 1],
        }
    }

    /// Applies the Duhamel map once; returns the largest `H^σ` change.
    fn sweep(&mut self, sys: &GalerkinSystem, a0: &[Complex64], origin: f64, sigma: f64) -> f64 {
        let forcing: Vec<Vec<Complex64>> = self
            .iterate
            .iter()
            .enumerate()
            .map(|(k, a)| {
                let tau = k as f64 * self.h;
                sys.interaction_forcing(a, tau, origin, &phases(a.len(), tau))
            })
            .collect();
        let integral = cumulative_integral(&forcing, self.h);
        let mut change: f64 = 0.0;
        for (a, int) in self.iterate.iter_mut().zip(integral) {
            let next: Vec<Complex64> = a0.iter().zip(&int).map(|(x, y)| x + y).collect();
            change = change.max(hs_distance(&next, a, sigma));
            *a = next;
        }
        change
    }
}

/// Solves on `[T_0 - τ, T_0 + τ] ∩ [-π, π]` with `T_0 = flow.origin`,
/// using the step `flow.dt` (shortened to land on the window edges).
pub fn picard_solve(
    u0: &ZonalCoeffs,
    flow: &FlowConfig,
    pic: &PicardConfig,
) -> Result<PicardSolution, FlowError> {
    pic.validate()?;
    let origin = flow.origin;
    let lo = (origin - pic.tau).max(-PI);
    let hi = (origin + pic.tau).min(PI);
    let cfg = flow.clone().with_span(lo, hi);
    let sys = GalerkinSystem::new(&cfg)?;
    if u0.modes() != cfg.modes {
        return Err(invalid(
            "modes",
            "initial data length differs from the configured mode count",
        ));
    }
    let steps = |len: f64| {
        if len > 0.0 {
            (libm::ceil(len / cfg.dt - 1e-9) as usize).max(1)
        } else {
            0
        }
    };
    let (n_back, n_fwd) = (steps(origin - lo), steps(hi - origin));
    let a0 = u0.as_slice();
    let mut back = Side::new(
        a0,
        if n_back > 0 {
            -(origin - lo) / n_back as f64
        } else {
            0.0
        },
        n_back,
    );
    let mut fwd = Side::new(
        a0,
        if n_fwd > 0 {
            (hi - origin) / n_fwd as f64
        } else {
            0.0
        },
        n_fwd,
    );

    let mut increments = Vec::new();
    loop {
        let change = back
            .sweep(&sys, a0, origin, cfg.sigma)
            .max(fwd.sweep(&sys, a0, origin, cfg.sigma));
        increments.push(change);
        let iterations = increments.len();
        if change < pic.contraction_tol {
            break;
        }
        let growing = iterations >= 3 && change >= increments[iterations - 2];
        if growing || iterations >= pic.max_iter {
            return Err(FlowError::NonContraction {
                iterations,
                increment: change,
            });
        }
    }

    let mut times = Vec::with_capacity(n_back + n_fwd + 1);
    let mut interaction = Vec::with_capacity(n_back + n_fwd + 1);
    for k in (1..=n_back).rev() {
        times.push(if k == n_back {
            lo
        } else {
            origin + k as f64 * back.h
        });
        interaction.push(core::mem::take(&mut back.iterate[k]));
    }
    for (k, a) in fwd.iterate.into_iter().enumerate() {
        times.push(if k == n_fwd && k > 0 {
            hi
        } else {
            origin + k as f64 * fwd.h
        });
        interaction.push(a);
    }
    let trajectory = Trajectory::from_interaction(
        &sys,
        origin,
        fwd.h.abs().max(back.h.abs()),
        times,
        interaction,
    );
    Ok(PicardSolution {
        trajectory,
        iterations: increments.len(),
        increments,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cumulative_rule_is_exact_for_cubics() {
        let h = 0.1;
        let f = |t: f64| 1.0 - 2.0 * t + 0.5 * t * t * t;
        let big_f = |t: f64| t - t * t + 0.125 * t * t * t * t;
        let values: Vec<Vec<Complex64>> = (0..9)
            .map(|k| alloc::vec![Complex64::new(f(k as f64 * h), 0.0)])
            .collect();
        let out = cumulative_integral(&values, h);
        for (k, v) in out.iter().enumerate() {
            assert!((v[0].re - big_f(k as f64 * h)).abs() < 1e-14, "k = {k}");
        }
    }

    #[test]
    fn zero_data_converges_immediately() {
        let cfg = FlowConfig::new(2.5, 8);
        let pic = PicardConfig::new(0.0, 0.5, 1.0);
        let sol = picard_solve(&ZonalCoeffs::zeros(8), &cfg, &pic).unwrap();
        assert_eq!(sol.iterations, 1);
        assert!(sol
            .trajectory
            .states()
            .iter()
            .all(|u| sobolev_norm(u, 0.0) == 0.0));
        assert!((sol.trajectory.span().1 - 0.5).abs() < 1e-15);
    }

    #[test]
    fn inconsistent_tau_is_rejected() {
        let mut pic = PicardConfig::new(1.0, 0.5, 2.0);
        assert!(pic.validate().is_ok());
        pic.tau *= 1.5;
        assert!(pic.validate().is_err());
    }
}
