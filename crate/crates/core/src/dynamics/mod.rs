//! Truncated Galerkin flow on the Einstein cylinder.
//!
//! The state `u(T) = Σ_{n≤N} c_n(T) e_n` solves
//! `∂_T c_n = i n c_n + i N_n(u, T)` with the real nonlinear coefficients
//! `N = H^{-1} S_N P(Ω̃^{α-2} |w|^α w)`, `w = S_N Re u`, where `P` is the
//! discrete projection of the collocation grid and `Ω̃ = max(cos T + cos R, 0)`.
//! `S(T)` acts as `c_n ↦ e^{inT} c_n`.

mod energy;
mod flow;
mod picard;
mod scattering;

use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use num_complex::Complex64;

use crate::penrose::omega_tilde;
use crate::spectral::{grid_angles, Multiplier, SpectralParams, ZonalTransform, DEFAULT_SIGMA};

pub use energy::{energy_derivative_check, EnergyCheckOptions, EnergyReport};
pub use flow::{evolve, integrate_fixed, Trajectory};
pub use picard::{linear_size, picard_solve, PicardConfig, PicardSolution};
pub use scattering::{linear_spacetime_norm, scattering_data, spacetime_norm, ScatteringData};

/// Default time step `π/4096`.
pub const DEFAULT_DT: f64 = PI / 4096.0;

#[derive(Debug, Clone, PartialEq)]
pub enum FlowError {
    InvalidConfig {
        field: &'static str,
        message: String,
    },
    /// Endpoint states at `dt` and `dt/2` still differ by more than `tol`
    /// after the allowed number of halvings.
    StepSizeFailure {
        dt: f64,
        difference: f64,
        tol: f64,
    },
    NonContraction {
        iterations: usize,
        increment: f64,
    },
    Span {
        required: f64,
        available: (f64, f64),
    },
}

impl fmt::Display for FlowError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::InvalidConfig { field, message } => write!(f, "invalid {field}: {message}"),
            Self::StepSizeFailure { dt, difference, tol } => write!(
                f,
                "step-halving did not converge: endpoint change {difference:e} exceeds tolerance {tol:e} at dt = {dt:e}"
            ),
            Self::NonContraction { iterations, increment } => write!(
                f,
                "Picard iteration stopped contracting after {iterations} iterations (increment {increment:e})"
            ),
            Self::Span { required, available } => write!(
                f,
                "trajectory covers [{}, {}] but time {required} is required",
                available.0, available.1
            ),
        }
    }
}

impl core::error::Error for FlowError {}

fn invalid(field: &'static str, message: impl Into<String>) -> FlowError {
    FlowError::InvalidConfig {
        field,
        message: message.into(),
    }
}

/// Parameters of one Galerkin integration.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowConfig {
    pub alpha: f64,
    pub modes: usize,
    pub grid: usize,
    pub dt: f64,
    /// Integration window `(lo, hi)`; stored times cover it in increasing order.
    pub span: (f64, f64),
    /// Time at which the initial data is given, `lo ≤ origin ≤ hi`.
    pub origin: f64,
    /// Acceptance threshold for the step-halving check (in `H^σ`).
    pub tol: f64,
    pub sigma: f64,
    pub max_halvings: u32,
    /// `false` integrates the linear flow only.
    pub nonlinear: bool,
}

impl FlowConfig {
    pub fn new(alpha: f64, modes: usize) -> Self {
        Self {
            alpha,
            modes,
            grid: SpectralParams::OVERSAMPLING * modes.max(1),
            dt: DEFAULT_DT,
            span: (0.0, PI),
            origin: 0.0,
            tol: 1e-8,
            sigma: DEFAULT_SIGMA,
            max_halvings: 3,
            nonlinear: true,
        }
    }

    pub fn with_span(mut self, lo: f64, hi: f64) -> Self {
        self.span = (lo, hi);
        self
    }

    pub fn with_origin(mut self, origin: f64) -> Self {
        self.origin = origin;
        self
    }

    pub fn linear(mut self) -> Self {
        self.nonlinear = false;
        self
    }

    pub fn validate(&self) -> Result<(), FlowError> {
        if !(2.0..3.0).contains(&self.alpha) {
            return Err(invalid("alpha", "alpha must lie in [2,3)"));
        }
        SpectralParams::new(self.modes, self.grid)
            .map_err(|e| invalid("grid", alloc::format!("{e}")))?;
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(invalid("dt", "time step must be positive and finite"));
        }
        let (lo, hi) = self.span;
        let slack = 1e-12;
        if !(lo >= -PI - slack && hi <= PI + slack && lo <= hi) {
            return Err(invalid("span", "time window must satisfy -π ≤ lo ≤ hi ≤ π"));
        }
        if !(self.origin >= lo && self.origin <= hi) {
            return Err(invalid(
                "origin",
                "initial time must lie inside the time window",
            ));
        }
        if !(self.tol > 0.0) {
            return Err(invalid("tol", "tolerance must be positive"));
        }
        Ok(())
    }
}

/// Precomputed operators of the truncated system for one `(α, N, M)`.
#[derive(Debug, Clone)]
pub struct GalerkinSystem {
    alpha: f64,
    modes: usize,
    nonlinear: bool,
    transform: ZonalTransform,
    cutoff: Vec<f64>,
    angles: Vec<f64>,
    weights: Vec<f64>,
}

impl GalerkinSystem {
    pub fn new(cfg: &FlowConfig) -> Result<Self, FlowError> {
        cfg.validate()?;
        let transform = ZonalTransform::new(cfg.grid);
        let weights = transform.weights().collect();
        Ok(Self {
            alpha: cfg.alpha,
            modes: cfg.modes,
            nonlinear: cfg.nonlinear,
            cutoff: Multiplier::SmoothCutoff(cfg.modes).symbols(cfg.modes),
            angles: grid_angles(cfg.grid).collect(),
            weights,
            transform,
        })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn grid(&self) -> usize {
        self.transform.grid()
    }

    pub fn is_nonlinear(&self) -> bool {
        self.nonlinear
    }

    /// `w = S_N Re u` on the grid.
    pub fn filtered_field(&self, u: &[Complex64]) -> Vec<f64> {
        let v: Vec<f64> = u.iter().zip(&self.cutoff).map(|(c, x)| c.re * x).collect();
        self.transform.synthesize_real(&v)
    }

    /// `Ω̃(T, R_j)^{α-2}`, with `0^0 = 1` at `α = 2`.
    fn omega_power(&self, cyl_time: f64, angle: f64) -> f64 {
        if self.alpha == 2.0 {
            1.0
        } else {
            let omega = omega_tilde(cyl_time, angle);
            if omega == 0.0 {
                0.0
            } else {
                libm::pow(omega, self.alpha - 2.0)
            }
        }
    }

    /// `|w|^α w` without a `pow` call at `α = 2`.
    fn power_term(&self, w: f64) -> f64 {
        if self.alpha == 2.0 {
            w * w * w
        } else if w == 0.0 {
            0.0
        } else {
            libm::pow(w.abs(), self.alpha) * w
        }
    }

    /// `|w|^{α+2}`
    fn potential_term(&self, w: f64) -> f64 {
        if self.alpha == 2.0 {
            let w2 = w * w;
            w2 * w2
        } else if w == 0.0 {
            0.0
        } else {
            libm::pow(w.abs(), self.alpha + 2.0)
        }
    }

    /// Real coefficients `N_n`, `n = 1..N`; zero when the system is linear.
    pub fn nonlinearity(&self, u: &[Complex64], cyl_time: f64) -> Vec<f64> {
        if !self.nonlinear {
            return alloc::vec![0.0; self.modes];
        }
        let w = self.filtered_field(u);
        let forcing: Vec<f64> = w
            .iter()
            .zip(&self.angles)
            .map(|(&wj, &angle)| self.omega_power(cyl_time, angle) * self.power_term(wj))
            .collect();
        let mut out = self.transform.analyze_real(&forcing, self.modes);
        for (k, v) in out.iter_mut().enumerate() {
            *v *= self.cutoff[k] / (k + 1) as f64;
        }
        out
    }

    /// `∂_T c_n = i n c_n + i N_n`.
    pub fn rhs(&self, u: &[Complex64], cyl_time: f64) -> Vec<Complex64> {
        let nl = self.nonlinearity(u, cyl_time);
        u.iter()
            .zip(&nl)
            .enumerate()
            .map(|(k, (c, n))| Complex64::i() * (c * (k + 1) as f64 + n))
            .collect()
    }

    /// `(1/(α+2)) Σ_j w_j Ω̃^{α-2} |S_N Re u|^{α+2}` with the grid weights.
    pub fn potential(&self, u: &[Complex64], cyl_time: f64) -> f64 {
        if !self.nonlinear {
            return 0.0;
        }
        let w = self.filtered_field(u);
        let sum: f64 = w
            .iter()
            .zip(&self.angles)
            .zip(&self.weights)
            .map(|((&wj, &angle), &q)| {
                q * self.omega_power(cyl_time, angle) * self.potential_term(wj)
            })
            .sum();
        sum / (self.alpha + 2.0)
    }

    /// `E = (1/2) Σ n² |c_n|² + potential`.
    pub fn energy(&self, u: &[Complex64], cyl_time: f64) -> f64 {
        let kinetic: f64 = u
            .iter()
            .enumerate()
            .map(|(k, c)| {
                let n = (k + 1) as f64;
                n * n * c.norm_sqr()
            })
            .sum();
        0.5 * kinetic + self.potential(u, cyl_time)
    }

    /// Per-node potential density `w_j |S_N Re u|^{α+2} / (α+2)` without the
    /// `Ω̃` factor.
    pub fn potential_density(&self, u: &[Complex64]) -> Vec<f64> {
        let w = self.filtered_field(u);
        w.iter()
            .zip(&self.weights)
            .map(|(&wj, &q)| q * self.potential_term(wj) / (self.alpha + 2.0))
            .collect()
    }

    /// `Ω̃(T, R_j)^{α-2}` at every grid node.
    pub fn omega_powers(&self, cyl_time: f64) -> Vec<f64> {
        self.angles
            .iter()
            .map(|&r| self.omega_power(cyl_time, r))
            .collect()
    }

    /// Exact `dE/dT` of the semi-discrete flow:
    /// `-sin T (α-2)/(α+2) Σ_j w_j Ω̃^{α-3} |S_N Re u|^{α+2}` over `Ω̃ > 0`.
    pub fn energy_rate(&self, u: &[Complex64], cyl_time: f64) -> f64 {
        if !self.nonlinear || self.alpha == 2.0 {
            return 0.0;
        }
        let w = self.filtered_field(u);
        let sum: f64 = w
            .iter()
            .zip(&self.angles)
            .zip(&self.weights)
            .map(|((&wj, &angle), &q)| {
                let omega = omega_tilde(cyl_time, angle);
                if omega > 0.0 {
                    q * libm::pow(omega, self.alpha - 3.0) * self.potential_term(wj)
                } else {
                    0.0
                }
            })
            .sum();
        -libm::sin(cyl_time) * (self.alpha - 2.0) / (self.alpha + 2.0) * sum
    }

    /// Interaction-picture forcing `i e^{-inτ} N(e^{inτ} a, origin + τ)`.
    pub(crate) fn interaction_forcing(
        &self,
        a: &[Complex64],
        tau: f64,
        origin: f64,
        phases: &[Complex64],
    ) -> Vec<Complex64> {
        if !self.nonlinear {
            return alloc::vec![Complex64::new(0.0, 0.0); a.len()];
        }
        let u: Vec<Complex64> = a.iter().zip(phases).map(|(x, p)| x * p).collect();
        let nl = self.nonlinearity(&u, origin + tau);
        nl.iter()
            .zip(phases)
            .map(|(n, p)| Complex64::i() * p.conj() * *n)
            .collect()
    }
}

/// `e^{inτ}` for `n = 1..modes`, each from its own reduced angle.
pub fn phases(modes: usize, tau: f64) -> Vec<Complex64> {
    (1..=modes)
        .map(|n| {
            let angle = n as f64 * tau;
            Complex64::new(libm::cos(angle), libm::sin(angle))
        })
        .collect()
}

/// Linear propagator `S(T)`.
pub fn linear_propagator(
    u: &crate::spectral::ZonalCoeffs,
    cyl_time: f64,
) -> crate::spectral::ZonalCoeffs {
    let ph = phases(u.modes(), cyl_time);
    crate::spectral::ZonalCoeffs::new(u.as_slice().iter().zip(&ph).map(|(c, p)| c * p).collect())
        .expect("unit phases keep coefficients finite")
}

/// `max_k ‖a_k - b_k‖_{H^s}` over paired coefficient vectors.
pub(crate) fn hs_distance(a: &[Complex64], b: &[Complex64], s: f64) -> f64 {
    let w = Multiplier::HPower(2.0 * s);
    let sum: f64 = a
        .iter()
        .zip(b)
        .enumerate()
        .map(|(k, (x, y))| w.symbol(k + 1) * (x - y).norm_sqr())
        .sum();
    libm::sqrt(sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{eigenfunction, ZonalCoeffs, BASIS_SCALE};

    #[test]
    fn config_validation() {
        assert!(FlowConfig::new(2.0, 16).validate().is_ok());
        assert!(FlowConfig::new(3.0, 16).validate().is_err());
        let mut c = FlowConfig::new(2.5, 16);
        c.grid = 32;
        assert!(c.validate().is_err());
        assert!(FlowConfig::new(2.0, 16)
            .with_span(-4.0, 0.0)
            .validate()
            .is_err());
        assert!(FlowConfig::new(2.0, 16)
            .with_origin(-1.0)
            .validate()
            .is_err());
    }

    #[test]
    fn imaginary_data_has_no_force() {
        let sys = GalerkinSystem::new(&FlowConfig::new(2.5, 8)).unwrap();
        let u = ZonalCoeffs::basis(8, 3, Complex64::new(0.0, 2.0));
        assert!(sys
            .nonlinearity(u.as_slice(), 0.4)
            .iter()
            .all(|v| *v == 0.0));
    }

    #[test]
    fn cubic_force_of_first_mode_matches_direct_projection() {
        // α = 2, u = δ_1: N_n = χ_n/n ⟨e_1³, e_n⟩, computed here by plain quadrature
        let modes = 16;
        let sys = GalerkinSystem::new(&FlowConfig::new(2.0, modes)).unwrap();
        let u = ZonalCoeffs::basis(modes, 1, Complex64::new(1.0, 0.0));
        let nl = sys.nonlinearity(u.as_slice(), 0.0);
        let grid = 4 * modes;
        let h = PI / grid as f64;
        for n in 1..=modes {
            let ip: f64 = grid_angles(grid)
                .map(|r| {
                    let s = libm::sin(r);
                    libm::pow(BASIS_SCALE, 3.0) * eigenfunction(n, r).unwrap() * s * s * h
                })
                .sum();
            let expected = Multiplier::SmoothCutoff(modes).symbol(n) / n as f64 * ip;
            assert!((nl[n - 1] - expected).abs() < 1e-13, "n = {n}");
            if n % 2 == 0 {
                assert!(nl[n - 1].abs() < 1e-13);
            }
        }
        assert!((nl[0] - 2.0 / PI).abs() < 1e-13);
    }

    #[test]
    fn energy_oracles() {
        let sys = GalerkinSystem::new(&FlowConfig::new(2.0, 8)).unwrap();
        let u = ZonalCoeffs::basis(8, 1, Complex64::new(0.0, 1.0));
        assert!((sys.energy(u.as_slice(), 0.3) - 0.5).abs() < 1e-15);
        let u = ZonalCoeffs::basis(8, 1, Complex64::new(1.0, 0.0));
        let expected = 0.5 + 0.5 / PI;
        assert!((sys.energy(u.as_slice(), 1.0) - expected).abs() < 1e-14);
    }

    #[test]
    fn rhs_of_linear_mode() {
        let sys = GalerkinSystem::new(&FlowConfig::new(2.0, 4).linear()).unwrap();
        let u = ZonalCoeffs::basis(4, 1, Complex64::new(1.0, 0.0));
        let d = sys.rhs(u.as_slice(), 0.0);
        assert_eq!(d[0], Complex64::new(0.0, 1.0));
        assert!(d[1..].iter().all(|c| c.norm() == 0.0));
    }
}
