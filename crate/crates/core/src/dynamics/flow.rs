//! Fourth-order integrating-factor Runge-Kutta with step-halving checks.
//!
//! The integrator advances the interaction-picture coefficients
//! `a(τ) = e^{-inτ} c(origin + τ)` with classical RK4; in the original
//! variables this is the Lawson scheme, and the linear flow is reproduced to
//! rounding because each stored state carries a freshly evaluated phase.

use alloc::vec::Vec;

use num_complex::Complex64;

use super::{hs_distance, phases, FlowConfig, FlowError, GalerkinSystem};
use crate::penrose::CoefficientPath;
use crate::spectral::ZonalCoeffs;

/// Stored solution on increasing cylinder times.
#[derive(Debug, Clone)]
pub struct Trajectory {
    origin: f64,
    dt: f64,
    times: Vec<f64>,
    states: Vec<ZonalCoeffs>,
    energies: Vec<f64>,
}

impl Trajectory {
    /// Builds a trajectory from interaction-picture states relative to `origin`.
    pub(crate) fn from_interaction(
        sys: &GalerkinSystem,
        origin: f64,
        dt: f64,
        times: Vec<f64>,
        interaction: Vec<Vec<Complex64>>,
    ) -> Self {
        let states: Vec<ZonalCoeffs> = times
            .iter()
            .zip(&interaction)
            .map(|(&t, a)| {
                let ph = phases(a.len(), t - origin);
                ZonalCoeffs::new(a.iter().zip(&ph).map(|(x, p)| x * p).collect())
                    .expect("integrated coefficients are finite")
            })
            .collect();
        let energies = states
            .iter()
            .zip(&times)
            .map(|(u, &t)| sys.energy(u.as_slice(), t))
            .collect();
        Self {
            origin,
            dt,
            times,
            states,
            energies,
        }
    }

    pub fn origin(&self) -> f64 {
        self.origin
    }

    /// Step actually used (after any halving).
    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[ZonalCoeffs] {
        &self.states
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn modes(&self) -> usize {
        self.states.first().map_or(0, ZonalCoeffs::modes)
    }

    pub fn span(&self) -> (f64, f64) {
        (self.times[0], self.times[self.times.len() - 1])
    }

    /// Index of the stored time within `1e-12` of `time`.
    pub fn index_of(&self, time: f64) -> Option<usize> {
        let k = self.times.partition_point(|&t| t < time - 1e-12);
        (k < self.times.len() && (self.times[k] - time).abs() <= 1e-12).then_some(k)
    }

    /// State at a stored time.
    pub fn state_at(&self, time: f64) -> Result<&ZonalCoeffs, FlowError> {
        self.index_of(time)
            .map(|k| &self.states[k])
            .ok_or(FlowError::Span {
                required: time,
                available: self.span(),
            })
    }

    /// `e^{-in(T_k - origin)} c(T_k)`.
    pub(crate) fn interaction_state(&self, k: usize) -> Vec<Complex64> {
        let ph = phases(self.modes(), self.times[k] - self.origin);
        self.states[k]
            .as_slice()
            .iter()
            .zip(&ph)
            .map(|(c, p)| c * p.conj())
            .collect()
    }

    /// Cubic Lagrange interpolation of the interaction-picture coefficients;
    /// times outside the stored window are clamped to it.
    pub fn interpolate(&self, time: f64) -> ZonalCoeffs {
        let len = self.times.len();
        let (lo, hi) = self.span();
        let time = time.clamp(lo, hi);
        if len < 4 {
            let k = self.times.partition_point(|&t| t < time).min(len - 1);
            return self.states[k].clone();
        }
        if let Some(k) = self.index_of(time) {
            return self.states[k].clone();
        }
        let right = self.times.partition_point(|&t| t < time).clamp(1, len - 1);
        let start = (right as isize - 2).clamp(0, len as isize - 4) as usize;
        let nodes = &self.times[start..start + 4];
        let mut acc = alloc::vec![Complex64::new(0.0, 0.0); self.modes()];
        for (i, &ti) in nodes.iter().enumerate() {
            let weight: f64 = nodes
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, &tj)| (time - tj) / (ti - tj))
                .product();
            for (a, x) in acc.iter_mut().zip(self.interaction_state(start + i)) {
                *a += x * weight;
            }
        }
        let ph = phases(self.modes(), time - self.origin);
        ZonalCoeffs::new(acc.iter().zip(&ph).map(|(a, p)| a * p).collect())
            .expect("interpolated coefficients are finite")
    }
}

impl CoefficientPath for Trajectory {
    fn coeffs_at(&self, cyl_time: f64) -> ZonalCoeffs {
        self.interpolate(cyl_time)
    }
}

/// One RK4 step of the interaction-picture system from `τ` to `τ + h`.
pub(crate) fn rk4_step(
    sys: &GalerkinSystem,
    a: &[Complex64],
    tau: f64,
    h: f64,
    origin: f64,
) -> Vec<Complex64> {
    if !sys.is_nonlinear() {
        return a.to_vec();
    }
    let modes = a.len();
    let ph0 = phases(modes, tau);
    let ph_mid = phases(modes, tau + 0.5 * h);
    let ph1 = phases(modes, tau + h);
    let axpy = |k: &[Complex64], scale: f64| -> Vec<Complex64> {
        a.iter().zip(k).map(|(x, y)| x + y * scale).collect()
    };
    let k1 = sys.interaction_forcing(a, tau, origin, &ph0);
    let k2 = sys.interaction_forcing(&axpy(&k1, 0.5 * h), tau + 0.5 * h, origin, &ph_mid);
    let k3 = sys.interaction_forcing(&axpy(&k2, 0.5 * h), tau + 0.5 * h, origin, &ph_mid);
    let k4 = sys.interaction_forcing(&axpy(&k3, h), tau + h, origin, &ph1);
    let sixth = h / 6.0;
    (0..modes)
        .map(|n| a[n] + (k1[n] + (k2[n] + k3[n]) * 2.0 + k4[n]) * sixth)
        .collect()
}

/// Single step in the original variables, `c(T) ↦ c(T + h)`.
pub(crate) fn step_state(
    sys: &GalerkinSystem,
    c: &[Complex64],
    time: f64,
    h: f64,
) -> Vec<Complex64> {
    let a = rk4_step(sys, c, 0.0, h, time);
    let ph = phases(c.len(), h);
    a.iter().zip(&ph).map(|(x, p)| x * p).collect()
}

/// Substeps used on a piece of a step that ends at a time where `Ω̃` vanishes
/// at some grid node. There the forcing behaves like `|T - T*|^{α-2}`, so a
/// uniform step loses its order; nodes `L (i/K)^q` with `q(α-1) ≥ 5`
/// restore a fourth-order local error.
pub(crate) const GRADED_SUBSTEPS: usize = 16;

/// Signed substep lengths covering `[start, start + h]` (absolute times).
pub(crate) fn substeps(sys: &GalerkinSystem, start: f64, h: f64) -> Vec<f64> {
    if !sys.is_nonlinear() || sys.alpha() == 2.0 || h == 0.0 {
        return alloc::vec![h];
    }
    let end = start + h;
    let (lo, hi) = if h > 0.0 { (start, end) } else { (end, start) };
    let spacing = core::f64::consts::PI / sys.grid() as f64;
    let eps = 1e-13 * (1.0 + hi.abs());
    let max_m = sys.grid() - 1;
    // crossings at ±mπ/M, 0 < m < M
    let mut marks: Vec<f64> = Vec::new();
    for sign in [-1.0, 1.0] {
        let (a, b) = if sign > 0.0 { (lo, hi) } else { (-hi, -lo) };
        let first = libm::ceil((a - eps) / spacing).max(1.0) as usize;
        let last = (libm::floor((b + eps) / spacing).max(0.0) as usize).min(max_m);
        for m in first..=last {
            marks.push(sign * m as f64 * spacing);
        }
    }
    if marks.is_empty() {
        return alloc::vec![h];
    }
    let mut cuts: Vec<(f64, bool)> = alloc::vec![(start, false), (end, false)];
    for c in marks {
        if (c - start).abs() <= eps {
            cuts[0].1 = true;
        } else if (c - end).abs() <= eps {
            cuts[1].1 = true;
        } else {
            cuts.push((c, true));
        }
    }
    if h > 0.0 {
        cuts.sort_by(|x, y| x.0.total_cmp(&y.0));
    } else {
        cuts.sort_by(|x, y| y.0.total_cmp(&x.0));
    }
    let q = libm::ceil(5.0 / (sys.alpha() - 1.0));
    let graded = |len: f64| -> Vec<f64> {
        let k = GRADED_SUBSTEPS as f64;
        (1..=GRADED_SUBSTEPS)
            .map(|i| len * (libm::pow(i as f64 / k, q) - libm::pow((i - 1) as f64 / k, q)))
            .collect()
    };
    let mut out = Vec::new();
    for pair in cuts.windows(2) {
        let ((x, at_x), (y, at_y)) = (pair[0], pair[1]);
        let len = y - x;
        match (at_x, at_y) {
            (false, false) => out.push(len),
            (true, false) => out.extend(graded(len)),
            (false, true) => out.extend(graded(len).into_iter().rev()),
            (true, true) => {
                out.extend(graded(0.5 * len));
                out.extend(graded(0.5 * len).into_iter().rev());
            }
        }
    }
    out
}

/// Advances `a` from `τ` to `τ + h`, splitting at `Ω̃` crossings.
pub(crate) fn advance(
    sys: &GalerkinSystem,
    a: &[Complex64],
    tau: f64,
    h: f64,
    origin: f64,
) -> Vec<Complex64> {
    let mut state = a.to_vec();
    let mut t = tau;
    for len in substeps(sys, origin + tau, h) {
        state = rk4_step(sys, &state, t, len, origin);
        t += len;
    }
    state
}

/// Integrates `a` over `steps` steps of signed size `h`, returning the
/// interaction states including the starting one.
fn march(
    sys: &GalerkinSystem,
    a0: &[Complex64],
    origin: f64,
    h: f64,
    steps: usize,
) -> Vec<Vec<Complex64>> {
    let mut out = Vec::with_capacity(steps + 1);
    out.push(a0.to_vec());
    for k in 0..steps {
        let next = advance(sys, &out[k], k as f64 * h, h, origin);
        out.push(next);
    }
    out
}

/// Number of steps of size at most `dt` covering `length`, with the step
/// landing exactly on the window edge.
fn step_count(length: f64, dt: f64) -> usize {
    if length <= 0.0 {
        0
    } else {
        let k = libm::ceil(length / dt - 1e-9);
        (k as usize).max(1)
    }
}

/// Integration at a fixed step without the step-halving check.
pub fn integrate_fixed(u0: &ZonalCoeffs, cfg: &FlowConfig) -> Result<Trajectory, FlowError> {
    let sys = GalerkinSystem::new(cfg)?;
    if u0.modes() != cfg.modes {
        return Err(super::invalid(
            "modes",
            "initial data length differs from the configured mode count",
        ));
    }
    Ok(integrate_with(&sys, u0, cfg, cfg.dt))
}

fn integrate_with(sys: &GalerkinSystem, u0: &ZonalCoeffs, cfg: &FlowConfig, dt: f64) -> Trajectory {
    let (lo, hi) = cfg.span;
    let origin = cfg.origin;
    let n_back = step_count(origin - lo, dt);
    let n_fwd = step_count(hi - origin, dt);
    let h_back = if n_back > 0 {
        (origin - lo) / n_back as f64
    } else {
        0.0
    };
    let h_fwd = if n_fwd > 0 {
        (hi - origin) / n_fwd as f64
    } else {
        0.0
    };
    let back = march(sys, u0.as_slice(), origin, -h_back, n_back);
    let fwd = march(sys, u0.as_slice(), origin, h_fwd, n_fwd);

    let mut times = Vec::with_capacity(n_back + n_fwd + 1);
    let mut interaction = Vec::with_capacity(n_back + n_fwd + 1);
    for k in (1..=n_back).rev() {
        times.push(if k == n_back {
            lo
        } else {
            origin - k as f64 * h_back
        });
        interaction.push(back[k].clone());
    }
    for (k, a) in fwd.into_iter().enumerate() {
        times.push(if k == n_fwd && k > 0 {
            hi
        } else {
            origin + k as f64 * h_fwd
        });
        interaction.push(a);
    }
    let used = h_fwd.max(h_back);
    Trajectory::from_interaction(
        sys,
        origin,
        if used > 0.0 { used } else { dt },
        times,
        interaction,
    )
}

/// Largest `H^σ` distance between the window-edge states of two runs.
fn endpoint_difference(a: &Trajectory, b: &Trajectory, sigma: f64) -> f64 {
    let first = hs_distance(a.states[0].as_slice(), b.states[0].as_slice(), sigma);
    let last = hs_distance(
        a.states[a.len() - 1].as_slice(),
        b.states[b.len() - 1].as_slice(),
        sigma,
    );
    first.max(last)
}

/// Integrates `u0` over `cfg.span`, halving the step until runs at `dt` and
/// `dt/2` agree at both window edges to `cfg.tol` in `H^σ`. Returns the
/// coarser run of the accepted pair.
pub fn evolve(u0: &ZonalCoeffs, cfg: &FlowConfig) -> Result<Trajectory, FlowError> {
    let sys = GalerkinSystem::new(cfg)?;
    if u0.modes() != cfg.modes {
        return Err(super::invalid(
            "modes",
            "initial data length differs from the configured mode count",
        ));
    }
    let mut dt = cfg.dt;
    let mut coarse = integrate_with(&sys, u0, cfg, dt);
    if !sys.is_nonlinear() {
        return Ok(coarse);
    }
    let mut difference = f64::INFINITY;
    for _ in 0..=cfg.max_halvings {
        let fine = integrate_with(&sys, u0, cfg, 0.5 * dt);
        difference = endpoint_difference(&coarse, &fine, cfg.sigma);
        if difference <= cfg.tol {
            return Ok(coarse);
        }
        coarse = fine;
        dt *= 0.5;
    }
    Err(FlowError::StepSizeFailure {
        dt,
        difference,
        tol: cfg.tol,
    })
}
