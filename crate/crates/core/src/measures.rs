//! Gaussian measure on truncated zonal data, the Gibbs-type density weight,
//! and Monte Carlo estimators built on them.
//!
//! A sample is `u = Σ_{n≤N} (√2/n) g_n e_n` with independent complex normals
//! `g_n`, `E|g_n|² = 1`. The normalising constant of the measure is never
//! needed: estimators only use expectations of the unnormalised weight.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;

use crate::ensemble::SampleMap;
use crate::rng::{CounterRng, RngStreamSpec};
use crate::spectral::{
    grid_angles, Multiplier, SpectralError, SpectralParams, ZonalCoeffs, ZonalTransform,
};
use crate::stats::{binomial_half_width, linear_fit, FitResult, MeanEstimate};

pub const MIN_MASS_SAMPLES: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub enum MeasureError {
    AlphaOutOfRange { alpha: f64 },
    TooFewSamples { required: usize, got: usize },
    Inadmissible { s: f64, p: f64 },
    ModeOrder { modes: usize, base_modes: usize },
    Spectral(SpectralError),
}

impl fmt::Display for MeasureError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::AlphaOutOfRange { alpha } => write!(f, "alpha must lie in [2,3) (got {alpha})"),
            Self::TooFewSamples { required, got } => {
                write!(f, "at least {required} samples are required (got {got})")
            }
            Self::Inadmissible { s, p } => write!(
                f,
                "(s, p) = ({s}, {p}) is not admissible: need p >= 2 and s < 1/2 (p <= 3) or s < 3/p - 1/2 (p > 3)"
            ),
            Self::ModeOrder { modes, base_modes } => {
                write!(f, "need modes >= base_modes >= 1 (got {modes} and {base_modes})")
            }
            Self::Spectral(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for MeasureError {}

impl From<SpectralError> for MeasureError {
    fn from(e: SpectralError) -> Self {
        Self::Spectral(e)
    }
}

pub fn check_alpha(alpha: f64) -> Result<(), MeasureError> {
    if (2.0..3.0).contains(&alpha) {
        Ok(())
    } else {
        Err(MeasureError::AlphaOutOfRange { alpha })
    }
}

/// One draw from the truncated Gaussian measure.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianSample {
    pub g: Vec<Complex64>,
    pub coeffs: ZonalCoeffs,
}

impl GaussianSample {
    /// `h_n = √2 Re g_n`, standard normal; `Re u = Σ (h_n/n) e_n`.
    pub fn real_weights(&self) -> Vec<f64> {
        self.g
            .iter()
            .map(|g| core::f64::consts::SQRT_2 * g.re)
            .collect()
    }

    /// `l_n = -√2 Im g_n`, standard normal; `-H Im u = Σ l_n e_n`.
    pub fn imag_weights(&self) -> Vec<f64> {
        self.g
            .iter()
            .map(|g| -core::f64::consts::SQRT_2 * g.im)
            .collect()
    }
}

/// Deterministic draw for `(seed, index)` with `modes` coefficients.
pub fn sample_mu(stream: RngStreamSpec, modes: usize) -> GaussianSample {
    let mut rng = CounterRng::new(stream);
    let g: Vec<Complex64> = (0..modes).map(|_| rng.next_complex_normal()).collect();
    let coeffs = g
        .iter()
        .enumerate()
        .map(|(k, g)| g * (core::f64::consts::SQRT_2 / (k + 1) as f64))
        .collect();
    GaussianSample {
        g,
        coeffs: ZonalCoeffs::new(coeffs).expect("normal draws are finite"),
    }
}

/// Which real field enters the potential.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightVariant {
    /// `Re u`
    Plain,
    /// `S_N Re u` with the smooth cutoff at the sample's own mode count.
    Smoothed,
}

/// `∫ (1 + cos R)^{α-2} |v|^{α+2} sin²R dR` for real coefficients `v`,
/// trapezoid on an `M`-interval grid.
pub fn time_zero_potential(v: &[f64], alpha: f64, transform: &ZonalTransform) -> f64 {
    let field = transform.synthesize_real(v);
    let power = alpha + 2.0;
    let h = core::f64::consts::PI / transform.grid() as f64;
    field
        .iter()
        .zip(grid_angles(transform.grid()))
        .zip(transform.sin_angles())
        .map(|((w, angle), s)| {
            let omega = 1.0 + libm::cos(angle);
            let omega_factor = if alpha == 2.0 {
                1.0
            } else {
                libm::pow(omega, alpha - 2.0)
            };
            let a = w.abs();
            let wp = if alpha == 2.0 {
                let a2 = a * a;
                a2 * a2
            } else {
                libm::pow(a, power)
            };
            h * s * s * omega_factor * wp
        })
        .sum()
}

/// `exp(-(1/(α+2)) ∫ Ω(0,R)^{α-2} |v|^{α+2} sin²R dR)` with `v = Re u` or `S_N Re u`.
pub fn density_weight(
    u: &ZonalCoeffs,
    alpha: f64,
    grid: usize,
    variant: WeightVariant,
) -> Result<f64, MeasureError> {
    check_alpha(alpha)?;
    let params = SpectralParams::new(u.modes().max(1), grid)?;
    let transform = ZonalTransform::new(params.grid);
    Ok(density_weight_with(u, alpha, &transform, variant))
}

fn density_weight_with(
    u: &ZonalCoeffs,
    alpha: f64,
    transform: &ZonalTransform,
    variant: WeightVariant,
) -> f64 {
    let mut v = u.real_part();
    if variant == WeightVariant::Smoothed {
        let cut = Multiplier::SmoothCutoff(u.modes());
        for (k, x) in v.iter_mut().enumerate() {
            *x *= cut.symbol(k + 1);
        }
    }
    libm::exp(-time_zero_potential(&v, alpha, transform) / (alpha + 2.0))
}

/// Monte Carlo estimate of `ρ_N(E_N) = E_μN[weight]` with the smoothed weight.
pub fn rho_mass_estimate<E: SampleMap>(
    seed: u64,
    modes: usize,
    alpha: f64,
    samples: usize,
    exec: &E,
) -> Result<MeanEstimate, MeasureError> {
    check_alpha(alpha)?;
    if samples < MIN_MASS_SAMPLES {
        return Err(MeasureError::TooFewSamples {
            required: MIN_MASS_SAMPLES,
            got: samples,
        });
    }
    let params = SpectralParams::with_default_grid(modes)?;
    let transform = ZonalTransform::new(params.grid);
    let weights = exec.map_indices(samples, |i| {
        let sample = sample_mu(RngStreamSpec::new(seed, i as u64), modes);
        density_weight_with(&sample.coeffs, alpha, &transform, WeightVariant::Smoothed)
    });
    Ok(MeanEstimate::from_values(&weights))
}

/// `s < 1/2` for `p ≤ 3`, `s < 3/p - 1/2` for `p > 3`, and `p ≥ 2`.
pub fn tail_admissible(s: f64, p: f64) -> bool {
    p >= 2.0 && if p <= 3.0 { s < 0.5 } else { s < 3.0 / p - 0.5 }
}

/// Inputs of [`tail_probability`].
#[derive(Debug, Clone, PartialEq)]
pub struct TailConfig {
    pub seed: u64,
    pub modes: usize,
    pub base_modes: usize,
    pub s: f64,
    pub p: f64,
    pub lambda_grid: Vec<f64>,
    pub samples: usize,
}

/// Empirical exceedance curve of `‖S_N u - S_{N₀} u‖_{W^{s,p}}`.
#[derive(Debug, Clone, PartialEq)]
pub struct TailEstimate {
    pub lambda_grid: Vec<f64>,
    pub prob: Vec<f64>,
    /// 95% binomial half-widths.
    pub ci: Vec<f64>,
    pub counts: Vec<usize>,
    /// `ln p̂` against `λ²` where `50 ≤ count ≤ samples/10`.
    pub fit: Option<FitResult>,
}

impl TailEstimate {
    pub fn fit_slope(&self) -> Option<f64> {
        self.fit.map(|f| f.slope)
    }
}

/// Minimum exceedance count for a threshold to enter the tail fit.
pub const TAIL_FIT_MIN_COUNT: usize = 50;

fn check_tail(cfg: &TailConfig) -> Result<(), MeasureError> {
    if !tail_admissible(cfg.s, cfg.p) {
        return Err(MeasureError::Inadmissible { s: cfg.s, p: cfg.p });
    }
    if cfg.base_modes == 0 || cfg.modes < cfg.base_modes {
        return Err(MeasureError::ModeOrder {
            modes: cfg.modes,
            base_modes: cfg.base_modes,
        });
    }
    if cfg.samples == 0 {
        return Err(MeasureError::TooFewSamples {
            required: 1,
            got: 0,
        });
    }
    Ok(())
}

/// `‖S_N u - S_{N₀} u‖_{W^{s,p}}` for draws `0..samples` in index order.
pub fn tail_norms<E: SampleMap>(cfg: &TailConfig, exec: &E) -> Result<Vec<f64>, MeasureError> {
    check_tail(cfg)?;
    let params = SpectralParams::with_default_grid(cfg.modes)?;
    let transform = ZonalTransform::new(params.grid);
    let fine = Multiplier::SmoothCutoff(cfg.modes).symbols(cfg.modes);
    let coarse = Multiplier::SmoothCutoff(cfg.base_modes).symbols(cfg.modes);
    let lift = Multiplier::HPower(cfg.s).symbols(cfg.modes);
    Ok(exec.map_indices(cfg.samples, |i| {
        let sample = sample_mu(RngStreamSpec::new(cfg.seed, i as u64), cfg.modes);
        let diff: Vec<Complex64> = sample
            .coeffs
            .as_slice()
            .iter()
            .enumerate()
            .map(|(k, c)| c * ((fine[k] - coarse[k]) * lift[k]))
            .collect();
        let field = transform.synthesize(&diff);
        let moduli: Vec<f64> = field.iter().map(|z| z.norm()).collect();
        crate::spectral::lp_norm_moduli(&moduli, cfg.p).expect("p >= 2")
    }))
}

impl TailEstimate {
    /// Exceedance curve of `norms` over `lambda_grid`, with the `ln p̂`
    /// against `λ²` fit where `50 ≤ count ≤ len/10`.
    pub fn from_norms(norms: &[f64], lambda_grid: &[f64]) -> Self {
        let total = norms.len();
        let counts: Vec<usize> = lambda_grid
            .iter()
            .map(|&lambda| norms.iter().filter(|&&x| x > lambda).count())
            .collect();
        let prob: Vec<f64> = counts
            .iter()
            .map(|&c| c as f64 / total.max(1) as f64)
            .collect();
        let ci = prob
            .iter()
            .map(|&p| binomial_half_width(p, total))
            .collect();
        let (xs, ys): (Vec<f64>, Vec<f64>) = lambda_grid
            .iter()
            .zip(&counts)
            .filter(|(_, &c)| c >= TAIL_FIT_MIN_COUNT && c * 10 <= total)
            .map(|(&l, &c)| (l * l, libm::log(c as f64 / total as f64)))
            .unzip();
        let window = match (xs.first(), xs.last()) {
            (Some(a), Some(b)) => (libm::sqrt(*a), libm::sqrt(*b)),
            _ => (0.0, 0.0),
        };
        let fit = if xs.len() >= 3 {
            linear_fit(&xs, &ys, window)
        } else {
            None
        };
        Self {
            lambda_grid: lambda_grid.to_vec(),
            prob,
            ci,
            counts,
            fit,
        }
    }
}

pub fn tail_probability<E: SampleMap>(
    cfg: &TailConfig,
    exec: &E,
) -> Result<TailEstimate, MeasureError> {
    let norms = tail_norms(cfg, exec)?;
    Ok(TailEstimate::from_norms(&norms, &cfg.lambda_grid))
}

/// Empirical `(E|Σ g_n c_n|^q)^{1/q} / √(q Σ|c_n|²)` for each `q`.
///
/// Draw `i` uses the stream `(seed, i)`. A zero vector gives ratio 0.
pub fn moment_growth<E: SampleMap>(
    c: &[Complex64],
    q_grid: &[f64],
    samples: usize,
    seed: u64,
    exec: &E,
) -> Vec<f64> {
    let energy: f64 = c.iter().map(|x| x.norm_sqr()).sum();
    if energy == 0.0 || samples == 0 {
        return vec![0.0; q_grid.len()];
    }
    let moduli = exec.map_indices(samples, |i| {
        let mut rng = CounterRng::new(RngStreamSpec::new(seed, i as u64));
        c.iter()
            .fold(Complex64::new(0.0, 0.0), |acc, &cn| {
                acc + rng.next_complex_normal() * cn
            })
            .norm()
    });
    let scale = moduli.iter().copied().fold(0.0, f64::max);
    q_grid
        .iter()
        .map(|&q| {
            // factor out the max to keep large powers finite
            let mean: f64 =
                moduli.iter().map(|m| libm::pow(m / scale, q)).sum::<f64>() / samples as f64;
            scale * libm::pow(mean, 1.0 / q) / libm::sqrt(q * energy)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::Sequential;

    #[test]
    fn samples_are_reproducible_and_nested() {
        let a = sample_mu(RngStreamSpec::new(11, 5), 32);
        let b = sample_mu(RngStreamSpec::new(11, 5), 32);
        assert_eq!(a, b);
        let short = sample_mu(RngStreamSpec::new(11, 5), 8);
        assert_eq!(short.g[..], a.g[..8]);
        for (k, (g, c)) in a.g.iter().zip(a.coeffs.as_slice()).enumerate() {
            assert_eq!(*c, g * (core::f64::consts::SQRT_2 / (k + 1) as f64));
        }
        let h = a.real_weights();
        assert!((h[3] / 4.0 - a.coeffs.get(4).re).abs() < 1e-15);
    }

    #[test]
    fn weight_of_zero_and_alpha_two_oracle() {
        let zero = ZonalCoeffs::zeros(4);
        assert_eq!(
            density_weight(&zero, 2.0, 16, WeightVariant::Plain).unwrap(),
            1.0
        );
        // δ_1: ∫ (2/π)² sin²R dR = 2/π, weight exp(-(1/4)(2/π))
        let d1 = ZonalCoeffs::basis(1, 1, Complex64::new(1.0, 0.0));
        let w = density_weight(&d1, 2.0, 64, WeightVariant::Plain).unwrap();
        assert!((w - libm::exp(-0.5 / core::f64::consts::PI)).abs() < 1e-14);
        assert!(density_weight(&d1, 3.5, 64, WeightVariant::Plain).is_err());
        assert!(density_weight(&d1, 2.0, 3, WeightVariant::Plain).is_err());
    }

    #[test]
    fn mass_estimate_requires_samples() {
        assert!(matches!(
            rho_mass_estimate(0, 8, 2.0, 0, &Sequential),
            Err(MeasureError::TooFewSamples { .. })
        ));
        let est = rho_mass_estimate(0, 8, 2.0, 200, &Sequential).unwrap();
        assert!(est.mean > 0.0 && est.mean <= 1.0);
    }

    #[test]
    fn admissibility_rule() {
        assert!(tail_admissible(0.0, 4.0));
        assert!(tail_admissible(0.4, 3.0));
        assert!(!tail_admissible(0.5, 3.0));
        assert!(!tail_admissible(0.3, 4.0));
        assert!(!tail_admissible(0.0, 1.5));
    }

    #[test]
    fn tail_edge_cases() {
        let cfg = TailConfig {
            seed: 1,
            modes: 16,
            base_modes: 16,
            s: 0.0,
            p: 4.0,
            lambda_grid: alloc::vec![0.0, 0.5, 1.0],
            samples: 50,
        };
        let est = tail_probability(&cfg, &Sequential).unwrap();
        assert_eq!(est.prob, [0.0, 0.0, 0.0]);
        let cfg = TailConfig {
            base_modes: 1,
            ..cfg
        };
        let est = tail_probability(&cfg, &Sequential).unwrap();
        assert_eq!(est.prob[0], 1.0);
        assert!(est.prob.windows(2).all(|w| w[1] <= w[0]));
        let bad = TailConfig { s: 0.4, ..cfg };
        assert!(tail_probability(&bad, &Sequential).is_err());
    }

    #[test]
    fn zero_vector_moment_ratio() {
        let r = moment_growth(
            &[Complex64::new(0.0, 0.0); 3],
            &[2.0, 4.0],
            10,
            0,
            &Sequential,
        );
        assert_eq!(r, [0.0, 0.0]);
    }
}
