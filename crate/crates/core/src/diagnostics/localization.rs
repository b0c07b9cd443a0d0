//! Spatial decay of `f_0` and regularity of its angle profile
//! `F_0(x) = -√(2/π) Σ (-1)^n (h_n/n) sin(2nx)`, which satisfies
//! `r f_0(r) = F_0(π/2 - atan r)`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::ensemble::SampleMap;
use crate::fft::SineTransform;
use crate::measures::sample_mu;
use crate::rng::RngStreamSpec;
use crate::spectral::{sine_series, zonal_value, BASIS_SCALE};
use crate::stats::{geometric_grid, log_log_fit, median, FitResult};

/// Fit abscissae per sample.
const FIT_POINTS: usize = 60;
/// Smallest DST length used to tabulate `F_0`.
const MIN_TABLE: usize = 1 << 17;

/// Sine coefficients `b_n = -√(2/π) (-1)^n w_n/n` of `F_0` in `sin(2nx)`.
pub fn angle_series(weights: &[f64]) -> Vec<f64> {
    weights
        .iter()
        .enumerate()
        .map(|(k, w)| {
            let n = k + 1;
            let sign = if n % 2 == 0 { -1.0 } else { 1.0 };
            sign * BASIS_SCALE * w / n as f64
        })
        .collect()
}

/// `F_0` tabulated at `x_j = jπ/(2K)`, `j = 0..K`, with `F_0(0) = F_0(π/2) = 0`.
#[derive(Debug, Clone)]
pub struct ModulusGrid {
    spacing: f64,
    values: Vec<f64>,
}

impl ModulusGrid {
    /// `K = max(2^17, 8N)` rounded up to a power of two.
    pub fn new(weights: &[f64]) -> Self {
        let len = MIN_TABLE.max(8 * weights.len()).next_power_of_two();
        let series = angle_series(weights);
        let interior = SineTransform::new(len).apply_real(&series);
        let mut values = Vec::with_capacity(len + 1);
        values.push(0.0);
        values.extend(interior);
        values.push(0.0);
        Self {
            spacing: 0.5 * PI / len as f64,
            values,
        }
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `max_{x_j ≤ x} g(x_j) |F_0(x_j)|` for each query `x`, by a running maximum.
    fn running_sup(&self, queries: &[f64], weight: impl Fn(f64) -> f64) -> Vec<f64> {
        let mut order: Vec<usize> = (0..queries.len()).collect();
        order.sort_by(|&a, &b| queries[a].total_cmp(&queries[b]));
        let mut out = alloc::vec![0.0; queries.len()];
        let mut best: f64 = 0.0;
        let mut j = 0;
        for idx in order {
            let limit = queries[idx];
            while j < self.values.len() && j as f64 * self.spacing <= limit {
                let x = j as f64 * self.spacing;
                best = best.max(self.values[j].abs() * weight(x));
                j += 1;
            }
            out[idx] = best;
        }
        out
    }
}

/// Slope of `log sup_{r' ≥ r} |f_0(r')|` against `log r` over `r_window`,
/// for `f_0 = Ω_0 Σ (w_n/n) e_n`.
pub fn localization_exponent(weights: &[f64], r_window: (f64, f64)) -> Option<FitResult> {
    let grid = ModulusGrid::new(weights);
    localization_on(&grid, r_window)
}

fn localization_on(grid: &ModulusGrid, r_window: (f64, f64)) -> Option<FitResult> {
    let radii = geometric_grid(r_window.0, r_window.1, FIT_POINTS);
    let angles: Vec<f64> = radii.iter().map(|&r| libm::atan(1.0 / r)).collect();
    // |f_0(r')| = |F_0(x')| tan x' at x' = atan(1/r')
    let env = grid.running_sup(&angles, libm::tan);
    log_log_fit(&radii, &env)
}

/// Exponent of `sup_{x ≤ h} |F_0(x)|` against `h` over `h_window`.
pub fn modulus_exponent(weights: &[f64], h_window: (f64, f64)) -> Option<FitResult> {
    let grid = ModulusGrid::new(weights);
    modulus_on(&grid, h_window)
}

fn modulus_on(grid: &ModulusGrid, h_window: (f64, f64)) -> Option<FitResult> {
    let hs = geometric_grid(h_window.0, h_window.1, FIT_POINTS);
    let env = grid.running_sup(&hs, |_| 1.0);
    log_log_fit(&hs, &env)
}

/// `max |r f_0(r) - F_0(π/2 - atan r)|` over the radii, each side by its own
/// Clenshaw sum (in `R = 2 atan r` and in `2x` respectively).
pub fn localization_identity_error(weights: &[f64], radii: &[f64]) -> f64 {
    let coeffs: Vec<f64> = weights
        .iter()
        .enumerate()
        .map(|(k, w)| w / (k + 1) as f64)
        .collect();
    let series = angle_series(weights);
    radii
        .iter()
        .map(|&r| {
            let omega = 2.0 / (1.0 + r * r);
            let lhs = r * omega * zonal_value(&coeffs, 2.0 * libm::atan(r));
            let rhs = sine_series(&series, 2.0 * (0.5 * PI - libm::atan(r)));
            (lhs - rhs).abs()
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleFit {
    pub fits: Vec<Option<FitResult>>,
    /// Median over conclusive fits only.
    pub median_slope: Option<f64>,
    pub inconclusive: usize,
    /// Largest identity residual over the ensemble (localization only).
    pub identity_error: f64,
}

impl EnsembleFit {
    fn from_fits(fits: Vec<Option<FitResult>>, identity_error: f64) -> Self {
        let slopes: Vec<f64> = fits
            .iter()
            .filter_map(|f| f.and_then(|f| f.conclusive_slope()))
            .collect();
        Self {
            inconclusive: fits.len() - slopes.len(),
            median_slope: median(&slopes),
            fits,
            identity_error,
        }
    }
}

fn sample_weights(seed: u64, index: usize, modes: usize) -> Vec<f64> {
    sample_mu(RngStreamSpec::new(seed, index as u64), modes).real_weights()
}

/// Envelope decay slope per sample, plus the identity residual on the fit radii.
pub fn localization_fit<E: SampleMap>(
    seed: u64,
    modes: usize,
    r_window: (f64, f64),
    samples: usize,
    exec: &E,
) -> EnsembleFit {
    assert!(r_window.0 >= 1.0 && r_window.1 > r_window.0);
    let radii = geometric_grid(r_window.0, r_window.1, FIT_POINTS);
    let results = exec.map_indices(samples, |i| {
        let weights = sample_weights(seed, i, modes);
        let grid = ModulusGrid::new(&weights);
        (
            localization_on(&grid, r_window),
            localization_identity_error(&weights, &radii),
        )
    });
    let identity = results.iter().map(|r| r.1).fold(0.0, f64::max);
    EnsembleFit::from_fits(results.into_iter().map(|r| r.0).collect(), identity)
}

/// Modulus-of-continuity exponent of `F_0` at `0` per sample.
pub fn modulus_fit<E: SampleMap>(
    seed: u64,
    modes: usize,
    h_window: (f64, f64),
    samples: usize,
    exec: &E,
) -> EnsembleFit {
    assert!(h_window.0 > 0.0 && h_window.1 <= 0.5 && h_window.1 > h_window.0);
    let fits = exec.map_indices(samples, |i| {
        let grid = ModulusGrid::new(&sample_weights(seed, i, modes));
        modulus_on(&grid, h_window)
    });
    EnsembleFit::from_fits(fits, 0.0)
}
