//! Growth of truncated `L^p(r² dr)` norms of the time-zero field
//! `f_0 = Ω_0 Σ (h_n/n) e_n` under nested truncation.

use alloc::vec::Vec;

use super::time_zero_lp_power;
use crate::ensemble::SampleMap;
use crate::measures::sample_mu;
use crate::rng::RngStreamSpec;
use crate::spectral::{endpoint_sum, ZonalTransform, BASIS_SCALE};
use crate::stats::{linear_fit, FitResult, MeanEstimate};

/// Number of trailing doublings inspected by the convergence verdicts.
const TRAILING_DOUBLINGS: usize = 3;
/// A doubling "grows" when it raises the mean by more than this many
/// combined standard errors.
pub const DIVERGENCE_SE: f64 = 5.0;
/// A doubling is "settled" when its change is below this many combined
/// standard errors.
pub const CAUCHY_SE: f64 = 3.0;

#[derive(Debug, Clone, PartialEq)]
pub struct LpScanConfig {
    pub seed: u64,
    pub p_list: Vec<f64>,
    /// Increasing truncation levels, each a nested prefix of the same draw.
    pub n_list: Vec<usize>,
    pub samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Behaviour {
    Converging,
    Diverging,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpScan {
    pub p_list: Vec<f64>,
    pub n_list: Vec<usize>,
    /// `norms[i][k]`: Monte Carlo mean of `‖f_0^{(N_k)}‖_{L^{p_i}}`.
    pub norms: Vec<Vec<MeanEstimate>>,
    /// Same for the `p`-th power of the norm.
    pub powers: Vec<Vec<MeanEstimate>>,
}

impl LpScan {
    fn p_index(&self, p: f64) -> usize {
        self.p_list
            .iter()
            .position(|&q| q == p)
            .expect("exponent was part of the scan")
    }

    /// `(change of the mean, combined standard error)` for each successive
    /// pair of truncation levels.
    pub fn increments(&self, p: f64) -> Vec<(f64, f64)> {
        let row = &self.norms[self.p_index(p)];
        row.windows(2)
            .map(|w| (w[1].mean - w[0].mean, w[0].combined_stderr(&w[1])))
            .collect()
    }

    /// Linear fit of the mean `‖f_0^{(N)}‖^p` against `ln N`.
    pub fn power_growth_fit(&self, p: f64) -> Option<FitResult> {
        let row = &self.powers[self.p_index(p)];
        let xs: Vec<f64> = self.n_list.iter().map(|&n| libm::log(n as f64)).collect();
        let ys: Vec<f64> = row.iter().map(|m| m.mean).collect();
        let window = (
            self.n_list[0] as f64,
            self.n_list[self.n_list.len() - 1] as f64,
        );
        linear_fit(&xs, &ys, window)
    }

    pub fn is_diverging(&self, p: f64) -> bool {
        let inc = self.increments(p);
        inc.len() >= TRAILING_DOUBLINGS
            && inc[inc.len() - TRAILING_DOUBLINGS..]
                .iter()
                .all(|&(d, se)| d > DIVERGENCE_SE * se)
    }

    pub fn is_cauchy(&self, p: f64) -> bool {
        let inc = self.increments(p);
        inc.len() >= TRAILING_DOUBLINGS
            && inc[inc.len() - TRAILING_DOUBLINGS..]
                .iter()
                .all(|&(d, se)| d.abs() < CAUCHY_SE * se)
    }

    pub fn behaviour(&self, p: f64) -> Behaviour {
        if self.is_diverging(p) {
            Behaviour::Diverging
        } else if self.is_cauchy(p) {
            Behaviour::Converging
        } else {
            Behaviour::Inconclusive
        }
    }
}

/// Per sample and truncation level, `‖f_0^{(N)}‖_{L^p(r² dr)}` for each
/// `p`, by exact quadrature on the angle grid with `M = 4 max N`.
pub fn lp_membership_scan<E: SampleMap>(cfg: &LpScanConfig, exec: &E) -> LpScan {
    assert!(!cfg.n_list.is_empty() && cfg.n_list.windows(2).all(|w| w[0] < w[1]));
    assert!(cfg.p_list.iter().all(|&p| p > 1.0 && p.is_finite()));
    let n_max = cfg.n_list[cfg.n_list.len() - 1];
    let transform = ZonalTransform::new(4 * n_max);
    let per_sample: Vec<Vec<Vec<f64>>> = exec.map_indices(cfg.samples, |i| {
        let sample = sample_mu(RngStreamSpec::new(cfg.seed, i as u64), n_max);
        let weights: Vec<f64> = sample
            .real_weights()
            .iter()
            .enumerate()
            .map(|(k, h)| h / (k + 1) as f64)
            .collect();
        cfg.n_list
            .iter()
            .map(|&n| {
                let values = transform.synthesize_real(&weights[..n]);
                let at_pi = BASIS_SCALE * endpoint_sum(&weights[..n]);
                cfg.p_list
                    .iter()
                    .map(|&p| time_zero_lp_power(&values, at_pi, p))
                    .collect()
            })
            .collect()
    });
    let mut norms = Vec::with_capacity(cfg.p_list.len());
    let mut powers = Vec::with_capacity(cfg.p_list.len());
    for (ip, &p) in cfg.p_list.iter().enumerate() {
        let mut norm_row = Vec::with_capacity(cfg.n_list.len());
        let mut power_row = Vec::with_capacity(cfg.n_list.len());
        for k in 0..cfg.n_list.len() {
            let pw: Vec<f64> = per_sample.iter().map(|s| s[k][ip]).collect();
            let nm: Vec<f64> = pw.iter().map(|v| libm::pow(*v, 1.0 / p)).collect();
            power_row.push(MeanEstimate::from_values(&pw));
            norm_row.push(MeanEstimate::from_values(&nm));
        }
        norms.push(norm_row);
        powers.push(power_row);
    }
    LpScan {
        p_list: cfg.p_list.clone(),
        n_list: cfg.n_list.clone(),
        norms,
        powers,
    }
}

/// `σ²(r) = Σ_{n≤N} f_n(r)²/n²`, the pointwise variance of `f_0^{(N)}(r)`.
pub fn second_moment_profile(modes: usize, r_grid: &[f64]) -> Vec<f64> {
    r_grid
        .iter()
        .map(|&r| {
            let omega = 2.0 / (1.0 + r * r);
            let angle = 2.0 * libm::atan(r);
            let c = libm::cos(angle);
            // sin(nR)/sin R = U_{n-1}(cos R), including both endpoint limits
            let (mut prev, mut cur) = (0.0, 1.0);
            let mut sum = 0.0;
            for n in 1..=modes {
                let f = omega * BASIS_SCALE * cur;
                sum += f * f / (n * n) as f64;
                let next = 2.0 * c * cur - prev;
                prev = cur;
                cur = next;
            }
            sum
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::Sequential;
    use crate::spectral::eigenfunction;

    #[test]
    fn profile_matches_direct_sum() {
        let r_grid = [0.0, 0.3, 1.0, 7.5, 250.0];
        let prof = second_moment_profile(20, &r_grid);
        for (&r, &v) in r_grid.iter().zip(&prof) {
            let angle = 2.0 * libm::atan(r);
            let direct: f64 = (1..=20)
                .map(|n| {
                    let f = 2.0 / (1.0 + r * r) * eigenfunction(n, angle).unwrap();
                    f * f / (n * n) as f64
                })
                .sum();
            assert!((v - direct).abs() < 1e-12 * direct.max(1e-30), "r = {r}");
        }
    }

    #[test]
    fn mean_square_matches_expectation() {
        // E‖f_0^{(N)}‖² = Σ ‖f_n‖²/n²
        let cfg = LpScanConfig {
            seed: 3,
            p_list: alloc::vec![2.0],
            n_list: alloc::vec![4, 8],
            samples: 4000,
        };
        let scan = lp_membership_scan(&cfg, &Sequential);
        let transform = ZonalTransform::new(64);
        let expected: f64 = (1..=8)
            .map(|n| {
                let mut a = alloc::vec![0.0; n];
                a[n - 1] = 1.0;
                let values = transform.synthesize_real(&a);
                time_zero_lp_power(&values, BASIS_SCALE * endpoint_sum(&a), 2.0) / (n * n) as f64
            })
            .sum();
        let est = scan.powers[0][1];
        assert!(
            (est.mean - expected).abs() < 4.0 * est.stderr,
            "{} vs {expected}",
            est.mean
        );
    }
}
