//! Empirical constants in `‖S(T)u‖_{L^p([-π,π]×S³)} ≤ C ‖u‖_{H^s}`,
//! `s = 3/2 - 4/p`, for random data.

use alloc::vec::Vec;

use crate::dynamics::linear_spacetime_norm;
use crate::ensemble::SampleMap;
use crate::measures::sample_mu;
use crate::rng::RngStreamSpec;
use crate::spectral::{sobolev_norm, ZonalCoeffs};

#[derive(Debug, Clone, PartialEq)]
pub struct StrichartzRow {
    pub modes: usize,
    pub max_ratio: f64,
    pub mean_ratio: f64,
}

/// Ratio for one datum on a `4N` angle grid and `4N` periodic times;
/// zero data gives `0`.
pub fn strichartz_ratio(u: &ZonalCoeffs, p: f64) -> f64 {
    assert!(p > 8.0 / 3.0 && p < 8.0, "exponent outside (8/3, 8)");
    let s = 1.5 - 4.0 / p;
    let denom = sobolev_norm(u, s);
    if denom == 0.0 {
        return 0.0;
    }
    let n = u.modes();
    linear_spacetime_norm(u, p, p, 4 * n, 4 * n) / denom
}

pub fn strichartz_scan<E: SampleMap>(
    seed: u64,
    n_list: &[usize],
    p: f64,
    samples: usize,
    exec: &E,
) -> Vec<StrichartzRow> {
    n_list
        .iter()
        .map(|&modes| {
            let ratios = exec.map_indices(samples, |i| {
                strichartz_ratio(
                    &sample_mu(RngStreamSpec::new(seed, i as u64), modes).coeffs,
                    p,
                )
            });
            StrichartzRow {
                modes,
                max_ratio: ratios.iter().copied().fold(0.0, f64::max),
                mean_ratio: ratios.iter().sum::<f64>() / ratios.len().max(1) as f64,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::eigenfunction;
    use core::f64::consts::PI;
    use num_complex::Complex64;

    #[test]
    fn first_mode_closed_form() {
        // |e^{iT} e_1| = √(2/π): ‖·‖⁴_{L⁴} = 2π · (4/π²) · (π/2) = 4
        let u = ZonalCoeffs::basis(4, 1, Complex64::new(1.0, 0.0));
        let e1 = eigenfunction(1, 0.5).unwrap();
        let expected = libm::pow(2.0 * PI * libm::pow(e1, 4.0) * 0.5 * PI, 0.25);
        assert!((strichartz_ratio(&u, 4.0) - expected).abs() < 1e-13);
        assert!((expected - libm::sqrt(2.0)).abs() < 1e-13);
        assert_eq!(strichartz_ratio(&ZonalCoeffs::zeros(4), 4.0), 0.0);
    }
}
