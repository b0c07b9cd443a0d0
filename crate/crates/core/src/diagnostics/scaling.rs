//! Power-law growth of single-mode norms in the mode index.

use alloc::vec::Vec;
use core::f64::consts::PI;

use super::time_zero_lp_power;
use crate::spectral::{eigenfunction, grid_angles, lp_norm_moduli};
use crate::stats::{log_log_fit, FitResult};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NormFamily {
    /// `‖e_n‖_{L^p(S³)}` on zonal functions.
    Eigen { p: f64 },
    /// `‖f_n‖_{L^p(r² dr)}`, `f_n = Ω_0 e_n` at `t = 0`.
    Physical { p: f64 },
}

/// Norm of the `n`-th member on an `8n`-interval angle grid.
pub fn family_norm(family: NormFamily, n: usize) -> f64 {
    let grid = 8 * n.max(1);
    let values: Vec<f64> = grid_angles(grid)
        .map(|r| eigenfunction(n, r).expect("interior angle"))
        .collect();
    match family {
        NormFamily::Eigen { p } => lp_norm_moduli(&values, p).expect("exponent at least 1"),
        NormFamily::Physical { p } => {
            let at_pi = eigenfunction(n, PI).expect("endpoint angle");
            libm::pow(time_zero_lp_power(&values, at_pi, p), 1.0 / p)
        }
    }
}

/// Log-log fit of [`family_norm`] over `points` log-spaced integers in `n_window`.
pub fn scaling_fit(
    family: NormFamily,
    n_window: (usize, usize),
    points: usize,
) -> Option<FitResult> {
    let (lo, hi) = n_window;
    assert!(lo >= 1 && hi > lo && points >= 2);
    let mut ns: Vec<usize> = crate::stats::geometric_grid(lo as f64, hi as f64, points)
        .into_iter()
        .map(|x| libm::round(x) as usize)
        .collect();
    ns.dedup();
    let xs: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
    let ys: Vec<f64> = ns.iter().map(|&n| family_norm(family, n)).collect();
    log_log_fit(&xs, &ys)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orthonormal_family_is_flat() {
        let fit = scaling_fit(NormFamily::Eigen { p: 2.0 }, (2, 512), 12).unwrap();
        assert!(fit.slope.abs() < 1e-10);
        assert!((family_norm(NormFamily::Eigen { p: 2.0 }, 37) - 1.0).abs() < 1e-13);
    }

    #[test]
    fn first_physical_mode_oracle() {
        // f_1 = 2√(2/π)/(1 + r²): ‖f_1‖²_{L²(r² dr)} = 2
        assert!((family_norm(NormFamily::Physical { p: 2.0 }, 1) - libm::sqrt(2.0)).abs() < 1e-13);
    }

    #[test]
    fn growth_exponents() {
        let e6 = scaling_fit(NormFamily::Eigen { p: 6.0 }, (64, 1024), 10).unwrap();
        assert!((e6.slope - 0.5).abs() < 0.1, "slope {}", e6.slope);
        let f2 = scaling_fit(NormFamily::Physical { p: 2.0 }, (64, 1024), 10).unwrap();
        assert!((f2.slope - 0.5).abs() < 0.1, "slope {}", f2.slope);
    }
}
