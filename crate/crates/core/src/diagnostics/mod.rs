//! Monte Carlo and deterministic checks of the qualitative statements about
//! the flow and its random data: integrability of the time-zero field,
//! spatial decay, regularity at null infinity, norm scaling, bounds along the
//! flow, and the scattering rate.

mod flow_bound;
mod localization;
mod lp_scan;
mod scaling;
mod scattering_fit;
mod strichartz;

use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;

pub use flow_bound::{
    bound_flow_config, flow_bound_from, flow_bound_record, flow_bound_scan, FlowBoundConfig,
    FlowBoundRecord, FlowBoundReport,
};
pub use localization::{
    angle_series, localization_exponent, localization_fit, localization_identity_error,
    modulus_exponent, modulus_fit, EnsembleFit, ModulusGrid,
};
pub use lp_scan::{lp_membership_scan, second_moment_profile, Behaviour, LpScan, LpScanConfig};
pub use scaling::{family_norm, scaling_fit, NormFamily};
pub use scattering_fit::{
    scattering_fit, scattering_residual_norm, ScatterFitConfig, ScatterFitRecord, ScatterFitReport,
};
pub use strichartz::{strichartz_ratio, strichartz_scan, StrichartzRow};

/// Per-sample outputs of an ensemble run, keyed by the sample's stream index.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EnsembleRecord {
    pub seed_index: u64,
    pub metrics: Vec<(String, f64)>,
    pub verdicts: Vec<(String, bool)>,
}

impl EnsembleRecord {
    pub fn new(seed_index: u64) -> Self {
        Self {
            seed_index,
            ..Self::default()
        }
    }

    pub fn metric(mut self, name: &str, value: f64) -> Self {
        self.metrics.push((name.into(), value));
        self
    }

    pub fn verdict(mut self, name: &str, value: bool) -> Self {
        self.verdicts.push((name.into(), value));
        self
    }
}

/// `∫_0^π (1 + cos R)^{p-3} |v(R)|^p sin²R dR`, which equals
/// `‖Ω_0 v‖^p_{L^p(r² dr)}` under `r = tan(R/2)`.
///
/// `values` holds `v` at the interior nodes `jπ/M` and `at_pi` its value at
/// `R = π`. Trapezoid rule; the `R = π` node contributes `2|v(π)|²` for
/// `p = 2` and nothing for `p > 2`. Exact for real zonal polynomials of
/// degree `d` when `p` is an even integer with `p(d-1) + 3 < 2M`.
pub fn time_zero_lp_power(values: &[f64], at_pi: f64, p: f64) -> f64 {
    let grid = values.len() + 1;
    let h = PI / grid as f64;
    let mut sum = 0.0;
    for (j, &v) in values.iter().enumerate() {
        let angle = (j + 1) as f64 * h;
        let s = libm::sin(angle);
        // 1 + cos R = 2 cos²(R/2) keeps relative accuracy near R = π
        let c = libm::cos(0.5 * angle);
        let one_plus_cos = 2.0 * c * c;
        sum += crate::spectral::abs_pow(v, p) * s * s * libm::pow(one_plus_cos, p - 3.0);
    }
    if p == 2.0 {
        sum += 0.5 * 2.0 * at_pi * at_pi;
    }
    h * sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{eigenfunction, ZonalTransform};

    #[test]
    fn time_zero_norm_of_first_mode() {
        // f_1 = 2√(2/π)/(1+r²): ∫ f_1² r² dr = (8/π)(π/4) = 2, ∫ f_1⁴ r² dr = (64/π²)(π/32) = 2/π
        let grid = 64;
        let values: Vec<f64> = crate::spectral::grid_angles(grid)
            .map(|r| eigenfunction(1, r).unwrap())
            .collect();
        let at_pi = eigenfunction(1, PI).unwrap();
        assert!((time_zero_lp_power(&values, at_pi, 2.0) - 2.0).abs() < 1e-13);
        assert!((time_zero_lp_power(&values, at_pi, 4.0) - 2.0 / PI).abs() < 1e-13);
    }

    #[test]
    fn time_zero_norm_matches_radial_quadrature() {
        // v = e_1 - 0.5 e_3, p = 4, against a fine Riemann sum in r = tan x
        let a = [1.0, 0.0, -0.5];
        let transform = ZonalTransform::new(32);
        let values = transform.synthesize_real(&a);
        let at_pi = crate::spectral::zonal_value(&a, PI);
        let fast = time_zero_lp_power(&values, at_pi, 4.0);
        let steps = 200_000;
        let dx = 0.5 * PI / steps as f64;
        let mut slow = 0.0;
        for k in 1..steps {
            let x = k as f64 * dx;
            let r = libm::tan(x);
            let omega = 2.0 / (1.0 + r * r);
            let f = omega * crate::spectral::zonal_value(&a, 2.0 * x);
            let jac = 1.0 + r * r;
            slow += libm::pow(f.abs(), 4.0) * r * r * jac * dx;
        }
        assert!((fast - slow).abs() < 1e-9 * fast, "{fast} vs {slow}");
    }
}
