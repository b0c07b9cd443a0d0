use penrose_nlw_core::dynamics::{linear_propagator, FlowConfig, GalerkinSystem};
use penrose_nlw_core::measures::{density_weight, sample_mu, WeightVariant};
use penrose_nlw_core::penrose::{forward_map, inverse_map};
use penrose_nlw_core::rng::RngStreamSpec;
use penrose_nlw_core::spectral::{sobolev_norm, ZonalCoeffs, ZonalTransform};
use penrose_nlw_core::Complex64;
use proptest::prelude::*;

fn coeffs(modes: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-3.0..3.0f64, -3.0..3.0f64), modes)
        .prop_map(|v| v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn transform_roundtrip_and_parseval(c in (1usize..40).prop_flat_map(coeffs)) {
        let grid = 4 * c.len().max(8);
        let tr = ZonalTransform::new(grid);
        let field = tr.synthesize(&c);
        let back = tr.analyze(&field, c.len());
        let scale = c.iter().map(|z| z.norm()).fold(1.0, f64::max);
        for (x, y) in c.iter().zip(&back) {
            prop_assert!((x - y).norm() < 1e-12 * scale);
        }
        let l2: f64 = field.iter().zip(tr.weights()).map(|(v, w)| w * v.norm_sqr()).sum();
        let parseval: f64 = c.iter().map(|z| z.norm_sqr()).sum();
        prop_assert!((l2 - parseval).abs() < 1e-11 * parseval.max(1.0));
    }

    #[test]
    fn chart_roundtrip(lt in -3.0..3.0f64, lr in -3.0..3.0f64, sign in prop::bool::ANY) {
        let t = if sign { 10f64.powf(lt) } else { -10f64.powf(lt) };
        let r = 10f64.powf(lr);
        let p = forward_map(t, r);
        let (t2, r2) = inverse_map(p.cyl_time, p.cyl_angle).unwrap();
        prop_assert!((t2 - t).abs() < 1e-10 * (1.0 + t.abs() + r));
        prop_assert!((r2 - r).abs() < 1e-10 * (1.0 + t.abs() + r));
        let direct = libm::cos(p.cyl_time) + libm::cos(p.cyl_angle);
        prop_assert!((p.omega - direct).abs() < 1e-12);
    }

    #[test]
    fn free_flow_is_an_isometry(c in (1usize..32).prop_flat_map(coeffs), time in -10.0..10.0f64, s in -1.0..2.0f64) {
        let u = ZonalCoeffs::new(c).unwrap();
        let v = linear_propagator(&u, time);
        let (a, b) = (sobolev_norm(&u, s), sobolev_norm(&v, s));
        prop_assert!((a - b).abs() < 1e-13 * a.max(1.0));
    }

    #[test]
    fn density_weight_is_a_probability_factor(seed in 0u64..1000, alpha in 2.0..2.99f64) {
        let u = sample_mu(RngStreamSpec::new(seed, 0), 16).coeffs;
        for variant in [WeightVariant::Plain, WeightVariant::Smoothed] {
            let w = density_weight(&u, alpha, 64, variant).unwrap();
            prop_assert!(w > 0.0 && w <= 1.0);
        }
    }

    #[test]
    fn energy_is_nonnegative(c in coeffs(12), alpha in 2.0..2.99f64, time in -3.1..3.1f64) {
        let sys = GalerkinSystem::new(&FlowConfig::new(alpha, 12)).unwrap();
        let kinetic: f64 = c.iter().enumerate().map(|(k, z)| ((k + 1) * (k + 1)) as f64 * z.norm_sqr()).sum();
        let e = sys.energy(&c, time);
        prop_assert!(e >= 0.5 * kinetic * (1.0 - 1e-15));
    }

    #[test]
    fn sampling_is_reproducible(seed in any::<u64>(), index in 0u64..1 << 40) {
        let a = sample_mu(RngStreamSpec::new(seed, index), 8).coeffs;
        let b = sample_mu(RngStreamSpec::new(seed, index), 8).coeffs;
        prop_assert_eq!(a, b);
    }
}
