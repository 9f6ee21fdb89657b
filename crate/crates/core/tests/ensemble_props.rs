use diskstat_core::ensemble::{
    covariance_exact, decoupling_residual, joint_cumulant_exact, log_mgf_exact, mean_exact, radii, variance_exact,
    ExactEngine,
};
use diskstat_core::{EnsembleParams, Fugacities, MergeConfig, Regime};
use proptest::prelude::*;

fn sorted_radii(raw: Vec<f64>) -> Vec<f64> {
    let mut r = raw;
    r.sort_by(f64::total_cmp);
    r.dedup_by(|a, b| (*a - *b).abs() < 1e-3);
    r
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn zero_fugacity_gives_zero(b in 0.3f64..3.0, alpha in -0.9f64..2.0, n in 1usize..400,
                                raw in prop::collection::vec(0.05f64..1.5, 1..5)) {
        let p = EnsembleParams::new(b, alpha, n).unwrap();
        let r = sorted_radii(raw);
        prop_assert_eq!(log_mgf_exact(&p, &r, &Fugacities::zeros(r.len())).unwrap(), 0.0);
    }

    #[test]
    fn zero_fugacity_radius_is_invisible(b in 0.5f64..2.0, n in 1usize..300, u1 in -2.0f64..2.0, u2 in -2.0f64..2.0) {
        let p = EnsembleParams::new(b, 0.3, n).unwrap();
        let with = log_mgf_exact(&p, &[0.3, 0.55, 0.8], &Fugacities::new(vec![u1, 0.0, u2]).unwrap()).unwrap();
        let without = log_mgf_exact(&p, &[0.3, 0.8], &Fugacities::new(vec![u1, u2]).unwrap()).unwrap();
        prop_assert!((with - without).abs() < 1e-12 * with.abs().max(1.0));
    }

    #[test]
    fn log_mgf_is_convex_and_increasing(n in 1usize..200, r in 0.1f64..1.2, u in -3.0f64..3.0) {
        let p = EnsembleParams::new(1.0, 0.0, n).unwrap();
        let f = |v: f64| log_mgf_exact(&p, &[r], &Fugacities::new(vec![v]).unwrap()).unwrap();
        let h = 0.01;
        let (lo, mid, hi) = (f(u - h), f(u), f(u + h));
        prop_assert!(hi >= mid && mid >= lo);
        prop_assert!(hi - 2.0 * mid + lo >= -1e-12 * mid.abs().max(1.0));
    }

    #[test]
    fn counts_stay_in_range(n in 1usize..300, r in 0.05f64..2.0) {
        let p = EnsembleParams::new(1.2, 0.5, n).unwrap();
        let mean = mean_exact(&p, r).unwrap();
        let var = variance_exact(&p, r).unwrap();
        prop_assert!(mean >= 0.0 && mean <= n as f64);
        prop_assert!(var >= 0.0 && var <= n as f64 / 4.0 + 1e-12);
    }
}

#[test]
fn first_and_second_cumulants_match_analytic_moments() {
    let p = EnsembleParams::new(1.0, 0.0, 600).unwrap();
    let cfg = MergeConfig::new(Regime::Bulk { r: 0.6 }, vec![-0.3, 0.4]).unwrap();
    let r = radii(&p, &cfg).unwrap();
    let k10 = joint_cumulant_exact(&p, &r, &[1, 0]).unwrap().value;
    let k02 = joint_cumulant_exact(&p, &r, &[0, 2]).unwrap().value;
    let k11 = joint_cumulant_exact(&p, &r, &[1, 1]).unwrap().value;
    assert!((k10 - mean_exact(&p, r[0]).unwrap()).abs() < 1e-10);
    assert!((k02 - variance_exact(&p, r[1]).unwrap()).abs() < 1e-7);
    assert!((k11 - covariance_exact(&p, r[0], r[1]).unwrap()).abs() < 1e-7);
}

#[test]
fn separated_radii_decouple() {
    let p = EnsembleParams::new(1.0, 0.0, 500).unwrap();
    let res = decoupling_residual(&p, &[0.4, 0.7], &Fugacities::new(vec![0.3, -0.2]).unwrap()).unwrap();
    assert!(res.abs() < 1e-6);
    let c = covariance_exact(&p, 0.4, 0.7).unwrap();
    assert!(c.abs() < 1e-20);
}

#[test]
fn engine_rejects_bad_input() {
    let p = EnsembleParams::new(1.0, 0.0, 10).unwrap();
    assert!(ExactEngine::new(&p, &[0.5, 0.4]).is_err());
    assert!(ExactEngine::new(&p, &[-0.1]).is_err());
    let e = ExactEngine::new(&p, &[0.5]).unwrap();
    assert!(e.log_mgf(&[0.1, 0.2]).is_err());
    assert!(e.cumulant(&[7], Default::default()).is_err());
    assert!(EnsembleParams::new(0.0, 0.0, 10).is_err());
    assert!(EnsembleParams::new(1.0, -1.0, 10).is_err());
    assert!(EnsembleParams::new(1.0, 0.0, 0).is_err());
}
