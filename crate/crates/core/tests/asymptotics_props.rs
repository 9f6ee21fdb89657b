use diskstat_core::asymptotics::closed_form::{bulk_c11, edge_c11, edge_c2, edge_d1};
use diskstat_core::asymptotics::{
    closed_form_moments, clt_covariance, cumulant_asymptotics, expansion_coeffs, Kernels, QuadratureSpec,
};
use diskstat_core::{MergeConfig, Regime};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn offsets(raw: Vec<f64>) -> Vec<f64> {
    let mut s = raw;
    s.sort_by(f64::total_cmp);
    s.dedup_by(|a, b| (*a - *b).abs() < 1e-2);
    s
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn kernels_positive_and_reflect(t in -10.0f64..10.0,
                                    u in prop::collection::vec(-6.0f64..6.0, 1..5),
                                    raw in prop::collection::vec(-3.0f64..3.0, 4)) {
        let s = offsets(raw);
        let m = u.len().min(s.len());
        let k = Kernels::new(&u[..m], &s[..m]).unwrap();
        prop_assert!(k.h1(t) > 0.0 && k.h2(t) > 0.0);
        let total: f64 = u[..m].iter().sum();
        let rhs = total.exp() * k.h2(-t);
        prop_assert!((k.h1(t) - rhs).abs() <= 1e-12 * k.h1(t));
    }

    #[test]
    fn edge_variance_coefficient_positive(b in 0.2f64..4.0, s in -6.0f64..6.0) {
        prop_assert!(edge_c2(b, s) > 0.0);
    }

    #[test]
    fn c11_bounded_by_diagonal(b in 0.3f64..3.0, sl in -2.0f64..2.0, gap in 0.01f64..3.0) {
        let quad = QuadratureSpec::default();
        let sk = sl + gap;
        let bulk = bulk_c11(b, 0.5, sl, sk, &quad).unwrap();
        let diag = bulk_c11(b, 0.5, sl, sl, &quad).unwrap();
        prop_assert!(bulk > 0.0 && bulk < diag);
        let edge = edge_c11(b, sl, sk, &quad).unwrap();
        prop_assert!(edge > 0.0 && edge <= (edge_c2(b, sl) * edge_c2(b, sk)).sqrt());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn clt_matrix_is_a_correlation_matrix(edge in any::<bool>(), b in 0.5f64..2.5,
                                          raw in prop::collection::vec(-2.5f64..2.5, 2..5)) {
        let s = offsets(raw);
        let regime = if edge { Regime::Edge } else { Regime::Bulk { r: 0.5 / b.powf(0.5 / b) } };
        let cfg = MergeConfig::new(regime, s.clone()).unwrap();
        let sigma = clt_covariance(b, 0.0, &cfg, &QuadratureSpec::default()).unwrap();
        let m = s.len();
        let mat = DMatrix::from_fn(m, m, |i, j| sigma[i][j]);
        prop_assert!((&mat - mat.transpose()).amax() == 0.0);
        let eig = mat.symmetric_eigenvalues();
        prop_assert!(eig.iter().all(|&e| e > -1e-12), "eigenvalues {eig}");
        for (i, row) in sigma.iter().enumerate() {
            prop_assert_eq!(row[i], 1.0);
        }
    }

    #[test]
    fn zero_fugacity_wall_leaves_coefficients(edge in any::<bool>(), u1 in -1.0f64..1.0, u2 in -1.0f64..1.0) {
        let quad = QuadratureSpec::default();
        let regime = if edge { Regime::Edge } else { Regime::Bulk { r: 0.6 } };
        let base = MergeConfig::new(regime, vec![-0.4, 0.9]).unwrap();
        let walled = MergeConfig::new(regime, vec![-0.4, 0.2, 0.9]).unwrap();
        let a = expansion_coeffs(1.3, 0.2, &base, &[u1, u2], &quad).unwrap();
        let b = expansion_coeffs(1.3, 0.2, &walled, &[u1, 0.0, u2], &quad).unwrap();
        for (x, y) in a.c.iter().zip(b.c) {
            prop_assert!((x - y).abs() <= 1e-11 * x.abs().max(1e-3));
        }
    }
}

#[test]
fn ginibre_edge_mean_constant_vanishes_at_zero_offset() {
    assert!(edge_d1(1.0, 0.0, 0.0).abs() < 1e-16);
}

#[test]
fn bulk_variance_leading_term() {
    let quad = QuadratureSpec::default();
    let cfg = MergeConfig::new(Regime::Bulk { r: 0.7 }, vec![0.25]).unwrap();
    let d = cumulant_asymptotics(1.4, 0.3, &cfg, &[2], &quad).unwrap();
    let want = 1.4 * 0.7f64.powf(1.4) / std::f64::consts::PI.sqrt();
    assert!((d[1].value - want).abs() < 1e-9 * want);
    let cf = closed_form_moments(1.4, 0.3, &cfg, &quad).unwrap();
    assert!((cf.variance[0].sqrt_n - want).abs() < 1e-15);
}

#[test]
fn outside_droplet_rejected() {
    let quad = QuadratureSpec::default();
    let cfg = MergeConfig::new(Regime::Bulk { r: 1.2 }, vec![0.0]).unwrap();
    assert!(expansion_coeffs(1.0, 0.0, &cfg, &[0.1], &quad).is_err());
    assert!(closed_form_moments(1.0, 0.0, &cfg, &quad).is_err());
    let cfg = MergeConfig::new(Regime::Edge, vec![0.0, 1.0]).unwrap();
    assert!(cumulant_asymptotics(1.0, 0.0, &cfg, &[3, 2], &quad).is_err());
}
