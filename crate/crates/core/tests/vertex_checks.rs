use qgeo_core::linalg::{min_eigenvalue, sym_determinant};
use qgeo_core::state_model::{qfm, qgt};
use qgeo_core::vertex::{
    build_informative_vertex, build_vertex_povm, frm_at_mismatch, frm_limit, mvdds,
    sample_su3_point, DerivativeOverlap, MismatchSpec, MvddsConfig, Su3Plane,
};

#[test]
fn mvdds_bracketed_by_metric_and_limit() {
    let cfg = MvddsConfig::default();
    for plane in Su3Plane::ALL {
        for i in 0..4 {
            let full = sample_su3_point(17, i);
            let (model, theta) = plane.submanifold(&full).unwrap();
            let r = mvdds(&model, &theta, &cfg).unwrap();
            assert!(r.mvdds_sq <= r.det_gf + 1e-6, "{plane:?} {i}: {r:?}");
            let ov = DerivativeOverlap::compute(&model, &theta).unwrap();
            let limit = sym_determinant(&ov.limit_metric());
            assert!(r.mvdds_sq >= limit - 1e-6, "{plane:?} {i}: {} < {limit}", r.mvdds_sq);
        }
    }
}

#[test]
fn mvdds_stable_under_refinement() {
    let coarse = MvddsConfig::default();
    let fine = MvddsConfig {
        grid: 2 * coarse.grid,
        r0: 0.5 * coarse.r0,
        ..coarse
    };
    for plane in Su3Plane::ALL {
        let full = sample_su3_point(23, 0);
        let (model, theta) = plane.submanifold(&full).unwrap();
        let a = mvdds(&model, &theta, &coarse).unwrap().mvdds_sq;
        let b = mvdds(&model, &theta, &fine).unwrap().mvdds_sq;
        assert!((a - b).abs() <= 2e-3 * a.abs().max(1e-6), "{plane:?}: {a} vs {b}");
    }
}

#[test]
fn vertex_measurements_respect_matrix_bound() {
    for plane in Su3Plane::ALL {
        for i in 0..5u64 {
            let full = sample_su3_point(41, i);
            let (model, theta) = plane.submanifold(&full).unwrap();
            let q = qgt(&model, &theta, 1e-5).unwrap();
            let lambda = [q.metric[(0, 0)].sqrt(), q.metric[(1, 1)].sqrt()];
            let t = 0.3 * i as f64;
            let povm = build_vertex_povm(&model, &theta, t, 1.1 * t).unwrap();
            let spec = MismatchSpec { r: 1e-3, chi: 0.7 * i as f64, lambda };
            let gi = frm_at_mismatch(&model, &povm, &spec, 1e-4).unwrap();
            let moved = theta.offset(&spec.offset());
            let gf = qfm(&qgt(&model, &moved, 1e-5).unwrap());
            assert!(min_eigenvalue(&(&gf.entries - &gi.entries)) >= -1e-8);
        }
    }
}

#[test]
fn informative_vertex_reaches_limit_metric() {
    let radii = [4e-3, 2e-3, 1e-3, 5e-4];
    let mut checked = 0;
    for i in 0..40u64 {
        let plane = Su3Plane::ALL[(i % 3) as usize];
        let (model, theta) = plane.submanifold(&sample_su3_point(5, i)).unwrap();
        let ov = DerivativeOverlap::compute(&model, &theta).unwrap();
        if ov.ov_alpha.sin() <= 0.1 {
            continue;
        }
        let povm = build_informative_vertex(&model, &theta, 0).unwrap();
        let (limit, _) = frm_limit(&model, &povm, 0.0, &radii, 1e-4).unwrap();
        let expected = ov.limit_metric();
        assert!((&limit - &expected).abs().max() < 1e-5, "{limit} vs {expected}");
        let det = (ov.lambda1 * ov.lambda2 * ov.ov_alpha.sin()).powi(2);
        assert!((sym_determinant(&limit) - det).abs() < 1e-5);
        checked += 1;
    }
    assert!(checked >= 10);
}
