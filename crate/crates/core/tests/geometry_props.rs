use std::f64::consts::PI;

use proptest::prelude::*;
use qgeo_core::linalg::{inner, RMatrix};
use qgeo_core::state_model::{
    evaluate, idqs, intrinsic_derivative, qgt_with, Coherent, Cpn, DerivOptions, FnModel, Interval,
    Sphere, Su11, Su3Euler,
};
use qgeo_core::{Complex64, ParamPoint, StateModel};

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        ..ProptestConfig::default()
    }
}

/// Interior point of a built-in model from unit-cube coordinates.
fn interior(model: &dyn StateModel, u: &[f64]) -> ParamPoint {
    let dom = model.domain();
    let mut t: Vec<f64> = dom
        .iter()
        .zip(u)
        .map(|(iv, u)| iv.lo + iv.width() * (0.05 + 0.9 * u))
        .collect();
    // keep CP^n radial coordinates well inside the ball
    if model.slack(&t) < 0.05 {
        let n = model.param_dim() / 2;
        let r2: f64 = t[..n].iter().map(|x| x * x).sum();
        let s = (0.9 / r2).sqrt();
        for x in &mut t[..n] {
            *x *= s;
        }
    }
    ParamPoint::new(t).unwrap()
}

fn builtin(which: usize) -> Box<dyn StateModel> {
    match which {
        0 => Box::new(Su3Euler),
        1 => Box::new(Cpn::new(2).unwrap()),
        2 => Box::new(Coherent::new(30, 1.5).unwrap()),
        3 => Box::new(Su11::new(1.0, 60, 0.6).unwrap()),
        _ => Box::new(Sphere),
    }
}

fn unit4() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0..1.0f64, 4)
}

/// Copy of a built-in model with amplitudes multiplied by `exp(0.3 i t_1)`.
fn rephased(which: usize) -> FnModel {
    let base = builtin(which);
    let dom = base.domain();
    let dim = base.dim();
    FnModel::new(dim, dom, move |t| base.amplitudes(t) * Complex64::from_polar(1.0, 0.3 * t[0]))
}

proptest! {
    #![proptest_config(config(40))]

    #[test]
    fn gauge_phase_leaves_tensor_unchanged(which in 0usize..5, u in unit4()) {
        let base = builtin(which);
        let theta = interior(base.as_ref(), &u[..base.param_dim()]);
        let q0 = qgt_with(base.as_ref(), &theta, DerivOptions::numeric(1e-5)).unwrap();
        let q1 = qgt_with(&rephased(which), &theta, DerivOptions::numeric(1e-5)).unwrap();
        let dev = (&q0.entries - &q1.entries).iter().map(|z| z.norm()).fold(0.0, f64::max);
        prop_assert!(dev < 1e-6, "deviation {dev:e}");
    }

    #[test]
    fn tensor_is_hermitian(which in 0usize..5, u in unit4()) {
        let m = builtin(which);
        let theta = interior(m.as_ref(), &u[..m.param_dim()]);
        for opts in [DerivOptions::default(), DerivOptions::numeric(1e-5)] {
            let q = qgt_with(m.as_ref(), &theta, opts).unwrap();
            prop_assert!(q.hermiticity_deviation < 1e-9, "{:e}", q.hermiticity_deviation);
            let asym = (&q.entries - q.entries.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
            prop_assert!(asym == 0.0);
        }
    }

    #[test]
    fn analytic_and_numeric_tensors_agree(which in 0usize..5, u in unit4()) {
        let m = builtin(which);
        let theta = interior(m.as_ref(), &u[..m.param_dim()]);
        let a = qgt_with(m.as_ref(), &theta, DerivOptions::default()).unwrap();
        let n = qgt_with(m.as_ref(), &theta, DerivOptions::numeric(1e-5)).unwrap();
        let dev = (&a.entries - &n.entries).iter().map(|z| z.norm()).fold(0.0, f64::max);
        prop_assert!(dev < 1e-8, "deviation {dev:e}");
    }
}

proptest! {
    #![proptest_config(config(100))]

    #[test]
    fn intrinsic_derivatives_are_horizontal(which in 0usize..5, u in unit4()) {
        let m = builtin(which);
        let theta = interior(m.as_ref(), &u[..m.param_dim()]);
        let psi = evaluate(m.as_ref(), &theta).unwrap().into_inner();
        for mu in 0..m.param_dim() {
            for opts in [DerivOptions::default(), DerivOptions::numeric(1e-5)] {
                let d = intrinsic_derivative(m.as_ref(), &theta, mu, opts).unwrap();
                prop_assert!(inner(&psi, &d).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn su3_tensor_matches_closed_form(u in unit4()) {
        let theta = interior(&Su3Euler, &u);
        let q = qgt_with(&Su3Euler, &theta, DerivOptions::numeric(1e-5)).unwrap();
        let expected = su3_closed_form(theta.coords());
        let dev = (&q.entries - &expected).iter().map(|z| z.norm()).fold(0.0, f64::max);
        prop_assert!(dev < 1e-7, "deviation {dev:e}");
    }

    #[test]
    fn cp2_metric_blocks(x in prop::collection::vec(0.05..0.65f64, 2), phi in prop::collection::vec(0.0..2.0 * PI, 2)) {
        let m = Cpn::new(2).unwrap();
        let theta = ParamPoint::new(vec![x[0], x[1], phi[0], phi[1]]).unwrap();
        let g = qgt_with(&m, &theta, DerivOptions::numeric(1e-5)).unwrap().metric;
        let x0sq = 1.0 - x[0] * x[0] - x[1] * x[1];
        for a in 0..2 {
            for b in 0..2 {
                let delta = if a == b { 1.0 } else { 0.0 };
                let gx = delta + x[a] * x[b] / x0sq;
                let gphi = x[a] * x[a] * delta - x[a] * x[a] * x[b] * x[b];
                prop_assert!((g[(a, b)] - gx).abs() < 1e-8);
                prop_assert!((g[(2 + a, 2 + b)] - gphi).abs() < 1e-8);
                prop_assert!(g[(a, 2 + b)].abs() < 1e-8);
            }
        }
        let density = idqs(&m, &theta).unwrap();
        prop_assert!((density - x[0] * x[1]).abs() < 1e-8);
    }

    #[test]
    fn coherent_metric_covariance(u in prop::collection::vec(0.0..1.0f64, 2)) {
        // theta = J eta with a fixed invertible J
        let j = RMatrix::from_row_slice(2, 2, &[0.8, 0.3, -0.2, 0.6]);
        let base = Coherent::new(30, 1.5).unwrap();
        let jc = j.clone();
        let mapped = FnModel::new(base.dim(), vec![Interval::bounded(-1.5, 1.5); 2], move |eta| {
            let t = &jc * nalgebra::DVector::from_column_slice(eta);
            base.amplitudes(t.as_slice())
        });
        let eta = ParamPoint::new(vec![-1.0 + 2.0 * u[0], -1.0 + 2.0 * u[1]]).unwrap();
        let theta_v = &j * nalgebra::DVector::from_column_slice(eta.coords());
        let theta = ParamPoint::new(theta_v.as_slice().to_vec()).unwrap();
        let g_theta = qgt_with(&base, &theta, DerivOptions::default()).unwrap().metric;
        let g_eta = qgt_with(&mapped, &eta, DerivOptions::numeric(1e-5)).unwrap().metric;
        let pulled = j.transpose() * &g_theta * &j;
        prop_assert!((&g_eta - &pulled).abs().max() < 1e-8);
        let det_j = j.determinant().abs();
        let d_eta = idqs(&mapped, &eta).unwrap();
        let d_theta = idqs(&base, &theta).unwrap();
        prop_assert!((d_eta - det_j * d_theta).abs() < 1e-8);
    }
}

/// Closed-form tensor of the SU(3) Euler family in the order
/// (alpha, gamma, beta, theta).
fn su3_closed_form(t: &[f64]) -> qgeo_core::CMatrix {
    let (beta, th) = (t[Su3Euler::BETA], t[Su3Euler::THETA]);
    let (s, c) = (th.sin(), th.cos());
    let (c2, s2) = ((2.0 * beta).cos(), (2.0 * beta).sin());
    let r = |x: f64| Complex64::new(x, 0.0);
    let i = |x: f64| Complex64::new(0.0, x);
    let upper = [
        [r(s * s * (1.0 - c2 * c2 * s * s)), r(c2 * s * s * c * c), i(s2 * s * s), i(-c2 * s * c)],
        [r(0.0), r(s * s * c * c), r(0.0), i(-s * c)],
        [r(0.0), r(0.0), r(s * s), r(0.0)],
        [r(0.0), r(0.0), r(0.0), r(1.0)],
    ];
    qgeo_core::CMatrix::from_fn(4, 4, |a, b| if a <= b { upper[a][b] } else { upper[b][a].conj() })
}

#[test]
fn closed_form_helper_is_hermitian() {
    let q = su3_closed_form(&[0.1, 0.2, 0.3, 0.4]);
    assert_eq!(q, q.adjoint());
}
