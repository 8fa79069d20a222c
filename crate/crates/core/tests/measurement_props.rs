use proptest::prelude::*;
use qgeo_core::linalg::{min_eigenvalue, sym_determinant, RMatrix};
use qgeo_core::qcri::{check_det_qcri, check_matrix_order, psd_det_lemma_property};
use qgeo_core::state_model::{qfm, qgt, Coherent, Cpn, Su11, Su3Euler};
use qgeo_core::statistical::{frm, FrmOptions};
use qgeo_core::estimation::CovarianceMatrix;
use qgeo_core::{ParamPoint, Povm, StateModel};

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        ..ProptestConfig::default()
    }
}

fn model(which: usize) -> Box<dyn StateModel> {
    match which {
        0 => Box::new(Su3Euler),
        1 => Box::new(Cpn::new(2).unwrap()),
        2 => Box::new(Coherent::new(16, 1.0).unwrap()),
        _ => Box::new(Su11::new(0.75, 50, 0.5).unwrap()),
    }
}

fn point(m: &dyn StateModel, u: &[f64]) -> ParamPoint {
    let mut t: Vec<f64> = m
        .domain()
        .iter()
        .zip(u)
        .map(|(iv, u)| iv.lo + iv.width() * (0.1 + 0.8 * u))
        .collect();
    if m.slack(&t) < 0.1 {
        let n = m.param_dim() / 2;
        let r2: f64 = t[..n].iter().map(|x| x * x).sum();
        for x in &mut t[..n] {
            *x *= (0.8 / r2).sqrt();
        }
    }
    ParamPoint::new(t).unwrap()
}

fn psd(d: usize, entries: &[f64]) -> RMatrix {
    let a = RMatrix::from_column_slice(d, d, &entries[..d * d]);
    &a * a.transpose()
}

proptest! {
    #![proptest_config(config(60))]

    #[test]
    fn classical_metric_below_quantum(which in 0usize..4, extra in 0usize..4, seed in any::<u64>(),
                                      u in prop::collection::vec(0.0..1.0f64, 4)) {
        let m = model(which);
        let theta = point(m.as_ref(), &u[..m.param_dim()]);
        let povm = Povm::random_rank_one(m.dim(), m.dim() + extra, seed).unwrap();
        let gi = frm(m.as_ref(), &povm, &theta, FrmOptions::default()).unwrap();
        let gf = qfm(&qgt(m.as_ref(), &theta, 1e-5).unwrap());
        let (ok, min) = check_matrix_order(&gf, &gi).unwrap();
        prop_assert!(ok && min >= -1e-8, "min eigenvalue {min:e}");
    }

    #[test]
    fn merging_outcomes_never_adds_information(which in 0usize..4, seed in any::<u64>(),
                                               pick in (0usize..64, 0usize..64),
                                               u in prop::collection::vec(0.0..1.0f64, 4)) {
        let m = model(which);
        let theta = point(m.as_ref(), &u[..m.param_dim()]);
        let outcomes = m.dim() + 2;
        let povm = Povm::random_rank_one(m.dim(), outcomes, seed).unwrap();
        let a = pick.0 % outcomes;
        let b = (a + 1 + pick.1 % (outcomes - 1)) % outcomes;
        let mut groups = vec![vec![a, b]];
        groups.extend((0..outcomes).filter(|&i| i != a && i != b).map(|i| vec![i]));
        let coarse = povm.coarse_grain(&groups).unwrap();
        let fine = frm(m.as_ref(), &povm, &theta, FrmOptions::default()).unwrap();
        let merged = frm(m.as_ref(), &coarse, &theta, FrmOptions::default()).unwrap();
        let (ok, min) = check_matrix_order(&fine, &merged).unwrap();
        prop_assert!(ok && min >= -1e-8, "min eigenvalue {min:e}");
    }
}

proptest! {
    #![proptest_config(config(500))]

    #[test]
    fn ordered_psd_pairs_have_ordered_determinants(d in 1usize..=6,
                                                   b in prop::collection::vec(-1.0..1.0f64, 36),
                                                   gap in prop::collection::vec(-1.0..1.0f64, 36),
                                                   ridge in 1e-3..1.0f64) {
        let lower = psd(d, &b) + RMatrix::identity(d, d) * ridge;
        let upper = &lower + psd(d, &gap);
        prop_assert!(psd_det_lemma_property(&upper, &lower).unwrap());
    }

    #[test]
    fn determinant_chain_follows_from_matrix_chain(d in 1usize..=4,
                                                   a in prop::collection::vec(-1.0..1.0f64, 16),
                                                   b in prop::collection::vec(-1.0..1.0f64, 16),
                                                   c in prop::collection::vec(-1.0..1.0f64, 16),
                                                   m in 1u64..1000) {
        // g^F >= g^I > 0 and 4 m Sigma >= (g^I)^{-1}
        let gi = psd(d, &a) + RMatrix::identity(d, d) * 0.1;
        let gf = &gi + psd(d, &b);
        let inv = gi.clone().try_inverse().unwrap();
        let sigma = (&inv + psd(d, &c)) / (4.0 * m as f64);
        let gf = qgeo_core::MetricMatrix::new(gf, qgeo_core::MetricKind::Qfm).unwrap();
        let gi = qgeo_core::MetricMatrix::new(gi, qgeo_core::MetricKind::Frm).unwrap();
        let sigma = CovarianceMatrix::new(sigma, 100).unwrap();
        let report = check_det_qcri(&gf, &gi, &sigma, m).unwrap();
        prop_assert!(report.matrix_ordering_ok);
        prop_assert!(report.holds(), "{report:?}");
    }
}

#[test]
fn psd_lemma_rejects_unordered_pair() {
    let a = RMatrix::identity(2, 2);
    let b = RMatrix::identity(2, 2) * 2.0;
    assert!(psd_det_lemma_property(&a, &b).is_err());
    assert!(min_eigenvalue(&(&b - &a)) > 0.0);
    assert!(sym_determinant(&b) > sym_determinant(&a));
}
