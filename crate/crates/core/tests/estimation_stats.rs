use qgeo_core::estimation::{
    bootstrap_stderr, covariance, run_estimation, EstimationOptions, EstimationRun,
};
use qgeo_core::linalg::{sym_sqrt, RMatrix};
use qgeo_core::state_model::Sphere;
use qgeo_core::statistical::{frm, FrmOptions};
use qgeo_core::{ParamPoint, Povm, Sequential};

const M: u64 = 100_000;

fn truth() -> ParamPoint {
    ParamPoint::new(vec![0.9, 0.6]).unwrap()
}

fn run(trials: usize, seed: u64) -> EstimationRun {
    run_estimation(
        &Sphere,
        &Povm::computational(3),
        &truth(),
        M,
        trials,
        seed,
        EstimationOptions::default(),
        &Sequential,
    )
    .unwrap()
}

fn moments(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let c = |k: i32| xs.iter().map(|x| (x - mean).powi(k)).sum::<f64>() / n;
    let var = c(2);
    (c(3) / var.powf(1.5), c(4) / (var * var))
}

#[test]
fn identical_seed_gives_identical_run() {
    assert_eq!(run(20, 8), run(20, 8));
    assert_ne!(run(20, 8).estimates, run(20, 9).estimates);
}

#[test]
fn standardized_estimates_look_gaussian() {
    let r = run(400, 2024);
    assert_eq!(r.dropped, 0);
    let gi = frm(&Sphere, &Povm::computational(3), &truth(), FrmOptions::default()).unwrap();
    let root = sym_sqrt(&gi.entries);
    let scale = 2.0 * (M as f64).sqrt();
    let z: Vec<Vec<f64>> = r
        .estimates
        .iter()
        .map(|e| {
            let d = nalgebra::DVector::from_iterator(
                2,
                e.coords().iter().zip(truth().coords()).map(|(a, b)| a - b),
            );
            (&root * d * scale).as_slice().to_vec()
        })
        .collect();
    for k in 0..2 {
        let col: Vec<f64> = z.iter().map(|row| row[k]).collect();
        let (skew, kurt) = moments(&col);
        assert!(skew.abs() < 0.2, "coordinate {k}: skewness {skew}");
        assert!((kurt - 3.0).abs() < 0.5, "coordinate {k}: kurtosis {kurt}");
    }
}

#[test]
fn mean_estimate_is_unbiased() {
    let r = run(200, 77);
    let n = r.estimates.len() as f64;
    for k in 0..2 {
        let xs: Vec<f64> = r.estimates.iter().map(|e| e.coords()[k]).collect();
        let mean = xs.iter().sum::<f64>() / n;
        let sd = (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
        assert!((mean - truth().coords()[k]).abs() < 5.0 * sd / n.sqrt());
    }
}

#[test]
fn covariance_reaches_inverse_fisher_metric() {
    let r = run(400, 31);
    let gi = frm(&Sphere, &Povm::computational(3), &truth(), FrmOptions::default()).unwrap();
    let target = gi.entries.clone().try_inverse().unwrap();
    let rows: Vec<Vec<f64>> = r.estimates.iter().map(|e| e.coords().to_vec()).collect();
    let stat = |rows: &[Vec<f64>]| -> Vec<f64> {
        let s: RMatrix = covariance(rows, truth().coords(), false) * (4.0 * M as f64);
        s.as_slice().to_vec()
    };
    let se = bootstrap_stderr(&rows, 200, 5, stat);
    let scaled = r.covariance.entries.clone() * (4.0 * M as f64);
    for (k, (&a, &b)) in scaled.as_slice().iter().zip(target.as_slice()).enumerate() {
        assert!((a - b).abs() < 3.0 * se[k], "entry {k}: {a} vs {b} (se {})", se[k]);
    }
}
