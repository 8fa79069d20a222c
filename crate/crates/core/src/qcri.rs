//! Matrix, determinant and weighted-trace Cramér-Rao checks.

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::estimation::CovarianceMatrix;
use crate::linalg::{min_eigenvalue, sym_determinant, sym_inverse, symmetry_deviation, RMatrix};
use crate::state_model::{berry_curvature, qgt, ParamPoint, StateModel};
use crate::statistical::MetricMatrix;

/// Eigenvalue tolerance for positive-semidefinite ordering.
pub const ORDER_TOLERANCE: f64 = -1e-9;
/// Relative slack before a chain inequality is reported as violated.
pub const CHAIN_TOLERANCE: f64 = 1e-6;

fn same_dim(a: &RMatrix, b: &RMatrix) -> Result<()> {
    if a.shape() != b.shape() || a.nrows() != a.ncols() {
        return Err(Error::Dimension {
            expected: a.nrows(),
            found: b.nrows(),
        });
    }
    Ok(())
}

/// Whether `a - b` is positive semidefinite, with its smallest eigenvalue.
pub fn check_matrix_order(a: &MetricMatrix, b: &MetricMatrix) -> Result<(bool, f64)> {
    order(&a.entries, &b.entries)
}

fn order(a: &RMatrix, b: &RMatrix) -> Result<(bool, f64)> {
    same_dim(a, b)?;
    let min = min_eigenvalue(&(a - b));
    Ok((min >= ORDER_TOLERANCE, min))
}

/// Evaluation of `sqrt(m^d |g^F|) >= sqrt(m^d |g^I|) >= 1/sqrt|4 Sigma|`.
#[derive(Debug, Clone, PartialEq)]
pub struct QcriReport {
    pub m: u64,
    pub matrix_ordering_ok: bool,
    /// Smallest eigenvalue of `g^F - g^I`.
    pub min_eig_quantum_classical: f64,
    /// Smallest eigenvalue of `4 m Sigma - (g^I)^{-1}`, when `g^I` is invertible.
    pub min_eig_classical_estimator: Option<f64>,
    pub det_chain: [f64; 3],
    pub left_violated: bool,
    pub right_violated: bool,
    /// `Sigma` was singular; the right term is reported as infinite.
    pub sigma_singular: bool,
    pub weighted_trace: Option<[f64; 3]>,
}

impl QcriReport {
    pub fn holds(&self) -> bool {
        !self.left_violated && !self.right_violated
    }
}

pub fn check_det_qcri(
    gf: &MetricMatrix,
    gi: &MetricMatrix,
    sigma: &CovarianceMatrix,
    m: u64,
) -> Result<QcriReport> {
    same_dim(&gf.entries, &gi.entries)?;
    same_dim(&gf.entries, &sigma.entries)?;
    if m == 0 {
        return Err(Error::InvalidArgument("m must be at least 1".into()));
    }
    let d = gf.dim() as i32;
    let md = (m as f64).powi(d);
    let left = (md * gf.determinant().max(0.0)).sqrt();
    let mid = (md * gi.determinant().max(0.0)).sqrt();
    let det4 = 4f64.powi(d) * sym_determinant(&sigma.entries);
    let sigma_singular = !(det4 > 0.0);
    let right = if sigma_singular { f64::INFINITY } else { 1.0 / det4.sqrt() };
    let (ordering, min_q) = order(&gf.entries, &gi.entries)?;
    let min_c = sym_inverse(&gi.entries)
        .map(|inv| min_eigenvalue(&(&sigma.entries * (4.0 * m as f64) - inv)));
    Ok(QcriReport {
        m,
        matrix_ordering_ok: ordering,
        min_eig_quantum_classical: min_q,
        min_eig_classical_estimator: min_c,
        det_chain: [left, mid, right],
        left_violated: left < mid * (1.0 - CHAIN_TOLERANCE),
        right_violated: sigma_singular || mid < right * (1.0 - CHAIN_TOLERANCE),
        sigma_singular,
        weighted_trace: None,
    })
}

/// `det(a) >= det(b)` for `a >= b >= 0` with `b` positive definite.
pub fn psd_det_lemma_property(a: &RMatrix, b: &RMatrix) -> Result<bool> {
    same_dim(a, b)?;
    if symmetry_deviation(a) > 1e-10 || symmetry_deviation(b) > 1e-10 {
        return Err(Error::Precondition("matrices must be symmetric".into()));
    }
    if !(min_eigenvalue(b) > 0.0) {
        return Err(Error::Precondition("b must be positive definite".into()));
    }
    let (ordered, _) = order(a, b)?;
    if !ordered {
        return Err(Error::Precondition("a - b is not positive semidefinite".into()));
    }
    Ok(sym_determinant(a) >= sym_determinant(b) * (1.0 - 1e-12))
}

/// A symmetric positive-semidefinite cost matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMatrix {
    entries: RMatrix,
}

impl WeightMatrix {
    pub fn new(entries: RMatrix) -> Result<Self> {
        if entries.nrows() != entries.ncols() || symmetry_deviation(&entries) > 1e-10 {
            return Err(Error::InvalidArgument("weight matrix must be symmetric".into()));
        }
        if min_eigenvalue(&entries) < ORDER_TOLERANCE {
            return Err(Error::InvalidArgument("weight matrix must be positive semidefinite".into()));
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &RMatrix {
        &self.entries
    }
}

/// `(tr(G F^-1)/m, tr(G I^-1)/m, tr(G Sigma))` with `F = 4 g^F`, `I = 4 g^I`.
pub fn weighted_trace_bounds(
    g: &WeightMatrix,
    gf: &MetricMatrix,
    gi: &MetricMatrix,
    sigma: &CovarianceMatrix,
    m: u64,
) -> Result<[f64; 3]> {
    same_dim(&g.entries, &gf.entries)?;
    same_dim(&g.entries, &gi.entries)?;
    same_dim(&g.entries, &sigma.entries)?;
    let fi = sym_inverse(&(&gf.entries * 4.0)).ok_or(Error::Singular("quantum Fisher metric"))?;
    let ii = sym_inverse(&(&gi.entries * 4.0)).ok_or(Error::Singular("Fisher-Rao metric"))?;
    let m = m as f64;
    Ok([
        (&g.entries * fi).trace() / m,
        (&g.entries * ii).trace() / m,
        (&g.entries * &sigma.entries).trace(),
    ])
}

/// Gap between the quantum volume density and the vertex-measurement optimum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapReport {
    pub det_gf: f64,
    pub berry: f64,
    /// `|g^F| - mvdds_sq`.
    pub delta: f64,
    /// `B^2 / 4`.
    pub predicted: f64,
}

pub fn gap<M: StateModel + ?Sized>(model: &M, theta: &ParamPoint, mvdds_sq: f64) -> Result<GapReport> {
    if model.param_dim() != 2 {
        return Err(Error::Dimension {
            expected: 2,
            found: model.param_dim(),
        });
    }
    let q = qgt(model, theta, 1e-5)?;
    let det_gf = sym_determinant(&q.metric);
    let berry = berry_curvature(&q, 0, 1);
    Ok(GapReport {
        det_gf,
        berry,
        delta: det_gf - mvdds_sq,
        predicted: berry * berry / 4.0,
    })
}

/// Least-squares line `y = slope x + intercept`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state_model::{Su3Euler, Submanifold};
    use crate::statistical::MetricKind;
    use core::f64::consts::{FRAC_PI_4, FRAC_PI_8};

    fn diag(v: &[f64]) -> MetricMatrix {
        MetricMatrix::new(RMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(v)), MetricKind::Frm).unwrap()
    }

    #[test]
    fn ordering_examples() {
        assert_eq!(check_matrix_order(&diag(&[2.0, 2.0]), &diag(&[1.0, 1.0])).unwrap(), (true, 1.0));
        let (ok, min) = check_matrix_order(&diag(&[1.0, 2.0]), &diag(&[2.0, 1.0])).unwrap();
        assert!(!ok && (min + 1.0).abs() < 1e-12);
        assert!(check_matrix_order(&diag(&[1.0]), &diag(&[1.0, 1.0])).is_err());
    }

    #[test]
    fn efficient_covariance_is_tight() {
        let gi = MetricMatrix::new(RMatrix::from_row_slice(2, 2, &[1.0, 0.2, 0.2, 0.5]), MetricKind::Frm).unwrap();
        let m = 100;
        let sigma = sym_inverse(&(&gi.entries * (4.0 * m as f64))).unwrap();
        let sigma = CovarianceMatrix::new(sigma, 1).unwrap();
        let r = check_det_qcri(&gi, &gi, &sigma, m).unwrap();
        assert!(r.holds());
        assert!((r.det_chain[1] / r.det_chain[2] - 1.0).abs() < 1e-9);
        assert!((r.det_chain[0] / r.det_chain[1] - 1.0).abs() < 1e-12);
        let w = WeightMatrix::new(RMatrix::identity(2, 2)).unwrap();
        let t = weighted_trace_bounds(&w, &gi, &gi, &sigma, m).unwrap();
        assert!((t[0] - t[1]).abs() < 1e-12 && (t[1] - t[2]).abs() < 1e-12);
    }

    #[test]
    fn singular_sigma_is_flagged() {
        let g = diag(&[1.0, 1.0]);
        let sigma = CovarianceMatrix::new(RMatrix::zeros(2, 2), 3).unwrap();
        let r = check_det_qcri(&g, &g, &sigma, 10).unwrap();
        assert!(r.sigma_singular && r.right_violated && r.det_chain[2].is_infinite());
    }

    #[test]
    fn lemma_examples() {
        let b = RMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.0]);
        assert!(psd_det_lemma_property(&b, &b).unwrap());
        let v = nalgebra::DVector::from_row_slice(&[0.3, -0.7]);
        let a = &b + &v * v.transpose();
        assert!(psd_det_lemma_property(&a, &b).unwrap());
        // rank-one update: det a = det b (1 + v^T b^-1 v)
        let expect = sym_determinant(&b) * (1.0 + (v.transpose() * sym_inverse(&b).unwrap() * &v)[(0, 0)]);
        assert!((sym_determinant(&a) - expect).abs() < 1e-12);
        assert!(matches!(psd_det_lemma_property(&b, &a), Err(Error::Precondition(_))));
    }

    #[test]
    fn direction_weight_reduces_to_variance() {
        let n = nalgebra::DVector::from_row_slice(&[0.6, 0.8]);
        let w = WeightMatrix::new(&n * n.transpose()).unwrap();
        let gf = diag(&[2.0, 1.0]);
        let gi = diag(&[1.0, 0.5]);
        let s = RMatrix::from_row_slice(2, 2, &[0.01, 0.002, 0.002, 0.02]);
        let sigma = CovarianceMatrix::new(s.clone(), 1).unwrap();
        let t = weighted_trace_bounds(&w, &gf, &gi, &sigma, 10).unwrap();
        assert!((t[2] - (n.transpose() * &s * &n)[(0, 0)]).abs() < 1e-15);
        assert!(t[0] <= t[1]);
    }

    #[test]
    fn su3_gap_fixtures() {
        let sub = Submanifold::new(Su3Euler, alloc::vec![None, Some(0.2), Some(0.0), None]).unwrap();
        let r = gap(&sub, &ParamPoint::from_slice(&[0.5, FRAC_PI_4]).unwrap(), 0.0).unwrap();
        assert!((r.det_gf - 0.25).abs() < 1e-10 && (r.predicted - 0.25).abs() < 1e-10);
        let sub = Submanifold::new(Su3Euler, alloc::vec![None, Some(0.2), Some(FRAC_PI_8), None]).unwrap();
        let r = gap(&sub, &ParamPoint::from_slice(&[0.5, FRAC_PI_4]).unwrap(), 0.25).unwrap();
        assert!((r.det_gf - 0.375).abs() < 1e-10);
        assert!((r.predicted - 0.125).abs() < 1e-10);
        assert!((r.delta - r.predicted).abs() < 1e-10);
    }
}
