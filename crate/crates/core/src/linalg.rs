//! Small dense linear-algebra helpers on top of `nalgebra`.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

pub type CVector = DVector<Complex64>;
pub type CMatrix = DMatrix<Complex64>;
pub type RMatrix = DMatrix<f64>;

pub const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// `<a|b>`, antilinear in the first argument.
pub fn inner(a: &CVector, b: &CVector) -> Complex64 {
    a.iter()
        .zip(b.iter())
        .fold(Complex64::new(0.0, 0.0), |acc, (x, y)| acc + x.conj() * y)
}

pub fn norm(a: &CVector) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `|a><b|`
pub fn outer(a: &CVector, b: &CVector) -> CMatrix {
    let n = a.len();
    CMatrix::from_fn(n, b.len(), |i, j| a[i] * b[j].conj())
}

pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn frobenius_real(m: &RMatrix) -> f64 {
    m.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Largest entrywise modulus of `m - m^dagger`.
pub fn hermiticity_deviation(m: &CMatrix) -> f64 {
    let mut dev: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

pub fn symmetry_deviation(m: &RMatrix) -> f64 {
    let mut dev: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            dev = dev.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    dev
}

pub fn symmetrize(m: &RMatrix) -> RMatrix {
    (m + m.transpose()) * 0.5
}

/// Eigenvalues of a real symmetric matrix in ascending order.
pub fn sym_eigenvalues(m: &RMatrix) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let mut ev: Vec<f64> = SymmetricEigen::new(symmetrize(m)).eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

pub fn min_eigenvalue(m: &RMatrix) -> f64 {
    sym_eigenvalues(m).first().copied().unwrap_or(0.0)
}

/// Determinant of a symmetric matrix as the product of its eigenvalues.
pub fn sym_determinant(m: &RMatrix) -> f64 {
    sym_eigenvalues(m).iter().product()
}

/// Inverse of a symmetric positive-definite matrix through its eigenbasis.
pub fn sym_inverse(m: &RMatrix) -> Option<RMatrix> {
    let eig = SymmetricEigen::new(symmetrize(m));
    let scale = eig.eigenvalues.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    if eig.eigenvalues.iter().any(|&l| l <= scale * 1e-14 || l <= 0.0) {
        return None;
    }
    let inv = DVector::from_iterator(eig.eigenvalues.len(), eig.eigenvalues.iter().map(|l| 1.0 / l));
    Some(&eig.eigenvectors * DMatrix::from_diagonal(&inv) * eig.eigenvectors.transpose())
}

/// Principal square root of a symmetric PSD matrix; negative rounding is clipped.
pub fn sym_sqrt(m: &RMatrix) -> RMatrix {
    let eig = SymmetricEigen::new(symmetrize(m));
    let root = eig.eigenvalues.map(|l| l.max(0.0).sqrt());
    &eig.eigenvectors * DMatrix::from_diagonal(&root) * eig.eigenvectors.transpose()
}

/// Eigen-decomposition of a Hermitian matrix; eigenvalues are real.
pub fn herm_eigen(m: &CMatrix) -> (Vec<f64>, Vec<CVector>) {
    let h = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(h);
    let values = eig.eigenvalues.iter().copied().collect();
    let vectors = (0..m.ncols()).map(|k| eig.eigenvectors.column(k).into_owned()).collect();
    (values, vectors)
}

/// Square root of a Hermitian PSD matrix.
pub fn psd_sqrt(m: &CMatrix) -> CMatrix {
    let (values, vectors) = herm_eigen(m);
    let n = m.nrows();
    let mut out = CMatrix::zeros(n, n);
    for (l, v) in values.iter().zip(vectors.iter()) {
        out += outer(v, v) * Complex64::new(l.max(0.0).sqrt(), 0.0);
    }
    out
}

/// Orthonormal basis of the complement of `span(vectors)` (assumed orthonormal).
///
/// Canonical basis vectors are projected onto the complement and the one with
/// the largest remaining norm is taken at each step, lowest index on ties.
pub fn orthonormal_complement(vectors: &[CVector], dim: usize) -> Vec<CVector> {
    let mut basis: Vec<CVector> = vectors.to_vec();
    let mut out = Vec::new();
    let mut used = alloc::vec![false; dim];
    let target = dim.saturating_sub(vectors.len());
    while out.len() < target {
        let mut best: Option<(usize, CVector, f64)> = None;
        for k in 0..dim {
            if used[k] {
                continue;
            }
            let mut v = CVector::zeros(dim);
            v[k] = Complex64::new(1.0, 0.0);
            for b in &basis {
                let c = inner(b, &v);
                v -= b * c;
            }
            // second pass keeps the result orthogonal to working precision
            for b in &basis {
                let c = inner(b, &v);
                v -= b * c;
            }
            let n = norm(&v);
            if best.as_ref().is_none_or(|(_, _, bn)| n > *bn + 1e-12) {
                best = Some((k, v, n));
            }
        }
        let (k, v, n) = match best {
            Some(b) => b,
            None => break,
        };
        used[k] = true;
        let v = v / Complex64::new(n, 0.0);
        basis.push(v.clone());
        out.push(v);
    }
    out
}
