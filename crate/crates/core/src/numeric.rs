//! Scalar numerics: compensated summation, polynomial extrapolation and
//! Gauss-Legendre rules.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

/// Neumaier compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn merge(&mut self, other: &CompensatedSum) {
        self.add(other.sum);
        self.add(other.comp);
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

pub fn compensated_sum<I: IntoIterator<Item = f64>>(xs: I) -> f64 {
    let mut acc = CompensatedSum::new();
    for x in xs {
        acc.add(x);
    }
    acc.value()
}

/// Neville tableau for the interpolating polynomial through `(xs[i], ys[i])`
/// evaluated at zero.
///
/// Returns the full extrapolant and the difference to the extrapolant that
/// drops the first abscissa, which serves as an error estimate.
pub fn extrapolate_to_zero(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len();
    assert!(n > 0 && n == ys.len());
    if n == 1 {
        return (ys[0], f64::INFINITY);
    }
    // table[i] holds P_{i..i+level}(0) for the current level
    let mut table: Vec<f64> = ys.to_vec();
    for level in 1..n {
        for i in 0..n - level {
            let (x0, x1) = (xs[i], xs[i + level]);
            table[i] = (x1 * table[i] - x0 * table[i + 1]) / (x1 - x0);
        }
    }
    // table[1] still holds the extrapolant through xs[1..]
    (table[0], (table[0] - table[1]).abs())
}

/// Gauss-Legendre nodes and weights on `[a, b]`.
pub fn gauss_legendre(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let half = 0.5 * (b - a);
    let mid = 0.5 * (b + a);
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (core::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                let (_, d) = legendre_with_derivative(n, z);
                dp = d;
                break;
            }
        }
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        nodes[i] = mid - half * z;
        nodes[n - 1 - i] = mid + half * z;
        weights[i] = half * w;
        weights[n - 1 - i] = half * w;
    }
    (nodes, weights)
}

/// Gauss-Jacobi nodes and weights on `[0, 1]` for the weight `(1 - u)^a`,
/// `a > -1`, by the Golub-Welsch eigenvalue method.
pub fn gauss_jacobi(n: usize, a: f64) -> (Vec<f64>, Vec<f64>) {
    assert!(a > -1.0 && n > 0);
    // recurrence of P^(a, 0) on [-1, 1]
    let mut jac = nalgebra::DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        let kf = k as f64;
        let s = 2.0 * kf + a;
        jac[(k, k)] = if k == 0 { -a / (a + 2.0) } else { -a * a / (s * (s + 2.0)) };
        if k + 1 < n {
            let m = kf + 1.0;
            let t = 2.0 * m + a;
            let b = 4.0 * m * (m + a) * m * (m + a) / (t * t * (t + 1.0) * (t - 1.0));
            jac[(k, k + 1)] = b.sqrt();
            jac[(k + 1, k)] = b.sqrt();
        }
    }
    let eig = nalgebra::SymmetricEigen::new(jac);
    let mass = 1.0 / (a + 1.0);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|k| {
            let v0 = eig.eigenvectors[(0, k)];
            (0.5 * (eig.eigenvalues[k] + 1.0), mass * v0 * v0)
        })
        .collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    pairs.into_iter().unzip()
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}
