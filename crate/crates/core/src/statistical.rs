//! Measurements, outcome distributions and the Fisher-Rao metric.

use alloc::vec::Vec;

use num_complex::Complex64;
use rand::Rng;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::{
    frobenius, herm_eigen, hermiticity_deviation, inner, min_eigenvalue, outer, sym_determinant,
    symmetry_deviation, CMatrix, CVector, RMatrix,
};
use crate::state_model::{
    evaluate, sld, DerivOptions, ParamPoint, StateModel, StateVector,
};

/// Below this probability the phase of an outcome amplitude is dominated by
/// rounding, and `sqrt(p_i)` is differenced directly.
pub const P_FLOOR: f64 = 1e-20;

/// A finite POVM.
///
/// Each element is stored with a factorisation `E_i = sum_k |f_ik><f_ik|`
/// so that `sqrt(p_i)` is the norm of the overlap vector `<f_ik|psi>` and
/// stays accurate when `p_i` is tiny.
#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    dim: usize,
    elements: Vec<CMatrix>,
    factors: Vec<Vec<CVector>>,
}

impl Povm {
    /// Validates Hermiticity, positivity and completeness.
    pub fn new(elements: Vec<CMatrix>) -> Result<Self> {
        let dim = elements
            .first()
            .map(|e| e.nrows())
            .ok_or_else(|| Error::InvalidPovm("no elements".into()))?;
        let mut sum = CMatrix::zeros(dim, dim);
        let mut factors = Vec::with_capacity(elements.len());
        for (i, e) in elements.iter().enumerate() {
            if e.nrows() != dim || e.ncols() != dim {
                return Err(Error::InvalidPovm(alloc::format!("element {i} is not {dim}x{dim}")));
            }
            let dev = hermiticity_deviation(e);
            if dev > 1e-10 {
                return Err(Error::InvalidPovm(alloc::format!(
                    "element {i} is not Hermitian (deviation {dev:e})"
                )));
            }
            let (values, vectors) = herm_eigen(e);
            let mut f = Vec::new();
            for (l, v) in values.iter().zip(vectors) {
                if *l < -1e-10 {
                    return Err(Error::InvalidPovm(alloc::format!(
                        "element {i} has eigenvalue {l:e}"
                    )));
                }
                if *l > 0.0 {
                    f.push(v * Complex64::new(l.sqrt(), 0.0));
                }
            }
            factors.push(f);
            sum += e;
        }
        let dev = frobenius(&(sum - CMatrix::identity(dim, dim)));
        if dev > 1e-9 {
            return Err(Error::InvalidPovm(alloc::format!(
                "elements sum to identity only within {dev:e}"
            )));
        }
        Ok(Self {
            dim,
            elements,
            factors,
        })
    }

    /// Rank-one projectors onto an orthonormal basis.
    pub fn projective(basis: &[CVector]) -> Result<Self> {
        let dim = basis.len();
        for (i, a) in basis.iter().enumerate() {
            if a.len() != dim {
                return Err(Error::Dimension {
                    expected: dim,
                    found: a.len(),
                });
            }
            for (j, b) in basis.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                if (inner(a, b) - Complex64::new(target, 0.0)).norm() > 1e-10 {
                    return Err(Error::InvalidPovm("basis is not orthonormal".into()));
                }
            }
        }
        Ok(Self {
            dim,
            elements: basis.iter().map(|v| outer(v, v)).collect(),
            factors: basis.iter().map(|v| alloc::vec![v.clone()]).collect(),
        })
    }

    pub fn computational(dim: usize) -> Self {
        let basis: Vec<CVector> = (0..dim)
            .map(|k| {
                let mut v = CVector::zeros(dim);
                v[k] = Complex64::new(1.0, 0.0);
                v
            })
            .collect();
        Self::projective(&basis).expect("canonical basis is orthonormal")
    }

    /// The uninformative single-outcome measurement.
    pub fn identity(dim: usize) -> Self {
        let cols = Self::computational(dim).factors.into_iter().flatten().collect();
        Self {
            dim,
            elements: alloc::vec![CMatrix::identity(dim, dim)],
            factors: alloc::vec![cols],
        }
    }

    /// Merges outcomes: each group of indices becomes one outcome.
    pub fn coarse_grain(&self, groups: &[Vec<usize>]) -> Result<Self> {
        let mut seen = alloc::vec![false; self.len()];
        let mut elements = Vec::new();
        let mut factors = Vec::new();
        for g in groups {
            let mut e = CMatrix::zeros(self.dim, self.dim);
            let mut f = Vec::new();
            for &i in g {
                if i >= self.len() || seen[i] {
                    return Err(Error::InvalidArgument(alloc::format!("bad outcome index {i}")));
                }
                seen[i] = true;
                e += &self.elements[i];
                f.extend(self.factors[i].iter().cloned());
            }
            elements.push(e);
            factors.push(f);
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::InvalidArgument("groups must cover every outcome".into()));
        }
        Ok(Self {
            dim: self.dim,
            elements,
            factors,
        })
    }

    /// Random rank-one POVM with `outcomes >= dim` elements.
    ///
    /// Gaussian vectors `v_i` are whitened by `S^{-1/2}` with
    /// `S = sum_i |v_i><v_i|`, so the elements `S^{-1/2}|v_i><v_i|S^{-1/2}`
    /// sum to the identity.
    pub fn random_rank_one(dim: usize, outcomes: usize, seed: u64) -> Result<Self> {
        if dim == 0 || outcomes < dim {
            return Err(Error::InvalidArgument(alloc::format!(
                "need at least {dim} outcomes, got {outcomes}"
            )));
        }
        let mut rng = crate::rng::substream(seed, 0);
        let vs: Vec<CVector> = (0..outcomes)
            .map(|_| {
                CVector::from_fn(dim, |_, _| {
                    let re: f64 = rng.sample(rand_distr::StandardNormal);
                    let im: f64 = rng.sample(rand_distr::StandardNormal);
                    Complex64::new(re, im)
                })
            })
            .collect();
        let mut s = CMatrix::zeros(dim, dim);
        for v in &vs {
            s += outer(v, v);
        }
        let (values, vectors) = herm_eigen(&s);
        if values.iter().any(|l| *l <= 1e-12) {
            return Err(Error::Singular("frame operator of the random vectors"));
        }
        let mut whiten = CMatrix::zeros(dim, dim);
        for (l, v) in values.iter().zip(&vectors) {
            whiten += outer(v, v) * Complex64::new(1.0 / l.sqrt(), 0.0);
        }
        let us: Vec<CVector> = vs.iter().map(|v| &whiten * v).collect();
        Ok(Self {
            dim,
            elements: us.iter().map(|u| outer(u, u)).collect(),
            factors: us.into_iter().map(|u| alloc::vec![u]).collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[CMatrix] {
        &self.elements
    }

    pub fn factors(&self) -> &[Vec<CVector>] {
        &self.factors
    }

    /// `sqrt(<psi|E_i|psi>)` for every outcome, without clamping.
    pub fn sqrt_probabilities(&self, psi: &CVector) -> Result<Vec<f64>> {
        if psi.len() != self.dim {
            return Err(Error::Dimension {
                expected: self.dim,
                found: psi.len(),
            });
        }
        Ok(self
            .factors
            .iter()
            .map(|fs| fs.iter().map(|f| inner(f, psi).norm_sqr()).sum::<f64>().sqrt())
            .collect())
    }
}

/// A probability vector.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexPoint {
    probs: Vec<f64>,
}

impl SimplexPoint {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.iter().any(|p| !(*p >= 0.0)) {
            return Err(Error::InvalidArgument("negative probability".into()));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidArgument(alloc::format!(
                "probabilities sum to {total}"
            )));
        }
        Ok(Self { probs })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }
}

pub fn probabilities(state: &StateVector, povm: &Povm) -> Result<SimplexPoint> {
    let raw: Vec<f64> = povm
        .sqrt_probabilities(state.amplitudes())?
        .into_iter()
        .map(|s| (s * s).clamp(0.0, 1.0))
        .collect();
    let total: f64 = raw.iter().sum();
    if (total - 1.0).abs() >= 1e-9 {
        return Err(Error::InvalidPovm(alloc::format!(
            "outcome probabilities sum to {total}"
        )));
    }
    Ok(SimplexPoint {
        probs: raw.into_iter().map(|p| p / total).collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricKind {
    Qfm,
    Frm,
}

impl MetricKind {
    pub fn name(self) -> &'static str {
        match self {
            MetricKind::Qfm => "QFM",
            MetricKind::Frm => "FRM",
        }
    }
}

/// A real symmetric positive-semidefinite metric.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricMatrix {
    pub entries: RMatrix,
    pub kind: MetricKind,
}

impl MetricMatrix {
    pub fn new(entries: RMatrix, kind: MetricKind) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(Error::Dimension {
                expected: entries.nrows(),
                found: entries.ncols(),
            });
        }
        if symmetry_deviation(&entries) > 1e-10 {
            return Err(Error::InvalidArgument("metric is not symmetric".into()));
        }
        if entries.nrows() > 0 && min_eigenvalue(&entries) < -1e-9 {
            return Err(Error::InvalidArgument("metric is not positive semidefinite".into()));
        }
        Ok(Self { entries, kind })
    }

    pub fn new_unchecked(entries: RMatrix, kind: MetricKind) -> Self {
        Self { entries, kind }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn determinant(&self) -> f64 {
        sym_determinant(&self.entries)
    }

    /// `sqrt(det)`, zero for singular matrices.
    pub fn density(&self) -> Result<f64> {
        crate::state_model::idqs_from_metric(&self.entries)
    }
}

/// Finite-difference settings for the Fisher-Rao metric.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrmOptions {
    pub step: f64,
    pub richardson: bool,
}

impl Default for FrmOptions {
    fn default() -> Self {
        Self {
            step: 1e-5,
            richardson: true,
        }
    }
}

/// `g^I_{mu nu} = sum_i d_mu sqrt(p_i) d_nu sqrt(p_i)` by finite differences.
pub fn frm<M: StateModel + ?Sized>(
    model: &M,
    povm: &Povm,
    theta: &ParamPoint,
    opts: FrmOptions,
) -> Result<MetricMatrix> {
    frm_with_steps(model, povm, theta, &alloc::vec![opts.step; model.param_dim()], opts.richardson)
}

/// As [`frm`] with a separate step per coordinate.
pub fn frm_with_steps<M: StateModel + ?Sized>(
    model: &M,
    povm: &Povm,
    theta: &ParamPoint,
    steps: &[f64],
    richardson: bool,
) -> Result<MetricMatrix> {
    if povm.dim() != model.dim() {
        return Err(Error::Dimension {
            expected: model.dim(),
            found: povm.dim(),
        });
    }
    let stencil = Stencil::new(model, theta, steps)?;
    let entries = stencil.metric(povm.factors(), richardson);
    Ok(MetricMatrix::new_unchecked(entries, MetricKind::Frm))
}

/// States around a point for differencing outcome amplitudes.
///
/// Shifted states are phase-aligned with the centre, so the overlaps
/// `<f_ik|psi>` are smooth functions of the offset even for models whose
/// raw amplitudes carry a coordinate-dependent global phase.
#[derive(Debug, Clone)]
pub struct Stencil {
    centre: CVector,
    /// `[mu]` holds the states at `+h, -h, +h/2, -h/2`.
    shifted: Vec<[CVector; 4]>,
    steps: Vec<f64>,
}

impl Stencil {
    pub fn new<M: StateModel + ?Sized>(model: &M, theta: &ParamPoint, steps: &[f64]) -> Result<Self> {
        if steps.len() != model.param_dim() {
            return Err(Error::Dimension {
                expected: model.param_dim(),
                found: steps.len(),
            });
        }
        let centre = evaluate(model, theta)?.into_inner();
        let mut shifted = Vec::with_capacity(steps.len());
        for (mu, &h) in steps.iter().enumerate() {
            if !(h > 0.0) || !h.is_finite() {
                return Err(Error::Step { coord: mu, step: h });
            }
            let at = |delta: f64| -> Result<CVector> {
                let v = evaluate(model, &theta.shifted(mu, delta))
                    .map_err(|_| Error::Step { coord: mu, step: h })?
                    .into_inner();
                let ov = inner(&centre, &v);
                let n = ov.norm();
                Ok(if n > 0.0 { v * (ov.conj() / n) } else { v })
            };
            shifted.push([at(h)?, at(-h)?, at(0.5 * h)?, at(-0.5 * h)?]);
        }
        Ok(Self {
            centre,
            shifted,
            steps: steps.to_vec(),
        })
    }

    pub fn centre(&self) -> &CVector {
        &self.centre
    }

    /// `d_mu sqrt(p_i)` for every coordinate and outcome.
    ///
    /// For `p_i >= P_FLOOR` the amplitudes are differenced and combined as
    /// `Re <a_i|d a_i> / |a_i|`; below the floor `sqrt(p_i)` itself is
    /// differenced, which stays finite at `p_i = 0`.
    pub fn sqrt_prob_gradients(&self, factors: &[Vec<CVector>], richardson: bool) -> Vec<Vec<f64>> {
        let amps = |v: &CVector, fs: &[CVector]| -> Vec<Complex64> { fs.iter().map(|f| inner(f, v)).collect() };
        let norm = |a: &[Complex64]| a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        self.steps
            .iter()
            .zip(&self.shifted)
            .map(|(&h, s)| {
                factors
                    .iter()
                    .map(|fs| {
                        let c = amps(&self.centre, fs);
                        let sp = norm(&c);
                        let (ap, am) = (amps(&s[0], fs), amps(&s[1], fs));
                        if sp * sp < P_FLOOR {
                            return (norm(&ap) - norm(&am)) / (2.0 * h);
                        }
                        let (hp, hm) = (amps(&s[2], fs), amps(&s[3], fs));
                        let mut acc = 0.0;
                        for k in 0..c.len() {
                            let coarse = (ap[k] - am[k]) / (2.0 * h);
                            let d = if richardson {
                                let fine = (hp[k] - hm[k]) / h;
                                (fine * 4.0 - coarse) / 3.0
                            } else {
                                coarse
                            };
                            acc += (c[k].conj() * d).re;
                        }
                        acc / sp
                    })
                    .collect()
            })
            .collect()
    }

    pub fn metric(&self, factors: &[Vec<CVector>], richardson: bool) -> RMatrix {
        let grads = self.sqrt_prob_gradients(factors, richardson);
        let d = grads.len();
        RMatrix::from_fn(d, d, |m, n| grads[m].iter().zip(&grads[n]).map(|(a, b)| a * b).sum())
    }
}

/// Density of distinguishable states `sqrt(det g^I)`.
pub fn dds(metric: &MetricMatrix) -> Result<f64> {
    if metric.kind != MetricKind::Frm {
        return Err(Error::KindMismatch {
            expected: MetricKind::Frm.name(),
            found: metric.kind.name(),
        });
    }
    metric.density()
}

/// Sum over outcomes of `min_lambda || |psi><psi| (lambda - L_mu) E_i^{1/2} ||_F^2`.
///
/// The multiplier is optimised separately for each outcome, so the value
/// vanishes exactly when every element satisfies the single-parameter
/// optimality condition with its own real multiplier.
pub fn optimality_residual<M: StateModel + ?Sized>(
    model: &M,
    theta: &ParamPoint,
    mu: usize,
    povm: &Povm,
    opts: DerivOptions,
) -> Result<f64> {
    let psi = evaluate(model, theta)?;
    if povm.dim() != psi.dim() {
        return Err(Error::Dimension {
            expected: psi.dim(),
            found: povm.dim(),
        });
    }
    let l = sld(model, theta, mu, opts)?.matrix;
    let lpsi = &l * psi.amplitudes();
    let mut total = 0.0;
    for fs in povm.factors() {
        let (mut aa, mut bb, mut ab) = (0.0, 0.0, 0.0);
        for f in fs {
            let a = inner(f, psi.amplitudes());
            let b = inner(f, &lpsi);
            aa += a.norm_sqr();
            bb += b.norm_sqr();
            ab += (a.conj() * b).re;
        }
        let term = if aa > 0.0 { bb - ab * ab / aa } else { bb };
        total += term.max(0.0);
    }
    Ok(total)
}
