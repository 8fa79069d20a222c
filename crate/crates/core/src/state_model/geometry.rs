//! Intrinsic derivatives and the quantum geometric tensor.

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use super::{check_domain, evaluate, ParamPoint, StateModel, StateVector};
use crate::error::{Error, Result, Warning};
use crate::linalg::{
    hermiticity_deviation, inner, outer, sym_determinant, CMatrix, CVector, RMatrix, I,
};
use crate::statistical::{MetricKind, MetricMatrix};

/// Finite-difference settings for state derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivOptions {
    pub step: f64,
    /// Combine steps `h` and `h/2` to cancel the leading error term.
    pub richardson: bool,
    /// Use the model's closed-form derivative when it has one.
    pub use_analytic: bool,
}

impl Default for DerivOptions {
    fn default() -> Self {
        Self {
            step: 1e-5,
            richardson: true,
            use_analytic: true,
        }
    }
}

impl DerivOptions {
    pub fn numeric(step: f64) -> Self {
        Self {
            step,
            richardson: true,
            use_analytic: false,
        }
    }
}

/// `(1 - |psi><psi|) d_mu |psi>` at `theta`.
pub fn intrinsic_derivative<M: StateModel + ?Sized>(
    model: &M,
    theta: &ParamPoint,
    mu: usize,
    opts: DerivOptions,
) -> Result<CVector> {
    let psi = evaluate(model, theta)?;
    derivative_at(model, theta, &psi, mu, opts)
}

fn derivative_at<M: StateModel + ?Sized>(
    model: &M,
    theta: &ParamPoint,
    psi: &StateVector,
    mu: usize,
    opts: DerivOptions,
) -> Result<CVector> {
    let d = model.param_dim();
    if mu >= d {
        return Err(Error::Index { index: mu, dim: d });
    }
    let slack = model.slack(theta.coords());
    if slack < model.regular_slack() {
        return Err(Error::Constraint { slack });
    }
    let psi = psi.amplitudes();
    let raw = match opts.use_analytic {
        true => model.analytic_derivative(theta.coords(), mu),
        false => None,
    };
    let raw = match raw {
        // the raw amplitudes may carry a truncation norm slightly below one
        Some(v) => v / Complex64::new(crate::linalg::norm(&model.amplitudes(theta.coords())), 0.0),
        None => numeric_derivative(model, theta, psi, mu, opts)?,
    };
    Ok(project_out(psi, raw))
}

fn project_out(psi: &CVector, v: CVector) -> CVector {
    let c = inner(psi, &v);
    v - psi * c
}

fn numeric_derivative<M: StateModel + ?Sized>(
    model: &M,
    theta: &ParamPoint,
    psi: &CVector,
    mu: usize,
    opts: DerivOptions,
) -> Result<CVector> {
    let h = opts.step;
    let iv = model.domain()[mu];
    if !(h > 0.0) || !h.is_finite() || iv.margin(theta.coords()[mu]) < h {
        return Err(Error::Step { coord: mu, step: h });
    }
    let central = |h: f64| -> Result<CVector> {
        let plus = aligned(model, &theta.shifted(mu, h), psi, mu, h)?;
        let minus = aligned(model, &theta.shifted(mu, -h), psi, mu, h)?;
        Ok((plus - minus) / Complex64::new(2.0 * h, 0.0))
    };
    let d1 = central(h)?;
    if !opts.richardson {
        return Ok(d1);
    }
    let d2 = central(0.5 * h)?;
    Ok((d2 * Complex64::new(4.0, 0.0) - d1) / Complex64::new(3.0, 0.0))
}

/// State at `theta` with its global phase chosen so `<psi|state>` is real positive.
fn aligned<M: StateModel + ?Sized>(
    model: &M,
    theta: &ParamPoint,
    psi: &CVector,
    mu: usize,
    h: f64,
) -> Result<CVector> {
    let v = evaluate(model, theta)
        .map_err(|_| Error::Step { coord: mu, step: h })?
        .into_inner();
    let ov = inner(psi, &v);
    let n = ov.norm();
    if n == 0.0 {
        return Err(Error::Step { coord: mu, step: h });
    }
    Ok(v * (ov.conj() / n))
}

/// Quantum geometric tensor and its real and imaginary parts.
#[derive(Debug, Clone, PartialEq)]
pub struct QgTensor {
    pub entries: CMatrix,
    /// Symmetric part `g^F`.
    pub metric: RMatrix,
    /// Antisymmetric part `sigma`, with `Q = g^F + i sigma`.
    pub berry_sigma: RMatrix,
    /// Largest entrywise deviation from Hermiticity before repair.
    pub hermiticity_deviation: f64,
}

impl QgTensor {
    pub fn from_entries(raw: CMatrix) -> Self {
        let dev = hermiticity_deviation(&raw);
        let q = (&raw + raw.adjoint()) * Complex64::new(0.5, 0.0);
        let metric = q.map(|z| z.re);
        let berry_sigma = q.map(|z| z.im);
        Self {
            entries: q,
            metric,
            berry_sigma,
            hermiticity_deviation: dev,
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    /// Determinant of the complex tensor; real for a Hermitian matrix.
    pub fn determinant(&self) -> f64 {
        self.entries.clone().determinant().re
    }

    /// Warning when the repair removed more than rounding noise.
    pub fn warning(&self) -> Option<Warning> {
        (self.hermiticity_deviation > 1e-10).then_some(Warning::Hermiticity {
            deviation: self.hermiticity_deviation,
        })
    }
}

pub fn qgt<M: StateModel + ?Sized>(model: &M, theta: &ParamPoint, step: f64) -> Result<QgTensor> {
    qgt_with(
        model,
        theta,
        DerivOptions {
            step,
            ..DerivOptions::default()
        },
    )
}

pub fn qgt_with<M: StateModel + ?Sized>(
    model: &M,
    theta: &ParamPoint,
    opts: DerivOptions,
) -> Result<QgTensor> {
    let psi = evaluate(model, theta)?;
    let d = model.param_dim();
    let derivs = (0..d)
        .map(|mu| derivative_at(model, theta, &psi, mu, opts))
        .collect::<Result<Vec<_>>>()?;
    let raw = CMatrix::from_fn(d, d, |m, n| inner(&derivs[m], &derivs[n]));
    Ok(QgTensor::from_entries(raw))
}

pub fn qfm(q: &QgTensor) -> MetricMatrix {
    MetricMatrix::new_unchecked(q.metric.clone(), MetricKind::Qfm)
}

/// `B_{mu nu} = -2 sigma_{mu nu}`.
pub fn berry_curvature(q: &QgTensor, mu: usize, nu: usize) -> f64 {
    -2.0 * q.berry_sigma[(mu, nu)]
}

/// `sqrt(det g^F)` from an already computed metric.
pub fn idqs_from_metric(g: &RMatrix) -> Result<f64> {
    let det = sym_determinant(g);
    if det < -1e-9 {
        return Err(Error::NegativeDeterminant(det));
    }
    Ok(det.max(0.0).sqrt())
}

pub fn idqs<M: StateModel + ?Sized>(model: &M, theta: &ParamPoint) -> Result<f64> {
    let q = qgt_with(model, theta, DerivOptions::default())?;
    idqs_from_metric(&q.metric)
}

/// Symmetric logarithmic derivative of `|psi><psi|` along one coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct SldOperator {
    pub matrix: CMatrix,
    pub direction: usize,
}

pub fn sld<M: StateModel + ?Sized>(
    model: &M,
    theta: &ParamPoint,
    mu: usize,
    opts: DerivOptions,
) -> Result<SldOperator> {
    check_domain(model, theta)?;
    let psi = evaluate(model, theta)?;
    let d = derivative_at(model, theta, &psi, mu, opts)?;
    let p = psi.amplitudes();
    let matrix = (outer(&d, p) + outer(p, &d)) * Complex64::new(2.0, 0.0);
    Ok(SldOperator { matrix, direction: mu })
}

/// `<psi|[L_mu, L_nu]|psi> / (4i)`.
///
/// For pure states this equals `2 sigma_{mu nu}`, i.e. minus the value of
/// [`berry_curvature`].
pub fn compatibility_check<M: StateModel + ?Sized>(
    model: &M,
    theta: &ParamPoint,
    mu: usize,
    nu: usize,
    opts: DerivOptions,
) -> Result<f64> {
    let psi = evaluate(model, theta)?;
    let lm = sld(model, theta, mu, opts)?.matrix;
    let ln = sld(model, theta, nu, opts)?.matrix;
    let comm = &lm * &ln - &ln * &lm;
    let p = psi.amplitudes();
    let v = inner(p, &(comm * p));
    Ok((v / (I * 4.0)).re)
}
