//! Vertex measurements on three-level systems and the maximal density of
//! distinguishable states they attain.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result, Warning};
use crate::exec::Executor;
use crate::linalg::{inner, orthonormal_complement, sym_determinant, CVector, RMatrix};
use crate::numeric::extrapolate_to_zero;
use crate::optim::{grid_points, nelder_mead, NelderMeadOptions};
use crate::qcri::gap;
use crate::rng::{substream, uniform};
use crate::state_model::{
    evaluate, intrinsic_derivative, qgt, DerivOptions, ParamPoint, StateModel, Su3Euler,
    Submanifold,
};
use crate::statistical::{MetricKind, MetricMatrix, Povm, Stencil};

/// Projective measurement whose first outcome is the anchor state.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexPovm {
    pub basis: [CVector; 3],
    pub anchor: ParamPoint,
    /// Rotation of the complement relative to its canonical basis.
    pub t: f64,
    pub phi: f64,
}

impl VertexPovm {
    pub fn to_povm(&self) -> Povm {
        Povm::projective(&self.basis).expect("vertex basis is orthonormal")
    }
}

fn require_three_levels<M: StateModel + ?Sized>(model: &M) -> Result<()> {
    if model.dim() != 3 {
        return Err(Error::Dimension {
            expected: 3,
            found: model.dim(),
        });
    }
    Ok(())
}

/// Canonical complement `(e1, e2)` of the anchor state.
fn complement(psi: &CVector) -> (CVector, CVector) {
    let mut c = orthonormal_complement(core::slice::from_ref(psi), 3).into_iter();
    let e1 = c.next().expect("complement has two vectors");
    let e2 = c.next().expect("complement has two vectors");
    (e1, e2)
}

fn rotate(e1: &CVector, e2: &CVector, t: f64, phi: f64) -> (CVector, CVector) {
    let (c, s) = (t.cos(), t.sin());
    let u = Complex64::from_polar(1.0, phi);
    let u1 = e1 * Complex64::new(c, 0.0) + e2 * (u * s);
    let u2 = e1 * (-u.conj() * s) + e2 * Complex64::new(c, 0.0);
    (u1, u2)
}

pub fn build_vertex_povm<M: StateModel + ?Sized>(
    model: &M,
    theta: &ParamPoint,
    t: f64,
    phi: f64,
) -> Result<VertexPovm> {
    require_three_levels(model)?;
    let psi = evaluate(model, theta)?.into_inner();
    let (e1, e2) = complement(&psi);
    let (u1, u2) = rotate(&e1, &e2, t, phi);
    Ok(VertexPovm {
        basis: [psi, u1, u2],
        anchor: theta.clone(),
        t,
        phi,
    })
}

/// Speeds and relative orientation of the two coordinate derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivativeOverlap {
    pub lambda1: f64,
    pub lambda2: f64,
    pub ov_alpha: f64,
    pub ov_beta: f64,
}

impl DerivativeOverlap {
    pub fn compute<M: StateModel + ?Sized>(model: &M, theta: &ParamPoint) -> Result<Self> {
        if model.param_dim() != 2 {
            return Err(Error::Dimension {
                expected: 2,
                found: model.param_dim(),
            });
        }
        let q = qgt(model, theta, 1e-5)?;
        Ok(Self::from_tensor(&q.entries))
    }

    fn from_tensor(q: &crate::linalg::CMatrix) -> Self {
        let lambda1 = q[(0, 0)].re.max(0.0).sqrt();
        let lambda2 = q[(1, 1)].re.max(0.0).sqrt();
        let ov = q[(0, 1)] / (lambda1 * lambda2);
        let mut ov_beta = ov.arg();
        if ov_beta < 0.0 {
            ov_beta += 2.0 * PI;
        }
        Self {
            lambda1,
            lambda2,
            ov_alpha: ov.norm().min(1.0).acos(),
            ov_beta,
        }
    }

    /// Limit of the Fisher-Rao metric of the informative vertex measurement
    /// for the first direction as the mismatch shrinks along it.
    pub fn limit_metric(&self) -> RMatrix {
        let (l1, l2) = (self.lambda1, self.lambda2);
        let (ca, sa) = (self.ov_alpha.cos(), self.ov_alpha.sin());
        let cb = self.ov_beta.cos();
        let off = l1 * l2 * ca * cb;
        RMatrix::from_row_slice(2, 2, &[l1 * l1, off, off, l2 * l2 * (sa * sa + ca * ca * cb * cb)])
    }
}

/// The vertex measurement `{psi, d_mu psi / lambda_mu, completion}`.
///
/// With two parameters the completion is the part of the other unit
/// derivative orthogonal to the first.
pub fn build_informative_vertex<M: StateModel + ?Sized>(
    model: &M,
    theta: &ParamPoint,
    mu: usize,
) -> Result<VertexPovm> {
    require_three_levels(model)?;
    let d = model.param_dim();
    if mu >= d {
        return Err(Error::Index { index: mu, dim: d });
    }
    let psi = evaluate(model, theta)?.into_inner();
    let opts = DerivOptions::default();
    let unit = |nu: usize| -> Result<CVector> {
        let v = intrinsic_derivative(model, theta, nu, opts)?;
        let g = crate::linalg::norm(&v).powi(2);
        if !(g > 1e-12) {
            return Err(Error::DegenerateSpeed { mu: nu, g });
        }
        Ok(&v / Complex64::new(g.sqrt(), 0.0))
    };
    let n_mu = unit(mu)?;
    let third = if d == 2 {
        let n_other = unit(1 - mu)?;
        let ov = inner(&n_mu, &n_other);
        let sin_alpha = (1.0 - ov.norm_sqr()).max(0.0).sqrt();
        if sin_alpha < 1e-8 {
            return Err(Error::DegenerateDirection { sin_alpha });
        }
        (n_other - &n_mu * ov) / Complex64::new(sin_alpha, 0.0)
    } else {
        orthonormal_complement(&[psi.clone(), n_mu.clone()], 3).remove(0)
    };
    // express the complement rotation in the (t, phi) chart
    let (e1, e2) = complement(&psi);
    let (a, b) = (inner(&e1, &n_mu), inner(&e2, &n_mu));
    let t = b.norm().atan2(a.norm());
    let mut phi = b.arg() - a.arg();
    if phi < 0.0 {
        phi += 2.0 * PI;
    }
    Ok(VertexPovm {
        basis: [psi, n_mu, third],
        anchor: theta.clone(),
        t,
        phi,
    })
}

fn rank_one(basis: &[CVector]) -> Vec<Vec<CVector>> {
    basis.iter().map(|b| vec![b.clone()]).collect()
}

/// Offset `delta theta^mu = r (cos chi, sin chi)_mu / lambda_mu` from the anchor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MismatchSpec {
    pub r: f64,
    pub chi: f64,
    pub lambda: [f64; 2],
}

impl MismatchSpec {
    pub fn offset(&self) -> [f64; 2] {
        [
            self.r * self.chi.cos() / self.lambda[0],
            self.r * self.chi.sin() / self.lambda[1],
        ]
    }
}

/// Differencing step as a fraction of the mismatch scale `r / lambda_mu`.
pub const DEFAULT_STEP_RATIO: f64 = 1e-4;

/// Fisher-Rao metric of the anchored vertex measurement at `anchor + offset`.
///
/// `step_ratio` scales the differencing step to `ratio * r / lambda_mu`.
pub fn frm_at_mismatch<M: StateModel + ?Sized>(
    model: &M,
    povm: &VertexPovm,
    mismatch: &MismatchSpec,
    step_ratio: f64,
) -> Result<MetricMatrix> {
    if !(mismatch.r > 0.0) {
        return Err(Error::Radius(mismatch.r));
    }
    if model.param_dim() != 2 {
        return Err(Error::Dimension {
            expected: 2,
            found: model.param_dim(),
        });
    }
    let point = povm.anchor.offset(&mismatch.offset());
    let steps = [
        step_ratio * mismatch.r / mismatch.lambda[0],
        step_ratio * mismatch.r / mismatch.lambda[1],
    ];
    let stencil = Stencil::new(model, &point, &steps)?;
    Ok(MetricMatrix::new_unchecked(stencil.metric(&rank_one(&povm.basis), true), MetricKind::Frm))
}

/// Entrywise extrapolation of [`frm_at_mismatch`] to zero mismatch along
/// direction `chi`, over the given radii.
///
/// Returns the limit matrix and the largest entrywise extrapolation residual.
pub fn frm_limit<M: StateModel + ?Sized>(
    model: &M,
    povm: &VertexPovm,
    chi: f64,
    radii: &[f64],
    step_ratio: f64,
) -> Result<(RMatrix, f64)> {
    if radii.len() < 2 {
        return Err(Error::InvalidArgument("need at least two radii".into()));
    }
    let q = qgt(model, &povm.anchor, 1e-5)?;
    let lambda = [q.metric[(0, 0)].max(0.0).sqrt(), q.metric[(1, 1)].max(0.0).sqrt()];
    let metrics = radii
        .iter()
        .map(|&r| frm_at_mismatch(model, povm, &MismatchSpec { r, chi, lambda }, step_ratio))
        .collect::<Result<Vec<_>>>()?;
    let mut worst: f64 = 0.0;
    let limit = RMatrix::from_fn(2, 2, |a, b| {
        let ys: Vec<f64> = metrics.iter().map(|m| m.entries[(a, b)]).collect();
        let (v, res) = extrapolate_to_zero(radii, &ys);
        worst = worst.max(res);
        v
    });
    Ok((limit, worst))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MvddsConfig {
    pub r0: f64,
    pub factor: f64,
    pub rungs: usize,
    /// Grid points per search axis `(t, phi, chi)`.
    pub grid: usize,
    pub max_iter: usize,
    pub tol: f64,
    pub step_ratio: f64,
    /// Caps `r0` at `max_offset * min(lambda)` so no coordinate moves by
    /// more than `max_offset`.
    pub max_offset: f64,
}

impl Default for MvddsConfig {
    fn default() -> Self {
        Self {
            r0: 1e-2,
            factor: 0.5,
            rungs: 4,
            grid: 12,
            max_iter: 200,
            tol: 1e-10,
            step_ratio: DEFAULT_STEP_RATIO,
            max_offset: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MvddsResult {
    pub mvdds_sq: f64,
    /// `(t, phi, chi)` maximising the determinant on the smallest radius.
    pub argmax: [f64; 3],
    pub radii_used: Vec<f64>,
    /// Maximised determinant on each radius.
    pub rung_values: Vec<f64>,
    pub extrapolation_residual: f64,
    pub det_gf: f64,
    pub warning: Option<Warning>,
}

/// Maximal determinant of the vertex-measurement Fisher-Rao metric as the
/// mismatch shrinks to zero.
pub fn mvdds<M: StateModel + ?Sized>(
    model: &M,
    theta0: &ParamPoint,
    config: &MvddsConfig,
) -> Result<MvddsResult> {
    require_three_levels(model)?;
    if model.param_dim() != 2 {
        return Err(Error::Dimension {
            expected: 2,
            found: model.param_dim(),
        });
    }
    if config.rungs < 2 || config.grid == 0 || !(config.r0 > 0.0) {
        return Err(Error::InvalidArgument("need r0 > 0, two rungs and a grid".into()));
    }
    let q = qgt(model, theta0, 1e-5)?;
    let det_gf = sym_determinant(&q.metric);
    let ov = DerivativeOverlap::from_tensor(&q.entries);
    let lambda = [ov.lambda1, ov.lambda2];
    for (mu, l) in lambda.iter().enumerate() {
        if !(*l > 1e-6) {
            return Err(Error::DegenerateSpeed { mu, g: l * l });
        }
    }
    // keep every offset (plus differencing stencil) well inside the domain and
    // small against the coordinate scale of the model
    let dom = model.domain();
    let mut r0 = config.r0.min(config.max_offset * lambda[0].min(lambda[1]));
    for mu in 0..2 {
        let margin = dom[mu].margin(theta0.coords()[mu]);
        r0 = r0.min(0.5 * margin * lambda[mu]);
    }
    if !(r0 > 0.0) {
        return Err(Error::Radius(r0));
    }

    let psi = evaluate(model, theta0)?.into_inner();
    let (e1, e2) = complement(&psi);
    let n = config.grid;
    let grid = grid_points(&[0.0, 0.0, 0.0], &[FRAC_PI_2, 2.0 * PI, 2.0 * PI], n);
    let scale = [FRAC_PI_2 / n as f64, 2.0 * PI / n as f64, 2.0 * PI / n as f64];

    let mut radii = Vec::with_capacity(config.rungs);
    let mut values = Vec::with_capacity(config.rungs);
    let mut argmax = [0.0; 3];
    for k in 0..config.rungs {
        let r = r0 * config.factor.powi(k as i32);
        let steps = [config.step_ratio * r / lambda[0], config.step_ratio * r / lambda[1]];
        let stencil_at = |chi: f64| -> Result<Stencil> {
            let spec = MismatchSpec { r, chi, lambda };
            Stencil::new(model, &theta0.offset(&spec.offset()), &steps)
        };
        let det_for = |st: &Stencil, t: f64, phi: f64| -> f64 {
            let (u1, u2) = rotate(&e1, &e2, t, phi);
            sym_determinant(&st.metric(&rank_one(&[psi.clone(), u1, u2]), true))
        };

        // grid: the stencil depends only on chi
        let mut best = (f64::NEG_INFINITY, [0.0; 3]);
        let mut last_chi = f64::NAN;
        let mut stencil = None;
        for p in &grid {
            if p[2] != last_chi {
                stencil = Some(stencil_at(p[2])?);
                last_chi = p[2];
            }
            let v = det_for(stencil.as_ref().expect("stencil set"), p[0], p[1]);
            if v > best.0 {
                best = (v, [p[0], p[1], p[2]]);
            }
        }
        let objective = |x: &[f64]| -> f64 {
            match stencil_at(x[2]) {
                Ok(st) => -det_for(&st, x[0], x[1]),
                Err(_) => f64::INFINITY,
            }
        };
        let opts = NelderMeadOptions {
            max_iter: config.max_iter,
            f_tol: config.tol * det_gf.abs().max(1e-12),
            x_tol: config.tol,
        };
        let refined = nelder_mead(objective, &best.1, &scale.map(|s| 0.5 * s), opts);
        let (value, at) = if -refined.value >= best.0 {
            (-refined.value, [refined.x[0], refined.x[1], refined.x[2]])
        } else {
            best
        };
        radii.push(r);
        values.push(value);
        argmax = at;
    }
    let (extrapolated, residual) = extrapolate_to_zero(&radii, &values);
    let threshold = 1e-4 * det_gf.abs();
    let warning = (residual > threshold).then_some(Warning::Extrapolation {
        residual,
        threshold,
    });
    Ok(MvddsResult {
        mvdds_sq: extrapolated.max(0.0),
        argmax: normalise_angles(argmax),
        radii_used: radii,
        rung_values: values,
        extrapolation_residual: residual,
        det_gf,
        warning,
    })
}

fn normalise_angles(a: [f64; 3]) -> [f64; 3] {
    let wrap = |x: f64| num_traits::Euclid::rem_euclid(&x, &(2.0 * PI));
    [a[0], wrap(a[1]), wrap(a[2])]
}

/// Two-dimensional coordinate planes of the Euler-coordinate family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Su3Plane {
    AlphaBeta,
    AlphaTheta,
    GammaTheta,
}

impl Su3Plane {
    pub const ALL: [Su3Plane; 3] = [Su3Plane::AlphaBeta, Su3Plane::AlphaTheta, Su3Plane::GammaTheta];

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "alpha-beta" => Ok(Self::AlphaBeta),
            "alpha-theta" => Ok(Self::AlphaTheta),
            "gamma-theta" => Ok(Self::GammaTheta),
            other => Err(Error::Unknown(String::from(other))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::AlphaBeta => "alpha-beta",
            Self::AlphaTheta => "alpha-theta",
            Self::GammaTheta => "gamma-theta",
        }
    }

    /// Free coordinates, then fixed ones, as Euler indices.
    pub fn layout(self) -> ([usize; 2], [usize; 2]) {
        use Su3Euler as E;
        match self {
            Self::AlphaBeta => ([E::ALPHA, E::BETA], [E::GAMMA, E::THETA]),
            Self::AlphaTheta => ([E::ALPHA, E::THETA], [E::GAMMA, E::BETA]),
            Self::GammaTheta => ([E::GAMMA, E::THETA], [E::ALPHA, E::BETA]),
        }
    }

    /// Restriction of the family to this plane through `full`.
    pub fn submanifold(self, full: &[f64; 4]) -> Result<(Submanifold<Su3Euler>, ParamPoint)> {
        let (free, fixed) = self.layout();
        let mut mask = vec![None; 4];
        for i in fixed {
            mask[i] = Some(full[i]);
        }
        let sub = Submanifold::new(Su3Euler, mask)?;
        Ok((sub, ParamPoint::new(vec![full[free[0]], full[free[1]]])?))
    }
}

/// Margin kept from the edges of bounded coordinates when sampling.
pub const SAMPLE_MARGIN: f64 = 0.05;

/// One sample of the co-distribution sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fig4Row {
    pub p1: f64,
    pub p2: f64,
    pub fixed1: f64,
    pub fixed2: f64,
    pub det_gf: f64,
    pub berry: f64,
    pub mvdds_sq: f64,
    pub gap: f64,
    pub predicted_gap: f64,
    pub extrap_residual: f64,
}

impl Fig4Row {
    pub const HEADER: [&'static str; 10] = [
        "p1",
        "p2",
        "fixed1",
        "fixed2",
        "det_gF",
        "berry",
        "mvdds_sq",
        "gap",
        "predicted_gap",
        "extrap_residual",
    ];

    pub fn values(&self) -> [f64; 10] {
        [
            self.p1,
            self.p2,
            self.fixed1,
            self.fixed2,
            self.det_gf,
            self.berry,
            self.mvdds_sq,
            self.gap,
            self.predicted_gap,
            self.extrap_residual,
        ]
    }
}

/// Uniform point of the Euler chart, bounded coordinates kept off the edges.
pub fn sample_su3_point(seed: u64, index: u64) -> [f64; 4] {
    let mut rng = substream(seed, index);
    let dom = Su3Euler.domain();
    let mut out = [0.0; 4];
    for (x, iv) in out.iter_mut().zip(&dom) {
        *x = if iv.periodic {
            uniform(&mut rng, iv.lo, iv.hi)
        } else {
            uniform(&mut rng, iv.lo + SAMPLE_MARGIN, iv.hi - SAMPLE_MARGIN)
        };
    }
    out
}

pub fn fig4_row(plane: Su3Plane, full: &[f64; 4], config: &MvddsConfig) -> Result<(Fig4Row, Option<Warning>)> {
    let (sub, theta) = plane.submanifold(full)?;
    let res = mvdds(&sub, &theta, config)?;
    let g = gap(&sub, &theta, res.mvdds_sq)?;
    let (_, fixed) = plane.layout();
    Ok((
        Fig4Row {
            p1: theta.coords()[0],
            p2: theta.coords()[1],
            fixed1: full[fixed[0]],
            fixed2: full[fixed[1]],
            det_gf: g.det_gf,
            berry: g.berry,
            mvdds_sq: res.mvdds_sq,
            gap: g.delta,
            predicted_gap: g.predicted,
            extrap_residual: res.extrapolation_residual,
        },
        res.warning,
    ))
}

/// Sample `i` uses random stream `i` of `seed`, so rows do not depend on
/// how the executor schedules them.
pub fn fig4_sweep<E: Executor>(
    plane: Su3Plane,
    n_samples: usize,
    seed: u64,
    config: &MvddsConfig,
    exec: &E,
) -> Result<(Vec<Fig4Row>, Vec<Warning>)> {
    let rows = exec.map(n_samples, |i| fig4_row(plane, &sample_su3_point(seed, i as u64), config));
    let mut out = Vec::with_capacity(n_samples);
    let mut warnings = Vec::new();
    for r in rows {
        let (row, w) = r?;
        out.push(row);
        warnings.extend(w);
    }
    Ok((out, warnings))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state_model::FnModel;
    use crate::state_model::Interval;
    use crate::statistical::probabilities;
    use core::f64::consts::{FRAC_PI_4, FRAC_PI_8};

    fn alpha_theta(beta: f64) -> Submanifold<Su3Euler> {
        Submanifold::new(Su3Euler, vec![None, Some(0.3), Some(beta), None]).unwrap()
    }

    fn pt(v: &[f64]) -> ParamPoint {
        ParamPoint::from_slice(v).unwrap()
    }

    #[test]
    fn vertex_basis_is_orthonormal_and_anchored() {
        let m = alpha_theta(0.4);
        let theta = pt(&[0.7, 0.6]);
        for (t, phi) in [(0.0, 0.0), (0.4, 2.0), (FRAC_PI_2, 0.0)] {
            let v = build_vertex_povm(&m, &theta, t, phi).unwrap();
            for i in 0..3 {
                for j in 0..3 {
                    let target = if i == j { 1.0 } else { 0.0 };
                    assert!((inner(&v.basis[i], &v.basis[j]).norm() - target).abs() < 1e-12);
                }
            }
            let p = probabilities(&evaluate(&m, &theta).unwrap(), &v.to_povm()).unwrap();
            assert!((p.probs()[0] - 1.0).abs() < 1e-12);
        }
        let a = build_vertex_povm(&m, &theta, 0.0, 0.0).unwrap();
        let b = build_vertex_povm(&m, &theta, FRAC_PI_2, 0.0).unwrap();
        assert!((inner(&a.basis[1], &b.basis[2]).norm() - 1.0).abs() < 1e-12);
        assert!((inner(&a.basis[2], &b.basis[1]).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn informative_vertex_overlaps() {
        let at = pt(&[0.4, FRAC_PI_4]);
        let err = build_informative_vertex(&alpha_theta(0.0), &at, 0).unwrap_err();
        assert!(matches!(err, Error::DegenerateDirection { .. }));
        let ov = DerivativeOverlap::compute(&alpha_theta(FRAC_PI_8), &at).unwrap();
        assert!((ov.ov_alpha.cos() - (1.0f64 / 3.0).sqrt()).abs() < 1e-9);
        let det = sym_determinant(&ov.limit_metric());
        let q = qgt(&alpha_theta(FRAC_PI_8), &at, 1e-5).unwrap();
        assert!((det - q.determinant()).abs() < 1e-10);
    }

    #[test]
    fn orthogonal_derivatives_complete_with_second() {
        let m = FnModel::new(3, vec![Interval::bounded(-1.0, 1.0); 2], |t| {
            let v = CVector::from_vec(vec![
                Complex64::new(1.0, 0.0),
                Complex64::new(t[0], 0.0),
                Complex64::new(0.0, t[1]),
            ]);
            let n = crate::linalg::norm(&v);
            v / Complex64::new(n, 0.0)
        });
        let v = build_informative_vertex(&m, &pt(&[0.0, 0.0]), 0).unwrap();
        assert!((v.basis[2][2] - Complex64::new(0.0, 1.0)).norm() < 1e-9);
    }

    #[test]
    fn zero_radius_is_rejected() {
        let m = alpha_theta(0.4);
        let v = build_vertex_povm(&m, &pt(&[0.7, 0.6]), 0.0, 0.0).unwrap();
        let spec = MismatchSpec { r: 0.0, chi: 0.0, lambda: [1.0, 1.0] };
        assert!(matches!(frm_at_mismatch(&m, &v, &spec, DEFAULT_STEP_RATIO), Err(Error::Radius(_))));
    }

    #[test]
    fn mvdds_fixtures() {
        let cfg = MvddsConfig::default();
        let at = pt(&[0.4, FRAC_PI_4]);
        let r = mvdds(&alpha_theta(FRAC_PI_8), &at, &cfg).unwrap();
        assert!((r.mvdds_sq - 0.25).abs() < 1e-3, "{r:?}");
        let r = mvdds(&alpha_theta(0.0), &at, &cfg).unwrap();
        assert!(r.mvdds_sq.abs() < 1e-4, "{r:?}");
    }

    #[test]
    fn plane_names_round_trip() {
        for p in Su3Plane::ALL {
            assert_eq!(Su3Plane::parse(p.name()).unwrap(), p);
        }
        assert!(Su3Plane::parse("beta-theta").is_err());
    }
}
