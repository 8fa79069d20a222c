//! Parameterized pure-state families and their local geometry.

mod geometry;
mod models;
mod registry;

use alloc::boxed::Box;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{norm, CVector};

pub use geometry::{
    berry_curvature, compatibility_check, idqs, idqs_from_metric, intrinsic_derivative, qfm, qgt,
    qgt_with, sld, DerivOptions, QgTensor, SldOperator,
};
pub use models::{
    coherent_amplitudes, su11_amplitudes, Coherent, Cpn, Sphere, Su11, Su3Euler,
    COHERENT_DEFAULT_CUTOFF, SU11_DEFAULT_CUTOFF,
};
pub use registry::{build_model, parse_assignments, ModelOptions, MODEL_NAMES};

/// Tolerance on `| ||psi|| - 1 |` accepted from a model before normalisation.
pub const NORM_TOLERANCE: f64 = 1e-9;

/// A point in parameter space.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamPoint {
    coords: Vec<f64>,
}

impl ParamPoint {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidPoint("no coordinates".into()));
        }
        if let Some(i) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::InvalidPoint(alloc::format!("coordinate {i} is not finite")));
        }
        Ok(Self { coords })
    }

    pub fn from_slice(coords: &[f64]) -> Result<Self> {
        Self::new(coords.to_vec())
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// Copy with coordinate `mu` shifted by `delta`.
    pub fn shifted(&self, mu: usize, delta: f64) -> Self {
        let mut coords = self.coords.clone();
        coords[mu] += delta;
        Self { coords }
    }

    pub fn offset(&self, delta: &[f64]) -> Self {
        let coords = self.coords.iter().zip(delta).map(|(a, b)| a + b).collect();
        Self { coords }
    }
}

/// A normalised amplitude vector.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: CVector,
}

impl StateVector {
    /// Normalises `amplitudes`, failing if the norm is off by more than [`NORM_TOLERANCE`].
    pub fn new(amplitudes: CVector) -> Result<Self> {
        let n = norm(&amplitudes);
        let deviation = (n - 1.0).abs();
        if !(deviation <= NORM_TOLERANCE) {
            return Err(Error::Norm { deviation });
        }
        Ok(Self {
            amplitudes: amplitudes / Complex64::new(n, 0.0),
        })
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn into_inner(self) -> CVector {
        self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }
}

/// Allowed range of a single coordinate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    /// Angular coordinate: the map is smooth across the chart edges, so any
    /// finite value is accepted and finite differences may step outside.
    pub periodic: bool,
}

impl Interval {
    pub const fn bounded(lo: f64, hi: f64) -> Self {
        Self { lo, hi, periodic: false }
    }

    pub const fn periodic(lo: f64, hi: f64) -> Self {
        Self { lo, hi, periodic: true }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.periodic || (x >= self.lo && x <= self.hi)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    /// Distance from `x` to the nearest edge; infinite for periodic coordinates.
    pub fn margin(&self, x: f64) -> f64 {
        if self.periodic {
            f64::INFINITY
        } else {
            (x - self.lo).min(self.hi - x)
        }
    }
}

/// A map from parameters to (possibly unnormalised within tolerance) amplitudes.
pub trait StateModel: Send + Sync {
    /// Hilbert-space dimension `n + 1`.
    fn dim(&self) -> usize;

    fn param_dim(&self) -> usize;

    fn domain(&self) -> Vec<Interval>;

    fn param_names(&self) -> Vec<String>;

    /// Raw amplitudes; callers go through [`evaluate`] which checks the domain.
    fn amplitudes(&self, theta: &[f64]) -> CVector;

    /// `d psi / d theta^mu` of the raw amplitudes, when known in closed form.
    fn analytic_derivative(&self, _theta: &[f64], _mu: usize) -> Option<CVector> {
        None
    }

    /// Slack of any constraint beyond the box domain; negative means violated.
    fn slack(&self, _theta: &[f64]) -> f64 {
        f64::INFINITY
    }

    /// Minimum slack at which derivatives are defined.
    fn regular_slack(&self) -> f64 {
        0.0
    }
}

macro_rules! forward_model {
    ($($ty:ty),*) => {$(
        impl<M: StateModel + ?Sized> StateModel for $ty {
            fn dim(&self) -> usize { (**self).dim() }
            fn param_dim(&self) -> usize { (**self).param_dim() }
            fn domain(&self) -> Vec<Interval> { (**self).domain() }
            fn param_names(&self) -> Vec<String> { (**self).param_names() }
            fn amplitudes(&self, theta: &[f64]) -> CVector { (**self).amplitudes(theta) }
            fn analytic_derivative(&self, theta: &[f64], mu: usize) -> Option<CVector> {
                (**self).analytic_derivative(theta, mu)
            }
            fn slack(&self, theta: &[f64]) -> f64 { (**self).slack(theta) }
            fn regular_slack(&self) -> f64 { (**self).regular_slack() }
        }
    )*};
}

forward_model!(&M, Box<M>, Arc<M>);

/// Checks that `theta` lies in the model domain.
pub fn check_domain<M: StateModel + ?Sized>(model: &M, theta: &ParamPoint) -> Result<()> {
    if theta.dim() != model.param_dim() {
        return Err(Error::Dimension {
            expected: model.param_dim(),
            found: theta.dim(),
        });
    }
    for (coord, (iv, &value)) in model.domain().iter().zip(theta.coords()).enumerate() {
        if !iv.contains(value) {
            return Err(Error::Domain { coord, value });
        }
    }
    let slack = model.slack(theta.coords());
    if slack < -1e-12 {
        return Err(Error::Constraint { slack });
    }
    Ok(())
}

pub fn evaluate<M: StateModel + ?Sized>(model: &M, theta: &ParamPoint) -> Result<StateVector> {
    check_domain(model, theta)?;
    let amps = model.amplitudes(theta.coords());
    if amps.len() != model.dim() {
        return Err(Error::Dimension {
            expected: model.dim(),
            found: amps.len(),
        });
    }
    StateVector::new(amps)
}

type AmpFn = dyn Fn(&[f64]) -> CVector + Send + Sync;
type DerivFn = dyn Fn(&[f64], usize) -> CVector + Send + Sync;

/// Model assembled from closures.
pub struct FnModel {
    dim: usize,
    domain: Vec<Interval>,
    names: Vec<String>,
    amplitude_fn: Box<AmpFn>,
    deriv_fn: Option<Box<DerivFn>>,
}

impl FnModel {
    pub fn new<F>(dim: usize, domain: Vec<Interval>, amplitude_fn: F) -> Self
    where
        F: Fn(&[f64]) -> CVector + Send + Sync + 'static,
    {
        let names = (0..domain.len()).map(|i| alloc::format!("t{}", i + 1)).collect();
        Self {
            dim,
            domain,
            names,
            amplitude_fn: Box::new(amplitude_fn),
            deriv_fn: None,
        }
    }

    pub fn with_derivative<F>(mut self, deriv_fn: F) -> Self
    where
        F: Fn(&[f64], usize) -> CVector + Send + Sync + 'static,
    {
        self.deriv_fn = Some(Box::new(deriv_fn));
        self
    }

    pub fn with_names(mut self, names: &[&str]) -> Self {
        self.names = names.iter().map(|s| String::from(*s)).collect();
        self
    }
}

impl StateModel for FnModel {
    fn dim(&self) -> usize {
        self.dim
    }
    fn param_dim(&self) -> usize {
        self.domain.len()
    }
    fn domain(&self) -> Vec<Interval> {
        self.domain.clone()
    }
    fn param_names(&self) -> Vec<String> {
        self.names.clone()
    }
    fn amplitudes(&self, theta: &[f64]) -> CVector {
        (self.amplitude_fn)(theta)
    }
    fn analytic_derivative(&self, theta: &[f64], mu: usize) -> Option<CVector> {
        self.deriv_fn.as_ref().map(|f| f(theta, mu))
    }
}

/// Restriction of a model to the coordinates left free by a mask.
pub struct Submanifold<M> {
    base: M,
    /// Per base coordinate: `Some(value)` when fixed.
    mask: Vec<Option<f64>>,
    free: Vec<usize>,
}

impl<M: StateModel> Submanifold<M> {
    pub fn new(base: M, mask: Vec<Option<f64>>) -> Result<Self> {
        if mask.len() != base.param_dim() {
            return Err(Error::Dimension {
                expected: base.param_dim(),
                found: mask.len(),
            });
        }
        let free: Vec<usize> = (0..mask.len()).filter(|&i| mask[i].is_none()).collect();
        if free.is_empty() {
            return Err(Error::InvalidArgument("every coordinate is fixed".into()));
        }
        Ok(Self { base, mask, free })
    }

    /// Fixes the named coordinates.
    pub fn fix(base: M, fixed: &[(String, f64)]) -> Result<Self> {
        let names = base.param_names();
        let mut mask = alloc::vec![None; names.len()];
        for (name, value) in fixed {
            let idx = names
                .iter()
                .position(|n| n == name)
                .ok_or_else(|| Error::Unknown(name.clone()))?;
            mask[idx] = Some(*value);
        }
        Self::new(base, mask)
    }

    /// Free coordinates as indices into the base model.
    pub fn free_indices(&self) -> &[usize] {
        &self.free
    }

    pub fn base(&self) -> &M {
        &self.base
    }

    pub fn embed(&self, theta: &[f64]) -> Vec<f64> {
        let mut it = theta.iter();
        self.mask
            .iter()
            .map(|m| match m {
                Some(v) => *v,
                None => *it.next().unwrap_or(&f64::NAN),
            })
            .collect()
    }
}

impl<M: StateModel> StateModel for Submanifold<M> {
    fn dim(&self) -> usize {
        self.base.dim()
    }
    fn param_dim(&self) -> usize {
        self.free.len()
    }
    fn domain(&self) -> Vec<Interval> {
        let d = self.base.domain();
        self.free.iter().map(|&i| d[i]).collect()
    }
    fn param_names(&self) -> Vec<String> {
        let n = self.base.param_names();
        self.free.iter().map(|&i| n[i].clone()).collect()
    }
    fn amplitudes(&self, theta: &[f64]) -> CVector {
        self.base.amplitudes(&self.embed(theta))
    }
    fn analytic_derivative(&self, theta: &[f64], mu: usize) -> Option<CVector> {
        self.base.analytic_derivative(&self.embed(theta), self.free[mu])
    }
    fn slack(&self, theta: &[f64]) -> f64 {
        self.base.slack(&self.embed(theta))
    }
    fn regular_slack(&self) -> f64 {
        self.base.regular_slack()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn param_point_rejects_nan_and_empty() {
        assert!(ParamPoint::new(Vec::new()).is_err());
        assert!(ParamPoint::new(alloc::vec![0.0, f64::NAN]).is_err());
    }

    #[test]
    fn state_vector_normalises_within_tolerance() {
        let v = CVector::from_vec(alloc::vec![Complex64::new(1.0 + 1e-10, 0.0)]);
        let s = StateVector::new(v).unwrap();
        assert_eq!(s.amplitudes()[0].re, 1.0);
        let bad = CVector::from_vec(alloc::vec![Complex64::new(1.1, 0.0)]);
        assert!(matches!(StateVector::new(bad), Err(Error::Norm { .. })));
    }

    #[test]
    fn submanifold_embeds_free_coordinates() {
        let sub = Submanifold::new(Su3Euler, alloc::vec![None, Some(0.1), Some(0.2), None]).unwrap();
        assert_eq!(sub.embed(&[0.5, 0.7]), alloc::vec![0.5, 0.1, 0.2, 0.7]);
        assert_eq!(sub.param_names(), alloc::vec!["alpha", "theta"]);
    }
}
