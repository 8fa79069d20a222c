//! Numerical resolution of the identity by the invariant measure.
//!
//! Each resolver integrates `K = ∫ dΘ sqrt|g| ψ ψ^†` over a parameter domain
//! and fits `K ≈ c·1` on the levels that are free of truncation effects.
//! Quadrature uses Gauss-Legendre on bounded axes and the periodic trapezoid
//! rule on angles. Monte-carlo samples the coordinate box uniformly with
//! importance weight `sqrt|g|`. Both partition their points into fixed
//! chunks, so results do not depend on the executor.

use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::exec::Executor;
use crate::linalg::{CMatrix, CVector};
use crate::numeric::{gauss_jacobi, gauss_legendre, CompensatedSum};
use crate::rng::{substream, uniform, StreamRng};
use crate::state_model::{coherent_amplitudes, idqs, Cpn, ParamPoint, StateModel};
use crate::Complex64;

pub const DEFAULT_NODES: usize = 64;
pub const DEFAULT_SAMPLES: usize = 1_000_000;
pub const MIN_MC_SAMPLES: usize = 10_000;
/// Upper bound on the total number of quadrature nodes.
pub const MAX_QUADRATURE_POINTS: usize = 1 << 26;
/// Points per work unit. Fixed so the summation order never changes.
pub const CHUNK: usize = 4096;

pub const COHERENT_DEFAULT_RADIUS: f64 = 8.0;
pub const COHERENT_GUARD: usize = 5;
pub const SU11_GUARD: usize = 10;
/// Largest admissible fraction of a level's weight outside the integration box.
pub const TAIL_BOUND: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Quadrature,
    MonteCarlo,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Quadrature => "quadrature",
            Method::MonteCarlo => "monte-carlo",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "quadrature" => Ok(Method::Quadrature),
            "monte-carlo" | "montecarlo" | "mc" => Ok(Method::MonteCarlo),
            other => Err(Error::InvalidArgument(alloc::format!(
                "unknown integration method {other}"
            ))),
        }
    }

    /// Tensor-product quadrature up to two parameters, sampling beyond.
    pub fn default_for(param_dim: usize) -> Self {
        if param_dim <= 2 {
            Method::Quadrature
        } else {
            Method::MonteCarlo
        }
    }

    /// `n_points` default: nodes per axis or total samples.
    pub fn default_points(self) -> usize {
        match self {
            Method::Quadrature => DEFAULT_NODES,
            Method::MonteCarlo => DEFAULT_SAMPLES,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ResolutionReport {
    /// Integrated operator over all levels.
    pub k_matrix: CMatrix,
    /// Levels `0..fit_levels` enter the fit.
    pub fit_levels: usize,
    pub fitted_constant: f64,
    /// `||K - c·1||_F / ||K||_F` on the fitted block.
    pub off_identity_residual: f64,
    /// Number of integrand evaluations.
    pub n_points: usize,
    pub method: Method,
    /// Standard error of `fitted_constant` (monte-carlo only).
    pub stderr: Option<f64>,
    /// Expected `off_identity_residual` from sampling noise alone (monte-carlo only).
    pub residual_noise: Option<f64>,
    /// `∫ sqrt|g| dΘ` where the measure has finite total mass.
    pub volume: Option<f64>,
    pub volume_stderr: Option<f64>,
}

impl ResolutionReport {
    pub fn dim(&self) -> usize {
        self.k_matrix.nrows()
    }
}

/// One integrand evaluation: measure weight, weight applied to `ψψ^†`, and
/// the (possibly unnormalised) state.
struct Sample {
    w_vol: f64,
    w_k: f64,
    psi: CVector,
}

#[derive(Clone)]
struct Accumulator {
    d: usize,
    fit: usize,
    k_re: Vec<CompensatedSum>,
    k_im: Vec<CompensatedSum>,
    // sums of w^2 |psi_i|^2 |psi_j|^2 on the fitted block
    second: Option<Vec<CompensatedSum>>,
    vol: CompensatedSum,
    vol_sq: CompensatedSum,
    c: CompensatedSum,
    c_sq: CompensatedSum,
    inside: usize,
}

impl Accumulator {
    fn new(d: usize, fit: usize, moments: bool) -> Self {
        Self {
            d,
            fit,
            k_re: vec![CompensatedSum::new(); d * d],
            k_im: vec![CompensatedSum::new(); d * d],
            second: moments.then(|| vec![CompensatedSum::new(); fit * fit]),
            vol: CompensatedSum::new(),
            vol_sq: CompensatedSum::new(),
            c: CompensatedSum::new(),
            c_sq: CompensatedSum::new(),
            inside: 0,
        }
    }

    fn add(&mut self, s: &Sample) {
        let d = self.d;
        self.inside += 1;
        for i in 0..d {
            let a = s.psi[i] * s.w_k;
            for j in i..d {
                let z = a * s.psi[j].conj();
                self.k_re[i * d + j].add(z.re);
                self.k_im[i * d + j].add(z.im);
            }
        }
        self.vol.add(s.w_vol);
        self.vol_sq.add(s.w_vol * s.w_vol);
        let fit_mass: f64 = s.psi.iter().take(self.fit).map(|z| z.norm_sqr()).sum();
        let f = s.w_k * fit_mass / self.fit as f64;
        self.c.add(f);
        self.c_sq.add(f * f);
        if let Some(second) = self.second.as_mut() {
            let n = self.fit;
            for i in 0..n {
                let pi = s.psi[i].norm_sqr() * s.w_k;
                for j in i..n {
                    second[i * n + j].add(pi * s.psi[j].norm_sqr() * s.w_k);
                }
            }
        }
    }

    fn merge(&mut self, other: &Accumulator) {
        for (a, b) in self.k_re.iter_mut().zip(&other.k_re) {
            a.merge(b);
        }
        for (a, b) in self.k_im.iter_mut().zip(&other.k_im) {
            a.merge(b);
        }
        if let (Some(a), Some(b)) = (self.second.as_mut(), other.second.as_ref()) {
            for (x, y) in a.iter_mut().zip(b) {
                x.merge(y);
            }
        }
        self.vol.merge(&other.vol);
        self.vol_sq.merge(&other.vol_sq);
        self.c.merge(&other.c);
        self.c_sq.merge(&other.c_sq);
        self.inside += other.inside;
    }

    fn matrix(&self, scale: f64) -> CMatrix {
        let d = self.d;
        CMatrix::from_fn(d, d, |i, j| {
            let (a, b, conj) = if i <= j { (i, j, false) } else { (j, i, true) };
            let z = Complex64::new(self.k_re[a * d + b].value(), self.k_im[a * d + b].value()) * scale;
            if conj {
                z.conj()
            } else {
                z
            }
        })
    }
}

/// `c` minimising `||K - c·1||_F` on the leading `fit` levels, and the
/// relative residual.
pub fn fit_identity(k: &CMatrix, fit: usize) -> (f64, f64) {
    let c = (0..fit).map(|i| k[(i, i)].re).sum::<f64>() / fit as f64;
    let mut res = 0.0;
    let mut total = 0.0;
    for i in 0..fit {
        for j in 0..fit {
            let z = k[(i, j)];
            total += z.norm_sqr();
            let dev = if i == j { z - c } else { z };
            res += dev.norm_sqr();
        }
    }
    (c, if total > 0.0 { (res / total).sqrt() } else { f64::INFINITY })
}

fn chunks(total: usize) -> usize {
    total.div_ceil(CHUNK)
}

/// Quadrature over a product grid; `point` maps a multi-index to a sample.
fn run_grid<E, F>(
    sizes: &[usize],
    d: usize,
    fit: usize,
    exec: &E,
    point: F,
) -> Result<ResolutionReport>
where
    E: Executor + ?Sized,
    F: Fn(&[usize]) -> Result<Option<Sample>> + Sync + Send,
{
    let total = sizes
        .iter()
        .try_fold(1usize, |acc, &n| acc.checked_mul(n))
        .filter(|&t| t <= MAX_QUADRATURE_POINTS)
        .ok_or_else(|| Error::InvalidArgument("quadrature grid too large".to_string()))?;
    let parts = exec.map(chunks(total), |c| -> Result<Accumulator> {
        let mut acc = Accumulator::new(d, fit, false);
        let mut idx = vec![0usize; sizes.len()];
        for flat in c * CHUNK..((c + 1) * CHUNK).min(total) {
            let mut rem = flat;
            for ax in (0..sizes.len()).rev() {
                idx[ax] = rem % sizes[ax];
                rem /= sizes[ax];
            }
            if let Some(s) = point(&idx)? {
                acc.add(&s);
            }
        }
        Ok(acc)
    });
    let mut acc = Accumulator::new(d, fit, false);
    for part in parts {
        acc.merge(&part?);
    }
    let k = acc.matrix(1.0);
    let (c, res) = fit_identity(&k, fit);
    Ok(ResolutionReport {
        k_matrix: k,
        fit_levels: fit,
        fitted_constant: c,
        off_identity_residual: res,
        n_points: total,
        method: Method::Quadrature,
        stderr: None,
        residual_noise: None,
        volume: Some(acc.vol.value()),
        volume_stderr: None,
    })
}

/// Uniform sampling; `sample` returns `None` for draws outside the domain,
/// which count as zero-weight samples.
fn run_mc<E, F>(
    n: usize,
    seed: u64,
    d: usize,
    fit: usize,
    exec: &E,
    sample: F,
) -> Result<ResolutionReport>
where
    E: Executor + ?Sized,
    F: Fn(&mut StreamRng) -> Result<Option<Sample>> + Sync + Send,
{
    if n < MIN_MC_SAMPLES {
        return Err(Error::Precondition(alloc::format!(
            "monte-carlo needs at least {MIN_MC_SAMPLES} points, got {n}"
        )));
    }
    let parts = exec.map(chunks(n), |c| -> Result<Accumulator> {
        let mut acc = Accumulator::new(d, fit, true);
        let mut rng = substream(seed, c as u64);
        for _ in c * CHUNK..((c + 1) * CHUNK).min(n) {
            if let Some(s) = sample(&mut rng)? {
                acc.add(&s);
            }
        }
        Ok(acc)
    });
    let mut acc = Accumulator::new(d, fit, true);
    for part in parts {
        acc.merge(&part?);
    }
    if acc.inside == 0 {
        return Err(Error::DomainSampling);
    }
    let nf = n as f64;
    let k = acc.matrix(1.0 / nf);
    let (c, res) = fit_identity(&k, fit);
    let var_mean = |sum: f64, sq: f64| ((sq / nf - (sum / nf).powi(2)).max(0.0) / nf).sqrt();
    let stderr = var_mean(acc.c.value(), acc.c_sq.value());
    let volume_stderr = var_mean(acc.vol.value(), acc.vol_sq.value());

    // noise floor of the residual: sqrt(sum_ij Var K_ij) / ||K||_F
    let second = acc.second.as_ref().expect("moments tracked");
    let mut var_total = 0.0;
    let mut norm = 0.0;
    for i in 0..fit {
        for j in 0..fit {
            let (a, b) = if i <= j { (i, j) } else { (j, i) };
            let m2 = second[a * fit + b].value() / nf;
            let z = k[(i, j)];
            var_total += (m2 - z.norm_sqr()).max(0.0) / nf;
            norm += z.norm_sqr();
        }
    }
    Ok(ResolutionReport {
        k_matrix: k,
        fit_levels: fit,
        fitted_constant: c,
        off_identity_residual: res,
        n_points: n,
        method: Method::MonteCarlo,
        stderr: Some(stderr),
        residual_noise: Some((var_total / norm).sqrt()),
        volume: Some(acc.vol.value() / nf),
        volume_stderr: Some(volume_stderr),
    })
}

fn trapezoid(n: usize) -> (Vec<f64>, Vec<f64>) {
    let h = 2.0 * PI / n as f64;
    ((0..n).map(|j| j as f64 * h).collect(), vec![h; n])
}

fn check_nodes(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidArgument("need at least 2 quadrature nodes per axis".to_string()));
    }
    Ok(())
}

/// Resolution of the identity on `CP^n` with density `prod_a x_a`.
///
/// Quadrature nests the radial axes, `x_a` running over
/// `[0, sqrt(1 - sum_{b<a} x_b^2)]`, so the integrand stays smooth.
pub fn resolve_cpn<E: Executor + ?Sized>(
    n: usize,
    method: Method,
    n_points: usize,
    seed: u64,
    exec: &E,
) -> Result<ResolutionReport> {
    if !(1..=3).contains(&n) {
        return Err(Error::InvalidArgument(alloc::format!(
            "CP^n resolution supports n in 1..=3, got {n}"
        )));
    }
    let model = Cpn::new(n)?;
    let d = n + 1;
    match method {
        Method::Quadrature => {
            check_nodes(n_points)?;
            let (s, ws) = gauss_legendre(n_points, 0.0, 1.0);
            let (phi, wp) = trapezoid(n_points);
            let sizes = vec![n_points; 2 * n];
            run_grid(&sizes, d, d, exec, |idx| {
                let mut t = vec![0.0; 2 * n];
                let mut w = 1.0;
                let mut room = 1.0f64;
                for a in 0..n {
                    let top = room.max(0.0).sqrt();
                    t[a] = top * s[idx[a]];
                    w *= top * ws[idx[a]] * t[a];
                    room -= t[a] * t[a];
                    t[n + a] = phi[idx[n + a]];
                    w *= wp[idx[n + a]];
                }
                Ok(Some(Sample {
                    w_vol: w,
                    w_k: w,
                    psi: model.amplitudes(&t),
                }))
            })
        }
        Method::MonteCarlo => {
            let box_volume = (2.0 * PI).powi(n as i32);
            run_mc(n_points, seed, d, d, exec, |rng| {
                let mut t = vec![0.0; 2 * n];
                for x in &mut t[..n] {
                    *x = uniform(rng, 0.0, 1.0);
                }
                for a in 0..n {
                    t[n + a] = uniform(rng, 0.0, 2.0 * PI);
                }
                if model.slack(&t) < 0.0 {
                    return Ok(None);
                }
                let w = box_volume * t[..n].iter().product::<f64>();
                Ok(Some(Sample {
                    w_vol: w,
                    w_k: w,
                    psi: model.amplitudes(&t),
                }))
            })
        }
    }
}

/// `P(Poisson(lambda) <= n)`, summed in log space.
pub fn poisson_cdf(lambda: f64, n: usize) -> f64 {
    let mut log_fact = 0.0;
    let mut acc = CompensatedSum::new();
    for j in 0..=n {
        if j > 0 {
            log_fact += (j as f64).ln();
        }
        acc.add((j as f64 * lambda.ln() - lambda - log_fact).exp());
    }
    acc.value().min(1.0)
}

/// Coherent-state resolution on the square `|Re α|, |Im α| <= radius_max`
/// with unit density.
///
/// Fock level `n` loses at most `P(Poisson(R^2) <= n)` of its weight outside
/// the inscribed disk. Levels up to `cutoff - 5` whose loss is below
/// `TAIL_BOUND` enter the fit.
pub fn resolve_coherent<E: Executor + ?Sized>(
    radius_max: f64,
    cutoff: usize,
    n_points: usize,
    method: Method,
    seed: u64,
    exec: &E,
) -> Result<ResolutionReport> {
    if !(radius_max > 0.0) {
        return Err(Error::InvalidArgument("radius_max must be positive".to_string()));
    }
    let lambda = radius_max * radius_max;
    let guard = cutoff.checked_sub(COHERENT_GUARD);
    let fit = match guard {
        Some(top) => (0..=top)
            .take_while(|&n| poisson_cdf(lambda, n) < TAIL_BOUND)
            .count(),
        None => 0,
    };
    if fit == 0 {
        return Err(Error::Tail {
            level: 0,
            tail: poisson_cdf(lambda, 0),
        });
    }
    let d = cutoff + 1;
    let mut report = match method {
        Method::Quadrature => {
            check_nodes(n_points)?;
            let (x, w) = gauss_legendre(n_points, -radius_max, radius_max);
            run_grid(&[n_points, n_points], d, fit, exec, |idx| {
                let wt = w[idx[0]] * w[idx[1]];
                Ok(Some(Sample {
                    w_vol: wt,
                    w_k: wt,
                    psi: coherent_amplitudes(x[idx[0]], x[idx[1]], cutoff),
                }))
            })?
        }
        Method::MonteCarlo => {
            let area = 4.0 * lambda;
            run_mc(n_points, seed, d, fit, exec, |rng| {
                let re = uniform(rng, -radius_max, radius_max);
                let im = uniform(rng, -radius_max, radius_max);
                Ok(Some(Sample {
                    w_vol: area,
                    w_k: area,
                    psi: coherent_amplitudes(re, im, cutoff),
                }))
            })?
        }
    };
    // the flat measure on the plane has no finite volume
    report.volume = None;
    report.volume_stderr = None;
    Ok(report)
}

/// `a_m z^m` for `m = 0..=cutoff`: the SU(1,1) coherent state without its
/// `(1 - |z|^2)^k` prefactor.
fn su11_polynomial(k: f64, r: f64, phase: f64, cutoff: usize) -> CVector {
    let mut v = CVector::zeros(cutoff + 1);
    let z = Complex64::from_polar(r, phase);
    v[0] = Complex64::new(1.0, 0.0);
    for m in 0..cutoff {
        v[m + 1] = v[m] * z * ((2.0 * k + m as f64) / (m as f64 + 1.0)).sqrt();
    }
    v
}

/// SU(1,1) coherent-state resolution over the unit disk with density
/// `k|z| / (2(1 - |z|^2)^2)` in polar coordinates.
///
/// With `u = |z|^2` the radial integrand is `(k/4) (1-u)^{2k-2} |a_m|^2 u^m`.
/// Quadrature applies a Gauss-Jacobi rule for the weight `(1-u)^{2k-2}`,
/// exact for every kept level once `n_points` exceeds half the cutoff.
/// Monte-carlo draws `u = 1 - v^{1/(2k-1)}` with uniform `v`.
/// Levels up to `cutoff - 10` enter the fit.
pub fn resolve_su11<E: Executor + ?Sized>(
    k: f64,
    cutoff: usize,
    n_points: usize,
    method: Method,
    seed: u64,
    exec: &E,
) -> Result<ResolutionReport> {
    if !(k > 0.5 + 1e-6) {
        return Err(Error::KRange(k));
    }
    let fit = match cutoff.checked_sub(SU11_GUARD) {
        Some(top) => top + 1,
        None => return Err(Error::Tail { level: cutoff, tail: 1.0 }),
    };
    let d = cutoff + 1;
    let at = move |u: f64, phase: f64| su11_polynomial(k, u.clamp(0.0, 1.0).sqrt(), phase, cutoff);
    let mut report = match method {
        Method::Quadrature => {
            check_nodes(n_points)?;
            let (u, wu) = gauss_jacobi(n_points, 2.0 * k - 2.0);
            // enough angles that no pair of kept levels aliases
            let n_phase = n_points.max(2 * d);
            let (phi, wp) = trapezoid(n_phase);
            run_grid(&[n_points, n_phase], d, fit, exec, |idx| {
                Ok(Some(Sample {
                    w_vol: 0.0,
                    w_k: 0.25 * k * wu[idx[0]] * wp[idx[1]],
                    psi: at(u[idx[0]], phi[idx[1]]),
                }))
            })?
        }
        Method::MonteCarlo => {
            let expo = 1.0 / (2.0 * k - 1.0);
            let scale = 2.0 * PI * k / (4.0 * (2.0 * k - 1.0));
            run_mc(n_points, seed, d, fit, exec, |rng| {
                let v: f64 = uniform(rng, 0.0, 1.0);
                let phase = uniform(rng, 0.0, 2.0 * PI);
                Ok(Some(Sample {
                    w_vol: 0.0,
                    w_k: scale,
                    psi: at(1.0 - v.powf(expo), phase),
                }))
            })?
        }
    };
    // the hyperbolic disk has infinite volume
    report.volume = None;
    report.volume_stderr = None;
    Ok(report)
}

/// Experimental resolution for an arbitrary model with the numerically
/// computed density `sqrt|g|`.
///
/// Bounded coordinates use Gauss-Legendre nodes and periodic ones the
/// trapezoid rule. Points with negative constraint slack contribute zero.
/// No accuracy guarantee: the density is evaluated by finite differences
/// and constrained domains are integrated without adaptation.
pub fn resolve_generic<M, E>(
    model: &M,
    method: Method,
    n_points: usize,
    seed: u64,
    exec: &E,
) -> Result<ResolutionReport>
where
    M: StateModel + ?Sized,
    E: Executor + ?Sized,
{
    let domain = model.domain();
    let p = domain.len();
    let d = model.dim();
    let eval = |t: Vec<f64>, w: f64| -> Result<Option<Sample>> {
        if model.slack(&t) < 0.0 {
            return Ok(None);
        }
        let psi = model.amplitudes(&t);
        let w = w * idqs(model, &ParamPoint::new(t)?)?;
        Ok(Some(Sample {
            w_vol: w,
            w_k: w,
            psi,
        }))
    };
    match method {
        Method::Quadrature => {
            check_nodes(n_points)?;
            let rules: Vec<(Vec<f64>, Vec<f64>)> = domain
                .iter()
                .map(|iv| {
                    if iv.periodic {
                        let (x, w) = trapezoid(n_points);
                        let s = iv.width() / (2.0 * PI);
                        (
                            x.iter().map(|x| iv.lo + x * s).collect(),
                            w.iter().map(|w| w * s).collect(),
                        )
                    } else {
                        gauss_legendre(n_points, iv.lo, iv.hi)
                    }
                })
                .collect();
            run_grid(&vec![n_points; p], d, d, exec, |idx| {
                let t = (0..p).map(|a| rules[a].0[idx[a]]).collect();
                let w = (0..p).map(|a| rules[a].1[idx[a]]).product();
                eval(t, w)
            })
        }
        Method::MonteCarlo => {
            let box_volume: f64 = domain.iter().map(|iv| iv.width()).product();
            run_mc(n_points, seed, d, d, exec, |rng| {
                let t = domain.iter().map(|iv| uniform(rng, iv.lo, iv.hi)).collect();
                eval(t, box_volume)
            })
        }
    }
}

/// `pi^n / n!`
pub fn cpn_volume(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, j| acc * PI / j as f64)
}

/// `pi^n / (n+1)!`
pub fn cpn_constant(n: usize) -> f64 {
    cpn_volume(n) / (n + 1) as f64
}

/// `k pi / (2(2k - 1))`
pub fn su11_constant(k: f64) -> f64 {
    k * PI / (2.0 * (2.0 * k - 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::Sequential;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn cp1_quadrature_is_exact() {
        let r = resolve_cpn(1, Method::Quadrature, 64, 0, &Sequential).unwrap();
        assert!(rel(r.fitted_constant, PI / 2.0) < 1e-12);
        assert!(rel(r.volume.unwrap(), PI) < 1e-12);
        assert!(r.off_identity_residual < 1e-12);
        assert_eq!(r.n_points, 64 * 64);
    }

    #[test]
    fn cp2_nested_quadrature() {
        let r = resolve_cpn(2, Method::Quadrature, 12, 0, &Sequential).unwrap();
        assert!(rel(r.fitted_constant, PI * PI / 6.0) < 1e-10);
        assert!(rel(r.volume.unwrap(), PI * PI / 2.0) < 1e-10);
    }

    #[test]
    fn cp1_monte_carlo_within_stderr() {
        let r = resolve_cpn(1, Method::MonteCarlo, 50_000, 9, &Sequential).unwrap();
        let se = r.stderr.unwrap();
        assert!((r.fitted_constant - PI / 2.0).abs() < 4.0 * se, "{} {se}", r.fitted_constant);
        assert!(r.off_identity_residual < 3.0 * r.residual_noise.unwrap());
        // trace of K is the volume, so both estimates agree up to the factor 1/(n+1)
        assert!((r.volume.unwrap() / 2.0 - r.fitted_constant).abs() < 1e-12);
    }

    #[test]
    fn small_sample_count_rejected() {
        let e = resolve_cpn(2, Method::MonteCarlo, 100, 0, &Sequential).unwrap_err();
        assert!(matches!(e, Error::Precondition(_)));
    }

    #[test]
    fn coherent_vacuum_entry_is_gaussian_integral() {
        let r = resolve_coherent(COHERENT_DEFAULT_RADIUS, 40, 64, Method::Quadrature, 0, &Sequential).unwrap();
        assert!(rel(r.k_matrix[(0, 0)].re, PI) < 1e-10);
        assert!(rel(r.fitted_constant, PI) < 1e-6);
        assert!(r.off_identity_residual < 1e-4);
        assert!(r.fit_levels >= 20 && r.fit_levels <= 36);
    }

    #[test]
    fn coherent_small_box_has_no_fit_levels() {
        let e = resolve_coherent(1.0, 40, 16, Method::Quadrature, 0, &Sequential).unwrap_err();
        assert!(matches!(e, Error::Tail { .. }));
    }

    #[test]
    fn su11_constants() {
        for k in [1.0, 0.75, 2.0, 0.55] {
            let r = resolve_su11(k, 60, 64, Method::Quadrature, 0, &Sequential).unwrap();
            assert!(rel(r.fitted_constant, su11_constant(k)) < 1e-6, "k={k} {}", r.fitted_constant);
            assert!(r.off_identity_residual < 1e-4);
        }
    }

    #[test]
    fn su11_monte_carlo_within_stderr() {
        let r = resolve_su11(1.0, 30, 40_000, Method::MonteCarlo, 4, &Sequential).unwrap();
        let se = r.stderr.unwrap();
        assert!((r.fitted_constant - PI / 2.0).abs() < 4.0 * se);
        assert!(r.off_identity_residual < 3.0 * r.residual_noise.unwrap());
    }

    #[test]
    fn su11_rejects_small_k() {
        assert_eq!(
            resolve_su11(0.5, 60, 64, Method::Quadrature, 0, &Sequential).unwrap_err(),
            Error::KRange(0.5)
        );
    }

    #[test]
    fn poisson_cdf_matches_direct_sum() {
        let lambda: f64 = 3.0;
        let direct = (-lambda).exp() * (1.0 + lambda + lambda * lambda / 2.0);
        assert!((poisson_cdf(lambda, 2) - direct).abs() < 1e-15);
    }

    #[test]
    fn monte_carlo_is_reproducible() {
        let a = resolve_cpn(2, Method::MonteCarlo, 20_000, 5, &Sequential).unwrap();
        let b = resolve_cpn(2, Method::MonteCarlo, 20_000, 5, &Sequential).unwrap();
        assert_eq!(a.fitted_constant.to_bits(), b.fitted_constant.to_bits());
    }
}
