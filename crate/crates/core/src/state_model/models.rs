//! Built-in state families.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use super::{Interval, StateModel};
use crate::error::{Error, Result};
use crate::linalg::{CVector, I};

fn names(list: &[&str]) -> Vec<String> {
    list.iter().map(|s| String::from(*s)).collect()
}

fn cis(x: f64) -> Complex64 {
    Complex64::from_polar(1.0, x)
}

/// Three-level states in Euler coordinates `(alpha, gamma, beta, theta)`:
///
/// `psi = e^{i(alpha+gamma)} cos(beta) sin(theta) |1>
///       - e^{-i(alpha-gamma)} sin(beta) sin(theta) |2> + cos(theta) |3>`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Su3Euler;

impl Su3Euler {
    pub const ALPHA: usize = 0;
    pub const GAMMA: usize = 1;
    pub const BETA: usize = 2;
    pub const THETA: usize = 3;
}

impl StateModel for Su3Euler {
    fn dim(&self) -> usize {
        3
    }
    fn param_dim(&self) -> usize {
        4
    }
    fn domain(&self) -> Vec<Interval> {
        vec![
            Interval::periodic(0.0, PI),
            Interval::periodic(0.0, PI),
            Interval::bounded(0.0, FRAC_PI_2),
            Interval::bounded(0.0, FRAC_PI_2),
        ]
    }
    fn param_names(&self) -> Vec<String> {
        names(&["alpha", "gamma", "beta", "theta"])
    }
    fn amplitudes(&self, t: &[f64]) -> CVector {
        let (a, g, b, th) = (t[0], t[1], t[2], t[3]);
        CVector::from_vec(vec![
            cis(a + g) * (b.cos() * th.sin()),
            -cis(g - a) * (b.sin() * th.sin()),
            Complex64::new(th.cos(), 0.0),
        ])
    }
    fn analytic_derivative(&self, t: &[f64], mu: usize) -> Option<CVector> {
        let (a, g, b, th) = (t[0], t[1], t[2], t[3]);
        let p0 = cis(a + g);
        let p1 = -cis(g - a);
        let (cb, sb, ct, st) = (b.cos(), b.sin(), th.cos(), th.sin());
        let zero = Complex64::new(0.0, 0.0);
        let v = match mu {
            0 => vec![I * p0 * (cb * st), -I * p1 * (sb * st), zero],
            1 => vec![I * p0 * (cb * st), I * p1 * (sb * st), zero],
            2 => vec![p0 * (-sb * st), p1 * (cb * st), zero],
            3 => vec![p0 * (cb * ct), p1 * (sb * ct), Complex64::new(-st, 0.0)],
            _ => return None,
        };
        Some(CVector::from_vec(v))
    }
}

/// `CP^n` in coordinates `(x_1..x_n, phi_1..phi_n)` with
/// `psi = x_0 |0> + sum_a x_a e^{i phi_a} |a>` and `x_0 = sqrt(1 - sum x_a^2)`.
#[derive(Debug, Clone, Copy)]
pub struct Cpn {
    n: usize,
}

impl Cpn {
    /// Derivatives need `x_0^2` at least this large.
    pub const REGULAR_SLACK: f64 = 1e-6;

    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("CP^n needs n >= 1".into()));
        }
        Ok(Self { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

impl StateModel for Cpn {
    fn dim(&self) -> usize {
        self.n + 1
    }
    fn param_dim(&self) -> usize {
        2 * self.n
    }
    fn domain(&self) -> Vec<Interval> {
        let mut d = vec![Interval::bounded(0.0, 1.0); self.n];
        d.extend(core::iter::repeat_n(Interval::periodic(0.0, 2.0 * PI), self.n));
        d
    }
    fn param_names(&self) -> Vec<String> {
        let mut v: Vec<String> = (1..=self.n).map(|a| alloc::format!("x{a}")).collect();
        v.extend((1..=self.n).map(|a| alloc::format!("phi{a}")));
        v
    }
    fn amplitudes(&self, t: &[f64]) -> CVector {
        let n = self.n;
        let x0 = self.slack(t).max(0.0).sqrt();
        let mut v = vec![Complex64::new(x0, 0.0)];
        v.extend((0..n).map(|a| cis(t[n + a]) * t[a]));
        CVector::from_vec(v)
    }
    fn analytic_derivative(&self, t: &[f64], mu: usize) -> Option<CVector> {
        let n = self.n;
        let mut v = CVector::zeros(n + 1);
        if mu < n {
            let x0 = self.slack(t).max(0.0).sqrt();
            v[0] = Complex64::new(-t[mu] / x0, 0.0);
            v[mu + 1] = cis(t[n + mu]);
        } else if mu < 2 * n {
            let a = mu - n;
            v[a + 1] = I * cis(t[mu]) * t[a];
        } else {
            return None;
        }
        Some(v)
    }
    fn slack(&self, t: &[f64]) -> f64 {
        1.0 - t[..self.n].iter().map(|x| x * x).sum::<f64>()
    }
    fn regular_slack(&self) -> f64 {
        Self::REGULAR_SLACK
    }
}

pub const COHERENT_DEFAULT_CUTOFF: usize = 40;

/// Truncated Fock amplitudes of the coherent state `|alpha>`, levels `0..=cutoff`.
pub fn coherent_amplitudes(re: f64, im: f64, cutoff: usize) -> CVector {
    let alpha = Complex64::new(re, im);
    let mut v = CVector::zeros(cutoff + 1);
    v[0] = Complex64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    for n in 1..=cutoff {
        v[n] = v[n - 1] * alpha / (n as f64).sqrt();
    }
    v
}

/// Coherent states `|alpha>` with `alpha = R + iI`, truncated at a Fock cutoff.
#[derive(Debug, Clone, Copy)]
pub struct Coherent {
    cutoff: usize,
    half_width: f64,
}

impl Coherent {
    pub const DEFAULT_HALF_WIDTH: f64 = 2.0;

    /// Validates that the truncated norm deviates by less than `1e-10` on
    /// the square `|R|, |I| <= half_width`.
    pub fn new(cutoff: usize, half_width: f64) -> Result<Self> {
        if !(half_width > 0.0) {
            return Err(Error::InvalidArgument("half-width must be positive".into()));
        }
        let v = coherent_amplitudes(half_width, half_width, cutoff);
        let deviation = 1.0 - v.iter().map(|z| z.norm_sqr()).sum::<f64>();
        if deviation > 1e-10 {
            return Err(Error::Truncation { deviation });
        }
        Ok(Self { cutoff, half_width })
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }
}

impl Default for Coherent {
    fn default() -> Self {
        Self {
            cutoff: COHERENT_DEFAULT_CUTOFF,
            half_width: Self::DEFAULT_HALF_WIDTH,
        }
    }
}

impl StateModel for Coherent {
    fn dim(&self) -> usize {
        self.cutoff + 1
    }
    fn param_dim(&self) -> usize {
        2
    }
    fn domain(&self) -> Vec<Interval> {
        vec![Interval::bounded(-self.half_width, self.half_width); 2]
    }
    fn param_names(&self) -> Vec<String> {
        names(&["re", "im"])
    }
    fn amplitudes(&self, t: &[f64]) -> CVector {
        coherent_amplitudes(t[0], t[1], self.cutoff)
    }
    fn analytic_derivative(&self, t: &[f64], mu: usize) -> Option<CVector> {
        let c = coherent_amplitudes(t[0], t[1], self.cutoff);
        let (shift, unit) = match mu {
            0 => (t[0], Complex64::new(1.0, 0.0)),
            1 => (t[1], I),
            _ => return None,
        };
        let mut d = CVector::zeros(c.len());
        for n in 0..c.len() {
            d[n] = -c[n] * shift;
            if n > 0 {
                d[n] += unit * c[n - 1] * (n as f64).sqrt();
            }
        }
        Some(d)
    }
}

pub const SU11_DEFAULT_CUTOFF: usize = 60;

/// Truncated amplitudes of the SU(1,1) coherent state `|z, k>` with
/// `z = r e^{i phase}`, levels `0..=cutoff`.
pub fn su11_amplitudes(k: f64, r: f64, phase: f64, cutoff: usize) -> CVector {
    let mut v = CVector::zeros(cutoff + 1);
    let z = Complex64::from_polar(r, phase);
    v[0] = Complex64::new((1.0 - r * r).powf(k), 0.0);
    for m in 0..cutoff {
        let ratio = ((2.0 * k + m as f64) / (m as f64 + 1.0)).sqrt();
        v[m + 1] = v[m] * z * ratio;
    }
    v
}

/// SU(1,1) coherent states of Bargmann index `k` in coordinates `(r, phase)`.
#[derive(Debug, Clone, Copy)]
pub struct Su11 {
    k: f64,
    cutoff: usize,
    r_max: f64,
}

impl Su11 {
    pub const DEFAULT_R_MAX: f64 = 0.7;

    pub fn new(k: f64, cutoff: usize, r_max: f64) -> Result<Self> {
        if !(k > 0.5 + 1e-6) {
            return Err(Error::KRange(k));
        }
        if !(r_max > 0.0 && r_max < 1.0) {
            return Err(Error::InvalidArgument("r_max must lie in (0, 1)".into()));
        }
        let v = su11_amplitudes(k, r_max, 0.0, cutoff);
        let deviation = 1.0 - v.iter().map(|z| z.norm_sqr()).sum::<f64>();
        if deviation > 1e-10 {
            return Err(Error::Truncation { deviation });
        }
        Ok(Self { k, cutoff, r_max })
    }

    pub fn k(&self) -> f64 {
        self.k
    }
}

impl StateModel for Su11 {
    fn dim(&self) -> usize {
        self.cutoff + 1
    }
    fn param_dim(&self) -> usize {
        2
    }
    fn domain(&self) -> Vec<Interval> {
        vec![
            Interval::bounded(0.0, self.r_max),
            Interval::periodic(0.0, 2.0 * PI),
        ]
    }
    fn param_names(&self) -> Vec<String> {
        names(&["r", "phase"])
    }
    fn amplitudes(&self, t: &[f64]) -> CVector {
        su11_amplitudes(self.k, t[0], t[1], self.cutoff)
    }
    fn analytic_derivative(&self, t: &[f64], mu: usize) -> Option<CVector> {
        let (r, phase) = (t[0], t[1]);
        let mut d = CVector::zeros(self.cutoff + 1);
        match mu {
            0 => {
                let u = 1.0 - r * r;
                let pre = u.powf(self.k);
                let mut a = 1.0;
                for m in 0..=self.cutoff {
                    if m > 0 {
                        a *= ((2.0 * self.k + (m - 1) as f64) / m as f64).sqrt();
                    }
                    let rm1 = if m == 0 { 0.0 } else { m as f64 * r.powi(m as i32 - 1) };
                    let radial = rm1 - 2.0 * self.k * r.powi(m as i32 + 1) / u;
                    d[m] = cis(m as f64 * phase) * (pre * a * radial);
                }
            }
            1 => {
                let c = su11_amplitudes(self.k, r, phase, self.cutoff);
                for m in 0..=self.cutoff {
                    d[m] = I * c[m] * m as f64;
                }
            }
            _ => return None,
        }
        Some(d)
    }
}

/// Real two-parameter fixture `(cos t1, sin t1 cos t2, sin t1 sin t2)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sphere;

impl StateModel for Sphere {
    fn dim(&self) -> usize {
        3
    }
    fn param_dim(&self) -> usize {
        2
    }
    fn domain(&self) -> Vec<Interval> {
        vec![Interval::bounded(0.0, PI), Interval::periodic(0.0, 2.0 * PI)]
    }
    fn param_names(&self) -> Vec<String> {
        names(&["t1", "t2"])
    }
    fn amplitudes(&self, t: &[f64]) -> CVector {
        let (a, b) = (t[0], t[1]);
        CVector::from_vec(vec![
            Complex64::new(a.cos(), 0.0),
            Complex64::new(a.sin() * b.cos(), 0.0),
            Complex64::new(a.sin() * b.sin(), 0.0),
        ])
    }
    fn analytic_derivative(&self, t: &[f64], mu: usize) -> Option<CVector> {
        let (a, b) = (t[0], t[1]);
        let v = match mu {
            0 => [-a.sin(), a.cos() * b.cos(), a.cos() * b.sin()],
            1 => [0.0, -a.sin() * b.sin(), a.sin() * b.cos()],
            _ => return None,
        };
        Some(CVector::from_iterator(3, v.iter().map(|&x| Complex64::new(x, 0.0))))
    }
}
