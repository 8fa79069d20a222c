//! Derivative-free minimisation.

use alloc::vec;
use alloc::vec::Vec;


#[derive(Debug, Clone, Copy)]
pub struct NelderMeadOptions {
    pub max_iter: usize,
    /// Converged once the spread of vertex values and the simplex diameter
    /// are both within these tolerances.
    pub f_tol: f64,
    pub x_tol: f64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            max_iter: 200,
            f_tol: 1e-10,
            x_tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Nelder-Mead simplex search starting from `x0` with initial edge lengths `scale`.
///
/// Ties between equal vertex values keep the earlier vertex first, so the
/// result is a deterministic function of the inputs.
pub fn nelder_mead<F>(mut f: F, x0: &[f64], scale: &[f64], opts: NelderMeadOptions) -> Minimum
where
    F: FnMut(&[f64]) -> f64,
{
    let n = x0.len();
    let mut pts: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    pts.push(x0.to_vec());
    for i in 0..n {
        let mut p = x0.to_vec();
        p[i] += scale[i];
        pts.push(p);
    }
    let mut vals: Vec<f64> = pts.iter().map(|p| sanitize(f(p))).collect();
    let mut order: Vec<usize> = (0..=n).collect();
    let mut iterations = 0;
    let mut converged = false;

    while iterations < opts.max_iter {
        order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]).then(a.cmp(&b)));
        let best = order[0];
        let worst = order[n];
        let second = order[n.saturating_sub(1)];

        let spread = (vals[worst] - vals[best]).abs();
        let diameter = pts
            .iter()
            .map(|p| {
                p.iter()
                    .zip(&pts[best])
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if spread <= opts.f_tol && diameter <= opts.x_tol {
            converged = true;
            break;
        }
        iterations += 1;

        let mut centroid = vec![0.0; n];
        for &i in order.iter().take(n) {
            for (c, x) in centroid.iter_mut().zip(&pts[i]) {
                *c += x / n as f64;
            }
        }
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&pts[worst])
                .map(|(c, w)| c + t * (w - c))
                .collect()
        };

        let xr = along(-1.0);
        let fr = sanitize(f(&xr));
        if fr < vals[best] {
            let xe = along(-2.0);
            let fe = sanitize(f(&xe));
            if fe < fr {
                pts[worst] = xe;
                vals[worst] = fe;
            } else {
                pts[worst] = xr;
                vals[worst] = fr;
            }
            continue;
        }
        if fr < vals[second] {
            pts[worst] = xr;
            vals[worst] = fr;
            continue;
        }
        let (xc, fc) = if fr < vals[worst] {
            let xc = along(-0.5);
            let fc = sanitize(f(&xc));
            (xc, fc)
        } else {
            let xc = along(0.5);
            let fc = sanitize(f(&xc));
            (xc, fc)
        };
        if fc < vals[worst].min(fr) {
            pts[worst] = xc;
            vals[worst] = fc;
            continue;
        }
        // shrink toward the best vertex
        let anchor = pts[best].clone();
        for i in 0..=n {
            if i == best {
                continue;
            }
            for (x, a) in pts[i].iter_mut().zip(&anchor) {
                *x = a + 0.5 * (*x - a);
            }
            vals[i] = sanitize(f(&pts[i]));
        }
    }

    order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]).then(a.cmp(&b)));
    let best = order[0];
    Minimum {
        x: pts[best].clone(),
        value: vals[best],
        iterations,
        converged,
    }
}

fn sanitize(v: f64) -> f64 {
    if v.is_nan() {
        f64::INFINITY
    } else {
        v
    }
}

/// Points of a regular grid over the box `lo..hi` with `n` points per axis,
/// cell-centred so periodic axes are not sampled twice.
pub fn grid_points(lo: &[f64], hi: &[f64], n: usize) -> Vec<Vec<f64>> {
    let d = lo.len();
    let total = n.pow(d as u32);
    let mut out = Vec::with_capacity(total);
    for flat in 0..total {
        let mut rem = flat;
        let mut p = vec![0.0; d];
        for k in (0..d).rev() {
            let idx = rem % n;
            rem /= n;
            p[k] = lo[k] + (hi[k] - lo[k]) * (idx as f64 + 0.5) / n as f64;
        }
        out.push(p);
    }
    out
}
