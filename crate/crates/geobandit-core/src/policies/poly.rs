use nalgebra::{DMatrix, DVector};

use crate::error::{domain, Result};
use crate::geometry::{log_unchecked, ManifoldSpec, Point};

/// Relative ridge added when the design is rank deficient.
pub const RIDGE: f64 = 1e-8;

/// Exponent tuples of all monomials of total degree ≤ k in d variables, graded
/// (constant term first).
pub fn monomials(d: usize, k: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    for deg in 0..=k {
        let mut cur = vec![0u32; d];
        push_degree(&mut out, &mut cur, 0, deg as u32);
    }
    out
}

fn push_degree(out: &mut Vec<Vec<u32>>, cur: &mut Vec<u32>, pos: usize, left: u32) {
    if pos + 1 == cur.len() {
        cur[pos] = left;
        out.push(cur.clone());
        return;
    }
    for e in (0..=left).rev() {
        cur[pos] = e;
        push_degree(out, cur, pos + 1, left - e);
    }
    cur[pos] = 0;
}

/// Q = C(k+d, d).
pub fn n_coefficients(d: usize, k: usize) -> usize {
    (1..=d).fold(1usize, |acc, i| acc * (k + i) / i)
}

/// Degree-k least-squares polynomial in normal coordinates at a cell center.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalPolyFit {
    pub center: Point,
    pub degree: usize,
    pub dim: usize,
    pub coeffs: Vec<f64>,
    /// Largest absolute residual over the samples.
    pub residual: f64,
    /// True when the ridge-regularized solve was used.
    pub ridge_used: bool,
    exps: Vec<Vec<u32>>,
}

impl LocalPolyFit {
    pub fn eval(&self, v: &[f64]) -> f64 {
        self.exps.iter().zip(&self.coeffs).map(|(e, c)| c * monomial(e, v)).sum()
    }

    /// Largest value over a square grid of spacing `res` clipped to the ball |v| ≤ radius;
    /// returns the value and its tangent vector.
    pub fn max_on_ball(&self, radius: f64, res: f64) -> (f64, Vec<f64>) {
        let half = ((radius / res).ceil() as i64).clamp(1, 64);
        let step = radius / half as f64;
        let mut best = (self.coeffs[0], vec![0.0; self.dim]);
        let mut idx = vec![-half; self.dim];
        let mut v = vec![0.0; self.dim];
        loop {
            let mut r2 = 0.0;
            for (x, &i) in v.iter_mut().zip(&idx) {
                *x = i as f64 * step;
                r2 += *x * *x;
            }
            if r2 <= radius * radius * (1.0 + 1e-12) {
                let val = self.eval(&v);
                if val > best.0 {
                    best = (val, v.clone());
                }
            }
            let mut k = 0;
            loop {
                if k == self.dim {
                    return best;
                }
                idx[k] += 1;
                if idx[k] <= half {
                    break;
                }
                idx[k] = -half;
                k += 1;
            }
        }
    }

    /// Stationary point of a degree-2 fit (solves ∇p = 0).
    pub fn quadratic_vertex(&self) -> Option<Vec<f64>> {
        if self.degree != 2 {
            return None;
        }
        let d = self.dim;
        let mut h = DMatrix::zeros(d, d);
        let mut g = DVector::zeros(d);
        for (e, &c) in self.exps.iter().zip(&self.coeffs) {
            let nz: Vec<usize> = (0..d).filter(|&i| e[i] > 0).collect();
            match (e.iter().sum::<u32>(), nz.as_slice()) {
                (1, [i]) => g[*i] = c,
                (2, [i]) => h[(*i, *i)] = 2.0 * c,
                (2, [i, j]) => {
                    h[(*i, *j)] = c;
                    h[(*j, *i)] = c;
                }
                _ => {}
            }
        }
        h.lu().solve(&(-g)).map(|x| x.iter().copied().collect())
    }
}

fn monomial(e: &[u32], v: &[f64]) -> f64 {
    e.iter().zip(v).map(|(&p, &x)| x.powi(p as i32)).product()
}

/// Least-squares fit of `samples` (points and rewards) with a degree-`degree` polynomial
/// in log-map coordinates at `center`.
///
/// Rank-deficient designs fall back to a ridge solve with penalty `RIDGE · tr(XᵀX)/Q`
/// and set `ridge_used`.
pub fn local_poly_fit(m: &ManifoldSpec, center: &Point, samples: &[(Point, f64)], degree: usize) -> Result<LocalPolyFit> {
    let d = m.dim;
    let q = n_coefficients(d, degree);
    if samples.len() < q {
        return domain(format!("need at least Q = {q} samples, got {}", samples.len()));
    }
    let exps = monomials(d, degree);
    let coords: Vec<Vec<f64>> = samples.iter().map(|(p, _)| log_unchecked(m, &center.0, &p.0)).collect();
    let x = DMatrix::from_fn(samples.len(), q, |i, j| monomial(&exps[j], &coords[i]));
    let y = DVector::from_iterator(samples.len(), samples.iter().map(|s| s.1));
    let svd = x.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let rank = svd.singular_values.iter().filter(|&&s| s > smax * 1e-10).count();
    let (coeffs, ridge_used) = if rank == q && smax > 0.0 {
        (svd.solve(&y, smax * 1e-12).map_err(|e| crate::Error::Numeric(e.to_string()))?, false)
    } else {
        let xtx = x.transpose() * &x;
        let lam = RIDGE * (xtx.trace() / q as f64).max(1.0);
        let a = xtx + DMatrix::identity(q, q) * lam;
        let b = x.transpose() * &y;
        let c = a.cholesky().ok_or_else(|| crate::Error::Numeric("ridge system not positive definite".into()))?.solve(&b);
        (c, true)
    };
    let resid = (&x * &coeffs - &y).amax();
    Ok(LocalPolyFit {
        center: center.clone(),
        degree,
        dim: d,
        coeffs: coeffs.iter().copied().collect(),
        residual: resid,
        ridge_used,
        exps,
    })
}
