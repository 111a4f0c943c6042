//! Exact GP regression over a finite candidate set.
//!
//! The state keeps the Cholesky factor `L` of `K_obs + (σ_n² + jitter) I`, the
//! projected cross-covariance `V = L^{-1} K_{obs,·}` and `α = L^{-1} y`, so one update
//! costs O(tN) and posterior means/variances are available for every candidate.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{domain, Error, Result};
use crate::kernels::GramMatrix;

/// Updates between full refactorizations.
pub const REFACTOR_EVERY: usize = 64;
const JITTER_START: f64 = 1e-10;
const JITTER_MAX: f64 = 1e-4;

/// Confidence schedule β_t.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BetaSchedule {
    /// β_t = 2 log(N t² π² / 6).
    BayesCaption,
    /// β_t = (B + √(2 log(π² t² / (6δ))))², i.e. O(log t + B²).
    Frequentist { b: f64, delta: f64 },
}

impl BetaSchedule {
    pub fn beta(&self, t: usize, n_cand: usize) -> f64 {
        let t = t.max(1) as f64;
        match *self {
            BetaSchedule::BayesCaption => 2.0 * (n_cand as f64 * t * t * PI * PI / 6.0).ln(),
            BetaSchedule::Frequentist { b, delta } => {
                let r = (2.0 * (PI * PI * t * t / (6.0 * delta)).ln()).max(0.0).sqrt();
                (b + r).powi(2)
            }
        }
    }
}

/// Posterior state over the candidate set of a Gram matrix.
#[derive(Clone, Debug)]
pub struct GpPosterior {
    gram: Arc<GramMatrix>,
    noise_var: f64,
    observed: Vec<(usize, f64)>,
    /// Rows of the lower-triangular factor.
    factor: Vec<Vec<f64>>,
    v: Vec<Vec<f64>>,
    alpha: Vec<f64>,
    mean: Vec<f64>,
    var: Vec<f64>,
    jitter_used: f64,
    since_refactor: usize,
}

impl GpPosterior {
    /// Prior state: mean 0 and variance k(θ, θ) everywhere.
    pub fn new(gram: Arc<GramMatrix>, noise_var: f64) -> Result<Self> {
        if !(noise_var > 0.0 && noise_var.is_finite()) {
            return domain(format!("noise variance must be positive, got {noise_var}"));
        }
        let n = gram.len();
        let var = (0..n).map(|i| gram.values[(i, i)]).collect();
        Ok(Self {
            gram,
            noise_var,
            observed: Vec::new(),
            factor: Vec::new(),
            v: Vec::new(),
            alpha: Vec::new(),
            mean: vec![0.0; n],
            var,
            jitter_used: 0.0,
            since_refactor: 0,
        })
    }

    /// Batch fit from an observation list.
    pub fn from_observations(gram: Arc<GramMatrix>, noise_var: f64, obs: &[(usize, f64)]) -> Result<Self> {
        let mut gp = Self::new(gram, noise_var)?;
        for &(a, _) in obs {
            gp.check_arm(a)?;
        }
        gp.observed = obs.to_vec();
        gp.refactor()?;
        Ok(gp)
    }

    pub fn gram(&self) -> &Arc<GramMatrix> {
        &self.gram
    }
    pub fn noise_var(&self) -> f64 {
        self.noise_var
    }
    pub fn observed(&self) -> &[(usize, f64)] {
        &self.observed
    }
    pub fn jitter_used(&self) -> f64 {
        self.jitter_used
    }
    pub fn n_candidates(&self) -> usize {
        self.gram.len()
    }
    pub fn means(&self) -> &[f64] {
        &self.mean
    }
    pub fn variances(&self) -> &[f64] {
        &self.var
    }

    fn check_arm(&self, arm: usize) -> Result<()> {
        if arm >= self.gram.len() {
            return domain(format!("arm {arm} out of range for {} candidates", self.gram.len()));
        }
        Ok(())
    }

    fn k(&self, i: usize, j: usize) -> f64 {
        self.gram.values[(i, j)]
    }

    /// Condition on one more observation.
    pub fn update(&mut self, arm: usize, reward: f64) -> Result<()> {
        self.check_arm(arm)?;
        if !reward.is_finite() {
            return Err(Error::Numeric(format!("non-finite reward {reward}")));
        }
        self.observed.push((arm, reward));
        self.since_refactor += 1;
        if self.since_refactor >= REFACTOR_EVERY {
            return self.refactor();
        }
        let t = self.factor.len();
        let l: Vec<f64> = (0..t).map(|i| self.v[i][arm]).collect();
        let d2 = self.k(arm, arm) + self.noise_var + self.jitter_used - l.iter().map(|x| x * x).sum::<f64>();
        if !(d2 > 0.0 && d2.is_finite()) {
            return self.refactor();
        }
        let d = d2.sqrt();
        let a = (reward - l.iter().zip(&self.alpha).map(|(x, y)| x * y).sum::<f64>()) / d;
        let n = self.gram.len();
        let mut row = vec![0.0; n];
        for (j, r) in row.iter_mut().enumerate() {
            let mut s = self.k(arm, j);
            for (i, li) in l.iter().enumerate() {
                s -= li * self.v[i][j];
            }
            *r = s / d;
        }
        for j in 0..n {
            self.mean[j] += row[j] * a;
            self.var[j] = (self.var[j] - row[j] * row[j]).max(0.0);
        }
        let mut frow = l;
        frow.push(d);
        self.factor.push(frow);
        self.v.push(row);
        self.alpha.push(a);
        Ok(())
    }

    /// Rebuild the factor from scratch, escalating jitter on failure.
    fn refactor(&mut self) -> Result<()> {
        self.since_refactor = 0;
        let sf2 = (0..self.gram.len()).map(|i| self.k(i, i)).fold(0.0, f64::max);
        let mut jitter = 0.0;
        loop {
            if let Some(l) = self.cholesky(jitter) {
                self.jitter_used = jitter;
                self.install(l);
                return Ok(());
            }
            jitter = if jitter == 0.0 { JITTER_START * sf2 } else { jitter * 10.0 };
            if jitter > JITTER_MAX * sf2 * (1.0 + 1e-9) {
                return Err(Error::Numeric(format!(
                    "Cholesky failed for {} observations after jitter escalation to {:e} (noise variance {:e})",
                    self.observed.len(),
                    JITTER_MAX * sf2,
                    self.noise_var
                )));
            }
        }
    }

    fn cholesky(&self, jitter: f64) -> Option<Vec<Vec<f64>>> {
        let t = self.observed.len();
        let mut l: Vec<Vec<f64>> = Vec::with_capacity(t);
        for i in 0..t {
            let ai = self.observed[i].0;
            let mut row = vec![0.0; i + 1];
            for j in 0..=i {
                let aj = self.observed[j].0;
                let mut s = self.k(ai, aj);
                if i == j {
                    s += self.noise_var + jitter;
                }
                if i == j {
                    s -= row[..j].iter().map(|x| x * x).sum::<f64>();
                } else {
                    s -= row[..j].iter().zip(&l[j][..j]).map(|(x, y)| x * y).sum::<f64>();
                }
                if i == j {
                    if !(s > 0.0 && s.is_finite()) {
                        return None;
                    }
                    row[j] = s.sqrt();
                } else {
                    row[j] = s / l[j][j];
                }
            }
            l.push(row);
        }
        Some(l)
    }

    fn install(&mut self, l: Vec<Vec<f64>>) {
        let t = l.len();
        let n = self.gram.len();
        let mut v: Vec<Vec<f64>> = Vec::with_capacity(t);
        let mut alpha = Vec::with_capacity(t);
        for i in 0..t {
            let ai = self.observed[i].0;
            let mut row: Vec<f64> = (0..n).map(|j| self.k(ai, j)).collect();
            let mut y = self.observed[i].1;
            for k in 0..i {
                let lik = l[i][k];
                for (r, vk) in row.iter_mut().zip(&v[k]) {
                    *r -= lik * vk;
                }
                y -= lik * alpha[k];
            }
            let d = l[i][i];
            row.iter_mut().for_each(|r| *r /= d);
            v.push(row);
            alpha.push(y / d);
        }
        let mut mean = vec![0.0; n];
        let mut var: Vec<f64> = (0..n).map(|j| self.k(j, j)).collect();
        for (row, a) in v.iter().zip(&alpha) {
            for j in 0..n {
                mean[j] += row[j] * a;
                var[j] -= row[j] * row[j];
            }
        }
        var.iter_mut().for_each(|x| *x = x.max(0.0));
        self.factor = l;
        self.v = v;
        self.alpha = alpha;
        self.mean = mean;
        self.var = var;
    }

    /// (mean, variance) at the requested candidates.
    pub fn query(&self, arms: &[usize]) -> Result<Vec<(f64, f64)>> {
        arms.iter()
            .map(|&a| {
                self.check_arm(a)?;
                Ok((self.mean[a], self.var[a]))
            })
            .collect()
    }

    /// μ + √β σ at every candidate.
    pub fn ucb_scores(&self, beta: f64) -> Vec<f64> {
        let sb = beta.max(0.0).sqrt();
        self.mean.iter().zip(&self.var).map(|(m, v)| m + sb * v.sqrt()).collect()
    }

    /// Lower-triangular factor of `K_obs + (σ_n² + jitter) I` as rows.
    pub fn factor(&self) -> &[Vec<f64>] {
        &self.factor
    }
}

/// Index of the largest value; the lowest index wins ties.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    best
}
