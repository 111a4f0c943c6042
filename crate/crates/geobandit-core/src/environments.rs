//! Reward generators defined on candidate sets.

use std::f64::consts::TAU;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{LogNormal, StandardNormal};

use crate::bounds::{sobolev_constants, BoundQuery};
use crate::error::{domain, Error, Result};
use crate::geometry::{dist_unchecked, greedy_packing, CandidateSet, ManifoldKind, Point};
use crate::gp::argmax;
use crate::kernels::{gram, GramMatrix, KernelSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EnvKind {
    GpSample,
    SingleBump,
    SumOfBumps,
    TimeVaryingBatched,
    RisCombiner,
}

/// Smoothness class shared by the bump constructions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BumpParams {
    pub nu: f64,
    /// RKHS norm budget B.
    pub b: f64,
    pub kappa: f64,
    pub sigma_f: f64,
    /// Curvature calibration constant C_Sob.
    pub c_sob: f64,
}

impl BumpParams {
    pub fn canonical(nu: f64) -> Self {
        Self { nu, b: 1.0, kappa: 1.0, sigma_f: 1.0, c_sob: 1.0 }
    }

    fn c_plus(&self, d: usize) -> f64 {
        let q = BoundQuery { kappa: self.kappa, sigma_f: self.sigma_f, ..BoundQuery::canonical(self.nu, d, 1.0) };
        sobolev_constants(&q).1
    }

    /// h = B ε^ν / √(c_+ (1 + C_Sob K ε²)).
    pub fn single_height(&self, d: usize, curvature: f64, eps: f64) -> f64 {
        self.b * eps.powf(self.nu) / (self.c_plus(d) * (1.0 + self.c_sob * curvature * eps * eps)).sqrt()
    }

    /// h_A = B ε^ν / √(c_+ N).
    pub fn sum_height(&self, d: usize, eps: f64, n: usize) -> f64 {
        self.b * eps.powf(self.nu) / (self.c_plus(d) * n as f64).sqrt()
    }
}

/// Compactly supported bump h·η(r/ε) with η(x) = exp(1 − 1/(1 − x²)), so η(0) = 1.
#[derive(Clone, Debug, PartialEq)]
pub struct BumpSpec {
    pub center: Point,
    pub eps: f64,
    pub height: f64,
}

impl BumpSpec {
    pub fn profile(x: f64) -> f64 {
        if x.abs() >= 1.0 {
            0.0
        } else {
            (1.0 - 1.0 / (1.0 - x * x)).exp()
        }
    }

    pub fn value_at_distance(&self, r: f64) -> f64 {
        self.height * Self::profile(r / self.eps)
    }
}

/// Budget bookkeeping for the batched time-varying construction.
#[derive(Clone, Debug, PartialEq)]
pub struct VariationBudget {
    pub b_t: f64,
    pub batches: usize,
    /// Index into the packing for each batch.
    pub bump_index: Vec<usize>,
}

/// Candidate-set-valued reward function, possibly piecewise constant in time.
#[derive(Clone, Debug)]
pub struct Environment {
    pub kind: EnvKind,
    noise_var: f64,
    /// One value vector per batch.
    values: Vec<Vec<f64>>,
    /// First round (1-based) of each batch.
    batch_starts: Vec<usize>,
    optimum: Vec<f64>,
    argmax: Vec<usize>,
    pub bumps: Vec<BumpSpec>,
    pub budget: Option<VariationBudget>,
}

impl Environment {
    fn stationary(kind: EnvKind, values: Vec<f64>) -> Self {
        Self::batched(kind, vec![values], vec![1])
    }

    fn batched(kind: EnvKind, values: Vec<Vec<f64>>, batch_starts: Vec<usize>) -> Self {
        let argmax: Vec<usize> = values.iter().map(|v| argmax(v)).collect();
        let optimum = values.iter().zip(&argmax).map(|(v, &i)| v[i]).collect();
        Self { kind, noise_var: 0.0, values, batch_starts, optimum, argmax, bumps: Vec::new(), budget: None }
    }

    /// Copy with observation noise variance σ_n².
    pub fn with_noise(mut self, noise_var: f64) -> Result<Self> {
        if !(noise_var >= 0.0 && noise_var.is_finite()) {
            return domain(format!("noise variance must be ≥ 0, got {noise_var}"));
        }
        self.noise_var = noise_var;
        Ok(self)
    }

    pub fn noise_var(&self) -> f64 {
        self.noise_var
    }

    pub fn n_candidates(&self) -> usize {
        self.values[0].len()
    }

    pub fn n_batches(&self) -> usize {
        self.values.len()
    }

    pub fn batch_starts(&self) -> &[usize] {
        &self.batch_starts
    }

    /// Batch active at round `t` (1-based).
    pub fn batch_of(&self, t: usize) -> usize {
        self.batch_starts.partition_point(|&s| s <= t).saturating_sub(1)
    }

    pub fn values_at(&self, t: usize) -> &[f64] {
        &self.values[self.batch_of(t)]
    }

    pub fn batch_values(&self, j: usize) -> &[f64] {
        &self.values[j]
    }

    pub fn mean(&self, t: usize, arm: usize) -> f64 {
        self.values_at(t)[arm]
    }

    pub fn optimum_at(&self, t: usize) -> f64 {
        self.optimum[self.batch_of(t)]
    }

    pub fn argmax_at(&self, t: usize) -> usize {
        self.argmax[self.batch_of(t)]
    }

    /// Noisy reward f_t(arm) + N(0, σ_n²).
    pub fn observe<R: Rng + ?Sized>(&self, t: usize, arm: usize, rng: &mut R) -> f64 {
        let z: f64 = rng.sample(StandardNormal);
        self.mean(t, arm) + self.noise_var.sqrt() * z
    }

    /// Σ_j ‖f_{j+1} − f_j‖_∞ over batch boundaries, on candidate values.
    pub fn realized_variation(&self) -> f64 {
        self.values
            .windows(2)
            .map(|w| w[0].iter().zip(&w[1]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .sum()
    }

    /// Every stored optimum equals a fresh exhaustive max over the stored values.
    pub fn optimum_consistent(&self) -> bool {
        self.values.iter().zip(&self.optimum).all(|(v, &o)| v.iter().cloned().fold(f64::NEG_INFINITY, f64::max) == o)
    }

    /// `batch,candidate_index,value` rows.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("batch,candidate_index,value\n");
        for (j, v) in self.values.iter().enumerate() {
            for (i, x) in v.iter().enumerate() {
                let _ = writeln!(s, "{j},{i},{x:.17e}");
            }
        }
        s
    }
}

/// Draw f ~ N(0, K) on the candidate set.
pub fn gp_sample(k: &KernelSpec, cs: &CandidateSet, seed: u64) -> Result<Environment> {
    gp_sample_from_gram(&gram(k, cs)?, seed)
}

pub fn gp_sample_from_gram(g: &GramMatrix, seed: u64) -> Result<Environment> {
    let (f, _) = gp_draw(g, seed)?;
    Ok(Environment::stationary(EnvKind::GpSample, f))
}

/// GP draw f = L z rescaled to RKHS norm `b` on the candidate set, i.e. f ← b · L z / |z|.
pub fn gp_sample_with_norm(g: &GramMatrix, b: f64, seed: u64) -> Result<Environment> {
    if !(b > 0.0 && b.is_finite()) {
        return domain(format!("norm bound must be positive, got {b}"));
    }
    let (f, norm) = gp_draw(g, seed)?;
    Ok(Environment::stationary(EnvKind::GpSample, f.iter().map(|x| b * x / norm).collect()))
}

/// Returns L z and |z|, the latter being the RKHS norm of the draw over the candidates.
fn gp_draw(g: &GramMatrix, seed: u64) -> Result<(Vec<f64>, f64)> {
    let n = g.len();
    let sf2 = (0..n).map(|i| g.values[(i, i)]).fold(0.0, f64::max);
    let mut jitter = 0.0;
    let chol = loop {
        let mut m = g.values.clone();
        for i in 0..n {
            m[(i, i)] += jitter;
        }
        if let Some(c) = m.cholesky() {
            break c;
        }
        jitter = if jitter == 0.0 { 1e-10 * sf2 } else { jitter * 10.0 };
        if jitter > 1e-4 * sf2 * (1.0 + 1e-9) || sf2 == 0.0 {
            return Err(Error::Numeric("Gram factorization failed while sampling a GP path".into()));
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let z = nalgebra::DVector::from_iterator(n, (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)));
    let f = chol.l() * &z;
    Ok((f.iter().copied().collect(), z.norm()))
}

fn bump_values(cs: &CandidateSet, bumps: &[BumpSpec]) -> Vec<f64> {
    cs.points
        .iter()
        .map(|p| bumps.iter().map(|b| b.value_at_distance(dist_unchecked(&cs.manifold, &p.0, &b.center.0))).sum())
        .collect()
}

fn check_eps(cs: &CandidateSet, eps: f64) -> Result<()> {
    let max = cs.manifold.max_packing_radius();
    if !(eps > 0.0 && eps <= max * (1.0 + 1e-12)) {
        return domain(format!("bump radius {eps} outside (0, {max}]"));
    }
    Ok(())
}

/// Single bump of height h = B ε^ν / √(c_+ (1 + C_Sob K ε²)).
pub fn bump_env(cs: &CandidateSet, center: &Point, eps: f64, p: &BumpParams) -> Result<Environment> {
    check_eps(cs, eps)?;
    let m = &cs.manifold;
    let bump = BumpSpec { center: center.clone(), eps, height: p.single_height(m.dim, m.curvature_bound, eps) };
    let mut env = Environment::stationary(EnvKind::SingleBump, bump_values(cs, std::slice::from_ref(&bump)));
    env.bumps = vec![bump];
    Ok(env)
}

/// Σ_i σ_i · h_A η(d(·, c_i)/ε) over 2ε-separated centers, with h_A = B ε^ν / √(c_+ N).
pub fn sum_of_bumps_env(cs: &CandidateSet, centers: &[Point], signs: &[bool], eps: f64, p: &BumpParams) -> Result<Environment> {
    check_eps(cs, eps)?;
    if centers.len() != signs.len() || centers.is_empty() {
        return domain("need one sign per center and at least one center");
    }
    let m = &cs.manifold;
    for i in 0..centers.len() {
        for j in (i + 1)..centers.len() {
            let d = dist_unchecked(m, &centers[i].0, &centers[j].0);
            if d < 2.0 * eps * (1.0 - 1e-12) {
                return domain(format!("centers {i} and {j} are {d:.6} apart, closer than 2ε = {}", 2.0 * eps));
            }
        }
    }
    let h = p.sum_height(m.dim, eps, centers.len());
    let bumps: Vec<BumpSpec> = centers
        .iter()
        .zip(signs)
        .filter(|(_, &s)| s)
        .map(|(c, _)| BumpSpec { center: c.clone(), eps, height: h })
        .collect();
    let mut env = Environment::stationary(EnvKind::SumOfBumps, bump_values(cs, &bumps));
    env.bumps = bumps;
    Ok(env)
}

/// Piecewise-constant single-bump sequence with m = ⌊B_T/(2h)⌋ batches (capped at T).
///
/// Bump centers are drawn uniformly and independently per batch from the greedy
/// 2ε-packing of the candidate set. `height` overrides the default single-bump height.
pub fn time_varying_env(
    cs: &CandidateSet,
    b_t: f64,
    horizon: usize,
    eps: f64,
    p: &BumpParams,
    height: Option<f64>,
    seed: u64,
) -> Result<Environment> {
    check_eps(cs, eps)?;
    if horizon == 0 {
        return domain("horizon must be ≥ 1");
    }
    let m = &cs.manifold;
    let h = height.unwrap_or_else(|| p.single_height(m.dim, m.curvature_bound, eps));
    let raw = (b_t / (2.0 * h)).floor();
    if !(raw >= 1.0) {
        return domain(format!(
            "variation budget B_T = {b_t} gives m < 1 batches at h = {h:.3e}; use the stationary bump environment"
        ));
    }
    let batches = (raw.min(horizon as f64)) as usize;
    let packing = greedy_packing(cs, eps)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bump_index: Vec<usize> = (0..batches).map(|_| rng.random_range(0..packing.len())).collect();
    let len = horizon / batches;
    let batch_starts: Vec<usize> = (0..batches).map(|j| 1 + j * len).collect();
    let mut bumps = Vec::with_capacity(batches);
    let values = bump_index
        .iter()
        .map(|&k| {
            let b = BumpSpec { center: cs.points[packing[k]].clone(), eps, height: h };
            let v = bump_values(cs, std::slice::from_ref(&b));
            bumps.push(b);
            v
        })
        .collect();
    let mut env = Environment::batched(EnvKind::TimeVaryingBatched, values, batch_starts);
    env.bumps = bumps;
    env.budget = Some(VariationBudget { b_t, batches, bump_index });
    Ok(env)
}

/// Three complex channel gains: log-normal(0, 0.5²) magnitudes, uniform phases.
pub fn clustered_channel(seed: u64) -> [(f64, f64); 3] {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ln = LogNormal::new(0.0, 0.5).expect("valid log-normal");
    std::array::from_fn(|_| {
        let mag: f64 = rng.sample(ln);
        let ph = rng.random_range(0.0..TAU);
        (mag * ph.cos(), mag * ph.sin())
    })
}

/// |Σ_k e^{iφ_k} c_k|² on a T³ candidate set for a seeded channel.
pub fn ris_combiner_env(cs: &CandidateSet, channel_seed: u64) -> Result<Environment> {
    ris_combiner_with_channel(cs, &clustered_channel(channel_seed))
}

pub fn ris_combiner_with_channel(cs: &CandidateSet, c: &[(f64, f64); 3]) -> Result<Environment> {
    if cs.manifold.kind != ManifoldKind::Torus(3) {
        return domain(format!("the RIS combiner needs a T^3 candidate set, got {}", cs.manifold));
    }
    let values = cs
        .points
        .iter()
        .map(|p| {
            let (mut re, mut im) = (0.0, 0.0);
            for (phi, &(cr, ci)) in p.0.iter().zip(c) {
                let (s, co) = phi.sin_cos();
                re += co * cr - s * ci;
                im += s * cr + co * ci;
            }
            re * re + im * im
        })
        .collect();
    Ok(Environment::stationary(EnvKind::RisCombiner, values))
}

/// Scaled Sobolev energy of the bump h·η(|x|/ε) on ℝ², in normal coordinates.
///
/// The fractional order s = ν + 1 is reached by log-convex interpolation between the
/// integer seminorms |·|_{H^⌊s⌋} and |·|_{H^⌈s⌉}, computed with spectral-accuracy-free
/// central differences on an `n × n` grid over [−ε, ε]².
pub fn bump_sobolev_energy(nu: f64, eps: f64, h: f64, n: usize) -> f64 {
    let s = nu + 1.0;
    let lo = s.floor() as usize;
    let hi = s.ceil() as usize;
    let dx = 2.0 * eps / (n as f64 - 1.0);
    let f: Vec<f64> = (0..n * n)
        .map(|idx| {
            let (i, j) = (idx / n, idx % n);
            let x = -eps + i as f64 * dx;
            let y = -eps + j as f64 * dx;
            h * BumpSpec::profile((x * x + y * y).sqrt() / eps)
        })
        .collect();
    let e_lo = integer_seminorm(&f, n, dx, lo);
    if lo == hi {
        return e_lo;
    }
    let e_hi = integer_seminorm(&f, n, dx, hi);
    let w = s - lo as f64;
    e_lo.powf(1.0 - w) * e_hi.powf(w)
}

fn laplacian(f: &[f64], n: usize, dx: f64) -> Vec<f64> {
    let mut out = vec![0.0; n * n];
    let at = |i: isize, j: isize| if i < 0 || j < 0 || i >= n as isize || j >= n as isize { 0.0 } else { f[i as usize * n + j as usize] };
    for i in 0..n as isize {
        for j in 0..n as isize {
            out[i as usize * n + j as usize] =
                (at(i + 1, j) + at(i - 1, j) + at(i, j + 1) + at(i, j - 1) - 4.0 * at(i, j)) / (dx * dx);
        }
    }
    out
}

/// ∫ |Δ^{k/2} f|² for even k, ∫ |∇Δ^{(k−1)/2} f|² for odd k.
fn integer_seminorm(f: &[f64], n: usize, dx: f64, k: usize) -> f64 {
    let mut g = f.to_vec();
    for _ in 0..k / 2 {
        g = laplacian(&g, n, dx);
    }
    let area = dx * dx;
    if k % 2 == 0 {
        return g.iter().map(|x| x * x).sum::<f64>() * area;
    }
    let mut e = 0.0;
    for i in 0..n {
        for j in 0..n {
            let gx = if i + 1 < n { g[(i + 1) * n + j] } else { 0.0 } - g[i * n + j];
            let gy = if j + 1 < n { g[i * n + j + 1] } else { 0.0 } - g[i * n + j];
            e += (gx * gx + gy * gy) / (dx * dx);
        }
    }
    e * area
}
