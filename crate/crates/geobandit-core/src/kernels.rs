//! Spectral Matérn kernels on the arm manifolds.
//!
//! Intrinsic kernels are evaluated through addition theorems: Legendre series on S^2,
//! Chebyshev-U (character) series on Spin3 and SO3, and the periodized Euclidean
//! Matérn profile on T^d (Poisson summation of the same spectral filter).
//! All kernels are rescaled so that `k(θ, θ) = σ_f²`.

use std::f64::consts::TAU;
use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;

use crate::error::{domain, Result};
use crate::geometry::{canonical_quaternion, wrap_angle, CandidateSet, ManifoldKind, ManifoldSpec, Point};

/// Smallest default series truncation for S^2, SO3 and Spin3.
pub const DEFAULT_TRUNC: usize = 128;
/// Default lattice radius for the explicit torus eigen-sum.
pub const DEFAULT_TORUS_RADIUS: usize = 32;
/// Relative series tail allowed by the adaptive default truncation.
pub const TAIL_TOLERANCE: f64 = 1e-12;
const TRUNC_CAP: usize = 1 << 15;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrbitNorm {
    /// k̃(α) + k̃(π − α); the diagonal exceeds σ_f².
    Sum,
    /// Orbit sum divided by |G| = 2.
    GroupAverage,
    /// Orbit sum rescaled to a σ_f² diagonal.
    UnitDiagonal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KernelMode {
    Intrinsic,
    /// Spin3 kernel evaluated at the canonical representatives (SO3 only).
    ExtrinsicSection,
    /// Spin3 kernel summed over the {±1} orbit (SO3 only).
    OrbitSum(OrbitNorm),
}

/// Matérn kernel parameters bound to a manifold.
///
/// For `ExtrinsicSection` and `OrbitSum` the length scale is measured in the metric
/// of the cover (the unit S^3).
#[derive(Clone, Debug)]
pub struct KernelSpec {
    manifold: ManifoldSpec,
    nu: f64,
    length_scale: f64,
    signal_var: f64,
    trunc_level: usize,
    mode: KernelMode,
    weights: Arc<Vec<f64>>,
    image_cutoff: f64,
    image_norm: f64,
    orbit_cross: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Series {
    Legendre,
    ChebyshevU,
    EvenChebyshevU,
    Images,
}

/// φ_ν(λ) = σ_f² (2ν/κ² + λ)^{-(ν + d/2)}.
pub fn spectral_filter(nu: f64, d: usize, kappa: f64, signal_var: f64, lambda: f64) -> f64 {
    signal_var * (2.0 * nu / (kappa * kappa) + lambda).powf(-(nu + d as f64 / 2.0))
}

/// Laplace–Beltrami eigenvalues with multiplicities.
///
/// S^2, SO3: ℓ = 0..=L; Spin3: n = 0..=L; T^d: all |k|² ≤ L² (lattice points in the
/// ball of radius L, so every listed multiplicity is complete).
pub fn eigen_data(m: &ManifoldSpec, l_max: usize) -> Vec<(f64, usize)> {
    match m.kind {
        ManifoldKind::Sphere2 => (0..=l_max).map(|l| ((l * (l + 1)) as f64, 2 * l + 1)).collect(),
        ManifoldKind::SO3 => (0..=l_max).map(|l| ((l * (l + 1)) as f64, (2 * l + 1).pow(2))).collect(),
        ManifoldKind::Spin3 => (0..=l_max).map(|n| ((n * (n + 2)) as f64, (n + 1).pow(2))).collect(),
        ManifoldKind::Torus(d) => {
            let r2 = (l_max * l_max) as i64;
            let mut counts = std::collections::BTreeMap::<i64, usize>::new();
            for_each_lattice(d, l_max as i64, |k| {
                let s: i64 = k.iter().map(|x| x * x).sum();
                if s <= r2 {
                    *counts.entry(s).or_default() += 1;
                }
            });
            counts.into_iter().map(|(s, c)| (s as f64, c)).collect()
        }
    }
}

/// Visit every integer vector in [-r, r]^d.
pub(crate) fn for_each_lattice(d: usize, r: i64, mut f: impl FnMut(&[i64])) {
    let mut k = vec![-r; d];
    loop {
        f(&k);
        let mut i = 0;
        loop {
            if i == d {
                return;
            }
            if k[i] < r {
                k[i] += 1;
                break;
            }
            k[i] = -r;
            i += 1;
        }
    }
}

fn half_integer_order(nu: f64) -> Option<usize> {
    let p = nu - 0.5;
    (p >= 0.0 && (p - p.round()).abs() < 1e-12).then(|| p.round() as usize)
}

/// Euclidean Matérn correlation at scaled distance x = r/κ, normalized to 1 at 0.
///
/// Half-integer ν use the closed polynomial-times-exponential form, e.g. for ν = 5/2
/// `(1 + √5 x + 5x²/3) e^{-√5 x}`. Other ν use trapezoid quadrature of the integral
/// representation `K_ν(z) = ∫_0^∞ e^{-z cosh t} cosh(νt) dt`.
pub fn matern_radial_profile(nu: f64, x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return domain(format!("profile argument must be ≥ 0, got {x}"));
    }
    if !(nu > 0.0 && nu.is_finite()) {
        return domain(format!("smoothness must be positive, got {nu}"));
    }
    Ok(profile(nu, x))
}

pub(crate) fn profile(nu: f64, x: f64) -> f64 {
    if x == 0.0 {
        return 1.0;
    }
    let z = (2.0 * nu).sqrt() * x;
    match half_integer_order(nu) {
        Some(p) => {
            // p!/(2p)! Σ_i (p+i)!/(i!(p−i)!) (2z)^{p−i}
            let fact = |n: usize| (1..=n).map(|i| i as f64).product::<f64>();
            let lead = fact(p) / fact(2 * p);
            let poly: f64 = (0..=p)
                .map(|i| fact(p + i) / (fact(i) * fact(p - i)) * (2.0 * z).powi((p - i) as i32))
                .sum();
            lead * poly * (-z).exp()
        }
        None => {
            let h = 0.02;
            let mut sum = 0.0;
            let mut t: f64 = 0.0;
            loop {
                let c = t.cosh();
                let term = 0.5 * ((-z * c + nu * t).exp() + (-z * c - nu * t).exp());
                sum += if t == 0.0 { 0.5 * term } else { term };
                if t > 1.0 && term < 1e-300_f64.max(sum * 1e-18) {
                    break;
                }
                t += h;
            }
            let k_nu = sum * h;
            let ln_g = statrs::function::gamma::ln_gamma(nu);
            ((1.0 - nu) * 2f64.ln() - ln_g + nu * z.ln() + k_nu.ln()).exp()
        }
    }
}

fn series_kind(m: &ManifoldSpec, mode: KernelMode) -> Series {
    match (m.kind, mode) {
        (ManifoldKind::Sphere2, _) => Series::Legendre,
        (ManifoldKind::Spin3, _) => Series::ChebyshevU,
        (ManifoldKind::SO3, KernelMode::Intrinsic) => Series::EvenChebyshevU,
        (ManifoldKind::SO3, _) => Series::ChebyshevU,
        (ManifoldKind::Torus(_), _) => Series::Images,
    }
}

/// Unnormalized series weights u_l = φ(λ_l)·mult_l / φ(λ_0), whose basis functions
/// are bounded by 1 and equal 1 at the origin.
fn raw_weights(series: Series, nu: f64, kappa: f64, count: usize) -> Vec<f64> {
    let (d, lam, mult): (f64, fn(f64) -> f64, fn(f64) -> f64) = match series {
        Series::Legendre => (2.0, |l| l * (l + 1.0), |l| 2.0 * l + 1.0),
        Series::ChebyshevU => (3.0, |n| n * (n + 2.0), |n| (n + 1.0) * (n + 1.0)),
        Series::EvenChebyshevU => (3.0, |l| l * (l + 1.0), |l| (2.0 * l + 1.0) * (2.0 * l + 1.0)),
        Series::Images => unreachable!("torus kernels have no series weights"),
    };
    let c = 2.0 * nu / (kappa * kappa);
    let s = nu + d / 2.0;
    (0..count)
        .map(|l| {
            let l = l as f64;
            mult(l) * (-s * (lam(l) / c).ln_1p()).exp()
        })
        .collect()
}

fn default_trunc(series: Series, nu: f64, kappa: f64) -> usize {
    let u = raw_weights(series, nu, kappa, TRUNC_CAP + 1);
    let total: f64 = u.iter().sum();
    let mut tail = 0.0;
    let mut best = TRUNC_CAP;
    for l in (DEFAULT_TRUNC..TRUNC_CAP).rev() {
        tail += u[l + 1];
        if tail <= TAIL_TOLERANCE * total {
            best = l;
        } else {
            break;
        }
    }
    best
}

impl KernelSpec {
    /// Kernel with the adaptive default truncation (at least [`DEFAULT_TRUNC`]).
    pub fn new(manifold: ManifoldSpec, nu: f64, length_scale: f64, signal_var: f64, mode: KernelMode) -> Result<Self> {
        Self::build(manifold, nu, length_scale, signal_var, mode, None)
    }

    /// Kernel with an explicit truncation level `L_max ≥ 8`.
    pub fn with_trunc(
        manifold: ManifoldSpec,
        nu: f64,
        length_scale: f64,
        signal_var: f64,
        mode: KernelMode,
        trunc_level: usize,
    ) -> Result<Self> {
        if trunc_level < 8 {
            return domain(format!("truncation level must be ≥ 8, got {trunc_level}"));
        }
        Self::build(manifold, nu, length_scale, signal_var, mode, Some(trunc_level))
    }

    fn build(
        manifold: ManifoldSpec,
        nu: f64,
        length_scale: f64,
        signal_var: f64,
        mode: KernelMode,
        trunc: Option<usize>,
    ) -> Result<Self> {
        if mode != KernelMode::Intrinsic && !manifold.is_quotient() {
            return domain(format!("{mode:?} needs a quotient manifold, got {manifold}"));
        }
        if !(nu > manifold.dim as f64 / 2.0) || !nu.is_finite() {
            return domain(format!("smoothness ν = {nu} must exceed d/2 = {}", manifold.dim as f64 / 2.0));
        }
        if !(length_scale > 0.0 && length_scale.is_finite()) {
            return domain(format!("length scale must be positive, got {length_scale}"));
        }
        if !(signal_var > 0.0 && signal_var.is_finite()) {
            return domain(format!("signal variance must be positive, got {signal_var}"));
        }
        let series = series_kind(&manifold, mode);
        let (trunc_level, weights, image_cutoff) = if series == Series::Images {
            let mut x = 1.0;
            while profile(nu, x) > 1e-18 {
                x *= 1.25;
            }
            (trunc.unwrap_or(DEFAULT_TORUS_RADIUS), Vec::new(), x * length_scale)
        } else {
            let l = trunc.unwrap_or_else(|| default_trunc(series, nu, length_scale));
            let mut w = raw_weights(series, nu, length_scale, l + 1);
            let total: f64 = w.iter().sum();
            w.iter_mut().for_each(|x| *x /= total);
            (l, w, 0.0)
        };
        let mut k = Self {
            manifold,
            nu,
            length_scale,
            signal_var,
            trunc_level,
            mode,
            weights: Arc::new(weights),
            image_cutoff,
            image_norm: 1.0,
            orbit_cross: 0.0,
        };
        if series == Series::Images {
            k.image_norm = k.image_sum(&vec![0.0; k.manifold.dim]);
        }
        if matches!(mode, KernelMode::OrbitSum(_)) {
            k.orbit_cross = k.cover_corr(-1.0);
        }
        Ok(k)
    }

    pub fn manifold(&self) -> &ManifoldSpec {
        &self.manifold
    }
    pub fn nu(&self) -> f64 {
        self.nu
    }
    pub fn length_scale(&self) -> f64 {
        self.length_scale
    }
    pub fn signal_var(&self) -> f64 {
        self.signal_var
    }
    pub fn trunc_level(&self) -> usize {
        self.trunc_level
    }
    pub fn mode(&self) -> KernelMode {
        self.mode
    }

    /// Same kernel with a different signal variance (the spectral weights are reused).
    pub fn with_signal_var(&self, signal_var: f64) -> Result<Self> {
        if !(signal_var > 0.0 && signal_var.is_finite()) {
            return domain(format!("signal variance must be positive, got {signal_var}"));
        }
        Ok(Self { signal_var, ..self.clone() })
    }

    fn series(&self) -> Series {
        series_kind(&self.manifold, self.mode)
    }

    /// Σ w_n U_n(x)/(n+1): normalized Spin3 correlation at cos α = x.
    fn cover_corr(&self, x: f64) -> f64 {
        let x = x.clamp(-1.0, 1.0);
        let (mut u_prev, mut u) = (0.0, 1.0);
        let mut acc = 0.0;
        for (n, w) in self.weights.iter().enumerate() {
            acc += w * u / (n as f64 + 1.0);
            let next = 2.0 * x * u - u_prev;
            u_prev = u;
            u = next;
        }
        acc
    }

    fn legendre_corr(&self, x: f64) -> f64 {
        let x = x.clamp(-1.0, 1.0);
        let (mut p_prev, mut p) = (0.0, 1.0);
        let mut acc = 0.0;
        for (l, w) in self.weights.iter().enumerate() {
            acc += w * p;
            let lf = l as f64;
            let next = ((2.0 * lf + 1.0) * x * p - lf * p_prev) / (lf + 1.0);
            p_prev = p;
            p = next;
        }
        acc
    }

    /// Σ w_ℓ U_{2ℓ}(x)/(2ℓ+1) with x = cos(ω/2).
    fn even_cheb_corr(&self, x: f64) -> f64 {
        let x = x.clamp(-1.0, 1.0);
        let (mut u_prev, mut u) = (0.0, 1.0);
        let mut acc = 0.0;
        for (l, w) in self.weights.iter().enumerate() {
            acc += w * u / (2.0 * l as f64 + 1.0);
            for _ in 0..2 {
                let next = 2.0 * x * u - u_prev;
                u_prev = u;
                u = next;
            }
        }
        acc
    }

    fn torus_corr(&self, delta: &[f64]) -> f64 {
        self.image_sum(delta) / self.image_norm
    }

    fn image_sum(&self, delta: &[f64]) -> f64 {
        let d = delta.len();
        let rc = self.image_cutoff;
        let w: Vec<f64> = delta.iter().map(|&x| wrap_angle(x)).collect();
        let lo: Vec<i64> = w.iter().map(|&x| ((-rc - x) / TAU).floor() as i64).collect();
        let hi: Vec<i64> = w.iter().map(|&x| ((rc - x) / TAU).ceil() as i64).collect();
        let mut n = lo.clone();
        let mut acc = 0.0;
        loop {
            let r2: f64 = (0..d).map(|i| (w[i] + TAU * n[i] as f64).powi(2)).sum();
            if r2 <= rc * rc {
                acc += profile(self.nu, r2.sqrt() / self.length_scale);
            }
            let mut i = 0;
            loop {
                if i == d {
                    return acc;
                }
                if n[i] < hi[i] {
                    n[i] += 1;
                    break;
                }
                n[i] = lo[i];
                i += 1;
            }
        }
    }

    /// Kernel value for an intrinsic radial kernel at geodesic distance `r`.
    ///
    /// Not available on tori (the periodized kernel is not a function of distance alone)
    /// or for the quotient modes.
    pub fn radial(&self, r: f64) -> Result<f64> {
        if self.mode != KernelMode::Intrinsic {
            return domain("radial evaluation is only defined for intrinsic kernels");
        }
        let corr = match self.series() {
            Series::Legendre => self.legendre_corr(r.cos()),
            Series::ChebyshevU => self.cover_corr(r.cos()),
            Series::EvenChebyshevU => self.even_cheb_corr((r / 2.0).cos()),
            Series::Images => return domain("torus kernels are not radial"),
        };
        Ok(self.signal_var * corr)
    }

    /// Kernel value on raw coordinates (no validation).
    pub(crate) fn eval_coords(&self, a: &[f64], b: &[f64]) -> f64 {
        let dot = || a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
        let corr = match (self.series(), self.mode) {
            (Series::Legendre, _) => self.legendre_corr(dot()),
            (Series::EvenChebyshevU, _) => self.even_cheb_corr(dot().abs()),
            (Series::Images, _) => {
                let delta: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
                self.torus_corr(&delta)
            }
            (Series::ChebyshevU, KernelMode::Intrinsic) => self.cover_corr(dot()),
            (Series::ChebyshevU, KernelMode::ExtrinsicSection) => {
                let ca = canonical_quaternion([a[0], a[1], a[2], a[3]]);
                let cb = canonical_quaternion([b[0], b[1], b[2], b[3]]);
                self.cover_corr(ca.iter().zip(&cb).map(|(x, y)| x * y).sum())
            }
            (Series::ChebyshevU, KernelMode::OrbitSum(norm)) => {
                let c = dot().abs();
                let s = self.cover_corr(c) + self.cover_corr(-c);
                match norm {
                    OrbitNorm::Sum => s,
                    OrbitNorm::GroupAverage => s / 2.0,
                    OrbitNorm::UnitDiagonal => s / (1.0 + self.orbit_cross),
                }
            }
        };
        self.signal_var * corr
    }

    /// Diagonal value k(θ, θ).
    pub fn diagonal(&self) -> f64 {
        match self.mode {
            KernelMode::OrbitSum(OrbitNorm::Sum) => self.signal_var * (1.0 + self.orbit_cross),
            KernelMode::OrbitSum(OrbitNorm::GroupAverage) => self.signal_var * (1.0 + self.orbit_cross) / 2.0,
            _ => self.signal_var,
        }
    }

    /// Cover-kernel correlation between a point and its gauge partner, k̃(π)/σ_f²
    /// (zero for non-orbit modes).
    pub fn orbit_cross_term(&self) -> f64 {
        self.orbit_cross
    }
}

fn check_on(m: &ManifoldSpec, p: &Point) -> Result<()> {
    if p.0.len() != m.ambient_len() {
        return domain(format!("point with {} coordinates does not lie on {m}", p.0.len()));
    }
    Ok(())
}

/// Kernel value k(a, b).
pub fn kernel_eval(k: &KernelSpec, a: &Point, b: &Point) -> Result<f64> {
    check_on(&k.manifold, a)?;
    check_on(&k.manifold, b)?;
    Ok(k.eval_coords(&a.0, &b.0))
}

/// Gauge modulator h = profile(ν, r_inj/κ) of the SO3 quotient.
pub fn gauge_modulator(k: &KernelSpec) -> Result<f64> {
    if !k.manifold.is_quotient() {
        return domain(format!("gauge modulator needs a quotient manifold, got {}", k.manifold));
    }
    Ok(profile(k.nu, k.manifold.inj_radius / k.length_scale))
}

/// Separation factor (1 + (|G| − 1) h)^{1/2}.
pub fn gauge_factor(h: f64, group_order: usize) -> f64 {
    (1.0 + (group_order as f64 - 1.0) * h).sqrt()
}

/// Kernel matrix over a candidate set.
#[derive(Clone, Debug)]
pub struct GramMatrix {
    pub values: DMatrix<f64>,
    pub kernel: KernelSpec,
}

impl GramMatrix {
    pub fn len(&self) -> usize {
        self.values.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.values.nrows() == 0
    }

    pub fn min_eigenvalue(&self) -> f64 {
        SymmetricEigen::new(self.values.clone()).eigenvalues.min()
    }

    /// Row-major CSV with 17 significant digits and no header.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for i in 0..self.len() {
            let row: Vec<String> = (0..self.len()).map(|j| format!("{:.16e}", self.values[(i, j)])).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// Gram matrix of `k` over `cs` (exactly symmetric; rows computed in parallel).
pub fn gram(k: &KernelSpec, cs: &CandidateSet) -> Result<GramMatrix> {
    if k.manifold != cs.manifold {
        return domain(format!("kernel on {} but candidate set on {}", k.manifold, cs.manifold));
    }
    let n = cs.len();
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| (0..=i).map(|j| k.eval_coords(&cs.points[i].0, &cs.points[j].0)).collect())
        .collect();
    let mut values = DMatrix::zeros(n, n);
    for (i, row) in rows.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            values[(i, j)] = v;
            values[(j, i)] = v;
        }
    }
    Ok(GramMatrix { values, kernel: k.clone() })
}

/// Explicit torus eigen-sum σ_f² Σ_{|k_i| ≤ R} φ(|k|²) cos(k·δ) / Σ_{|k_i| ≤ R} φ(|k|²).
///
/// Reference evaluation independent of the periodized profile used by [`kernel_eval`].
pub fn torus_eigen_sum(k: &KernelSpec, delta: &[f64], radius: usize) -> Result<f64> {
    let d = match k.manifold.kind {
        ManifoldKind::Torus(d) if delta.len() == d => d,
        _ => return domain("torus eigen-sum needs a torus kernel and a matching difference vector"),
    };
    let r = radius as i64;
    let cos_tab: Vec<Vec<f64>> =
        delta.iter().map(|&x| (-r..=r).map(|j| (j as f64 * x).cos()).collect()).collect();
    let c = 2.0 * k.nu / (k.length_scale * k.length_scale);
    let s = k.nu + d as f64 / 2.0;
    // φ(|k|²)/φ(0) tabulated over |k|² values.
    let max_sq = d * radius * radius;
    let filt: Vec<f64> = (0..=max_sq).map(|q| (-s * (q as f64 / c).ln_1p()).exp()).collect();
    let (mut num, mut den) = (0.0, 0.0);
    // φ is even in every k_j, so the sine terms of cos(k·δ) cancel over ±k_j.
    for_each_lattice(d, r, |kv| {
        let q: i64 = kv.iter().map(|x| x * x).sum();
        let prod: f64 = kv.iter().enumerate().map(|(ax, &kk)| cos_tab[ax][(kk + r) as usize]).product();
        num += filt[q as usize] * prod;
        den += filt[q as usize];
    });
    Ok(k.signal_var * num / den)
}
