//! Reference kernel evaluations that do not go through the addition-theorem series.
//!
//! * S²: explicit sum of products of real spherical harmonics up to the kernel's
//!   truncation level.
//! * S³ and SO(3): closed-form resolvent sums (no truncation), available when
//!   ν + 3/2 is an integer and 2ν/κ² > 1 on the cover.
//! * Tori: the lattice eigen-sum [`crate::kernels::torus_eigen_sum`].

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{domain, Result};
use crate::geometry::{dist_unchecked, random_point, ManifoldKind, ManifoldSpec};
use crate::kernels::{spectral_filter, torus_eigen_sum, KernelMode, KernelSpec};

/// Truncated power series in δ.
#[derive(Clone, Debug)]
struct Jet(Vec<f64>);

impl Jet {
    fn constant(c: f64, n: usize) -> Self {
        let mut v = vec![0.0; n];
        v[0] = c;
        Jet(v)
    }

    fn scale(&self, a: f64) -> Self {
        Jet(self.0.iter().map(|x| a * x).collect())
    }

    fn add(&self, o: &Jet) -> Self {
        Jet(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    fn mul(&self, o: &Jet) -> Self {
        let n = self.0.len();
        Jet((0..n).map(|k| (0..=k).map(|j| self.0[j] * o.0[k - j]).sum()).collect())
    }

    fn div(&self, o: &Jet) -> Self {
        let n = self.0.len();
        let mut q = vec![0.0; n];
        for k in 0..n {
            let s: f64 = (0..k).map(|j| q[j] * o.0[k - j]).sum();
            q[k] = (self.0[k] - s) / o.0[0];
        }
        Jet(q)
    }

    fn exp(&self) -> Self {
        let n = self.0.len();
        let mut y = vec![0.0; n];
        y[0] = self.0[0].exp();
        for k in 1..n {
            y[k] = (1..=k).map(|j| j as f64 * self.0[j] * y[k - j]).sum::<f64>() / k as f64;
        }
        Jet(y)
    }

    /// √(s + δ).
    fn sqrt_shift(s: f64, n: usize) -> Self {
        let mut v = vec![0.0; n];
        let mut binom = 1.0;
        for (k, x) in v.iter_mut().enumerate() {
            *x = binom * s.powf(0.5 - k as f64);
            binom *= (0.5 - k as f64) / (k as f64 + 1.0);
        }
        Jet(v)
    }
}

/// Σ_{k≥1} k sin(kα) / (k² + s)^m for α ∈ (0, π), s > 0.
fn sine_resolvent(s: f64, m: usize, alpha: f64) -> f64 {
    // G(s) = Σ k sin(kα)/(k²+s) = (π/2) sinh(√s(π−α)) / sinh(√s π), written with decaying exponentials.
    let r = Jet::sqrt_shift(s, m);
    let one = Jet::constant(1.0, m);
    let num = r.scale(-alpha).exp().mul(&one.add(&r.scale(-2.0 * (PI - alpha)).exp().scale(-1.0)));
    let den = one.add(&r.scale(-2.0 * PI).exp().scale(-1.0));
    let g = num.div(&den).scale(PI / 2.0);
    sign(m - 1) * g.0[m - 1]
}

/// Σ_{k≥1} 1 / (k² + s)^j.
fn inverse_power_sum(s: f64, j: usize) -> f64 {
    // H(s) = Σ 1/(k²+s) = (π√s coth(π√s) − 1) / (2s).
    let n = j;
    let r = Jet::sqrt_shift(s, n);
    let one = Jet::constant(1.0, n);
    let e = r.scale(-2.0 * PI).exp();
    let coth = one.add(&e).div(&one.add(&e.scale(-1.0)));
    let mut sj = Jet::constant(s, n);
    if n > 1 {
        sj.0[1] = 1.0;
    }
    let h = r.scale(PI).mul(&coth).add(&one.scale(-1.0)).div(&sj.scale(2.0));
    sign(j - 1) * h.0[j - 1]
}

fn sign(k: usize) -> f64 {
    if k % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Σ_{k≥1} k² / (k² + s)^m.
fn square_resolvent(s: f64, m: usize) -> f64 {
    inverse_power_sum(s, m - 1) - s * inverse_power_sum(s, m)
}

fn cover_exponent(nu: f64) -> Result<usize> {
    let m = nu + 1.5;
    if (m - m.round()).abs() > 1e-12 || m.round() < 2.0 {
        return domain(format!("closed-form S^3 oracle needs ν + 3/2 integer, got ν = {nu}"));
    }
    Ok(m.round() as usize)
}

/// Normalized S³ Matérn correlation at geodesic angle α by closed form.
pub fn spin3_closed_form(nu: f64, kappa: f64, alpha: f64) -> Result<f64> {
    let m = cover_exponent(nu)?;
    let s = 2.0 * nu / (kappa * kappa) - 1.0;
    if !(s > 0.0) {
        return domain("closed-form S^3 oracle needs 2ν/κ² > 1");
    }
    let diag = square_resolvent(s, m);
    Ok(if alpha < 1e-6 { 1.0 } else { sine_resolvent(s, m, alpha) / alpha.sin() / diag })
}

/// Normalized SO(3) Matérn correlation at rotation angle ω via the orbit relation
/// k_SO3(ω) ∝ S(ω/2) + S(π − ω/2) on the cover with κ_cover = κ/2.
pub fn so3_closed_form(nu: f64, kappa: f64, omega: f64) -> Result<f64> {
    let m = cover_exponent(nu)?;
    let kc = kappa / 2.0;
    let s = 2.0 * nu / (kc * kc) - 1.0;
    if !(s > 0.0) {
        return domain("closed-form SO(3) oracle needs 8ν/κ² > 1");
    }
    // Σ_{k odd} k² / (k²+s)^m.
    let diag = square_resolvent(s, m) - 4f64.powi(1 - m as i32) * square_resolvent(s / 4.0, m);
    let a = omega / 2.0;
    if a < 1e-6 {
        return Ok(1.0);
    }
    let v = 0.5 * (sine_resolvent(s, m, a) + sine_resolvent(s, m, PI - a)) / a.sin();
    Ok(v / diag)
}

/// Σ_ℓ φ_ℓ Σ_m Y_ℓm(x) Y_ℓm(y) over real spherical harmonics up to `l_max`, divided by
/// the same sum at (x, x).
pub fn sphere2_harmonic_sum(nu: f64, kappa: f64, l_max: usize, x: &[f64], y: &[f64]) -> f64 {
    let phi: Vec<f64> = (0..=l_max).map(|l| spectral_filter(nu, 2, kappa, 1.0, (l * (l + 1)) as f64)).collect();
    let px = normalized_legendre(l_max, x[2].clamp(-1.0, 1.0));
    let py = normalized_legendre(l_max, y[2].clamp(-1.0, 1.0));
    let dphi = x[1].atan2(x[0]) - y[1].atan2(y[0]);
    let mut num = 0.0;
    let mut den = 0.0;
    for l in 0..=l_max {
        let mut sxy = px[l][0] * py[l][0];
        let mut sxx = px[l][0] * px[l][0];
        for m in 1..=l {
            sxy += 2.0 * px[l][m] * py[l][m] * (m as f64 * dphi).cos();
            sxx += 2.0 * px[l][m] * px[l][m];
        }
        num += phi[l] * sxy;
        den += phi[l] * sxx;
    }
    num / den
}

/// Fully normalized associated Legendre values p̄_ℓm(cos θ), ℓ ≤ l_max, m ≤ ℓ.
fn normalized_legendre(l_max: usize, z: f64) -> Vec<Vec<f64>> {
    let st = (1.0 - z * z).max(0.0).sqrt();
    let mut p: Vec<Vec<f64>> = (0..=l_max).map(|l| vec![0.0; l + 1]).collect();
    p[0][0] = (1.0 / (4.0 * PI)).sqrt();
    for m in 1..=l_max {
        p[m][m] = -((2 * m + 1) as f64 / (2 * m) as f64).sqrt() * st * p[m - 1][m - 1];
    }
    for m in 0..l_max {
        p[m + 1][m] = ((2 * m + 3) as f64).sqrt() * z * p[m][m];
    }
    let a = |l: usize, m: usize| (((4 * l * l - 1) as f64) / ((l * l - m * m) as f64)).sqrt();
    for m in 0..=l_max {
        for l in (m + 2)..=l_max {
            p[l][m] = a(l, m) * (z * p[l - 1][m] - p[l - 2][m] / a(l - 1, m));
        }
    }
    p
}

/// Lattice radius used by the torus eigen-sum oracle.
pub fn torus_oracle_radius(d: usize) -> usize {
    match d {
        1 => 4096,
        2 => 512,
        _ => 96,
    }
}

/// Oracle value k(a, b) for an intrinsic kernel.
pub fn oracle_value(k: &KernelSpec, a: &[f64], b: &[f64]) -> Result<f64> {
    if k.mode() != KernelMode::Intrinsic {
        return domain("the oracle covers intrinsic kernels");
    }
    let m = k.manifold();
    let corr = match m.kind {
        ManifoldKind::Sphere2 => sphere2_harmonic_sum(k.nu(), k.length_scale(), k.trunc_level(), a, b),
        ManifoldKind::Spin3 => spin3_closed_form(k.nu(), k.length_scale(), dist_unchecked(m, a, b))?,
        ManifoldKind::SO3 => so3_closed_form(k.nu(), k.length_scale(), dist_unchecked(m, a, b))?,
        ManifoldKind::Torus(d) => {
            let delta: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
            return torus_eigen_sum(k, &delta, torus_oracle_radius(d));
        }
    };
    Ok(k.signal_var() * corr)
}

/// Result of comparing a kernel with its oracle on random pairs.
#[derive(Clone, Debug, PartialEq)]
pub struct OracleReport {
    pub manifold: String,
    pub pairs: usize,
    /// max |k − k_oracle| / σ_f².
    pub max_rel_err: f64,
}

/// Compares `k` with [`oracle_value`] on `pairs` seeded random pairs.
pub fn compare_with_oracle(k: &KernelSpec, pairs: usize, seed: u64) -> Result<OracleReport> {
    let m: &ManifoldSpec = k.manifold();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts: Vec<_> = (0..2 * pairs).map(|_| random_point(m, &mut rng)).collect();
    let mut worst: f64 = 0.0;
    for i in 0..pairs {
        let (a, b) = (&pts[2 * i].0, &pts[2 * i + 1].0);
        let v = crate::kernels::kernel_eval(k, &pts[2 * i], &pts[2 * i + 1])?;
        let o = oracle_value(k, a, b)?;
        worst = worst.max((v - o).abs() / k.signal_var());
    }
    Ok(OracleReport { manifold: m.to_string(), pairs, max_rel_err: worst })
}
