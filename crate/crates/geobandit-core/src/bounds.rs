//! Closed-form constants, optimal scales and rate curves of the lower-bound theory.
//!
//! Logarithms are natural throughout. Values outside a formula's validity regime are
//! returned together with warnings; nothing is clamped silently.

use std::f64::consts::LN_2;

use statrs::function::gamma::gamma;

use crate::error::{domain, Result};
use crate::geometry::{omega, ManifoldSpec};

/// Values quoted in the literature, reported next to the formula values.
pub mod quoted {
    pub const C_STAR: f64 = 0.023;
    pub const C_BESSEL: f64 = 0.103;
    pub const C_B: f64 = 0.019;
    pub const C_AUG: f64 = 0.024;
    pub const C_NS: f64 = 0.004;
    pub const CURVED_S2_CONSTANT: f64 = 2.64;
    pub const VOL_POWER_S2: f64 = 2.55;
    pub const VOL_POWER_T3: f64 = 5.32;
    pub const VOL_POWER_SO3: f64 = 3.79;
    pub const LAMBDA_STAR_T200: f64 = 0.14;
    pub const LAMBDA_STAR_T1E4: f64 = 0.56;
}

/// Parameter bundle for the constant and rate calculators.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundQuery {
    pub nu: f64,
    pub d: usize,
    pub b: f64,
    pub sigma_n: f64,
    pub vol: f64,
    /// Curvature bound K.
    pub curvature: f64,
    pub kappa: f64,
    pub sigma_f: f64,
    pub t: f64,
    pub lambda: f64,
    pub b_t: f64,
    pub group_order: usize,
    /// Packing-density constant; `None` means 1/(2^d ω_d).
    pub c_n: Option<f64>,
    /// Largest admissible bump radius ε_0 (validity regime of ε_T); `None` skips the check.
    pub eps0: Option<f64>,
}

impl BoundQuery {
    /// Canonical normalization κ = σ_f = 1, B = 1, σ_n = 0.1, T = 10⁴, λ = 0, B_T = 10.
    pub fn canonical(nu: f64, d: usize, vol: f64) -> Self {
        Self {
            nu,
            d,
            b: 1.0,
            sigma_n: 0.1,
            vol,
            curvature: 0.0,
            kappa: 1.0,
            sigma_f: 1.0,
            t: 1e4,
            lambda: 0.0,
            b_t: 10.0,
            group_order: 1,
            c_n: None,
            eps0: None,
        }
    }

    /// Canonical query with the manifold's dimension, volume, curvature and ε_0.
    pub fn for_manifold(m: &ManifoldSpec, nu: f64) -> Self {
        Self {
            curvature: m.curvature_bound,
            eps0: Some(m.max_packing_radius()),
            group_order: if m.is_quotient() { 2 } else { 1 },
            ..Self::canonical(nu, m.dim, m.volume)
        }
    }

    pub fn validate(&self) -> Result<()> {
        let df = self.d as f64;
        if self.d == 0 || !(self.nu > df / 2.0) {
            return domain(format!("need d ≥ 1 and ν > d/2 (ν = {}, d = {})", self.nu, self.d));
        }
        let scales = [self.b, self.sigma_n, self.vol, self.kappa, self.sigma_f];
        if scales.iter().any(|x| !(*x > 0.0 && x.is_finite())) {
            return domain("B, σ_n, vol, κ and σ_f must be positive");
        }
        if !(self.t >= 1.0) {
            return domain("T must be ≥ 1");
        }
        if self.lambda < 0.0 || self.b_t < 0.0 || self.curvature < 0.0 {
            return domain("λ, B_T and K must be ≥ 0");
        }
        Ok(())
    }

    fn df(&self) -> f64 {
        self.d as f64
    }

    pub fn c_n(&self) -> f64 {
        self.c_n.unwrap_or_else(|| 1.0 / (2f64.powi(self.d as i32) * omega(self.d)))
    }
}

/// A value together with validity warnings.
#[derive(Clone, Debug, PartialEq)]
pub struct Flagged {
    pub value: f64,
    pub warnings: Vec<String>,
}

impl Flagged {
    pub fn is_clean(&self) -> bool {
        self.warnings.is_empty()
    }
}

/// (c_−, c_+) = σ_f^{-2} (min / max)(1, 2ν/κ²)^{ν + d/2}.
pub fn sobolev_constants(q: &BoundQuery) -> (f64, f64) {
    let r = 2.0 * q.nu / (q.kappa * q.kappa);
    let s = q.nu + q.df() / 2.0;
    let sf2 = q.sigma_f * q.sigma_f;
    (r.min(1.0).powf(s) / sf2, r.max(1.0).powf(s) / sf2)
}

fn c_star_lead(q: &BoundQuery) -> f64 {
    let (nu, d) = (q.nu, q.df());
    let a = nu / (2.0 * nu + d);
    (d / (2.0 * nu + d)).powf(a) / (4.0 * (2f64.powf(d + 1.0) * omega(q.d)).powf(a))
}

/// Leading constant c_* of the Fano lower bound.
pub fn c_star(q: &BoundQuery) -> f64 {
    let (nu, d) = (q.nu, q.df());
    let r = 2.0 * nu / (q.kappa * q.kappa);
    c_star_lead(q) * q.sigma_f.powf(d / (2.0 * nu + d)) / r.powf(d * (nu + d / 2.0) / (2.0 * (2.0 * nu + d)))
}

/// c_* through the factorization `lead · c_+^{-d/(2(2ν+d))}`; equals [`c_star`] when 2ν/κ² ≥ 1.
pub fn c_star_via_c_plus(q: &BoundQuery) -> f64 {
    let (_, c_plus) = sobolev_constants(q);
    c_star_lead(q) * c_plus.powf(-q.df() / (2.0 * (2.0 * q.nu + q.df())))
}

/// Optimal bump radius ε_T, flagged when it exceeds ε_0.
pub fn eps_t(q: &BoundQuery) -> Flagged {
    let (nu, d) = (q.nu, q.df());
    let e = 1.0 / (2.0 * nu + d);
    let (_, c_plus) = sobolev_constants(q);
    let inner = c_plus * q.vol * q.sigma_n * q.sigma_n / (2f64.powf(d + 1.0) * omega(q.d) * q.b * q.b * q.t);
    let value = (d / (2.0 * nu + d)).powf(e) * inner.powf(e) * q.t.ln().max(0.0).powf(e);
    let mut warnings = Vec::new();
    if let Some(eps0) = q.eps0 {
        let k_cap = if q.curvature > 0.0 { 1.0 / q.curvature.sqrt() } else { f64::INFINITY };
        if value > eps0.min(k_cap) {
            warnings.push(format!("below threshold: ε_T = {value:.4} exceeds ε_0 = {:.4}", eps0.min(k_cap)));
        }
    }
    if q.t <= 1.0 {
        warnings.push("below threshold: log T ≤ 0".into());
    }
    Flagged { value, warnings }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GridVar {
    T,
    Lambda,
}

/// Exponents of each parameter in a rate curve.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Exponents {
    pub t: f64,
    pub b: f64,
    pub b_t: f64,
    pub sigma_n: f64,
    pub vol: f64,
    pub lambda: f64,
    pub log_t: f64,
    pub loglog_t: f64,
}

/// `prefactor · Π param^exponent` evaluated over a grid of one variable.
#[derive(Clone, Debug, PartialEq)]
pub struct RateCurve {
    pub name: String,
    pub prefactor: f64,
    pub exponents: Exponents,
    pub grid_var: GridVar,
    pub points: Vec<(f64, f64)>,
    pub warnings: Vec<String>,
}

impl RateCurve {
    fn build(name: &str, prefactor: f64, exponents: Exponents, q: &BoundQuery, var: GridVar, grid: &[f64]) -> Self {
        let mut c = Self {
            name: name.to_string(),
            prefactor,
            exponents,
            grid_var: var,
            points: Vec::new(),
            warnings: Vec::new(),
        };
        c.points = grid.iter().map(|&x| (x, c.eval(q, x))).collect();
        c
    }

    /// Curve value with the grid variable set to `x` and the rest taken from `q`.
    pub fn eval(&self, q: &BoundQuery, x: f64) -> f64 {
        let (t, lambda) = match self.grid_var {
            GridVar::T => (x, q.lambda),
            GridVar::Lambda => (q.t, x),
        };
        let e = &self.exponents;
        let mut v = self.prefactor
            * t.powf(e.t)
            * q.b.powf(e.b)
            * q.b_t.powf(e.b_t)
            * q.sigma_n.powf(e.sigma_n)
            * q.vol.powf(e.vol)
            * lambda.powf(e.lambda);
        if e.log_t != 0.0 {
            v *= t.ln().powf(e.log_t);
        }
        if e.loglog_t != 0.0 {
            v *= t.ln().ln().powf(e.loglog_t);
        }
        v
    }
}

/// Fano-version lower bound c_* B^{d/(2ν+d)} σ_n^{2ν/(2ν+d)} vol^{ν/(2ν+d)} T^{(ν+d)/(2ν+d)} (log T)^{ν/(2ν+d)}.
pub fn lower_curve_main(q: &BoundQuery, t_grid: &[f64]) -> RateCurve {
    let (nu, d) = (q.nu, q.df());
    let s = 2.0 * nu + d;
    let e = Exponents { t: (nu + d) / s, b: d / s, sigma_n: 2.0 * nu / s, vol: nu / s, log_t: nu / s, ..Default::default() };
    let mut c = RateCurve::build("lower_main", c_star(q), e, q, GridVar::T, t_grid);
    for &t in t_grid {
        let w = eps_t(&BoundQuery { t, ..q.clone() });
        c.warnings.extend(w.warnings.into_iter().map(|m| format!("T = {t}: {m}")));
    }
    c
}

/// Assouad constant c'_* = 2^{dα − d/2 − 2} c_+^{-d/(4(ν+d))} ω_d^{-(1−2α)/2}, α = d/(2ν+2d).
pub fn c_star_assouad(q: &BoundQuery) -> f64 {
    let (nu, d) = (q.nu, q.df());
    let alpha = d / (2.0 * nu + 2.0 * d);
    let (_, c_plus) = sobolev_constants(q);
    2f64.powf(d * alpha - d / 2.0 - 2.0) * c_plus.powf(-d / (4.0 * (nu + d))) * omega(q.d).powf(-(1.0 - 2.0 * alpha) / 2.0)
}

/// Assouad-version lower bound with the (log log T)^{(2ν+d)/(4(ν+d))} divisor.
pub fn lower_curve_assouad(q: &BoundQuery, t_grid: &[f64]) -> RateCurve {
    let (nu, d) = (q.nu, q.df());
    let den = 4.0 * (nu + d);
    let e = Exponents {
        t: (2.0 * nu + 3.0 * d) / den,
        b: d / (2.0 * (nu + d)),
        sigma_n: (2.0 * nu + d) / (2.0 * (nu + d)),
        vol: nu / (2.0 * (nu + d)),
        loglog_t: -(2.0 * nu + d) / den,
        ..Default::default()
    };
    let mut c = RateCurve::build("lower_assouad", c_star_assouad(q), e, q, GridVar::T, t_grid);
    for &t in t_grid {
        if t <= std::f64::consts::E.powf(std::f64::consts::E) {
            c.warnings.push(format!("T = {t}: log log T guard (T ≤ e^e)"));
        }
    }
    c
}

/// Noise-term curve over T (prefactor 1).
pub fn noise_term_curve(q: &BoundQuery, t_grid: &[f64]) -> RateCurve {
    let (nu, d) = (q.nu, q.df());
    let s = 2.0 * nu + d;
    let e = Exponents { t: (nu + d) / s, b: d / s, sigma_n: 2.0 * nu / s, vol: nu / s, ..Default::default() };
    RateCurve::build("noise_term", 1.0, e, q, GridVar::T, t_grid)
}

/// Switching-term curve over λ (prefactor 1): vol^{ν/(ν+d)} λ^{ν/(ν+d)} T^{d/(ν+d)} B^{d/(ν+d)}.
pub fn switch_term_curve(q: &BoundQuery, lambda_grid: &[f64]) -> RateCurve {
    let (nu, d) = (q.nu, q.df());
    let s = nu + d;
    let e = Exponents { t: d / s, b: d / s, vol: nu / s, lambda: nu / s, ..Default::default() };
    RateCurve::build("switch_term", 1.0, e, q, GridVar::Lambda, lambda_grid)
}

/// Crossover λ* = σ_n^{2(ν+d)/(2ν+d)} T^{ν/(2ν+d)} / (B^{d/(2ν+d)} vol^{ν/(2ν+d)}).
pub fn lambda_star(q: &BoundQuery) -> f64 {
    let (nu, d) = (q.nu, q.df());
    let s = 2.0 * nu + d;
    q.sigma_n.powf(2.0 * (nu + d) / s) * q.t.powf(nu / s) / (q.b.powf(d / s) * q.vol.powf(nu / s))
}

/// Noise and switching terms of the switching-augmented bound (both scaled by c_aug),
/// plus the crossover λ*.
pub fn switching_curves(q: &BoundQuery, t_grid: &[f64], lambda_grid: &[f64]) -> (RateCurve, RateCurve, f64) {
    let c = bayes_and_aug_constants(q).c_aug;
    let mut noise = noise_term_curve(q, t_grid);
    let mut switch = switch_term_curve(q, lambda_grid);
    for curve in [&mut noise, &mut switch] {
        curve.prefactor = c;
        curve.points.iter_mut().for_each(|p| p.1 *= c);
    }
    (noise, switch, lambda_star(q))
}

/// Time-varying rates.
#[derive(Clone, Debug, PartialEq)]
pub struct TvRates {
    pub lower: RateCurve,
    pub w_star: f64,
    pub upper: RateCurve,
    pub warnings: Vec<String>,
}

/// Lower bound c_NS T^{(2ν+d)/(3ν+d)} B_T^{ν/(3ν+d)} B^{d/(3ν+d)} σ_n^{2ν/(3ν+d)} vol^{ν/(3ν+d)} (log T)^{ν/(3ν+d)},
/// window W* = (B T vol^{1/2} / B_T)^{(2ν+d)/(3ν+d)}, and the polynomial-regression upper
/// curve whose exponents come from the window optimization (prefactor 1).
pub fn tv_rates(q: &BoundQuery, t_grid: &[f64]) -> TvRates {
    let (nu, d) = (q.nu, q.df());
    let s = 3.0 * nu + d;
    let lower_e = Exponents {
        t: (2.0 * nu + d) / s,
        b_t: nu / s,
        b: d / s,
        sigma_n: 2.0 * nu / s,
        vol: nu / s,
        log_t: nu / s,
        ..Default::default()
    };
    let c_ns = bayes_and_aug_constants(q).c_ns;
    let lower = RateCurve::build("tv_lower", c_ns, lower_e, q, GridVar::T, t_grid);
    let w_star = (q.b * q.t * q.vol.sqrt() / q.b_t).powf((2.0 * nu + d) / s);
    let up = exact::polyreg_upper_exponents(exact::to_q(nu), exact::to_q(d));
    let f = |r: exact::Q| *r.numer() as f64 / *r.denom() as f64;
    let upper_e = Exponents { t: f(up.t), b_t: f(up.b_t), b: f(up.b), sigma_n: f(up.sigma_n), vol: f(up.vol), ..Default::default() };
    let upper = RateCurve::build("tv_upper_polyreg", 1.0, upper_e, q, GridVar::T, t_grid);
    let mut warnings = Vec::new();
    if q.b_t < q.b * q.t.powf(-nu / (2.0 * nu + d)) {
        warnings.push("stationary regime: B_T < B T^{-ν/(2ν+d)}".into());
    }
    TvRates { lower, w_star, upper, warnings }
}

/// Bishop–Gromov correction 1 − (d−1) K_+ ε_T² / (6(d+2)), K_+ = (d−1)K, kept in (0, 1].
pub fn curvature_correction(q: &BoundQuery) -> Flagged {
    let d = q.df();
    let e = eps_t(q);
    let k_plus = (d - 1.0) * q.curvature;
    let raw = 1.0 - (d - 1.0) * k_plus * e.value * e.value / (6.0 * (d + 2.0));
    let mut warnings = e.warnings;
    let value = if raw <= 0.0 {
        warnings.push(format!("curvature correction {raw} ≤ 0, reported as the smallest positive value"));
        f64::MIN_POSITIVE
    } else {
        raw.min(1.0)
    };
    Flagged { value, warnings }
}

/// Bayesian, switching and non-stationary constants.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AuxConstants {
    pub c_bessel: f64,
    pub c_b: f64,
    pub c_aug: f64,
    pub c_ns: f64,
}

pub fn bayes_and_aug_constants(q: &BoundQuery) -> AuxConstants {
    let (nu, d) = (q.nu, q.df());
    let c_bessel = 2f64.powf(-d / nu) / gamma(d / nu + 1.0) * (gamma(nu + d / 2.0) / gamma(nu)).powf(d / nu);
    let c_b = 0.125 * (LN_2 / 2.0).sqrt() * c_bessel.powf(nu / (2.0 * nu + d));
    let (c_minus, _) = sobolev_constants(q);
    let cs = c_star(q);
    let c_aug = 0.25 * cs.min(c_minus.powf(d / (nu + d)) * q.c_n().powf(-nu / (nu + d)));
    let c_ns = 0.125 * c_minus * cs * omega(q.d).powf(nu / (3.0 * nu + d));
    AuxConstants { c_bessel, c_b, c_aug, c_ns }
}

/// vol^{ν/(2ν+d)}, the volume factor of the Fano rate.
pub fn volume_power(q: &BoundQuery) -> f64 {
    q.vol.powf(q.nu / (2.0 * q.nu + q.df()))
}

/// Exact rational exponent arithmetic.
pub mod exact {
    use num_rational::Ratio;

    pub type Q = Ratio<i128>;

    /// Rational approximation of a float with a small denominator (exact for dyadic
    /// or short decimal inputs such as 5/2).
    pub fn to_q(x: f64) -> Q {
        Q::approximate_float(x).unwrap_or_else(|| Q::from_integer(x.round() as i128))
    }

    pub fn int(n: i128) -> Q {
        Q::from_integer(n)
    }

    /// Five exponents of a rate: T, B, B_T, σ_n, vol.
    #[derive(Clone, Copy, Debug, PartialEq, Eq)]
    pub struct FiveExponents {
        pub t: Q,
        pub b: Q,
        pub b_t: Q,
        pub sigma_n: Q,
        pub vol: Q,
    }

    /// Fano T-exponent (ν+d)/(2ν+d).
    pub fn fano_t(nu: Q, d: Q) -> Q {
        (nu + d) / (int(2) * nu + d)
    }

    /// Assouad T-exponent (2ν+3d)/(4(ν+d)).
    pub fn assouad_t(nu: Q, d: Q) -> Q {
        (int(2) * nu + int(3) * d) / (int(4) * (nu + d))
    }

    pub fn tv_lower_exponents(nu: Q, d: Q) -> FiveExponents {
        let s = int(3) * nu + d;
        FiveExponents { t: (int(2) * nu + d) / s, b: d / s, b_t: nu / s, sigma_n: int(2) * nu / s, vol: nu / s }
    }

    /// Upper exponents from the window optimization: with A = B^{d/(2ν+d)} σ_n^{2ν/(2ν+d)} vol^{ν/(2ν+d)},
    /// W* ∝ (A T / B_T)^{ρ}, ρ = (2ν+d)/(3ν+d), and regret ≍ W* B_T.
    pub fn polyreg_upper_exponents(nu: Q, d: Q) -> FiveExponents {
        let s2 = int(2) * nu + d;
        let rho = s2 / (int(3) * nu + d);
        FiveExponents {
            t: rho,
            b: d / s2 * rho,
            b_t: int(1) - rho,
            sigma_n: int(2) * nu / s2 * rho,
            vol: nu / s2 * rho,
        }
    }

    /// (2ν+d)² − (ν+d)(3ν+d) = ν².
    pub fn tv_identity_holds(nu: Q, d: Q) -> bool {
        let s = int(2) * nu + d;
        s * s - (nu + d) * (int(3) * nu + d) == nu * nu
    }

    /// (2ν+3d)(2ν+d) + d² = 4(ν+d)².
    pub fn assouad_identity_holds(nu: Q, d: Q) -> bool {
        (int(2) * nu + int(3) * d) * (int(2) * nu + d) + d * d == int(4) * (nu + d) * (nu + d)
    }

    pub fn fano_exceeds_assouad(nu: Q, d: Q) -> bool {
        fano_t(nu, d) > assouad_t(nu, d)
    }
}

/// ω_d exposed for reporting.
pub fn unit_ball_volume(d: usize) -> f64 {
    omega(d)
}
