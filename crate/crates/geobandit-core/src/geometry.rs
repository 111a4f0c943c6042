//! Arm manifolds, metric primitives, candidate sets and greedy packings.
//!
//! Coordinates:
//! - `Sphere2`: unit vectors in R^3.
//! - `Torus(n)`: angle vectors in [0, 2π)^n.
//! - `Spin3`: unit quaternions `[w, x, y, z]` with the round metric of the unit S^3.
//! - `SO3`: unit quaternions in canonical-hemisphere form with the rotation-angle
//!   metric `2·arccos|<q1, q2>|`.
//!
//! Tangent vectors are expressed in fixed frames: the polar frame `(e_θ, e_φ)` on S^2,
//! the coordinate frame on T^n and the left-invariant frame on SO3 / Spin3
//! (`exp_q(v) = q · exp(v)`).

use std::f64::consts::{PI, TAU};
use std::fmt;

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{domain, Error, Result};

/// Candidate sets up to this size cache their full distance matrix.
pub const DENSE_DIST_LIMIT: usize = 2500;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ManifoldKind {
    Sphere2,
    Torus(usize),
    SO3,
    Spin3,
}

/// An arm manifold with its metric data.
#[derive(Clone, Debug, PartialEq)]
pub struct ManifoldSpec {
    pub kind: ManifoldKind,
    pub dim: usize,
    pub volume: f64,
    pub inj_radius: f64,
    /// Uniform bound K on |sectional curvature|.
    pub curvature_bound: f64,
}

impl ManifoldSpec {
    pub fn new(kind: ManifoldKind) -> Self {
        match kind {
            ManifoldKind::Sphere2 => Self::sphere2(),
            ManifoldKind::Torus(n) => Self::torus(n),
            ManifoldKind::SO3 => Self::so3(),
            ManifoldKind::Spin3 => Self::spin3(),
        }
    }

    pub fn sphere2() -> Self {
        Self { kind: ManifoldKind::Sphere2, dim: 2, volume: 4.0 * PI, inj_radius: PI / 2.0, curvature_bound: 1.0 }
    }

    /// Flat torus T^n = R^n / (2πZ)^n.
    ///
    /// # Panics
    /// If `n == 0`.
    pub fn torus(n: usize) -> Self {
        assert!(n >= 1, "torus dimension must be positive");
        Self {
            kind: ManifoldKind::Torus(n),
            dim: n,
            volume: TAU.powi(n as i32),
            inj_radius: PI,
            curvature_bound: 0.0,
        }
    }

    pub fn so3() -> Self {
        Self { kind: ManifoldKind::SO3, dim: 3, volume: 8.0 * PI * PI, inj_radius: PI / 2.0, curvature_bound: 0.25 }
    }

    pub fn spin3() -> Self {
        Self { kind: ManifoldKind::Spin3, dim: 3, volume: 2.0 * PI * PI, inj_radius: PI, curvature_bound: 1.0 }
    }

    /// Length of the coordinate vector of a point.
    pub fn ambient_len(&self) -> usize {
        match self.kind {
            ManifoldKind::Sphere2 => 3,
            ManifoldKind::Torus(n) => n,
            ManifoldKind::SO3 | ManifoldKind::Spin3 => 4,
        }
    }

    pub fn diameter(&self) -> f64 {
        match self.kind {
            ManifoldKind::Sphere2 | ManifoldKind::SO3 | ManifoldKind::Spin3 => PI,
            ManifoldKind::Torus(n) => PI * (n as f64).sqrt(),
        }
    }

    /// True for the gauge quotient SO3 = Spin3 / {±1}.
    pub fn is_quotient(&self) -> bool {
        self.kind == ManifoldKind::SO3
    }

    /// Largest admissible packing / bump radius: min(r_inj/2, 1/√K).
    pub fn max_packing_radius(&self) -> f64 {
        let r = self.inj_radius / 2.0;
        if self.curvature_bound > 0.0 {
            r.min(1.0 / self.curvature_bound.sqrt())
        } else {
            r
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        let s = name.trim().to_ascii_lowercase();
        match s.as_str() {
            "sphere2" | "s2" => Ok(Self::sphere2()),
            "so3" => Ok(Self::so3()),
            "spin3" | "s3" => Ok(Self::spin3()),
            _ => {
                let digits = s.strip_prefix("torus").or_else(|| s.strip_prefix('t'));
                match digits.and_then(|d| d.parse::<usize>().ok()) {
                    Some(n) if n >= 1 => Ok(Self::torus(n)),
                    _ => Err(Error::Parse(format!("unknown manifold `{name}`"))),
                }
            }
        }
    }
}

impl fmt::Display for ManifoldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            ManifoldKind::Sphere2 => write!(f, "sphere2"),
            ManifoldKind::Torus(n) => write!(f, "torus{n}"),
            ManifoldKind::SO3 => write!(f, "so3"),
            ManifoldKind::Spin3 => write!(f, "spin3"),
        }
    }
}

/// A point given by its coordinate vector (see module docs for conventions).
#[derive(Clone, Debug, PartialEq)]
pub struct Point(pub Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Self {
        Point(coords)
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }
}

impl From<Vec<f64>> for Point {
    fn from(v: Vec<f64>) -> Self {
        Point(v)
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Angle between unit vectors, accurate near 0 and π.
fn unit_angle(a: &[f64], b: &[f64]) -> f64 {
    let mut dm = 0.0;
    let mut dp = 0.0;
    for (x, y) in a.iter().zip(b) {
        dm += (x - y) * (x - y);
        dp += (x + y) * (x + y);
    }
    2.0 * dm.sqrt().atan2(dp.sqrt())
}

/// Canonical hemisphere representative: scalar part ≥ 0, ties broken by the
/// first nonzero component being positive.
pub fn canonical_quaternion(q: [f64; 4]) -> [f64; 4] {
    let lead = q.iter().copied().find(|c| *c != 0.0).unwrap_or(0.0);
    if lead < 0.0 {
        [-q[0], -q[1], -q[2], -q[3]]
    } else {
        // Normalize -0.0 so representatives compare bitwise.
        q.map(|c| if c == 0.0 { 0.0 } else { c })
    }
}

pub fn quat_mul(a: [f64; 4], b: [f64; 4]) -> [f64; 4] {
    [
        a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3],
        a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2],
        a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1],
        a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0],
    ]
}

pub fn quat_conj(q: [f64; 4]) -> [f64; 4] {
    [q[0], -q[1], -q[2], -q[3]]
}

fn as_quat(p: &[f64]) -> [f64; 4] {
    [p[0], p[1], p[2], p[3]]
}

/// Unit quaternion for a rotation of `angle` radians about `axis`.
pub fn axis_angle_quaternion(axis: [f64; 3], angle: f64) -> [f64; 4] {
    let n = norm(&axis);
    let (s, c) = (angle / 2.0).sin_cos();
    canonical_quaternion([c, s * axis[0] / n, s * axis[1] / n, s * axis[2] / n])
}

fn check_point(m: &ManifoldSpec, p: &Point) -> Result<()> {
    if p.0.len() != m.ambient_len() {
        return domain(format!(
            "point with {} coordinates does not lie on {m} ({} expected)",
            p.0.len(),
            m.ambient_len()
        ));
    }
    if p.0.iter().any(|c| !c.is_finite()) {
        return domain("non-finite coordinate");
    }
    Ok(())
}

/// Geodesic distance in radians.
pub fn geodesic_distance(m: &ManifoldSpec, a: &Point, b: &Point) -> Result<f64> {
    check_point(m, a)?;
    check_point(m, b)?;
    Ok(dist_unchecked(m, &a.0, &b.0))
}

pub(crate) fn dist_unchecked(m: &ManifoldSpec, a: &[f64], b: &[f64]) -> f64 {
    match m.kind {
        ManifoldKind::Sphere2 | ManifoldKind::Spin3 => unit_angle(a, b),
        ManifoldKind::SO3 => {
            if dot(a, b) < 0.0 {
                let nb = [-b[0], -b[1], -b[2], -b[3]];
                2.0 * unit_angle(a, &nb)
            } else {
                2.0 * unit_angle(a, b)
            }
        }
        ManifoldKind::Torus(_) => a
            .iter()
            .zip(b)
            .map(|(x, y)| {
                let d = wrap_angle(x - y).abs();
                d * d
            })
            .sum::<f64>()
            .sqrt(),
    }
}

/// Wrap an angle difference into (-π, π].
pub fn wrap_angle(x: f64) -> f64 {
    let r = (x + PI).rem_euclid(TAU) - PI;
    if r == -PI {
        PI
    } else {
        r
    }
}

/// Polar frame (e_θ, e_φ) at a point of S^2; at the poles φ is taken as 0.
pub fn sphere_frame(p: &[f64]) -> ([f64; 3], [f64; 3]) {
    let rho = (p[0] * p[0] + p[1] * p[1]).sqrt();
    let (cp, sp) = if rho > 0.0 { (p[0] / rho, p[1] / rho) } else { (1.0, 0.0) };
    let (ct, st) = (p[2], rho);
    ([ct * cp, ct * sp, -st], [-sp, cp, 0.0])
}

/// Exponential map at `base` applied to a tangent vector in the frame conventions above.
pub fn exp_map(m: &ManifoldSpec, base: &Point, v: &[f64]) -> Result<Point> {
    check_point(m, base)?;
    if v.len() != m.dim {
        return domain(format!("tangent vector of length {} on a {}-manifold", v.len(), m.dim));
    }
    let p = &base.0;
    let out = match m.kind {
        ManifoldKind::Sphere2 => {
            let (et, ep) = sphere_frame(p);
            let w: Vec<f64> = (0..3).map(|i| v[0] * et[i] + v[1] * ep[i]).collect();
            let a = norm(&w);
            if a == 0.0 {
                p.clone()
            } else {
                let (s, c) = a.sin_cos();
                let q: Vec<f64> = (0..3).map(|i| c * p[i] + s * w[i] / a).collect();
                let n = norm(&q);
                q.into_iter().map(|x| x / n).collect()
            }
        }
        ManifoldKind::Torus(_) => p.iter().zip(v).map(|(x, d)| (x + d).rem_euclid(TAU)).collect(),
        ManifoldKind::Spin3 => {
            let r = quat_mul(as_quat(p), pure_exp(v, 1.0));
            normalize4(r).to_vec()
        }
        ManifoldKind::SO3 => {
            let r = quat_mul(as_quat(p), pure_exp(v, 0.5));
            canonical_quaternion(normalize4(r)).to_vec()
        }
    };
    Ok(Point(out))
}

/// exp of the pure quaternion `scale·v`.
fn pure_exp(v: &[f64], scale: f64) -> [f64; 4] {
    let a = norm(v);
    if a == 0.0 {
        return [1.0, 0.0, 0.0, 0.0];
    }
    let (s, c) = (a * scale).sin_cos();
    [c, s * v[0] / a, s * v[1] / a, s * v[2] / a]
}

fn normalize4(q: [f64; 4]) -> [f64; 4] {
    let n = norm(&q);
    q.map(|c| c / n)
}

/// Logarithm map (normal coordinates of `x` at `base`).
///
/// Errors when `x` is not strictly inside the injectivity ball of `base`.
pub fn log_map(m: &ManifoldSpec, base: &Point, x: &Point) -> Result<Vec<f64>> {
    let d = geodesic_distance(m, base, x)?;
    if d >= m.inj_radius {
        return domain(format!("log map: distance {d} is outside the injectivity radius {}", m.inj_radius));
    }
    Ok(log_unchecked(m, &base.0, &x.0))
}

pub(crate) fn log_unchecked(m: &ManifoldSpec, p: &[f64], x: &[f64]) -> Vec<f64> {
    match m.kind {
        ManifoldKind::Sphere2 => {
            let a = unit_angle(p, x);
            let c = dot(p, x);
            let u: Vec<f64> = (0..3).map(|i| x[i] - c * p[i]).collect();
            let un = norm(&u);
            if un == 0.0 || a == 0.0 {
                return vec![0.0, 0.0];
            }
            let (et, ep) = sphere_frame(p);
            let w: Vec<f64> = u.iter().map(|c| a * c / un).collect();
            vec![dot(&w, &et), dot(&w, &ep)]
        }
        ManifoldKind::Torus(_) => p.iter().zip(x).map(|(a, b)| wrap_angle(b - a)).collect(),
        ManifoldKind::Spin3 | ManifoldKind::SO3 => {
            let mut r = quat_mul(quat_conj(as_quat(p)), as_quat(x));
            let scale = if m.kind == ManifoldKind::SO3 {
                if r[0] < 0.0 {
                    r = r.map(|c| -c);
                }
                2.0
            } else {
                1.0
            };
            let vn = norm(&r[1..]);
            if vn == 0.0 {
                return vec![0.0; 3];
            }
            let a = vn.atan2(r[0]) * scale;
            r[1..].iter().map(|c| a * c / vn).collect()
        }
    }
}

/// Draw a point from the normalized volume measure.
pub fn random_point<R: Rng + ?Sized>(m: &ManifoldSpec, rng: &mut R) -> Point {
    match m.kind {
        ManifoldKind::Torus(n) => Point((0..n).map(|_| rng.random::<f64>() * TAU).collect()),
        _ => {
            let len = m.ambient_len();
            let v: Vec<f64> = (0..len).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
            let n = norm(&v);
            let v: Vec<f64> = v.into_iter().map(|x| x / n).collect();
            if m.kind == ManifoldKind::SO3 {
                Point(canonical_quaternion(as_quat(&v)).to_vec())
            } else {
                Point(v)
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scheme {
    FibonacciSphere,
    SuperFibonacciSO3,
    TorusGrid,
}

impl Scheme {
    pub fn name(&self) -> &'static str {
        match self {
            Scheme::FibonacciSphere => "fibonacci_sphere",
            Scheme::SuperFibonacciSO3 => "super_fibonacci",
            Scheme::TorusGrid => "torus_grid",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "fibonacci_sphere" => Ok(Scheme::FibonacciSphere),
            "super_fibonacci" => Ok(Scheme::SuperFibonacciSO3),
            "torus_grid" => Ok(Scheme::TorusGrid),
            _ => Err(Error::Parse(format!("unknown scheme `{s}`"))),
        }
    }
}

/// Finite candidate set with (for small sets) a cached distance matrix.
#[derive(Clone, Debug)]
pub struct CandidateSet {
    pub manifold: ManifoldSpec,
    pub points: Vec<Point>,
    dist: Option<DMatrix<f64>>,
}

impl CandidateSet {
    pub fn from_points(manifold: ManifoldSpec, points: Vec<Point>) -> Result<Self> {
        if points.is_empty() {
            return domain("candidate set must not be empty");
        }
        for p in &points {
            check_point(&manifold, p)?;
        }
        let n = points.len();
        let dist = (n <= DENSE_DIST_LIMIT).then(|| {
            let mut d = DMatrix::zeros(n, n);
            for i in 0..n {
                for j in (i + 1)..n {
                    let v = dist_unchecked(&manifold, &points[i].0, &points[j].0);
                    d[(i, j)] = v;
                    d[(j, i)] = v;
                }
            }
            d
        });
        Ok(Self { manifold, points, dist })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Geodesic distance between candidates `i` and `j`.
    pub fn dist(&self, i: usize, j: usize) -> f64 {
        match &self.dist {
            Some(d) => d[(i, j)],
            None => dist_unchecked(&self.manifold, &self.points[i].0, &self.points[j].0),
        }
    }

    /// The cached distance matrix, present when `len() <= DENSE_DIST_LIMIT`.
    pub fn pairwise_dist(&self) -> Option<&DMatrix<f64>> {
        self.dist.as_ref()
    }

    /// Index of the nearest candidate to `p` (lowest index on ties) and its distance.
    pub fn nearest(&self, p: &Point) -> (usize, f64) {
        let mut best = (0, f64::INFINITY);
        for (i, q) in self.points.iter().enumerate() {
            let d = dist_unchecked(&self.manifold, &p.0, &q.0);
            if d < best.1 {
                best = (i, d);
            }
        }
        best
    }

    /// Largest nearest-candidate distance over the probe points (a lower estimate of
    /// the covering radius).
    pub fn covering_radius(&self, probes: &[Point]) -> f64 {
        probes.iter().map(|p| self.nearest(p).1).fold(0.0, f64::max)
    }
}

/// Deterministic candidate set for `(m, n, scheme)`.
pub fn candidate_set(m: &ManifoldSpec, n: usize, scheme: Scheme) -> Result<CandidateSet> {
    if n < 2 {
        return domain("candidate sets need at least two points");
    }
    let points = match (scheme, m.kind) {
        (Scheme::FibonacciSphere, ManifoldKind::Sphere2) => fibonacci_sphere(n),
        (Scheme::SuperFibonacciSO3, ManifoldKind::SO3) => super_fibonacci(n)
            .into_iter()
            .map(|q| Point(canonical_quaternion(q).to_vec()))
            .collect(),
        (Scheme::SuperFibonacciSO3, ManifoldKind::Spin3) => {
            super_fibonacci(n).into_iter().map(|q| Point(q.to_vec())).collect()
        }
        (Scheme::TorusGrid, ManifoldKind::Torus(d)) => torus_grid(n, d)?,
        _ => return domain(format!("scheme {} is not available on {m}", scheme.name())),
    };
    CandidateSet::from_points(m.clone(), points)
}

const GOLDEN_ANGLE: f64 = 2.399_963_229_728_653; // π(3 − √5)

fn fibonacci_sphere(n: usize) -> Vec<Point> {
    (0..n)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / n as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let phi = (i as f64 * GOLDEN_ANGLE).rem_euclid(TAU);
            Point(vec![r * phi.cos(), r * phi.sin(), z])
        })
        .collect()
}

/// Two-irrational spiral on S^3 (constants √2 and the real root ψ of ψ^4 = ψ + 4).
fn super_fibonacci(n: usize) -> Vec<[f64; 4]> {
    const PHI: f64 = std::f64::consts::SQRT_2;
    const PSI: f64 = 1.533_751_168_755_204_3;
    (0..n)
        .map(|i| {
            let s = i as f64 + 0.5;
            let r = (s / n as f64).sqrt();
            let big_r = (1.0 - s / n as f64).sqrt();
            let alpha = TAU * s / PHI;
            let beta = TAU * s / PSI;
            normalize4([r * alpha.sin(), r * alpha.cos(), big_r * beta.sin(), big_r * beta.cos()])
        })
        .collect()
}

fn torus_grid(n: usize, d: usize) -> Result<Vec<Point>> {
    let g = (n as f64).powf(1.0 / d as f64).round() as usize;
    if g < 1 || g.checked_pow(d as u32) != Some(n) {
        return domain(format!("torus grid needs a perfect {d}-th power, got {n}"));
    }
    let step = TAU / g as f64;
    Ok((0..n)
        .map(|mut idx| {
            let mut c = vec![0.0; d];
            for k in (0..d).rev() {
                c[k] = (idx % g) as f64 * step;
                idx /= g;
            }
            Point(c)
        })
        .collect())
}

/// Γ(k/2) for positive integers k, from Γ(1/2) = √π and Γ(1) = 1.
pub fn gamma_half(k: u32) -> f64 {
    assert!(k >= 1, "gamma_half needs a positive argument");
    let mut x = if k % 2 == 0 { 1.0 } else { PI.sqrt() };
    let mut a = if k % 2 == 0 { 1.0 } else { 0.5 };
    let target = k as f64 / 2.0;
    while a < target {
        x *= a;
        a += 1.0;
    }
    x
}

/// Volume of the Euclidean unit ball in R^d: π^{d/2} / Γ(1 + d/2).
pub fn omega(d: usize) -> f64 {
    PI.powf(d as f64 / 2.0) / gamma_half(d as u32 + 2)
}

/// Packing-count floor vol / (2^d ω_d ε^d) · (1 − c_bg K ε²).
pub fn packing_floor(m: &ManifoldSpec, eps: f64, c_bg: f64) -> f64 {
    let d = m.dim as i32;
    m.volume / (2f64.powi(d) * omega(m.dim) * eps.powi(d)) * (1.0 - c_bg * m.curvature_bound * eps * eps)
}

/// Greedy maximal 2ε-packing over the candidate set, scanning candidates in index
/// order starting at index 0.
///
/// `eps` must lie in (0, min(r_inj/2, 1/√K)].
pub fn greedy_packing(cs: &CandidateSet, eps: f64) -> Result<Vec<usize>> {
    let max = cs.manifold.max_packing_radius();
    if !(eps > 0.0 && eps <= max * (1.0 + 1e-12)) {
        return domain(format!("packing radius {eps} outside (0, {max}]"));
    }
    Ok(greedy_separated(cs, eps, None))
}

/// Greedy 2ε-separated subset without the radius check; `members` restricts the scan
/// (in the given order) to a subset of candidates.
pub fn greedy_separated(cs: &CandidateSet, eps: f64, members: Option<&[usize]>) -> Vec<usize> {
    let sep = 2.0 * eps;
    let mut centers: Vec<usize> = Vec::new();
    let visit = |i: usize, centers: &mut Vec<usize>| {
        if centers.iter().all(|&c| cs.dist(i, c) >= sep) {
            centers.push(i);
        }
    };
    match members {
        Some(ms) => ms.iter().for_each(|&i| visit(i, &mut centers)),
        None => (0..cs.len()).for_each(|i| visit(i, &mut centers)),
    }
    centers
}

fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Render a candidate set as fixture text (17 significant digits).
pub fn write_fixture(cs: &CandidateSet, scheme: Scheme) -> String {
    let mut out = format!("# manifold={} n={} scheme={}\n", cs.manifold, cs.len(), scheme.name());
    for p in &cs.points {
        let line: Vec<String> = p.0.iter().map(|&c| fmt17(c)).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

/// Parse fixture text produced by [`write_fixture`].
pub fn read_fixture(text: &str) -> Result<(CandidateSet, Scheme)> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| Error::Parse("empty fixture".into()))?;
    let header = header
        .strip_prefix('#')
        .ok_or_else(|| Error::Parse("fixture header must start with `#`".into()))?;
    let (mut manifold, mut n, mut scheme) = (None, None, None);
    for field in header.split_whitespace() {
        match field.split_once('=') {
            Some(("manifold", v)) => manifold = Some(ManifoldSpec::parse(v)?),
            Some(("n", v)) => n = Some(v.parse::<usize>().map_err(|e| Error::Parse(e.to_string()))?),
            Some(("scheme", v)) => scheme = Some(Scheme::parse(v)?),
            _ => return Err(Error::Parse(format!("bad header field `{field}`"))),
        }
    }
    let (m, n, scheme) = match (manifold, n, scheme) {
        (Some(m), Some(n), Some(s)) => (m, n, s),
        _ => return Err(Error::Parse("fixture header is missing a field".into())),
    };
    let points = lines
        .map(|l| {
            l.split_whitespace()
                .map(|t| t.parse::<f64>().map_err(|e| Error::Parse(format!("`{t}`: {e}"))))
                .collect::<Result<Vec<f64>>>()
                .map(Point)
        })
        .collect::<Result<Vec<Point>>>()?;
    if points.len() != n {
        return Err(Error::Parse(format!("header says n={n}, found {} points", points.len())));
    }
    Ok((CandidateSet::from_points(m, points)?, scheme))
}
