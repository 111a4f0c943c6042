use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{env_seed, ResultTable};
use crate::bounds::{self, exact, BoundQuery};
use crate::environments::{gp_sample_from_gram, time_varying_env, BumpParams};
use crate::error::Result;
use crate::geometry::{candidate_set, exp_map, greedy_packing, packing_floor, random_point, ManifoldSpec, Scheme};
use crate::gp::GpPosterior;
use crate::kernels::{gram, GramMatrix, KernelMode, KernelSpec};
use crate::oracle::compare_with_oracle;
use crate::policies::{local_poly_fit, run_policy, CellTree, PolicyConfig, PolicyKind};

/// One measured check.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckRow {
    pub suite: &'static str,
    pub name: String,
    pub measured: f64,
    pub threshold: f64,
    pub passed: bool,
}

struct Collector(Vec<CheckRow>);

impl Collector {
    /// Passes when `measured ≤ threshold`.
    fn at_most(&mut self, suite: &'static str, name: impl Into<String>, measured: f64, threshold: f64) {
        let passed = measured <= threshold;
        self.0.push(CheckRow { suite, name: name.into(), measured, threshold, passed });
    }

    /// Passes when `measured ≥ threshold`.
    fn at_least(&mut self, suite: &'static str, name: impl Into<String>, measured: f64, threshold: f64) {
        let passed = measured >= threshold;
        self.0.push(CheckRow { suite, name: name.into(), measured, threshold, passed });
    }

    fn holds(&mut self, suite: &'static str, name: impl Into<String>, ok: bool) {
        self.0.push(CheckRow { suite, name: name.into(), measured: ok as u8 as f64, threshold: 1.0, passed: ok });
    }
}

/// Kernel oracle comparisons on `pairs` random pairs per manifold.
pub fn oracle_checks(pairs: usize, seed: u64) -> Result<Vec<CheckRow>> {
    let mut c = Collector(Vec::new());
    let cases = [
        (ManifoldSpec::sphere2(), 0.5),
        (ManifoldSpec::torus(2), 0.5),
        (ManifoldSpec::torus(3), 1.0),
        (ManifoldSpec::so3(), 0.5),
        (ManifoldSpec::spin3(), 0.5),
    ];
    for (m, kappa) in cases {
        let k = KernelSpec::new(m, 2.5, kappa, 1.0, KernelMode::Intrinsic)?;
        let r = compare_with_oracle(&k, pairs, seed)?;
        c.at_most("kernel_oracle", format!("{}.max_rel_err", r.manifold), r.max_rel_err, 1e-7);
    }
    Ok(c.0)
}

/// Greedy packing counts on a 10,000-point Fibonacci sphere against the floor.
pub fn packing_checks() -> Result<Vec<CheckRow>> {
    let mut c = Collector(Vec::new());
    let m = ManifoldSpec::sphere2();
    let cs = candidate_set(&m, 10_000, Scheme::FibonacciSphere)?;
    for eps in [0.1, 0.2, 0.4] {
        let count = greedy_packing(&cs, eps)?.len() as f64;
        let floor = packing_floor(&m, eps, 1.0).ceil();
        c.at_least("packing", format!("s2.eps{eps}.count"), count, floor);
    }
    Ok(c.0)
}

/// Planted quadratics in normal coordinates are recovered exactly.
pub fn poly_checks(seed: u64) -> Result<Vec<CheckRow>> {
    let mut c = Collector(Vec::new());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for m in [ManifoldSpec::sphere2(), ManifoldSpec::torus(2), ManifoldSpec::so3()] {
        let center = random_point(&m, &mut rng);
        let d = m.dim;
        let lin: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
        let quad: Vec<f64> = (0..d * d).map(|_| rng.random_range(-1.0..1.0)).collect();
        let f = |v: &[f64]| {
            let mut s = 0.3;
            for i in 0..d {
                s += lin[i] * v[i];
                for j in 0..d {
                    s += quad[i * d + j] * v[i] * v[j];
                }
            }
            s
        };
        let mut samples = Vec::new();
        let mut worst: f64 = 0.0;
        for _ in 0..40 {
            let v: Vec<f64> = (0..d).map(|_| rng.random_range(-0.3..0.3)).collect();
            samples.push((exp_map(&m, &center, &v)?, f(&v)));
        }
        let fit = local_poly_fit(&m, &center, &samples, 2)?;
        for _ in 0..20 {
            let v: Vec<f64> = (0..d).map(|_| rng.random_range(-0.3..0.3)).collect();
            worst = worst.max((fit.eval(&v) - f(&v)).abs());
        }
        c.at_most("poly_recovery", format!("{m}.residual"), fit.residual, 1e-8);
        c.at_most("poly_recovery", format!("{m}.heldout_err"), worst, 1e-8);
    }
    Ok(c.0)
}

/// Whether a noiseless polyreg run keeps the cell holding `best` active at every level.
pub fn polyreg_retains_argmax(tree: &CellTree, trace: &[Vec<usize>], best: usize) -> bool {
    trace.iter().take(tree.n_levels()).enumerate().all(|(level, active)| active.contains(&tree.cell_of(level, best)))
}

/// Polyreg elimination on `draws` planted noiseless GP draws over the 200-point sphere.
pub fn polyreg_retention(draws: usize, seed: u64) -> Result<usize> {
    let m = ManifoldSpec::sphere2();
    let cs = candidate_set(&m, 200, Scheme::FibonacciSphere)?;
    let k = KernelSpec::new(m, 2.5, 0.5, 1.0, KernelMode::Intrinsic)?;
    let g = gram(&k, &cs)?;
    let cfg = PolicyConfig { sigma_n: 0.0, ..PolicyConfig::new(PolicyKind::PolyRegElim) };
    let tree = CellTree::build(&cs, cfg.eps1_for(&cs), cfg.levels)?;
    let mut kept = 0;
    for i in 0..draws as u64 {
        let env = gp_sample_from_gram(&g, env_seed(seed + i))?;
        let rec = run_policy(&env, &cs, None, &cfg, 20_000, seed + i)?;
        if polyreg_retains_argmax(&tree, &rec.active_trace, env.argmax_at(1)) {
            kept += 1;
        }
    }
    Ok(kept)
}

/// Two-path constants and exact exponent identities over random (ν, d).
pub fn bounds_checks(seed: u64) -> Vec<CheckRow> {
    let mut c = Collector(Vec::new());
    let m = ManifoldSpec::sphere2();
    let q = BoundQuery::for_manifold(&m, 2.5);
    let (a, b) = (bounds::c_star(&q), bounds::c_star_via_c_plus(&q));
    c.at_most("bounds", "c_star.two_path_rel_diff", ((a - b) / a).abs(), 1e-12);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut fano, mut tv, mut ass, mut five) = (true, true, true, true);
    for _ in 0..50 {
        let d = exact::int(rng.random_range(1..=6));
        let nu = exact::Q::new(rng.random_range(1..=40), rng.random_range(1..=8));
        fano &= exact::fano_exceeds_assouad(nu, d);
        tv &= exact::tv_identity_holds(nu, d);
        ass &= exact::assouad_identity_holds(nu, d);
        let (l, u) = (exact::tv_lower_exponents(nu, d), exact::polyreg_upper_exponents(nu, d));
        five &= l == u;
    }
    c.holds("bounds", "fano_exceeds_assouad", fano);
    c.holds("bounds", "tv_square_identity", tv);
    c.holds("bounds", "assouad_identity", ass);
    c.holds("bounds", "tv_five_exponents_equal", five);
    c.0
}

fn small_gram() -> Result<Arc<GramMatrix>> {
    let m = ManifoldSpec::sphere2();
    let cs = candidate_set(&m, 60, Scheme::FibonacciSphere)?;
    let k = KernelSpec::new(m, 2.5, 0.5, 1.0, KernelMode::Intrinsic)?;
    Ok(Arc::new(gram(&k, &cs)?))
}

/// Incremental versus batch posterior, variance monotonicity and the 1×1 formula.
pub fn gp_checks(seed: u64) -> Result<Vec<CheckRow>> {
    let mut c = Collector(Vec::new());
    let g = small_gram()?;
    let n = g.len();
    let noise = 0.01;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut gp = GpPosterior::new(g.clone(), noise)?;
    let mut obs = Vec::new();
    let mut monotone = true;
    for _ in 0..50 {
        let a = rng.random_range(0..n);
        let y: f64 = rng.random_range(-1.0..1.0);
        let before = gp.variances().to_vec();
        gp.update(a, y)?;
        obs.push((a, y));
        monotone &= gp.variances().iter().zip(&before).all(|(v, b)| *v <= b + 1e-12);
    }
    let batch = GpPosterior::from_observations(g.clone(), noise, &obs)?;
    let err = (0..n)
        .map(|j| (gp.means()[j] - batch.means()[j]).abs().max((gp.variances()[j] - batch.variances()[j]).abs()))
        .fold(0.0, f64::max);
    c.at_most("gp", "incremental_vs_batch", err, 1e-9);
    c.holds("gp", "variance_monotone", monotone);
    let (a, y) = (3, 0.7);
    let mut one = GpPosterior::new(g.clone(), noise)?;
    one.update(a, y)?;
    let kaa = g.values[(a, a)] + noise;
    let err1 = (0..n)
        .map(|j| {
            let kja = g.values[(j, a)];
            let m = kja * y / kaa;
            let v = g.values[(j, j)] - kja * kja / kaa;
            (one.means()[j] - m).abs().max((one.variances()[j] - v).abs())
        })
        .fold(0.0, f64::max);
    c.at_most("gp", "one_point_formula", err1, 1e-12);
    Ok(c.0)
}

/// Environment optimum bookkeeping and variation budget.
pub fn environment_checks(seed: u64) -> Result<Vec<CheckRow>> {
    let mut c = Collector(Vec::new());
    let g = small_gram()?;
    let env = gp_sample_from_gram(&g, seed)?;
    c.holds("environments", "gp_optimum_consistent", env.optimum_consistent());
    let m = ManifoldSpec::sphere2();
    let cs = candidate_set(&m, 200, Scheme::FibonacciSphere)?;
    let b_t = 4.0;
    let tv = time_varying_env(&cs, b_t, 400, 0.4, &BumpParams::canonical(2.5), Some(0.5), seed)?;
    c.holds("environments", "tv_optimum_consistent", tv.optimum_consistent());
    c.at_most("environments", "tv_realized_variation", tv.realized_variation(), b_t);
    Ok(c.0)
}

/// Runs every suite; rows carry `param_name = suite`, `param_value` = check index,
/// `seed = -1`, and two metrics per check (`<name>` measured and `<name>.pass`).
pub fn run_checks(pairs: usize, seed: u64) -> Result<(ResultTable, Vec<CheckRow>)> {
    let mut rows = oracle_checks(pairs, seed)?;
    rows.extend(packing_checks()?);
    rows.extend(poly_checks(seed)?);
    let kept = polyreg_retention(20, seed)?;
    rows.push(CheckRow { suite: "poly_recovery", name: "polyreg_retained_of_20".into(), measured: kept as f64, threshold: 20.0, passed: kept == 20 });
    rows.extend(bounds_checks(seed));
    rows.extend(gp_checks(seed)?);
    rows.extend(environment_checks(seed)?);
    let mut t = ResultTable::default();
    for (i, r) in rows.iter().enumerate() {
        t.push("checks", r.suite, i as f64, -1, &r.name, r.measured);
        t.push("checks", r.suite, i as f64, -1, &format!("{}.threshold", r.name), r.threshold);
        t.push("checks", r.suite, i as f64, -1, &format!("{}.pass", r.name), r.passed as u8 as f64);
    }
    t.sort();
    Ok((t, rows))
}
