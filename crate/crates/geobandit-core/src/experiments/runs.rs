use std::sync::Arc;

use rayon::prelude::*;

use super::{env_seed, loglog_slope, median, noise_seed, quantile, std_err, Params, ResultTable, Row};
use crate::bounds::{self, BoundQuery};
use crate::environments::{gp_sample_from_gram, gp_sample_with_norm, ris_combiner_env, time_varying_env, BumpParams, Environment};
use crate::error::{domain, Result};
use crate::geometry::{candidate_set, CandidateSet, ManifoldSpec, Scheme};
use crate::kernels::{gauge_factor, gauge_modulator, gram, GramMatrix, KernelMode, KernelSpec, OrbitNorm};
use crate::policies::{run_policy, PolicyConfig, PolicyKind};

fn seed_list(base: u64, n: usize) -> Vec<u64> {
    (0..n as u64).map(|i| base + i).collect()
}

fn setup(m: ManifoldSpec, n: usize, scheme: Scheme, nu: f64, kappa: f64, mode: KernelMode) -> Result<(CandidateSet, Arc<GramMatrix>)> {
    let cs = candidate_set(&m, n, scheme)?;
    let k = KernelSpec::new(m, nu, kappa, 1.0, mode)?;
    let g = Arc::new(gram(&k, &cs)?);
    Ok((cs, g))
}

fn gp_config(kind: PolicyKind, sigma_n: f64, lambda: f64) -> PolicyConfig {
    PolicyConfig { sigma_n, lambda, ..PolicyConfig::new(kind) }
}

fn collect_rows(parts: Vec<Result<Vec<Row>>>) -> Result<ResultTable> {
    let mut t = ResultTable::default();
    for p in parts {
        t.rows.extend(p?);
    }
    t.sort();
    Ok(t)
}

fn row(exp: &str, pn: &str, pv: f64, seed: i64, metric: &str, value: f64) -> Row {
    Row { experiment: exp.into(), param_name: pn.into(), param_value: pv, seed, metric: metric.into(), value }
}

/// Median, interquartile range and standard error rows (seed −1) for one metric.
fn summary_rows(t: &mut ResultTable, exp: &str, pn: &str, pv: f64, metric: &str) {
    let v = t.seed_values(pn, pv, metric);
    if v.is_empty() {
        return;
    }
    t.push(exp, pn, pv, -1, &format!("{metric}_median"), median(&v));
    t.push(exp, pn, pv, -1, &format!("{metric}_iqr"), quantile(&v, 0.75) - quantile(&v, 0.25));
    t.push(exp, pn, pv, -1, &format!("{metric}_se"), std_err(&v));
}

/// Regret floor check over GP-UCB runs on the Fibonacci sphere.
#[derive(Clone, Debug, PartialEq)]
pub struct LbValSettings {
    pub horizons: Vec<usize>,
    pub seeds: usize,
    pub seed_base: u64,
    pub n_cand: usize,
    pub nu: f64,
    pub kappa: f64,
    pub sigma_n: f64,
    pub b: f64,
    /// RKHS norm the target draw is rescaled to; 0 keeps the raw σ_f² = 1 draw.
    pub target_norm: f64,
}

impl LbValSettings {
    pub fn resolve(p: &mut Params) -> Result<Self> {
        let s = Self {
            horizons: p.usize_list("horizons", &[50, 100, 200, 400, 800])?,
            seeds: p.usize("seeds", 8)?,
            seed_base: p.u64("seed_base", 0)?,
            n_cand: p.usize("n_cand", 64)?,
            nu: p.f64("nu", 2.5)?,
            kappa: p.f64("kappa", 0.5)?,
            sigma_n: p.f64("sigma_n", 0.1)?,
            b: p.f64("B", 1.0)?,
            target_norm: p.f64("target_norm", 0.0)?,
        };
        if s.horizons.is_empty() || s.horizons.contains(&0) {
            return domain("horizons must be non-empty and positive");
        }
        Ok(s)
    }
}

/// Cumulative GP-UCB regret per (T, seed) plus `reference_floor` rows.
///
/// One run of length max T per seed; β_t does not depend on the horizon, so the prefix
/// regret equals the regret of a separate run of length T.
pub fn run_lbval(s: &LbValSettings) -> Result<ResultTable> {
    const EXP: &str = "lbval";
    let m = ManifoldSpec::sphere2();
    let (cs, g) = setup(m.clone(), s.n_cand, Scheme::FibonacciSphere, s.nu, s.kappa, KernelMode::Intrinsic)?;
    let t_max = *s.horizons.iter().max().expect("non-empty");
    let parts: Vec<Result<Vec<Row>>> = seed_list(s.seed_base, s.seeds)
        .into_par_iter()
        .map(|seed| {
            let env = if s.target_norm > 0.0 {
                gp_sample_with_norm(&g, s.target_norm, env_seed(seed))?
            } else {
                gp_sample_from_gram(&g, env_seed(seed))?
            };
            let env = env.with_noise(s.sigma_n * s.sigma_n)?;
            let rec = run_policy(&env, &cs, Some(g.clone()), &gp_config(PolicyKind::GpUcb, s.sigma_n, 0.0), t_max, noise_seed(seed))?;
            Ok(s.horizons
                .iter()
                .map(|&t| row(EXP, "T", t as f64, seed as i64, "cum_regret", rec.steps[t - 1].cum_regret))
                .collect())
        })
        .collect();
    let mut table = collect_rows(parts)?;
    let q = BoundQuery { b: s.b, sigma_n: s.sigma_n, kappa: s.kappa, ..BoundQuery::for_manifold(&m, s.nu) };
    let grid: Vec<f64> = s.horizons.iter().map(|&t| t as f64).collect();
    for (t, v) in bounds::lower_curve_main(&q, &grid).points {
        table.push(EXP, "T", t, -1, "reference_floor", v);
    }
    table.sort();
    Ok(table)
}

/// Extrinsic-section versus orbit-sum kernels on SO(3).
#[derive(Clone, Debug, PartialEq)]
pub struct D1Settings {
    pub ratios: Vec<f64>,
    pub seeds: usize,
    pub seed_base: u64,
    pub horizon: usize,
    pub n_cand: usize,
    pub nu: f64,
    pub sigma_n: f64,
    /// Comparator kernel: the canonical-section kernel or its |G|-averaged orbit sum.
    pub mode: KernelMode,
}

impl D1Settings {
    pub fn resolve(p: &mut Params) -> Result<Self> {
        Ok(Self {
            ratios: p.f64_list("ratios", &[0.13, 0.27, 0.40, 0.53, 0.67, 0.80, 0.89])?,
            seeds: p.usize("seeds", 20)?,
            seed_base: p.u64("seed_base", 0)?,
            horizon: p.usize("T", 200)?,
            n_cand: p.usize("n_cand", 200)?,
            nu: p.f64("nu", 2.5)?,
            sigma_n: p.f64("sigma_n", 0.1)?,
            mode: match p.string("mode", "section").as_str() {
                "section" => KernelMode::ExtrinsicSection,
                "orbit_average" => KernelMode::OrbitSum(OrbitNorm::GroupAverage),
                other => return domain(format!("d1 mode must be section or orbit_average, got {other}")),
            },
        })
    }
}

/// Per (κ/r_inj, seed): `regret_ratio` = R_ext / R_int on a shared target draw and noise
/// stream, plus `regret_ext`, `regret_int` and a `gauge_factor` reference row per ratio.
pub fn run_d1(s: &D1Settings) -> Result<ResultTable> {
    const EXP: &str = "d1";
    let m = ManifoldSpec::so3();
    let cs = candidate_set(&m, s.n_cand, Scheme::SuperFibonacciSO3)?;
    let mut parts = Vec::new();
    let mut refs = Vec::new();
    for &ratio in &s.ratios {
        let kappa = ratio * m.inj_radius;
        let k_int = KernelSpec::new(m.clone(), s.nu, kappa, 1.0, KernelMode::OrbitSum(OrbitNorm::UnitDiagonal))?;
        let k_ext = KernelSpec::new(m.clone(), s.nu, kappa, 1.0, s.mode)?;
        let g_int = Arc::new(gram(&k_int, &cs)?);
        let g_ext = Arc::new(gram(&k_ext, &cs)?);
        refs.push(row(EXP, "ratio", ratio, -1, "gauge_factor", gauge_factor(gauge_modulator(&k_int)?, 2)));
        let cfg = gp_config(PolicyKind::GpUcb, s.sigma_n, 0.0);
        let batch: Vec<Result<Vec<Row>>> = seed_list(s.seed_base, s.seeds)
            .into_par_iter()
            .map(|seed| {
                let env = gp_sample_from_gram(&g_int, env_seed(seed))?.with_noise(s.sigma_n * s.sigma_n)?;
                let r_int = run_policy(&env, &cs, Some(g_int.clone()), &cfg, s.horizon, noise_seed(seed))?.cum_regret();
                let r_ext = run_policy(&env, &cs, Some(g_ext.clone()), &cfg, s.horizon, noise_seed(seed))?.cum_regret();
                let sd = seed as i64;
                Ok(vec![
                    row(EXP, "ratio", ratio, sd, "regret_ratio", r_ext / r_int),
                    row(EXP, "ratio", ratio, sd, "regret_ext", r_ext),
                    row(EXP, "ratio", ratio, sd, "regret_int", r_int),
                ])
            })
            .collect();
        parts.extend(batch);
    }
    parts.push(Ok(refs));
    collect_rows(parts)
}

/// Switch-aware versus vanilla GP-UCB over a switching-cost grid on S².
#[derive(Clone, Debug, PartialEq)]
pub struct D7Settings {
    pub lambdas: Vec<f64>,
    pub seeds: usize,
    pub seed_base: u64,
    pub horizon: usize,
    pub n_cand: usize,
    pub nu: f64,
    pub kappa: f64,
    pub sigma_n: f64,
    /// Lower end of the slope-fit sub-grid.
    pub fit_from: f64,
}

impl D7Settings {
    pub fn resolve(p: &mut Params) -> Result<Self> {
        Ok(Self {
            lambdas: p.f64_list("lambdas", &[0.0, 0.01, 0.1, 0.5, 1.0, 2.5, 5.0, 10.0])?,
            seeds: p.usize("seeds", 15)?,
            seed_base: p.u64("seed_base", 0)?,
            horizon: p.usize("T", 200)?,
            n_cand: p.usize("n_cand", 200)?,
            nu: p.f64("nu", 2.5)?,
            kappa: p.f64("kappa", 0.5)?,
            sigma_n: p.f64("sigma_n", 0.1)?,
            fit_from: p.f64("fit_from", 0.5)?,
        })
    }
}

/// Per (λ, seed): `total_cost_<policy>`, `switches_<policy>`, `regret_<policy>`;
/// seed −1 rows hold median/IQR/SE summaries and the `slope_switch_aware` fit
/// (attached to λ = `fit_from`).
pub fn run_d7(s: &D7Settings) -> Result<ResultTable> {
    const EXP: &str = "d7";
    let (cs, g) = setup(ManifoldSpec::sphere2(), s.n_cand, Scheme::FibonacciSphere, s.nu, s.kappa, KernelMode::Intrinsic)?;
    let parts: Vec<Result<Vec<Row>>> = seed_list(s.seed_base, s.seeds)
        .into_par_iter()
        .map(|seed| {
            let env = gp_sample_from_gram(&g, env_seed(seed))?.with_noise(s.sigma_n * s.sigma_n)?;
            let vanilla = run_policy(&env, &cs, Some(g.clone()), &gp_config(PolicyKind::GpUcb, s.sigma_n, 0.0), s.horizon, noise_seed(seed))?;
            let sd = seed as i64;
            let mut rows = Vec::new();
            for &lambda in &s.lambdas {
                let cfg = gp_config(PolicyKind::SwitchAware, s.sigma_n, lambda);
                let aware = run_policy(&env, &cs, Some(g.clone()), &cfg, s.horizon, noise_seed(seed))?;
                for (name, rec) in [("gpucb", &vanilla), ("switch_aware", &aware)] {
                    rows.push(row(EXP, "lambda", lambda, sd, &format!("total_cost_{name}"), rec.total_cost(lambda)));
                    rows.push(row(EXP, "lambda", lambda, sd, &format!("switches_{name}"), rec.switches() as f64));
                    rows.push(row(EXP, "lambda", lambda, sd, &format!("regret_{name}"), rec.cum_regret()));
                }
            }
            Ok(rows)
        })
        .collect();
    let mut t = collect_rows(parts)?;
    for &lambda in &s.lambdas {
        for name in ["gpucb", "switch_aware"] {
            for m in ["total_cost", "switches"] {
                summary_rows(&mut t, EXP, "lambda", lambda, &format!("{m}_{name}"));
            }
        }
    }
    let fit: Vec<f64> = s.lambdas.iter().copied().filter(|&l| l >= s.fit_from && l > 0.0).collect();
    if fit.len() >= 2 {
        let med: Vec<f64> = fit.iter().map(|&l| median(&t.seed_values("lambda", l, "total_cost_switch_aware"))).collect();
        t.push(EXP, "lambda", s.fit_from, -1, "slope_switch_aware", loglog_slope(&fit, &med));
    }
    t.sort();
    Ok(t)
}

/// GP-ThreDS versus vanilla GP-UCB on the S² and T³ panels.
#[derive(Clone, Debug, PartialEq)]
pub struct D4Settings {
    pub seed_base: u64,
    pub horizon: usize,
    pub nu: f64,
    pub s2_lambdas: Vec<f64>,
    pub s2_seeds: usize,
    pub s2_n_cand: usize,
    pub s2_kappa: f64,
    pub s2_sigma_n: f64,
    pub t3_lambdas: Vec<f64>,
    pub t3_seeds: usize,
    pub t3_n_cand: usize,
    pub t3_kappa: f64,
    pub t3_sigma_n: f64,
    pub block_scale: f64,
    pub b: f64,
    /// Lower end of the vanilla slope-fit sub-grid.
    pub fit_from: f64,
}

impl D4Settings {
    pub fn resolve(p: &mut Params) -> Result<Self> {
        let seeds = p.usize_opt("seeds")?;
        let mut s = Self {
            seed_base: p.u64("seed_base", 0)?,
            horizon: p.usize("T", 200)?,
            nu: p.f64("nu", 2.5)?,
            s2_lambdas: p.f64_list("s2_lambdas", &[0.0, 0.01, 0.1, 0.5, 1.0, 2.5, 5.0, 10.0])?,
            s2_seeds: p.usize("s2_seeds", seeds.unwrap_or(15))?,
            s2_n_cand: p.usize("s2_n_cand", 200)?,
            s2_kappa: p.f64("s2_kappa", 0.5)?,
            s2_sigma_n: p.f64("s2_sigma_n", 0.1)?,
            t3_lambdas: p.f64_list("t3_lambdas", &[0.0, 0.005, 0.05, 0.5, 1.0, 2.5, 5.0])?,
            t3_seeds: p.usize("t3_seeds", seeds.unwrap_or(10))?,
            t3_n_cand: p.usize("t3_n_cand", 512)?,
            t3_kappa: p.f64("t3_kappa", 1.0)?,
            t3_sigma_n: p.f64("t3_sigma_n", 0.05)?,
            block_scale: p.f64("block_scale", 1.0)?,
            b: p.f64("B", 1.0)?,
            fit_from: p.f64("fit_from", 0.5)?,
        };
        if s.s2_lambdas.is_empty() || s.t3_lambdas.is_empty() {
            return domain("λ grids must be non-empty");
        }
        s.s2_lambdas.sort_by(f64::total_cmp);
        s.t3_lambdas.sort_by(f64::total_cmp);
        Ok(s)
    }
}

struct Panel<'a> {
    name: &'a str,
    m: ManifoldSpec,
    cs: CandidateSet,
    gram: Arc<GramMatrix>,
    lambdas: &'a [f64],
    seeds: usize,
    sigma_n: f64,
    ris: bool,
}

/// Per (panel, λ, seed): `total_cost_*`, `switches_*` and `regret_*` for `gpucb` and
/// `threds`. Reference rows (seed −1) hold `reference_cost` = C·max(noise term, λ-term)
/// with C anchored at the vanilla median cost at the largest λ, plus the raw terms
/// and the vanilla slope fit.
pub fn run_d4(s: &D4Settings) -> Result<ResultTable> {
    const EXP: &str = "d4";
    let s2 = ManifoldSpec::sphere2();
    let t3 = ManifoldSpec::torus(3);
    let (cs2, g2) = setup(s2.clone(), s.s2_n_cand, Scheme::FibonacciSphere, s.nu, s.s2_kappa, KernelMode::Intrinsic)?;
    let (cs3, g3) = setup(t3.clone(), s.t3_n_cand, Scheme::TorusGrid, s.nu, s.t3_kappa, KernelMode::Intrinsic)?;
    let panels = [
        Panel { name: "s2_lambda", m: s2, cs: cs2, gram: g2, lambdas: &s.s2_lambdas, seeds: s.s2_seeds, sigma_n: s.s2_sigma_n, ris: false },
        Panel { name: "t3_lambda", m: t3, cs: cs3, gram: g3, lambdas: &s.t3_lambdas, seeds: s.t3_seeds, sigma_n: s.t3_sigma_n, ris: true },
    ];
    let mut t = ResultTable::default();
    for p in &panels {
        let parts: Vec<Result<Vec<Row>>> = seed_list(s.seed_base, p.seeds)
            .into_par_iter()
            .map(|seed| {
                let env: Environment =
                    if p.ris { ris_combiner_env(&p.cs, env_seed(seed))? } else { gp_sample_from_gram(&p.gram, env_seed(seed))? };
                let env = env.with_noise(p.sigma_n * p.sigma_n)?;
                let vcfg = PolicyConfig { b: s.b, ..gp_config(PolicyKind::GpUcb, p.sigma_n, 0.0) };
                let vanilla = run_policy(&env, &p.cs, Some(p.gram.clone()), &vcfg, s.horizon, noise_seed(seed))?;
                let sd = seed as i64;
                let mut rows = Vec::new();
                for &lambda in p.lambdas {
                    let cfg = PolicyConfig {
                        nu: s.nu,
                        b: s.b,
                        block_scale: s.block_scale,
                        ..gp_config(PolicyKind::GpThreds, p.sigma_n, lambda)
                    };
                    let threds = run_policy(&env, &p.cs, None, &cfg, s.horizon, noise_seed(seed))?;
                    for (name, rec) in [("gpucb", &vanilla), ("threds", &threds)] {
                        rows.push(row(EXP, p.name, lambda, sd, &format!("total_cost_{name}"), rec.total_cost(lambda)));
                        rows.push(row(EXP, p.name, lambda, sd, &format!("switches_{name}"), rec.switches() as f64));
                        rows.push(row(EXP, p.name, lambda, sd, &format!("regret_{name}"), rec.cum_regret()));
                    }
                }
                Ok(rows)
            })
            .collect();
        let part = collect_rows(parts)?;
        t.rows.extend(part.rows.iter().cloned());
        for &lambda in p.lambdas {
            for name in ["gpucb", "threds"] {
                for m in ["total_cost", "switches"] {
                    summary_rows(&mut t, EXP, p.name, lambda, &format!("{m}_{name}"));
                }
            }
        }
        let q = BoundQuery {
            b: s.b,
            sigma_n: p.sigma_n,
            t: s.horizon as f64,
            ..BoundQuery::for_manifold(&p.m, s.nu)
        };
        let noise = bounds::noise_term_curve(&q, &[q.t]).points[0].1;
        let switch = bounds::switch_term_curve(&q, p.lambdas);
        let raw = |i: usize| noise.max(switch.points[i].1);
        let top = p.lambdas.len() - 1;
        let anchor = median(&part.seed_values(p.name, p.lambdas[top], "total_cost_gpucb"));
        let c_ref = anchor / raw(top);
        for (i, &lambda) in p.lambdas.iter().enumerate() {
            t.push(EXP, p.name, lambda, -1, "reference_cost", c_ref * raw(i));
            t.push(EXP, p.name, lambda, -1, "noise_term", noise);
            t.push(EXP, p.name, lambda, -1, "switch_term", switch.points[i].1);
        }
        t.push(EXP, p.name, s.fit_from, -1, "reference_slope", switch.exponents.lambda);
        let fit: Vec<f64> = p.lambdas.iter().copied().filter(|&l| l >= s.fit_from && l > 0.0).collect();
        if fit.len() >= 2 {
            let med: Vec<f64> = fit.iter().map(|&l| median(&part.seed_values(p.name, l, "total_cost_gpucb"))).collect();
            t.push(EXP, p.name, s.fit_from, -1, "slope_gpucb", loglog_slope(&fit, &med));
        }
    }
    t.sort();
    Ok(t)
}

/// Time-varying numeric chain and a windowed GP-UCB run on batched bumps.
#[derive(Clone, Debug, PartialEq)]
pub struct TvSettings {
    pub seeds: usize,
    pub seed_base: u64,
    pub horizon: usize,
    pub n_cand: usize,
    pub nu: f64,
    pub kappa: f64,
    pub sigma_n: f64,
    pub eps: f64,
    pub b_t: f64,
    pub height: f64,
    /// Window override; 0 means min(W*, T).
    pub window: usize,
    pub chain_t: f64,
    pub chain_b_t: f64,
    pub chain_kappa: f64,
}

impl TvSettings {
    pub fn resolve(p: &mut Params) -> Result<Self> {
        Ok(Self {
            seeds: p.usize("seeds", 4)?,
            seed_base: p.u64("seed_base", 0)?,
            horizon: p.usize("T", 400)?,
            n_cand: p.usize("n_cand", 200)?,
            nu: p.f64("nu", 2.5)?,
            kappa: p.f64("kappa", 0.5)?,
            sigma_n: p.f64("sigma_n", 0.1)?,
            eps: p.f64("eps", 0.4)?,
            b_t: p.f64("B_T", 4.0)?,
            height: p.f64("height", 0.5)?,
            window: p.usize("window", 0)?,
            chain_t: p.f64("chain_T", 1e4)?,
            chain_b_t: p.f64("chain_B_T", 10.0)?,
            chain_kappa: p.f64("chain_kappa", 1.0)?,
        })
    }
}

/// Chain rows (param `chain_T`, seed −1): `t_power`, `b_t_power`, `combined`
/// (lower bound without c_NS), `c_ns`, `lower_bound`, `w_star`. Run rows (param `T`):
/// `regret_window`, `regret_full`, `switches_window`, `realized_variation`, `batches`.
pub fn run_tv(s: &TvSettings) -> Result<ResultTable> {
    const EXP: &str = "tv";
    let m = ManifoldSpec::sphere2();
    let mut t = ResultTable::default();
    let q = BoundQuery { t: s.chain_t, b_t: s.chain_b_t, kappa: s.chain_kappa, ..BoundQuery::for_manifold(&m, s.nu) };
    let rates = bounds::tv_rates(&q, &[q.t]);
    let lower = rates.lower.points[0].1;
    let e = &rates.lower.exponents;
    let pv = s.chain_t;
    t.push(EXP, "chain_T", pv, -1, "t_power", q.t.powf(e.t));
    t.push(EXP, "chain_T", pv, -1, "b_t_power", q.b_t.powf(e.b_t));
    t.push(EXP, "chain_T", pv, -1, "combined", lower / rates.lower.prefactor);
    t.push(EXP, "chain_T", pv, -1, "c_ns", rates.lower.prefactor);
    t.push(EXP, "chain_T", pv, -1, "lower_bound", lower);
    t.push(EXP, "chain_T", pv, -1, "w_star", rates.w_star);

    let (cs, g) = setup(m.clone(), s.n_cand, Scheme::FibonacciSphere, s.nu, s.kappa, KernelMode::Intrinsic)?;
    let run_q = BoundQuery { t: s.horizon as f64, b_t: s.b_t, sigma_n: s.sigma_n, kappa: s.kappa, ..BoundQuery::for_manifold(&m, s.nu) };
    let w_star = bounds::tv_rates(&run_q, &[run_q.t]).w_star;
    let window = if s.window > 0 { s.window } else { (w_star.floor() as usize).clamp(1, s.horizon) };
    t.push(EXP, "T", s.horizon as f64, -1, "window", window as f64);
    t.push(EXP, "T", s.horizon as f64, -1, "w_star", w_star);
    let p = BumpParams::canonical(s.nu);
    let parts: Vec<Result<Vec<Row>>> = seed_list(s.seed_base, s.seeds)
        .into_par_iter()
        .map(|seed| {
            let env = time_varying_env(&cs, s.b_t, s.horizon, s.eps, &p, Some(s.height), env_seed(seed))?.with_noise(s.sigma_n * s.sigma_n)?;
            let wcfg = PolicyConfig { window, ..gp_config(PolicyKind::WindowGpUcb, s.sigma_n, 0.0) };
            let w = run_policy(&env, &cs, Some(g.clone()), &wcfg, s.horizon, noise_seed(seed))?;
            let f = run_policy(&env, &cs, Some(g.clone()), &gp_config(PolicyKind::GpUcb, s.sigma_n, 0.0), s.horizon, noise_seed(seed))?;
            let (pv, sd) = (s.horizon as f64, seed as i64);
            Ok(vec![
                row(EXP, "T", pv, sd, "regret_window", w.cum_regret()),
                row(EXP, "T", pv, sd, "regret_full", f.cum_regret()),
                row(EXP, "T", pv, sd, "switches_window", w.switches() as f64),
                row(EXP, "T", pv, sd, "realized_variation", env.realized_variation()),
                row(EXP, "T", pv, sd, "batches", env.n_batches() as f64),
            ])
        })
        .collect();
    let runs = collect_rows(parts)?;
    t.rows.extend(runs.rows);
    t.sort();
    Ok(t)
}
