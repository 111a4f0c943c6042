//! Bandit decision rules and the run loop that records their trajectories.

mod elimination;
mod poly;
mod threds;
mod tree;

use std::fmt::Write as _;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::environments::Environment;
use crate::error::{domain, Result};
use crate::geometry::CandidateSet;
use crate::gp::{argmax, BetaSchedule, GpPosterior};
use crate::kernels::GramMatrix;

pub use elimination::{cellmean_elimination_run, polyreg_elimination_run};
pub use poly::{local_poly_fit, monomials, n_coefficients, LocalPolyFit, RIDGE};
pub use threds::{gpthreds_block_size, gpthreds_run};
pub use tree::{spread_order, Cell, CellTree};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PolicyKind {
    GpUcb,
    SwitchAware,
    WindowGpUcb,
    CellMeanElim,
    PolyRegElim,
    GpThreds,
}

impl PolicyKind {
    pub fn name(&self) -> &'static str {
        match self {
            PolicyKind::GpUcb => "gpucb",
            PolicyKind::SwitchAware => "switch_aware",
            PolicyKind::WindowGpUcb => "window_gpucb",
            PolicyKind::CellMeanElim => "cellmean",
            PolicyKind::PolyRegElim => "polyreg",
            PolicyKind::GpThreds => "threds",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "gpucb" => PolicyKind::GpUcb,
            "switch_aware" => PolicyKind::SwitchAware,
            "window_gpucb" => PolicyKind::WindowGpUcb,
            "cellmean" => PolicyKind::CellMeanElim,
            "polyreg" => PolicyKind::PolyRegElim,
            "threds" => PolicyKind::GpThreds,
            _ => return domain(format!("unknown policy '{s}'")),
        })
    }
}

/// Policy parameters. Calibration constants C_η, C_a, C_e default to 1.
#[derive(Clone, Debug, PartialEq)]
pub struct PolicyConfig {
    pub kind: PolicyKind,
    pub beta: BetaSchedule,
    /// Switching cost λ.
    pub lambda: f64,
    /// Window length W.
    pub window: usize,
    /// Number of levels L of the hierarchical partition.
    pub levels: usize,
    /// Base radius ε_1; `None` means r_inj/2.
    pub eps1: Option<f64>,
    /// Norm bound B.
    pub b: f64,
    /// Failure probability δ.
    pub delta: f64,
    /// Smoothness ν assumed by the elimination kinds and ThreDS.
    pub nu: f64,
    /// Noise standard deviation σ_n assumed by the elimination kinds and ThreDS.
    pub sigma_n: f64,
    pub c_eta: f64,
    pub c_a: f64,
    pub c_e: f64,
    /// Minimum polyreg samples per cell, as a multiple of Q.
    pub poly_oversample: usize,
    pub block_scale: f64,
}

impl PolicyConfig {
    pub fn new(kind: PolicyKind) -> Self {
        Self {
            kind,
            beta: BetaSchedule::BayesCaption,
            lambda: 0.0,
            window: usize::MAX,
            levels: 6,
            eps1: None,
            b: 1.0,
            delta: 0.1,
            nu: 2.5,
            sigma_n: 0.1,
            c_eta: 1.0,
            c_a: 1.0,
            c_e: 1.0,
            poly_oversample: 2,
            block_scale: 1.0,
        }
    }

    pub fn validate(&self, cs: &CandidateSet) -> Result<()> {
        if !(self.lambda >= 0.0) {
            return domain(format!("switching cost must be ≥ 0, got {}", self.lambda));
        }
        if self.window == 0 {
            return domain("window must be ≥ 1");
        }
        if let Some(e) = self.eps1 {
            if !(e > 0.0 && e <= cs.manifold.inj_radius / 2.0 * (1.0 + 1e-12)) {
                return domain(format!("ε_1 = {e} must lie in (0, r_inj/2]"));
            }
        }
        if !(self.delta > 0.0 && self.delta < 1.0) || !(self.b > 0.0) || !(self.nu > 0.0) || !(self.sigma_n >= 0.0) {
            return domain("need δ ∈ (0,1), B > 0, ν > 0, σ_n ≥ 0");
        }
        Ok(())
    }

    pub fn eps1_for(&self, cs: &CandidateSet) -> f64 {
        self.eps1.unwrap_or(cs.manifold.inj_radius / 2.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunStep {
    pub t: usize,
    pub arm: usize,
    pub reward: f64,
    pub inst_regret: f64,
    pub cum_regret: f64,
    pub switched: bool,
    pub cum_switches: usize,
    pub active_cells: usize,
}

/// Per-round trajectory of one run.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunRecord {
    pub policy: String,
    pub steps: Vec<RunStep>,
    /// Notes such as ridge fallbacks or truncated levels.
    pub flags: Vec<String>,
    /// Active cell ids per completed level (elimination kinds and ThreDS).
    pub active_trace: Vec<Vec<usize>>,
}

impl RunRecord {
    pub fn new(policy: &str) -> Self {
        Self { policy: policy.to_string(), ..Default::default() }
    }

    pub fn push(&mut self, env: &Environment, arm: usize, reward: f64, active_cells: usize) {
        let t = self.steps.len() + 1;
        let inst = env.optimum_at(t) - env.mean(t, arm);
        let prev = self.steps.last();
        let switched = prev.is_some_and(|p| p.arm != arm);
        let cum_regret = prev.map_or(0.0, |p| p.cum_regret) + inst;
        let cum_switches = prev.map_or(0, |p| p.cum_switches) + switched as usize;
        self.steps.push(RunStep { t, arm, reward, inst_regret: inst, cum_regret, switched, cum_switches, active_cells });
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn cum_regret(&self) -> f64 {
        self.steps.last().map_or(0.0, |s| s.cum_regret)
    }

    pub fn switches(&self) -> usize {
        self.steps.last().map_or(0, |s| s.cum_switches)
    }

    /// R_T + λ S_T.
    pub fn total_cost(&self, lambda: f64) -> f64 {
        self.cum_regret() + lambda * self.switches() as f64
    }

    pub fn arms(&self) -> Vec<usize> {
        self.steps.iter().map(|s| s.arm).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,arm,reward,inst_regret,cum_regret,switched,cum_switches,active_cells\n");
        for r in &self.steps {
            let _ = writeln!(
                s,
                "{},{},{:.17e},{:.17e},{:.17e},{},{},{}",
                r.t, r.arm, r.reward, r.inst_regret, r.cum_regret, r.switched as u8, r.cum_switches, r.active_cells
            );
        }
        s
    }
}

/// UCB argmax with β_t from the configured schedule.
pub fn gpucb_step(gp: &GpPosterior, t: usize, cfg: &PolicyConfig) -> usize {
    argmax(&gp.ucb_scores(cfg.beta.beta(t, gp.n_candidates())))
}

/// Stays at `prev_arm` iff max UCB − UCB(prev_arm) < λ.
pub fn switch_aware_step(gp: &GpPosterior, prev_arm: Option<usize>, t: usize, cfg: &PolicyConfig) -> usize {
    let scores = gp.ucb_scores(cfg.beta.beta(t, gp.n_candidates()));
    let best = argmax(&scores);
    match prev_arm {
        Some(p) if scores[best] - scores[p] < cfg.lambda => p,
        _ => best,
    }
}

/// GP-UCB on a posterior refit from the last min(W, t−1) observations of `history`.
pub fn window_gpucb_step(gram: &Arc<GramMatrix>, noise_var: f64, history: &[(usize, f64)], t: usize, cfg: &PolicyConfig) -> Result<usize> {
    let w = cfg.window.min(history.len());
    let gp = GpPosterior::from_observations(gram.clone(), noise_var, &history[history.len() - w..])?;
    Ok(gpucb_step(&gp, t, cfg))
}

/// Runs a GP-UCB family policy for `horizon` rounds.
pub fn gp_policy_run(
    env: &Environment,
    gram: Arc<GramMatrix>,
    noise_var: f64,
    cfg: &PolicyConfig,
    horizon: usize,
    noise_seed: u64,
) -> Result<RunRecord> {
    if gram.len() != env.n_candidates() {
        return domain("Gram matrix and environment sizes differ");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(noise_seed);
    let mut rec = RunRecord::new(cfg.kind.name());
    let mut gp = GpPosterior::new(gram.clone(), noise_var)?;
    let mut history: Vec<(usize, f64)> = Vec::with_capacity(horizon);
    for t in 1..=horizon {
        let arm = match cfg.kind {
            PolicyKind::GpUcb => gpucb_step(&gp, t, cfg),
            PolicyKind::SwitchAware => switch_aware_step(&gp, rec.steps.last().map(|s| s.arm), t, cfg),
            PolicyKind::WindowGpUcb if cfg.window < history.len() => window_gpucb_step(&gram, noise_var, &history, t, cfg)?,
            PolicyKind::WindowGpUcb => gpucb_step(&gp, t, cfg),
            k => return domain(format!("{} is not a GP-UCB policy", k.name())),
        };
        let y = env.observe(t, arm, &mut rng);
        gp.update(arm, y)?;
        history.push((arm, y));
        rec.push(env, arm, y, 0);
    }
    Ok(rec)
}

/// Dispatches on `cfg.kind`; `gram` is needed only by the GP-UCB family.
pub fn run_policy(
    env: &Environment,
    cs: &CandidateSet,
    gram: Option<Arc<GramMatrix>>,
    cfg: &PolicyConfig,
    horizon: usize,
    noise_seed: u64,
) -> Result<RunRecord> {
    cfg.validate(cs)?;
    if env.n_candidates() != cs.len() {
        return domain("environment and candidate set sizes differ");
    }
    match cfg.kind {
        PolicyKind::GpUcb | PolicyKind::SwitchAware | PolicyKind::WindowGpUcb => {
            let g = gram.ok_or_else(|| crate::Error::Domain("GP policies need a Gram matrix".into()))?;
            gp_policy_run(env, g, (cfg.sigma_n * cfg.sigma_n).max(1e-12), cfg, horizon, noise_seed)
        }
        PolicyKind::CellMeanElim => cellmean_elimination_run(env, cs, cfg, horizon, noise_seed),
        PolicyKind::PolyRegElim => polyreg_elimination_run(env, cs, cfg, horizon, noise_seed),
        PolicyKind::GpThreds => gpthreds_run(env, cs, cfg, horizon, noise_seed),
    }
}
