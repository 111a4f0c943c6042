use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::tree::CellTree;
use super::{PolicyConfig, RunRecord};
use crate::environments::Environment;
use crate::error::Result;
use crate::geometry::CandidateSet;

/// b_ℓ = max(1, ⌈B_0(λ) (2σ_n / (B ε_ℓ^ν))²⌉) with B_0(λ) = block_scale · (1+λ)^{(2ν−d)/(ν+d)}.
pub fn gpthreds_block_size(cfg: &PolicyConfig, d: usize, eps: f64) -> usize {
    let df = d as f64;
    let b0 = cfg.block_scale * (1.0 + cfg.lambda).powf((2.0 * cfg.nu - df) / (cfg.nu + df));
    let r = 2.0 * cfg.sigma_n / (cfg.b * eps.powf(cfg.nu));
    ((b0 * r * r).ceil() as usize).max(1)
}

/// Tree-based domain shrinking with blocked round-robin sampling at cell centers.
///
/// Each epoch pulls every active center for one block (most promising cells first, ranked
/// by the empirical mean at the center or, if unvisited, at the parent's center), compares
/// mean ± (2σ_n/√visits + B ε_ℓ^ν) across active cells, drops cells whose upper bound
/// falls below the best lower bound and refines the survivors. Once the tree is used
/// up the best surviving center is played until the horizon.
pub fn gpthreds_run(env: &Environment, cs: &CandidateSet, cfg: &PolicyConfig, horizon: usize, noise_seed: u64) -> Result<RunRecord> {
    cfg.validate(cs)?;
    let tree = CellTree::build(cs, cfg.eps1_for(cs), cfg.levels)?;
    let mut rng = ChaCha8Rng::seed_from_u64(noise_seed);
    let mut rec = RunRecord::new(cfg.kind.name());
    let mut sum = vec![0.0; cs.len()];
    let mut visits = vec![0usize; cs.len()];
    let mut active = tree.levels[0].clone();
    let mut level = 0;
    let mean = |sum: &[f64], visits: &[usize], a: usize| if visits[a] == 0 { f64::NEG_INFINITY } else { sum[a] / visits[a] as f64 };
    while rec.len() < horizon {
        let eps = tree.radius(level);
        let block = gpthreds_block_size(cfg, cs.manifold.dim, eps);
        rec.active_trace.push(active.clone());
        let score = |c: usize| {
            let own = tree.cells[c].center;
            match (visits[own], tree.cells[c].parent) {
                (0, Some(p)) => mean(&sum, &visits, tree.cells[p].center),
                _ => mean(&sum, &visits, own),
            }
        };
        let mut order = active.clone();
        order.sort_by(|&a, &b| score(b).total_cmp(&score(a)).then(a.cmp(&b)));
        for &c in &order {
            let arm = tree.cells[c].center;
            for _ in 0..block {
                if rec.len() == horizon {
                    return Ok(rec);
                }
                let y = env.observe(rec.len() + 1, arm, &mut rng);
                sum[arm] += y;
                visits[arm] += 1;
                rec.push(env, arm, y, active.len());
            }
        }
        let slack = cfg.b * eps.powf(cfg.nu);
        let bounds: Vec<(f64, f64)> = active
            .iter()
            .map(|&c| {
                let a = tree.cells[c].center;
                let w = 2.0 * cfg.sigma_n / (visits[a] as f64).sqrt() + slack;
                let m = mean(&sum, &visits, a);
                (m - w, m + w)
            })
            .collect();
        let best_lcb = bounds.iter().map(|b| b.0).fold(f64::NEG_INFINITY, f64::max);
        let survivors: Vec<usize> = active.iter().zip(&bounds).filter(|(_, b)| b.1 >= best_lcb).map(|(&c, _)| c).collect();
        if level + 1 < tree.n_levels() {
            level += 1;
            active = survivors.iter().flat_map(|&c| tree.cells[c].children.iter().copied()).collect();
        } else {
            let arm = survivors
                .iter()
                .map(|&c| tree.cells[c].center)
                .fold(None, |acc: Option<usize>, a| match acc {
                    Some(b) if mean(&sum, &visits, b) >= mean(&sum, &visits, a) => Some(b),
                    _ => Some(a),
                })
                .expect("at least one survivor");
            while rec.len() < horizon {
                let y = env.observe(rec.len() + 1, arm, &mut rng);
                rec.push(env, arm, y, survivors.len());
            }
        }
    }
    Ok(rec)
}
