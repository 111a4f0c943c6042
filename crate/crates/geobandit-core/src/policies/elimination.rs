use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::poly::{local_poly_fit, n_coefficients};
use super::tree::{spread_order, CellTree};
use super::{PolicyConfig, RunRecord};
use crate::environments::Environment;
use crate::error::Result;
use crate::geometry::{log_unchecked, CandidateSet};
use crate::gp::argmax;

#[derive(Clone, Copy)]
enum Statistic {
    Mean,
    PolyMax,
}

/// n_ℓ = ⌈64 σ_n² log(2 L T N_ℓ / δ) / Δ_ℓ²⌉.
fn level_budget(cfg: &PolicyConfig, levels: usize, horizon: usize, n_cells: usize, gap: f64) -> usize {
    let l = (2.0 * levels as f64 * horizon as f64 * n_cells as f64 / cfg.delta).ln();
    (64.0 * cfg.sigma_n * cfg.sigma_n * l / (gap * gap)).ceil() as usize
}

/// Hierarchical elimination with Δ_ℓ = 4 C_η B ε_ℓ^ν on cell sample means.
pub fn cellmean_elimination_run(env: &Environment, cs: &CandidateSet, cfg: &PolicyConfig, horizon: usize, noise_seed: u64) -> Result<RunRecord> {
    run(env, cs, cfg, horizon, noise_seed, Statistic::Mean)
}

/// Hierarchical elimination on local polynomial maxima with margin 2Δ_ℓ,
/// Δ_ℓ = (C_a + C_e √Q) B ε_ℓ^ν. The cell statistic M̂ is the largest fitted value over
/// the cell's candidates, and the exploitation phase plays that candidate.
pub fn polyreg_elimination_run(env: &Environment, cs: &CandidateSet, cfg: &PolicyConfig, horizon: usize, noise_seed: u64) -> Result<RunRecord> {
    run(env, cs, cfg, horizon, noise_seed, Statistic::PolyMax)
}

fn run(env: &Environment, cs: &CandidateSet, cfg: &PolicyConfig, horizon: usize, noise_seed: u64, stat: Statistic) -> Result<RunRecord> {
    cfg.validate(cs)?;
    let tree = CellTree::build(cs, cfg.eps1_for(cs), cfg.levels)?;
    let d = cs.manifold.dim;
    let degree = match stat {
        Statistic::Mean => 0,
        Statistic::PolyMax => cfg.nu.floor().max(0.0) as usize,
    };
    let q = n_coefficients(d, degree);
    let mut rng = ChaCha8Rng::seed_from_u64(noise_seed);
    let mut rec = RunRecord::new(cfg.kind.name());
    let mut active = tree.levels[0].clone();
    let mut ridge_flagged = false;
    for level in 0..tree.n_levels() {
        let eps = tree.radius(level);
        let smooth = cfg.b * eps.powf(cfg.nu);
        let (gap, margin) = match stat {
            Statistic::Mean => (4.0 * cfg.c_eta * smooth, 4.0 * cfg.c_eta * smooth),
            Statistic::PolyMax => {
                let g = (cfg.c_a + cfg.c_e * (q as f64).sqrt()) * smooth;
                (g, 2.0 * g)
            }
        };
        let formula = level_budget(cfg, tree.n_levels(), horizon, tree.levels[level].len(), gap);
        let n_l = match stat {
            Statistic::Mean => formula.max(1),
            Statistic::PolyMax => formula.max(cfg.poly_oversample.max(1) * q),
        };
        rec.active_trace.push(active.clone());
        let mut stats = Vec::with_capacity(active.len());
        let mut argbest = Vec::with_capacity(active.len());
        for &c in &active {
            let cell = &tree.cells[c];
            let order = spread_order(cs, cell);
            let mut samples = Vec::with_capacity(n_l);
            for i in 0..n_l {
                if rec.len() == horizon {
                    rec.flags.push(format!("budget exhausted during level {}", level + 1));
                    return Ok(rec);
                }
                let arm = order[i % order.len()];
                let y = env.observe(rec.len() + 1, arm, &mut rng);
                rec.push(env, arm, y, active.len());
                samples.push((cs.points[arm].clone(), y));
            }
            let s = match stat {
                Statistic::Mean => (samples.iter().map(|s| s.1).sum::<f64>() / samples.len() as f64, cell.center),
                Statistic::PolyMax => {
                    let fit = local_poly_fit(&cs.manifold, &cs.points[cell.center], &samples, degree)?;
                    if fit.ridge_used && !ridge_flagged {
                        rec.flags.push("ridge-regularized polynomial fit".into());
                        ridge_flagged = true;
                    }
                    let c = &cs.points[cell.center].0;
                    cell.members
                        .iter()
                        .map(|&m| (fit.eval(&log_unchecked(&cs.manifold, c, &cs.points[m].0)), m))
                        .fold((f64::NEG_INFINITY, cell.center), |a, b| if b.0 > a.0 { b } else { a })
                }
            };
            stats.push(s.0);
            argbest.push(s.1);
        }
        let best = stats[argmax(&stats)];
        let survivors: Vec<usize> = active.iter().zip(&stats).filter(|(_, &s)| s >= best - margin).map(|(&c, _)| c).collect();
        if level + 1 == tree.n_levels() {
            rec.active_trace.push(survivors.clone());
            let arm = argbest[argmax(&stats)];
            while rec.len() < horizon {
                let y = env.observe(rec.len() + 1, arm, &mut rng);
                rec.push(env, arm, y, survivors.len());
            }
            return Ok(rec);
        }
        active = survivors.iter().flat_map(|&c| tree.cells[c].children.iter().copied()).collect();
    }
    Ok(rec)
}

