use std::sync::Arc;

use geobandit_core::environments::{bump_env, gp_sample_from_gram, BumpParams, Environment};
use geobandit_core::experiments::polyreg_retains_argmax;
use geobandit_core::geometry::{candidate_set, random_point};
use geobandit_core::kernels::gram;
use geobandit_core::policies::{gpthreds_block_size, local_poly_fit, monomials, n_coefficients, run_policy, spread_order, CellTree};
use geobandit_core::{CandidateSet, GramMatrix, KernelMode, KernelSpec, ManifoldSpec, PolicyConfig, PolicyKind, Scheme};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const ALL: [PolicyKind; 6] =
    [PolicyKind::GpUcb, PolicyKind::SwitchAware, PolicyKind::WindowGpUcb, PolicyKind::CellMeanElim, PolicyKind::PolyRegElim, PolicyKind::GpThreds];

fn setup(n: usize) -> (CandidateSet, Arc<GramMatrix>, Environment) {
    let m = ManifoldSpec::sphere2();
    let cs = candidate_set(&m, n, Scheme::FibonacciSphere).unwrap();
    let g = Arc::new(gram(&KernelSpec::new(m, 2.5, 0.5, 1.0, KernelMode::Intrinsic).unwrap(), &cs).unwrap());
    let env = gp_sample_from_gram(&g, 1).unwrap().with_noise(0.01).unwrap();
    (cs, g, env)
}

#[test]
fn names_round_trip() {
    for k in ALL {
        assert_eq!(PolicyKind::parse(k.name()).unwrap(), k);
    }
    assert!(PolicyKind::parse("thompson").is_err());
}

#[test]
fn every_policy_fills_the_horizon_deterministically() {
    let (cs, g, env) = setup(100);
    for kind in ALL {
        let cfg = PolicyConfig { window: 30, ..PolicyConfig::new(kind) };
        let a = run_policy(&env, &cs, Some(g.clone()), &cfg, 150, 7).unwrap();
        let b = run_policy(&env, &cs, Some(g.clone()), &cfg, 150, 7).unwrap();
        assert_eq!(a.len(), 150, "{}", kind.name());
        assert_eq!(a.to_csv(), b.to_csv());
        assert_eq!(a.policy, kind.name());
        let arms = a.arms();
        let switches = arms.windows(2).filter(|w| w[0] != w[1]).count();
        assert_eq!(a.switches(), switches);
        assert!(a.steps.iter().all(|s| s.inst_regret >= 0.0));
        assert!((a.total_cost(2.0) - a.cum_regret() - 2.0 * switches as f64).abs() < 1e-9);
    }
}

#[test]
fn gp_policies_need_a_gram_matrix() {
    let (cs, _, env) = setup(40);
    assert!(run_policy(&env, &cs, None, &PolicyConfig::new(PolicyKind::GpUcb), 10, 0).is_err());
    let small = candidate_set(&ManifoldSpec::sphere2(), 30, Scheme::FibonacciSphere).unwrap();
    assert!(run_policy(&env, &small, None, &PolicyConfig::new(PolicyKind::GpThreds), 10, 0).is_err());
}

#[test]
fn config_validation() {
    let (cs, g, env) = setup(40);
    let bad = [
        PolicyConfig { lambda: -1.0, ..PolicyConfig::new(PolicyKind::SwitchAware) },
        PolicyConfig { window: 0, ..PolicyConfig::new(PolicyKind::WindowGpUcb) },
        PolicyConfig { eps1: Some(1.0), ..PolicyConfig::new(PolicyKind::CellMeanElim) },
        PolicyConfig { delta: 1.5, ..PolicyConfig::new(PolicyKind::GpUcb) },
    ];
    for cfg in bad {
        assert!(run_policy(&env, &cs, Some(g.clone()), &cfg, 5, 0).is_err());
    }
}

#[test]
fn switch_aware_limits() {
    let (cs, g, env) = setup(80);
    let vanilla = run_policy(&env, &cs, Some(g.clone()), &PolicyConfig::new(PolicyKind::GpUcb), 80, 3).unwrap();
    let zero = run_policy(&env, &cs, Some(g.clone()), &PolicyConfig::new(PolicyKind::SwitchAware), 80, 3).unwrap();
    assert_eq!(vanilla.arms(), zero.arms());
    let sticky = PolicyConfig { lambda: 1e9, ..PolicyConfig::new(PolicyKind::SwitchAware) };
    assert_eq!(run_policy(&env, &cs, Some(g), &sticky, 80, 3).unwrap().switches(), 0);
}

#[test]
fn long_window_matches_gp_ucb() {
    let (cs, g, env) = setup(60);
    let a = run_policy(&env, &cs, Some(g.clone()), &PolicyConfig::new(PolicyKind::GpUcb), 60, 2).unwrap();
    let w = PolicyConfig { window: 1000, ..PolicyConfig::new(PolicyKind::WindowGpUcb) };
    assert_eq!(run_policy(&env, &cs, Some(g), &w, 60, 2).unwrap().arms(), a.arms());
}

#[test]
fn gp_ucb_concentrates_on_a_bump() {
    let m = ManifoldSpec::sphere2();
    let cs = candidate_set(&m, 150, Scheme::FibonacciSphere).unwrap();
    let g = Arc::new(gram(&KernelSpec::new(m, 2.5, 0.5, 1.0, KernelMode::Intrinsic).unwrap(), &cs).unwrap());
    let env = bump_env(&cs, &cs.points[40].clone(), 0.6, &BumpParams { b: 70.0, ..BumpParams::canonical(2.5) }).unwrap();
    let cfg = PolicyConfig { sigma_n: 0.01, ..PolicyConfig::new(PolicyKind::GpUcb) };
    let rec = run_policy(&env, &cs, Some(g), &cfg, 300, 0).unwrap();
    let late = rec.steps[250..].iter().filter(|s| s.arm == 40).count();
    assert!(late >= 40, "{late} of 50 late pulls at the peak");
}

#[test]
fn threds_switches_less_than_gp_ucb() {
    let (cs, g, env) = setup(200);
    let env = env.with_noise(0.01).unwrap();
    let v = run_policy(&env, &cs, Some(g.clone()), &PolicyConfig::new(PolicyKind::GpUcb), 200, 0).unwrap();
    let t = run_policy(&env, &cs, None, &PolicyConfig::new(PolicyKind::GpThreds), 200, 0).unwrap();
    assert!(t.switches() < v.switches());
}

#[test]
fn block_size_rule() {
    let cfg = PolicyConfig::new(PolicyKind::GpThreds);
    assert_eq!(gpthreds_block_size(&cfg, 2, 0.8), 1);
    let eps: f64 = 0.1;
    let r = 0.2 / eps.powf(2.5);
    assert_eq!(gpthreds_block_size(&cfg, 2, eps), (r * r).ceil() as usize);
    let costly = PolicyConfig { lambda: 10.0, ..cfg.clone() };
    assert!(gpthreds_block_size(&costly, 2, eps) > gpthreds_block_size(&cfg, 2, eps));
}

#[test]
fn cell_tree_partitions_every_level() {
    let cs = candidate_set(&ManifoldSpec::sphere2(), 300, Scheme::FibonacciSphere).unwrap();
    let tree = CellTree::build(&cs, cs.manifold.inj_radius / 2.0, 5).unwrap();
    for (level, ids) in tree.levels.iter().enumerate() {
        let eps = tree.radius(level);
        let mut seen = vec![false; cs.len()];
        for &c in ids {
            let cell = &tree.cells[c];
            assert!(cell.members.contains(&cell.center));
            for &m in &cell.members {
                assert!(!seen[m]);
                seen[m] = true;
                assert!(cs.dist(m, cell.center) <= 2.0 * eps + 1e-12);
            }
            if let Some(p) = cell.parent {
                assert!(cell.members.iter().all(|m| tree.cells[p].members.contains(m)));
            }
            let order = spread_order(&cs, cell);
            assert_eq!(order.len(), cell.members.len());
            assert_eq!(order[0], cell.center);
        }
        assert!(seen.iter().all(|&s| s));
        for &a in ids {
            let siblings: Vec<usize> = ids.iter().copied().filter(|&b| b != a && tree.cells[b].parent == tree.cells[a].parent).collect();
            for b in siblings {
                assert!(cs.dist(tree.cells[a].center, tree.cells[b].center) >= 2.0 * eps);
            }
        }
        let arm = 123;
        assert!(tree.cells[tree.cell_of(level, arm)].members.contains(&arm));
    }
    assert!(CellTree::build(&cs, 2.0, 3).is_err());
    assert!(CellTree::build(&cs, 0.5, 0).is_err());
}

#[test]
fn polyreg_keeps_the_best_cell_on_a_noiseless_draw() {
    let (cs, g, _) = setup(200);
    let env = gp_sample_from_gram(&g, 12).unwrap();
    let cfg = PolicyConfig { sigma_n: 0.0, ..PolicyConfig::new(PolicyKind::PolyRegElim) };
    let tree = CellTree::build(&cs, cfg.eps1_for(&cs), cfg.levels).unwrap();
    let rec = run_policy(&env, &cs, None, &cfg, 20_000, 12).unwrap();
    assert!(polyreg_retains_argmax(&tree, &rec.active_trace, env.argmax_at(1)));
}

#[test]
fn monomial_counts() {
    for d in 1..=4 {
        for k in 0..=3 {
            let ms = monomials(d, k);
            assert_eq!(ms.len(), n_coefficients(d, k));
            assert!(ms.iter().all(|e| e.iter().sum::<u32>() as usize <= k));
        }
    }
    assert_eq!(monomials(2, 2)[0], vec![0, 0]);
    assert_eq!(n_coefficients(3, 2), 10);
}

#[test]
fn poly_fit_needs_enough_samples() {
    let m = ManifoldSpec::sphere2();
    let c = random_point(&m, &mut ChaCha8Rng::seed_from_u64(0));
    let samples = vec![(c.clone(), 1.0); 3];
    assert!(local_poly_fit(&m, &c, &samples, 2).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn poly_fit_recovers_planted_quadratics(seed in any::<u64>(), which in 0usize..3) {
        let m = [ManifoldSpec::sphere2(), ManifoldSpec::torus(3), ManifoldSpec::spin3()][which].clone();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let center = random_point(&m, &mut rng);
        let d = m.dim;
        let coef: Vec<f64> = (0..n_coefficients(d, 2)).map(|_| rand::Rng::random_range(&mut rng, -1.0..1.0)).collect();
        let exps = monomials(d, 2);
        let f = |v: &[f64]| exps.iter().zip(&coef).map(|(e, c)| c * e.iter().zip(v).map(|(&p, x)| x.powi(p as i32)).product::<f64>()).sum::<f64>();
        let samples: Vec<_> = (0..30)
            .map(|_| {
                let v: Vec<f64> = (0..d).map(|_| rand::Rng::random_range(&mut rng, -0.4..0.4)).collect();
                (geobandit_core::geometry::exp_map(&m, &center, &v).unwrap(), f(&v))
            })
            .collect();
        let fit = local_poly_fit(&m, &center, &samples, 2).unwrap();
        prop_assert!(!fit.ridge_used);
        for (a, b) in fit.coeffs.iter().zip(&coef) {
            prop_assert!((a - b).abs() < 1e-7);
        }
    }
}
