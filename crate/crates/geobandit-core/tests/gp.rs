use std::f64::consts::PI;
use std::sync::Arc;

use geobandit_core::geometry::candidate_set;
use geobandit_core::gp::{argmax, REFACTOR_EVERY};
use geobandit_core::kernels::gram;
use geobandit_core::{BetaSchedule, GpPosterior, GramMatrix, KernelMode, KernelSpec, ManifoldSpec, Scheme};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

fn sphere_gram(n: usize) -> Arc<GramMatrix> {
    let m = ManifoldSpec::sphere2();
    let cs = candidate_set(&m, n, Scheme::FibonacciSphere).unwrap();
    Arc::new(gram(&KernelSpec::new(m, 2.5, 0.5, 1.0, KernelMode::Intrinsic).unwrap(), &cs).unwrap())
}

/// Posterior by a dense solve of (K_obs + σ² I) against the full cross-covariance.
fn dense_posterior(g: &GramMatrix, noise: f64, obs: &[(usize, f64)]) -> (Vec<f64>, Vec<f64>) {
    let t = obs.len();
    let n = g.len();
    let k_obs = DMatrix::from_fn(t, t, |i, j| g.values[(obs[i].0, obs[j].0)] + if i == j { noise } else { 0.0 });
    let k_cross = DMatrix::from_fn(t, n, |i, j| g.values[(obs[i].0, j)]);
    let y = DVector::from_iterator(t, obs.iter().map(|o| o.1));
    let chol = k_obs.cholesky().unwrap();
    let a = chol.solve(&y);
    let s = chol.solve(&k_cross);
    let mean = (0..n).map(|j| k_cross.column(j).dot(&a)).collect();
    let var = (0..n).map(|j| g.values[(j, j)] - k_cross.column(j).dot(&s.column(j))).collect();
    (mean, var)
}

#[test]
fn prior_state() {
    let g = sphere_gram(30);
    let gp = GpPosterior::new(g, 0.01).unwrap();
    assert!(gp.means().iter().all(|&m| m == 0.0));
    assert!(gp.variances().iter().all(|&v| (v - 1.0).abs() < 1e-12));
    assert!(gp.factor().is_empty());
}

#[test]
fn rejects_bad_inputs() {
    let g = sphere_gram(20);
    assert!(GpPosterior::new(g.clone(), 0.0).is_err());
    let mut gp = GpPosterior::new(g.clone(), 0.01).unwrap();
    assert!(gp.update(20, 0.0).is_err());
    assert!(gp.update(0, f64::NAN).is_err());
    assert!(GpPosterior::from_observations(g, 0.01, &[(25, 1.0)]).is_err());
    assert!(gp.query(&[3, 40]).is_err());
}

#[test]
fn matches_dense_solve_across_refactorizations() {
    let g = sphere_gram(80);
    let noise = 0.02;
    let mut gp = GpPosterior::new(g.clone(), noise).unwrap();
    let mut obs = Vec::new();
    for t in 0..(2 * REFACTOR_EVERY + 7) {
        let a = (t * 37 + 11) % 80;
        let y = ((t as f64) * 0.7).sin();
        gp.update(a, y).unwrap();
        obs.push((a, y));
    }
    let (mean, var) = dense_posterior(&g, noise, &obs);
    for j in 0..80 {
        assert!((gp.means()[j] - mean[j]).abs() < 1e-8);
        assert!((gp.variances()[j] - var[j]).abs() < 1e-8);
    }
}

#[test]
fn repeated_observations_shrink_variance_like_averaging() {
    let g = sphere_gram(20);
    let noise = 0.04;
    let mut gp = GpPosterior::new(g, noise).unwrap();
    for _ in 0..10 {
        gp.update(5, 1.0).unwrap();
    }
    // Conditioning on n copies at one point: σ² = k σ_n² / (n k + σ_n²).
    let want = noise / (10.0 + noise);
    assert!((gp.variances()[5] - want).abs() < 1e-10);
    assert!((gp.means()[5] - 10.0 / (10.0 + noise)).abs() < 1e-10);
}

#[test]
fn beta_schedules() {
    let b = BetaSchedule::BayesCaption.beta(10, 200);
    assert!((b - 2.0 * (200.0 * 100.0 * PI * PI / 6.0f64).ln()).abs() < 1e-12);
    let f = BetaSchedule::Frequentist { b: 1.0, delta: 0.1 }.beta(10, 200);
    let r = (2.0 * (PI * PI * 100.0 / 0.6f64).ln()).sqrt();
    assert!((f - (1.0 + r).powi(2)).abs() < 1e-12);
    assert_eq!(BetaSchedule::BayesCaption.beta(0, 5), BetaSchedule::BayesCaption.beta(1, 5));
}

#[test]
fn ucb_and_argmax() {
    let g = sphere_gram(20);
    let mut gp = GpPosterior::new(g, 0.01).unwrap();
    gp.update(4, 2.0).unwrap();
    let s = gp.ucb_scores(4.0);
    for j in 0..20 {
        assert!((s[j] - (gp.means()[j] + 2.0 * gp.variances()[j].sqrt())).abs() < 1e-15);
    }
    assert_eq!(argmax(&[1.0, 3.0, 3.0, 2.0]), 1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn incremental_equals_batch(obs in prop::collection::vec((0usize..40, -2.0f64..2.0), 1..90), noise in 0.001f64..0.5) {
        let g = sphere_gram(40);
        let mut gp = GpPosterior::new(g.clone(), noise).unwrap();
        let mut prev = gp.variances().to_vec();
        for &(a, y) in &obs {
            gp.update(a, y).unwrap();
            prop_assert!(gp.variances().iter().zip(&prev).all(|(v, p)| *v <= p + 1e-10 && *v >= 0.0));
            prev = gp.variances().to_vec();
        }
        let batch = GpPosterior::from_observations(g, noise, &obs).unwrap();
        for j in 0..40 {
            prop_assert!((gp.means()[j] - batch.means()[j]).abs() < 1e-9);
            prop_assert!((gp.variances()[j] - batch.variances()[j]).abs() < 1e-9);
        }
    }
}
