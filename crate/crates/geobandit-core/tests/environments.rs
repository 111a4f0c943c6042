use geobandit_core::environments::{
    bump_env, bump_sobolev_energy, clustered_channel, gp_sample, gp_sample_with_norm, ris_combiner_with_channel, sum_of_bumps_env, time_varying_env,
    BumpParams, BumpSpec,
};
use geobandit_core::geometry::{candidate_set, greedy_packing};
use geobandit_core::kernels::gram;
use geobandit_core::{CandidateSet, EnvKind, KernelMode, KernelSpec, ManifoldSpec, Scheme};
use nalgebra::DVector;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn sphere(n: usize) -> CandidateSet {
    candidate_set(&ManifoldSpec::sphere2(), n, Scheme::FibonacciSphere).unwrap()
}

#[test]
fn gp_samples_are_seeded() {
    let cs = sphere(60);
    let k = KernelSpec::new(cs.manifold.clone(), 2.5, 0.5, 1.0, KernelMode::Intrinsic).unwrap();
    let a = gp_sample(&k, &cs, 4).unwrap();
    let b = gp_sample(&k, &cs, 4).unwrap();
    let c = gp_sample(&k, &cs, 5).unwrap();
    assert_eq!(a.to_csv(), b.to_csv());
    assert_ne!(a.to_csv(), c.to_csv());
    assert_eq!(a.kind, EnvKind::GpSample);
    assert!(a.optimum_consistent());
}

#[test]
fn normalized_draw_has_requested_rkhs_norm() {
    let cs = sphere(50);
    let k = KernelSpec::new(cs.manifold.clone(), 2.5, 1.0, 1.0, KernelMode::Intrinsic).unwrap();
    let g = gram(&k, &cs).unwrap();
    let env = gp_sample_with_norm(&g, 2.0, 9).unwrap();
    let f = DVector::from_column_slice(env.batch_values(0));
    let a = g.values.clone().cholesky().unwrap().solve(&f);
    assert!((f.dot(&a).sqrt() - 2.0).abs() < 1e-6);
    assert!(gp_sample_with_norm(&g, 0.0, 9).is_err());
}

#[test]
fn single_bump_shape() {
    let cs = sphere(2000);
    let p = BumpParams::canonical(2.5);
    let center = cs.points[17].clone();
    let env = bump_env(&cs, &center, 0.3, &p).unwrap();
    let h = p.single_height(2, 1.0, 0.3);
    assert!((env.optimum_at(1) - h).abs() < 1e-15);
    assert_eq!(env.argmax_at(1), 17);
    for i in 0..cs.len() {
        if cs.dist(i, 17) >= 0.3 {
            assert_eq!(env.mean(1, i), 0.0);
        }
    }
    assert!(bump_env(&cs, &center, 1.0, &p).is_err());
    assert_eq!(BumpSpec::profile(0.0), 1.0);
    assert_eq!(BumpSpec::profile(1.0), 0.0);
}

#[test]
fn sum_of_bumps_checks_separation() {
    let cs = sphere(500);
    let p = BumpParams::canonical(2.5);
    let eps = 0.3;
    let pack = greedy_packing(&cs, eps).unwrap();
    let centers: Vec<_> = pack.iter().map(|&i| cs.points[i].clone()).collect();
    let signs: Vec<bool> = (0..centers.len()).map(|i| i % 2 == 0).collect();
    let env = sum_of_bumps_env(&cs, &centers, &signs, eps, &p).unwrap();
    assert_eq!(env.bumps.len(), signs.iter().filter(|&&s| s).count());
    let h = p.sum_height(2, eps, centers.len());
    assert!((env.optimum_at(1) - h).abs() < 1e-12);
    let close = vec![cs.points[0].clone(), cs.points[1].clone()];
    assert!(sum_of_bumps_env(&cs, &close, &[true, true], eps, &p).is_err());
    assert!(sum_of_bumps_env(&cs, &centers, &signs[1..], eps, &p).is_err());
}

#[test]
fn time_varying_batches() {
    let cs = sphere(200);
    let p = BumpParams::canonical(2.5);
    let env = time_varying_env(&cs, 4.0, 400, 0.4, &p, Some(0.5), 3).unwrap();
    assert_eq!(env.n_batches(), 4);
    assert_eq!(env.batch_starts(), &[1, 101, 201, 301]);
    assert_eq!(env.batch_of(100), 0);
    assert_eq!(env.batch_of(101), 1);
    assert_eq!(env.batch_of(400), 3);
    assert!(env.realized_variation() <= 4.0);
    assert!(env.optimum_consistent());
    let capped = time_varying_env(&cs, 4.0, 2, 0.4, &p, Some(0.5), 3).unwrap();
    assert_eq!(capped.n_batches(), 2);
    assert!(time_varying_env(&cs, 0.5, 400, 0.4, &p, Some(0.5), 3).is_err());
}

#[test]
fn noiseless_observations_return_the_mean() {
    let cs = sphere(100);
    let env = bump_env(&cs, &cs.points[3].clone(), 0.5, &BumpParams::canonical(2.5)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    assert_eq!(env.observe(1, 3, &mut rng), env.mean(1, 3));
    assert!(env.clone().with_noise(-1.0).is_err());
    let noisy = env.with_noise(0.25).unwrap();
    let ys: Vec<f64> = (0..4000).map(|_| noisy.observe(1, 3, &mut rng) - noisy.mean(1, 3)).collect();
    let var = ys.iter().map(|y| y * y).sum::<f64>() / ys.len() as f64;
    assert!((var - 0.25).abs() < 0.02);
}

#[test]
fn ris_combiner_is_bounded_by_coherent_gain() {
    let cs = candidate_set(&ManifoldSpec::torus(3), 512, Scheme::TorusGrid).unwrap();
    let c = clustered_channel(11);
    let env = ris_combiner_with_channel(&cs, &c).unwrap();
    let coherent: f64 = c.iter().map(|(re, im)| (re * re + im * im).sqrt()).sum::<f64>().powi(2);
    assert!(env.optimum_at(1) <= coherent * (1.0 + 1e-12));
    assert!(env.optimum_at(1) >= 0.8 * coherent);
    assert!(ris_combiner_with_channel(&sphere(10), &c).is_err());
}

#[test]
fn sobolev_energy_scales_with_height_and_radius() {
    let e = bump_sobolev_energy(2.5, 0.2, 1.0, 41);
    assert!((bump_sobolev_energy(2.5, 0.2, 3.0, 41) / e - 9.0).abs() < 1e-9);
    // In two dimensions |h η(·/ε)|²_{H^s} ∝ h² ε^{2 − 2s}, s = ν + 1.
    assert!((bump_sobolev_energy(2.5, 0.4, 1.0, 41) / e - 2f64.powf(-5.0)).abs() < 1e-9);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn variation_budget_is_respected(b_t in 1.0f64..10.0, horizon in 10usize..500, seed in any::<u64>()) {
        let cs = sphere(200);
        let env = time_varying_env(&cs, b_t, horizon, 0.4, &BumpParams::canonical(2.5), Some(0.5), seed).unwrap();
        prop_assert!(env.realized_variation() <= b_t + 1e-12);
        prop_assert!(env.n_batches() == ((b_t / 1.0).floor() as usize).min(horizon));
        prop_assert!(env.optimum_consistent());
    }
}
