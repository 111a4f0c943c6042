use std::f64::consts::{PI, TAU};

use geobandit_core::geometry::{
    candidate_set, canonical_quaternion, exp_map, geodesic_distance, greedy_packing, log_map, packing_floor, random_point, read_fixture,
    wrap_angle, write_fixture,
};
use geobandit_core::{ManifoldSpec, Point, Scheme};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn manifolds() -> Vec<ManifoldSpec> {
    vec![ManifoldSpec::sphere2(), ManifoldSpec::torus(2), ManifoldSpec::torus(3), ManifoldSpec::so3(), ManifoldSpec::spin3()]
}

fn pick(i: usize) -> ManifoldSpec {
    manifolds()[i % 5].clone()
}

#[test]
fn metric_constants() {
    let s2 = ManifoldSpec::sphere2();
    assert_eq!(s2.volume, 4.0 * PI);
    assert_eq!(s2.max_packing_radius(), PI / 4.0);
    let so3 = ManifoldSpec::so3();
    assert_eq!(so3.volume, 8.0 * PI * PI);
    assert_eq!(so3.max_packing_radius(), PI / 4.0);
    assert!(so3.is_quotient());
    assert_eq!(ManifoldSpec::torus(3).volume, TAU.powi(3));
    assert_eq!(ManifoldSpec::spin3().max_packing_radius(), 1.0);
}

#[test]
fn manifold_names_round_trip() {
    for m in manifolds() {
        assert_eq!(ManifoldSpec::parse(&m.to_string()).unwrap(), m);
    }
    assert_eq!(ManifoldSpec::parse("T3").unwrap(), ManifoldSpec::torus(3));
    assert!(ManifoldSpec::parse("klein").is_err());
    assert!(ManifoldSpec::parse("torus0").is_err());
}

#[test]
fn points_must_match_the_manifold() {
    let s2 = ManifoldSpec::sphere2();
    let p = Point::new(vec![0.0, 0.0, 1.0]);
    assert!(geodesic_distance(&s2, &p, &Point::new(vec![1.0, 0.0])).is_err());
    assert!(exp_map(&s2, &p, &[0.1]).is_err());
}

#[test]
fn antipodal_quaternions_are_one_rotation() {
    let so3 = ManifoldSpec::so3();
    let q = Point::new(vec![0.5, 0.5, 0.5, 0.5]);
    let nq = Point::new(vec![-0.5, -0.5, -0.5, -0.5]);
    assert!(geodesic_distance(&so3, &q, &nq).unwrap() < 1e-12);
    assert!((geodesic_distance(&ManifoldSpec::spin3(), &q, &nq).unwrap() - PI).abs() < 1e-12);
    assert_eq!(canonical_quaternion([-0.5, 0.5, -0.5, 0.5]), [0.5, -0.5, 0.5, -0.5]);
}

#[test]
fn wrap_angle_range() {
    assert_eq!(wrap_angle(PI), PI);
    assert_eq!(wrap_angle(-PI), PI);
    assert!((wrap_angle(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-15);
}

#[test]
fn candidate_sets_are_deterministic_and_sized() {
    for (m, n, s) in [
        (ManifoldSpec::sphere2(), 200, Scheme::FibonacciSphere),
        (ManifoldSpec::so3(), 150, Scheme::SuperFibonacciSO3),
        (ManifoldSpec::spin3(), 150, Scheme::SuperFibonacciSO3),
        (ManifoldSpec::torus(3), 512, Scheme::TorusGrid),
    ] {
        let a = candidate_set(&m, n, s).unwrap();
        let b = candidate_set(&m, n, s).unwrap();
        assert_eq!(a.len(), n);
        assert_eq!(a.points, b.points);
    }
    assert!(candidate_set(&ManifoldSpec::sphere2(), 100, Scheme::TorusGrid).is_err());
    assert!(candidate_set(&ManifoldSpec::sphere2(), 1, Scheme::FibonacciSphere).is_err());
}

#[test]
fn fibonacci_sphere_covers_evenly() {
    let cs = candidate_set(&ManifoldSpec::sphere2(), 1000, Scheme::FibonacciSphere).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let probes: Vec<Point> = (0..2000).map(|_| random_point(&cs.manifold, &mut rng)).collect();
    // Area per point is 4π/1000, so a hexagonal cell has circumradius ≈ 0.068.
    assert!(cs.covering_radius(&probes) < 0.1);
}

#[test]
fn fixture_round_trip() {
    let cs = candidate_set(&ManifoldSpec::so3(), 40, Scheme::SuperFibonacciSO3).unwrap();
    let text = write_fixture(&cs, Scheme::SuperFibonacciSO3);
    let (back, scheme) = read_fixture(&text).unwrap();
    assert_eq!(scheme, Scheme::SuperFibonacciSO3);
    assert_eq!(back.points, cs.points);
    assert!(read_fixture("0.1 0.2\n").is_err());
}

#[test]
fn packing_counts_meet_floor() {
    let m = ManifoldSpec::sphere2();
    let cs = candidate_set(&m, 4000, Scheme::FibonacciSphere).unwrap();
    for eps in [0.15, 0.3, 0.5] {
        let centers = greedy_packing(&cs, eps).unwrap();
        assert!(centers.len() as f64 >= packing_floor(&m, eps, 1.0).ceil(), "eps {eps}");
        for (i, &a) in centers.iter().enumerate() {
            for &b in &centers[i + 1..] {
                assert!(cs.dist(a, b) >= 2.0 * eps);
            }
        }
    }
    assert!(greedy_packing(&cs, 1.0).is_err());
    assert!(greedy_packing(&cs, 0.0).is_err());
}

proptest! {
    #[test]
    fn distance_is_a_metric(i in 0usize..5, seed in any::<u64>()) {
        let m = pick(i);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, b, c) = (random_point(&m, &mut rng), random_point(&m, &mut rng), random_point(&m, &mut rng));
        let ab = geodesic_distance(&m, &a, &b).unwrap();
        let ba = geodesic_distance(&m, &b, &a).unwrap();
        let ac = geodesic_distance(&m, &a, &c).unwrap();
        let bc = geodesic_distance(&m, &b, &c).unwrap();
        prop_assert!((ab - ba).abs() < 1e-12);
        prop_assert!(ab >= 0.0 && ab <= m.diameter() + 1e-12);
        prop_assert!(ac <= ab + bc + 1e-10);
        prop_assert!(geodesic_distance(&m, &a, &a).unwrap() < 1e-7);
    }

    #[test]
    fn exp_then_log_recovers_tangent(i in 0usize..5, seed in any::<u64>(), scale in 0.0f64..0.95) {
        let m = pick(i);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let base = random_point(&m, &mut rng);
        let dir: Vec<f64> = (0..m.dim).map(|_| rand::Rng::random_range(&mut rng, -1.0..1.0)).collect();
        let n = dir.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-9);
        let v: Vec<f64> = dir.iter().map(|x| x / n * scale * m.inj_radius).collect();
        let x = exp_map(&m, &base, &v).unwrap();
        let back = log_map(&m, &base, &x).unwrap();
        for (a, b) in v.iter().zip(&back) {
            prop_assert!((a - b).abs() < 1e-8, "{v:?} vs {back:?}");
        }
        let len = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        prop_assert!((geodesic_distance(&m, &base, &x).unwrap() - len).abs() < 1e-8);
    }

    #[test]
    fn random_points_lie_on_the_manifold(i in 0usize..5, seed in any::<u64>()) {
        let m = pick(i);
        let p = random_point(&m, &mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert_eq!(p.0.len(), m.ambient_len());
        if m.ambient_len() == m.dim {
            prop_assert!(p.0.iter().all(|&x| (0.0..TAU).contains(&x)));
        } else {
            prop_assert!((p.0.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }
}
