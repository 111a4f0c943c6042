use criterion::{criterion_group, criterion_main, Criterion};
use geobandit_bench::geobandit_core::environments::gp_sample_from_gram;
use geobandit_bench::geobandit_core::policies::run_policy;
use geobandit_bench::geobandit_core::{GpPosterior, ManifoldSpec, PolicyConfig, PolicyKind};
use geobandit_bench::{setup, shared_gram};
use std::hint::black_box;

fn posterior_updates(c: &mut Criterion) {
    let (cs, k) = setup(ManifoldSpec::sphere2(), 200, 0.5);
    let g = shared_gram(&k, &cs);
    c.bench_function("gp/200_updates", |b| {
        b.iter(|| {
            let mut gp = GpPosterior::new(g.clone(), 0.01).unwrap();
            for t in 0..200 {
                gp.update((t * 37) % 200, black_box(0.1)).unwrap();
            }
            gp
        })
    });
}

fn policy_runs(c: &mut Criterion) {
    let (cs, k) = setup(ManifoldSpec::sphere2(), 200, 0.5);
    let g = shared_gram(&k, &cs);
    let env = gp_sample_from_gram(&g, 0).unwrap().with_noise(0.01).unwrap();
    let mut group = c.benchmark_group("policy_T200");
    group.sample_size(10);
    for kind in [PolicyKind::GpUcb, PolicyKind::GpThreds, PolicyKind::PolyRegElim] {
        let cfg = PolicyConfig::new(kind);
        group.bench_function(kind.name(), |b| b.iter(|| run_policy(&env, &cs, Some(g.clone()), &cfg, 200, 1).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, posterior_updates, policy_runs);
criterion_main!(benches);
