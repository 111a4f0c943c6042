//! Shared inputs for the benchmarks.

use std::sync::Arc;

pub use geobandit_core;
use geobandit_core::geometry::candidate_set;
use geobandit_core::kernels::gram;
use geobandit_core::{CandidateSet, GramMatrix, KernelMode, KernelSpec, ManifoldSpec, Scheme};

fn default_scheme(m: &ManifoldSpec) -> Scheme {
    match m.kind {
        geobandit_core::ManifoldKind::Sphere2 => Scheme::FibonacciSphere,
        geobandit_core::ManifoldKind::Torus(_) => Scheme::TorusGrid,
        _ => Scheme::SuperFibonacciSO3,
    }
}

/// Candidate set of `n` points and an intrinsic Matérn-5/2 kernel.
pub fn setup(m: ManifoldSpec, n: usize, kappa: f64) -> (CandidateSet, KernelSpec) {
    let cs = candidate_set(&m, n, default_scheme(&m)).expect("valid candidate set");
    let k = KernelSpec::new(m, 2.5, kappa, 1.0, KernelMode::Intrinsic).expect("valid kernel");
    (cs, k)
}

pub fn shared_gram(k: &KernelSpec, cs: &CandidateSet) -> Arc<GramMatrix> {
    Arc::new(gram(k, cs).expect("gram"))
}
