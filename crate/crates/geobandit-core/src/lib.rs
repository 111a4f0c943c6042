//! Gaussian-process bandits on compact Riemannian manifolds: candidate sets, Matérn
//! kernels, GP posteriors, bandit policies, synthetic environments and lower-bound
//! calculators.

pub mod bounds;
pub mod environments;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod gp;
pub mod kernels;
pub mod oracle;
pub mod policies;

pub use error::{Error, Result};
pub use geometry::{CandidateSet, ManifoldKind, ManifoldSpec, Point, Scheme};
pub use gp::{BetaSchedule, GpPosterior};
pub use kernels::{GramMatrix, KernelMode, KernelSpec, OrbitNorm};
pub use environments::{EnvKind, Environment};
pub use policies::{PolicyConfig, PolicyKind, RunRecord};
pub use experiments::{Experiment, ResultTable};
