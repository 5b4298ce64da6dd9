//! Model description for a lattice of diffusing spins with local mean-field
//! interaction in a frozen random environment.
//!
//! A configuration is `N^d` spins `θ^k ∈ ℝ` at lattice positions `k/N ∈ T^d`
//! (the periodic unit torus), each carrying an environment mark `w^k` drawn
//! from a position-dependent law `ζ_{k/N}`. The drift of spin `k` is
//! `−∂_θΨ(θ^k, w^k) + β^k` with single-spin potential
//! `Ψ(θ, w) = Ψ̄(θ) + w₁θ` and interaction field
//! `β^k = N^{−d} Σ_j J((k−j)/N, w^k, w^j) θ^j`, plus additive noise of
//! strength `σ`. This crate holds the static description (no dynamics): the
//! lattice, the potential, the kernel `J` with its even spatial part and
//! low-rank environment part, the environment and initial laws, the effective
//! field / drift evaluated against weighted atom measures, and the validation
//! of the standing assumptions.

pub mod environment;
pub mod field;
pub mod initial;
pub mod kernel;
pub mod lattice;
pub mod potential;
pub mod validate;

pub use environment::{EnvLaw, EnvironmentSpec};
pub use field::{effective_field, BetaField, WeightedAtoms, ZeroField};
pub use initial::{InitialSpec, MeanProfile, ThetaLaw};
pub use kernel::{EnvFeature, EnvPairKernel, EnvTerm, KernelForm, KernelSpec, SpatialKernel};
pub use lattice::TorusLattice;
pub use potential::PotentialSpec;
pub use validate::{validate, Violation};

use serde::{Deserialize, Serialize};

/// Full static description of the spin system.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ModelSpec {
    pub lattice: TorusLattice,
    pub potential: PotentialSpec,
    pub kernel: KernelSpec,
    pub environment: EnvironmentSpec,
    pub initial: InitialSpec,
    /// Noise strength σ > 0 (constant).
    pub sigma: f64,
    /// Time horizon T > 0.
    pub horizon: f64,
}

impl ModelSpec {
    /// Drift of one spin given its environment mark and the local field value:
    /// `−∂_θΨ(θ, w) + β`.
    pub fn drift_with_field(&self, w: &[f64], theta: f64, beta: f64) -> f64 {
        -self.potential.dpsi(theta, w) + beta
    }

    /// Drift against an explicit atom measure (computes the field first).
    pub fn drift(&self, x: &[f64], w: &[f64], theta: f64, mu: &WeightedAtoms) -> f64 {
        let beta = effective_field(&self.kernel, x, w, mu);
        self.drift_with_field(w, theta, beta)
    }
}
