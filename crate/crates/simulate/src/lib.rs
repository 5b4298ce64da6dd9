//! Particle-level simulation of the interacting spin system
//!
//! ```text
//! dθ^k = [ −∂_θΨ(θ^k, w^k) + N^{−d} Σ_j J((k−j)/N, w^k, w^j) θ^j ] dt + σ dB^k
//! ```
//!
//! on the periodic lattice, of the frozen-field independent system driven by
//! an external `β(t, x, w)`, and of the empirical objects built from sampled
//! paths. All randomness is counter-based: every variate is a pure function of
//! `(seed, site, step)`, so results are bit-identical across thread counts.

pub mod empirical;
pub mod ensemble;
pub mod environment;
pub mod force;
pub mod io;
pub mod run;

pub use empirical::{empirical_at, path_measure, project_pi, ParticleMeasure, PathEmpiricalMeasure};
pub use ensemble::{phi_statistic, PathEnsemble};
pub use environment::{sample_environment, EnvironmentSample};
pub use force::{interaction_force, interaction_force_fft, interaction_force_naive};
pub use run::{replica_seed, simulate_frozen, simulate_interacting, simulate_reference, GUARD_BOUND};

use ldp_model::Violation;

/// Key-stream tags separating the independent uses of one seed.
pub(crate) const TAG_ENV: u64 = 1;
pub(crate) const TAG_INIT: u64 = 2;
pub(crate) const TAG_STEP: u64 = 3;
pub(crate) const TAG_REPLICA: u64 = 4;

#[derive(Debug, thiserror::Error)]
pub enum SimulateError {
    #[error("model violates standing assumptions: {0:?}")]
    InvalidModel(Vec<Violation>),
    #[error("need at least one time step")]
    NoSteps,
    #[error("spin overflow at step {step}, site {site}: theta = {value:.3e}")]
    Overflow { step: usize, site: usize, value: f64 },
    #[error("field horizon {field:.6} does not cover the run horizon {horizon:.6}")]
    HorizonMismatch { field: f64, horizon: f64 },
    #[error("the fft force path needs d <= 2 (got d = {0})")]
    UnsupportedDimension(usize),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("corrupt ensemble file: {0}")]
    Corrupt(String),
}
