//! Pathwise change-of-measure functionals for the interacting ensemble.
//!
//! The law of the interacting system is absolutely continuous with respect
//! to the non-interacting reference dynamics (each site an independent
//! diffusion with drift `−∂_θΨ`), with density
//!
//! ```text
//! dP/dRef = exp( N^d·F(L^N) − ½·T·N^{−d}·Σ_i J(0, wⁱ, wⁱ) ),
//! ```
//!
//! where `F` is a bounded-below functional of the path empirical measure
//! alone: a quadratic form in the interaction field integrated over time
//! plus a boundary term of the interaction energy at the two endpoints.
//! This crate evaluates `F` (fast path and a literal triple-sum reference),
//! the per-site change of measure from `−∂_θΨ`-drift to driftless Brownian
//! motion, replica ledgers of all the pieces, an importance-sampling
//! identity check between the two ways of computing an expectation, and
//! moment diagnostics for `E[e^{κθ_T²}]` against the quadratic growth
//! constant of the potential.

pub mod functional;
pub mod identity;
pub mod ledger;

pub use functional::{
    f_functional_literal, interaction_energy, log_rn_interacting, log_rn_psi_to_wiener,
    F_functional, FParts,
};
pub use identity::{
    importance_identity_check, moment_diagnostics, IdentityReport, MomentRow, MomentTable,
    Statistic,
};
pub use ledger::{GirsanovLedger, LedgerRow};

#[derive(Debug, thiserror::Error)]
pub enum GirsanovError {
    #[error(transparent)]
    Simulate(#[from] ldp_simulate::SimulateError),
    #[error("need at least one replica")]
    NoReplicas,
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}
