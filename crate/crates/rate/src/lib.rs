//! Action functionals for the hydrodynamic large-deviation principle.
//!
//! A grid flow `t ↦ μ_t` produced by the forward solver is scored by how far
//! it is from solving the limit equation.  The crate evaluates that score in
//! every representation that is supposed to coincide, so the implementations
//! cross-check each other:
//!
//! * `rate_S` — time integral of the weighted `H^{-1}`-type norm of the
//!   residual `∂_t μ − 𝕃*μ`, tested against a mixed `(x, w, θ)` dictionary,
//!   plus the entropy of the initial slice.
//! * `rate_S_TW` — the same integral but with θ-only test functions applied
//!   fiberwise in `(x, w)` and averaged afterwards.
//! * `rate_via_h` — recovers the control `h` with `σ²μh = ∫ residual dθ` and
//!   charges `∫∫ (σ²/2) h² dμ dt`.
//! * `rate_S2_lower_bound` — a finite-dimensional relative-entropy bound
//!   built from the backward semigroup between checkpoint times.
//! * `rate_I_controlled` — the cost of an explicitly controlled dynamics,
//!   `E[½σ^{-2}∫(b^Q − b)² dt]` plus the layered entropy of its initial law.
//!
//! Every evaluation returns a [`Flagged`] value: a finite number, or `+∞`
//! with a reason (residual not absolutely continuous, spatial marginal not
//! Lebesgue, mass escaping the truncation window, …).

#[cfg(test)]
pub(crate) mod testflows;

pub mod basis;
pub mod control;
pub mod entropy;
pub mod hrep;
pub mod norm;
pub mod rate;
pub mod report;
pub mod residual;
pub mod sanov;
pub mod tworep;

pub use basis::TestBasis;
pub use control::{rate_I_controlled, ControlDrift, ControlledRate, ControlledSde};
pub use entropy::{
    initial_entropy, initial_entropy_slice, relative_entropy_gaussian, relative_entropy_grid,
    EntropyDecomposition,
};
pub use hrep::{h_recovery, h_window_sup, rate_via_h, ControlGrid};
pub use norm::{minus_one_norm_sq, Flagged, ResidualCoeffs};
pub use rate::{rate_S, rate_S_TW};
pub use report::RateReport;
pub use residual::{residual_coeffs, residual_parts};
pub use sanov::{sanov_rate, MassTable, SanovReport};
pub use tworep::rate_S2_lower_bound;

use thiserror::Error;

/// Everything that can go wrong while evaluating a rate functional.
#[derive(Debug, Error)]
pub enum RateError {
    #[error("incompatible inputs: {0}")]
    Mismatch(String),
    #[error("time index {j} outside the interior range 1..={max}")]
    BadTimeIndex { j: usize, max: usize },
    #[error("flow stores {got} time slices but at least {need} are needed")]
    TooFewTimes { need: usize, got: usize },
    #[error("checkpoint times invalid: {0}")]
    BadTimes(String),
    #[error("{which} has mass {mass} instead of 1")]
    Unnormalized { which: String, mass: f64 },
    #[error("fiberwise evaluation needs a θ-only test basis")]
    NotThetaOnly,
    #[error(transparent)]
    Pde(#[from] ldp_pde::PdeError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}
