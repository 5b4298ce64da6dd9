//! Deterministic solver for the hydrodynamic limit of the spin system.
//!
//! The limiting measure flow `μ̄_t(dx, dw, dθ)` keeps `dx ⊗ ζ_x(dw)` frozen and
//! evolves the conditional spin density `ξ_t(θ | x, w)` by a Fokker–Planck
//! equation whose drift `−∂_θΨ(θ, w) + β(x, w, μ̄_t)` couples the fibers only
//! through the interaction field `β`. Discretizing `x` into torus cells and
//! `w` into quadrature nodes per cell turns one step into independent
//! tridiagonal solves per fiber, with `β` refreshed from the current slice.
//!
//! The same stencil transposed gives the backward semigroup `U_{s,t}` of the
//! time-inhomogeneous single-spin generator along the flow, its killed (Dirichlet)
//! variant on `[−R, R]`, and a Monte-Carlo Feynman–Kac cross-check.

mod backward;
mod density;
mod flux;
mod grid;
mod io;
mod mv;

pub use backward::{feynman_kac_check, semigroup_u, semigroup_u_field, solve_backward_killed, KilledSolution};
pub use density::{initial_slice, GridDensityPath};
pub use flux::{bernoulli_b, conservative_generator, face_drifts, killed_generator, Tridiag};
pub use grid::{suggested_theta_max, Boundary, SpaceEnvGrid, ThetaGrid};
pub use io::{read_density, write_density, write_moments_csv};
pub use mv::{solve_controlled, solve_from_initial_law, solve_mckean_vlasov, ControlFn, FrozenField};

use ldp_model::Violation;

#[derive(Debug, thiserror::Error)]
pub enum PdeError {
    #[error("model violates standing assumptions: {0:?}")]
    InvalidModel(Vec<Violation>),
    #[error("at least one time step is required")]
    NoSteps,
    #[error("density solver only supports spatial dimension 1, got {0}")]
    UnsupportedDimension(usize),
    #[error("operation requires a {expected:?} spin grid")]
    WrongBoundary { expected: Boundary },
    #[error("initial fiber {fiber} has mass {mass}, not 1")]
    NotNormalized { fiber: usize, mass: f64 },
    #[error("drift {max_drift} moves mass more than one cell per step at dt = {dt}; use dt ≤ {suggested_dt}")]
    CflExceeded { max_drift: f64, dt: f64, suggested_dt: f64 },
    #[error("time {requested} outside the stored flow [0, {horizon}]")]
    TimeOutOfRange { requested: f64, horizon: f64 },
    #[error("spin truncation too small: density mass {boundary_mass} in the outermost cells")]
    TruncationTooSmall { boundary_mass: f64 },
    #[error("expected {expected} grid values, got {got}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("artifact is corrupt: {0}")]
    Corrupt(String),
}
