//! Hand-built flows with known rate values, shared by the unit tests.

use ldp_model::{EnvironmentSpec, InitialSpec, KernelSpec, ModelSpec, PotentialSpec, TorusLattice};
use ldp_pde::{Boundary, GridDensityPath, SpaceEnvGrid, ThetaGrid};

/// Single-site harmonic well `Ψ̄ = θ²/2` (drift `−θ`), σ = 1, no
/// interaction, initial law N(0, 0.45) — strictly inside the admissible
/// Gaussian class (the stationary variance ½ sits on its boundary).
pub(crate) fn ou_half_spec() -> ModelSpec {
    ModelSpec {
        lattice: TorusLattice { d: 1, n: 8 },
        potential: PotentialSpec::new(vec![0.0, 0.0, 0.5]),
        kernel: KernelSpec::zero(),
        environment: EnvironmentSpec::frozen(vec![0.0]),
        initial: InitialSpec::gaussian(0.0, 0.45),
        sigma: 1.0,
        horizon: 1.0,
    }
}

/// The sliding-Gaussian path `μ_t = N(t, ½)` on `[0, 1]`, discretized slice
/// by slice.  Against [`ou_half_spec`] it is the canonical non-solution with
/// control `h(t) ≡ −(1 + t)`: the initial entropy vanishes and the rate is
/// `∫₀¹ ½(1+t)² dt = 7/6` in every representation.
pub(crate) fn sliding_gaussian_flow(
    n_theta: usize,
    steps: usize,
    theta_max: f64,
) -> (ModelSpec, GridDensityPath) {
    let spec = ModelSpec { initial: InitialSpec::gaussian(0.0, 0.5), ..ou_half_spec() };
    let theta = ThetaGrid::new(theta_max, n_theta, Boundary::NoFlux);
    let space = SpaceEnvGrid::from_spec(&spec, 1, 1);
    let centers = theta.centers();
    let h = theta.h();
    let dt = 1.0 / steps as f64;
    let mut values = Vec::with_capacity((steps + 1) * n_theta);
    let mut times = Vec::with_capacity(steps + 1);
    for j in 0..=steps {
        let t = j as f64 * dt;
        let raw: Vec<f64> = centers.iter().map(|&th| (-(th - t) * (th - t)).exp()).collect();
        let mass: f64 = h * raw.iter().sum::<f64>();
        values.extend(raw.iter().map(|v| v / mass));
        times.push(t);
    }
    (spec, GridDensityPath { theta, space, times, values, clip_count: 0 })
}
