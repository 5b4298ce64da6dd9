//! Backward propagation of observables along a solved flow. The two-parameter
//! family `U_{s,t}f = E[f(θ_t) | θ_s = θ]` for the single-spin diffusion with
//! drift `−∂_θΨ(θ, w) + β(r, x, w)` is computed by transposing the forward
//! finite-volume step, which makes the discrete duality
//! `⟨ξ_t, f⟩ = ⟨ξ_s, U_{s,t}f⟩` hold to solver precision and preserves
//! constants exactly. The killed variant absorbs at `±R` (Dirichlet zero on the
//! outer faces); a Brownian-bridge Monte-Carlo estimate cross-checks it via the
//! Feynman–Kac representation.

use crate::density::GridDensityPath;
use crate::flux::{conservative_generator, face_drifts, killed_generator};
use crate::grid::{Boundary, ThetaGrid};
use crate::mv::FrozenField;
use crate::PdeError;
use ldp_model::{BetaField, ModelSpec};
use ldp_numerics::rng::KeyedRng;
use ldp_numerics::stats::ksum_iter;
use rayon::prelude::*;

const TAG_FK_NOISE: u64 = 11;
const TAG_FK_KILL: u64 = 12;

fn step_of(flow_times: &[f64], t: f64) -> Result<usize, PdeError> {
    let horizon = *flow_times.last().unwrap();
    if flow_times.len() < 2 {
        return Err(PdeError::NoSteps);
    }
    let dt = flow_times[1] - flow_times[0];
    if t < -0.5 * dt || t > horizon + 0.5 * dt {
        return Err(PdeError::TimeOutOfRange { requested: t, horizon });
    }
    Ok(((t / dt).round() as usize).min(flow_times.len() - 1))
}

/// `U_{s,t}f` (values on the cell centres of `grid`) at the flow times nearest
/// `s` and `t`. Checks that the flow's spin truncation is not visibly biting
/// over `[s, t]` before trusting it.
#[allow(clippy::too_many_arguments)]
pub fn semigroup_u(
    spec: &ModelSpec,
    flow: &GridDensityPath,
    s: f64,
    t: f64,
    f: &[f64],
    x: &[f64],
    w: &[f64],
    grid: &ThetaGrid,
) -> Result<Vec<f64>, PdeError> {
    let js = step_of(&flow.times, s)?;
    let jt = step_of(&flow.times, t)?;
    if js > jt {
        return Err(PdeError::TimeOutOfRange { requested: s, horizon: t });
    }
    let bm = boundary_mass_between(flow, js, jt);
    if bm > 1e-4 {
        return Err(PdeError::TruncationTooSmall { boundary_mass: bm });
    }
    let field = FrozenField::from_flow(spec, flow);
    semigroup_u_field(spec, &field, s, t, f, x, w, grid)
}

fn boundary_mass_between(flow: &GridDensityPath, j0: usize, j1: usize) -> f64 {
    let h = flow.theta.h();
    let n = flow.theta.n_theta;
    let mut worst = 0.0f64;
    for j in j0..=j1 {
        for f in 0..flow.space.total_fibers() {
            let xi = flow.fiber(j, f);
            worst = worst.max(h * (xi[0] + xi[n - 1]));
        }
    }
    worst
}

/// [`semigroup_u`] against a prebuilt field (the fast path for repeated calls;
/// skips the truncation check).
#[allow(clippy::too_many_arguments)]
pub fn semigroup_u_field(
    spec: &ModelSpec,
    field: &FrozenField,
    s: f64,
    t: f64,
    f: &[f64],
    x: &[f64],
    w: &[f64],
    grid: &ThetaGrid,
) -> Result<Vec<f64>, PdeError> {
    if grid.boundary != Boundary::NoFlux {
        return Err(PdeError::WrongBoundary { expected: Boundary::NoFlux });
    }
    if f.len() != grid.n_theta {
        return Err(PdeError::ShapeMismatch { expected: grid.n_theta, got: f.len() });
    }
    let times = field_times(field);
    let js = step_of(&times, s)?;
    let jt = step_of(&times, t)?;
    let dt = times[1] - times[0];
    let mut g = f.to_vec();
    for j in (js..jt).rev() {
        let beta = field.beta(times[j], x, w);
        let drifts = face_drifts(grid, &spec.potential, w, beta);
        let m = conservative_generator(grid, &drifts, spec.sigma).identity_plus(dt);
        g = m.solve_transpose(&g);
    }
    Ok(g)
}

fn field_times(field: &FrozenField) -> Vec<f64> {
    field.times().to_vec()
}

/// Killed backward solution on `[−R, R]`: `g*(s, θ)` for all flow times
/// `s ∈ [0, t]`, absorbed on the outer faces.
#[derive(Clone, Debug)]
pub struct KilledSolution {
    pub grid: ThetaGrid,
    pub times: Vec<f64>,
    /// Time-major values `[time][cell]`.
    pub values: Vec<f64>,
}

impl KilledSolution {
    pub fn at(&self, j: usize) -> &[f64] {
        let n = self.grid.n_theta;
        &self.values[j * n..(j + 1) * n]
    }

    /// Linear interpolation at time index `j`.
    pub fn eval(&self, j: usize, theta: f64) -> f64 {
        if theta.abs() >= self.grid.theta_max {
            return 0.0;
        }
        self.grid.interp(self.at(j), theta)
    }
}

/// Solves the terminal-value problem for the spin diffusion killed on leaving
/// `(−R, R)`, with `terminal` on the cell centres of `grid` at time `t`.
#[allow(clippy::too_many_arguments)]
pub fn solve_backward_killed(
    spec: &ModelSpec,
    flow: &GridDensityPath,
    radius: f64,
    terminal: &[f64],
    x: &[f64],
    w: &[f64],
    t: f64,
    grid: &ThetaGrid,
) -> Result<KilledSolution, PdeError> {
    let field = FrozenField::from_flow(spec, flow);
    solve_backward_killed_field(spec, &field, radius, terminal, x, w, t, grid)
}

/// [`solve_backward_killed`] against a prebuilt field.
#[allow(clippy::too_many_arguments)]
pub fn solve_backward_killed_field(
    spec: &ModelSpec,
    field: &FrozenField,
    radius: f64,
    terminal: &[f64],
    x: &[f64],
    w: &[f64],
    t: f64,
    grid: &ThetaGrid,
) -> Result<KilledSolution, PdeError> {
    if grid.boundary != Boundary::Absorbing {
        return Err(PdeError::WrongBoundary { expected: Boundary::Absorbing });
    }
    assert!(
        (grid.theta_max - radius).abs() < 1e-9,
        "killed solve needs the grid truncated exactly at the absorption radius"
    );
    if terminal.len() != grid.n_theta {
        return Err(PdeError::ShapeMismatch { expected: grid.n_theta, got: terminal.len() });
    }
    let times = field_times(field);
    let jt = step_of(&times, t)?;
    if jt == 0 {
        return Ok(KilledSolution { grid: grid.clone(), times: vec![0.0], values: terminal.to_vec() });
    }
    let dt = times[1] - times[0];
    let n = grid.n_theta;
    let mut values = vec![0.0; (jt + 1) * n];
    values[jt * n..].copy_from_slice(terminal);
    let mut g = terminal.to_vec();
    for j in (0..jt).rev() {
        let beta = field.beta(times[j], x, w);
        let drifts = face_drifts(grid, &spec.potential, w, beta);
        let m = killed_generator(grid, &drifts, spec.sigma).identity_plus(dt);
        g = m.solve(&g);
        values[j * n..(j + 1) * n].copy_from_slice(&g);
    }
    Ok(KilledSolution { grid: grid.clone(), times: times[..=jt].to_vec(), values })
}

/// Compares the killed backward solution at `(s = 0, θ = 0)` with a
/// Brownian-bridge-corrected Monte-Carlo estimate of
/// `E[terminal(θ_t)·1{τ_R > t}]`; returns `(pde_value, mc_value, mc_stderr)`.
#[allow(clippy::too_many_arguments)]
pub fn feynman_kac_check<F>(
    spec: &ModelSpec,
    flow: &GridDensityPath,
    radius: f64,
    terminal: F,
    x: &[f64],
    w: &[f64],
    t: f64,
    mc_samples: usize,
    seed: u64,
) -> Result<(f64, f64, f64), PdeError>
where
    F: Fn(f64) -> f64 + Sync,
{
    let grid = ThetaGrid::new(radius, 512, Boundary::Absorbing);
    let term_vals = grid.sample(&terminal);
    let field = FrozenField::from_flow(spec, flow);
    let killed = solve_backward_killed_field(spec, &field, radius, &term_vals, x, w, t, &grid)?;
    let pde_value = killed.eval(0, 0.0);

    let times = field_times(&field);
    let jt = step_of(&times, t)?;
    let dt = times[1] - times[0];
    let sigma = spec.sigma;
    let sig_dt = sigma * dt.sqrt();
    let betas: Vec<f64> = (0..jt).map(|j| field.beta(times[j], x, w)).collect();
    let root = KeyedRng::new(seed);
    let noise = root.derive(TAG_FK_NOISE);
    let kill = root.derive(TAG_FK_KILL);

    let samples: Vec<f64> = (0..mc_samples)
        .into_par_iter()
        .map(|p| {
            let mut theta = 0.0f64;
            for (j, &beta) in betas.iter().enumerate() {
                let drift = spec.drift_with_field(w, theta, beta);
                let next = theta + drift * dt + sig_dt * noise.normal([p as u64, j as u64]);
                if next.abs() >= radius {
                    return 0.0;
                }
                // exit between the monitoring times: Brownian-bridge crossing
                // probability for each barrier
                let p_up = (-2.0 * (radius - theta) * (radius - next) / (sigma * sigma * dt)).exp();
                let p_dn = (-2.0 * (radius + theta) * (radius + next) / (sigma * sigma * dt)).exp();
                let survive = (1.0 - p_up) * (1.0 - p_dn);
                if kill.uniform([p as u64, j as u64]) > survive {
                    return 0.0;
                }
                theta = next;
            }
            terminal(theta)
        })
        .collect();

    let nf = mc_samples as f64;
    let mean = ksum_iter(samples.iter().copied()) / nf;
    let var = ksum_iter(samples.iter().map(|v| (v - mean) * (v - mean))) / (nf - 1.0);
    let stderr = (var / nf).sqrt();
    Ok((pde_value, mean, stderr))
}
