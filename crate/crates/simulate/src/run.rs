//! Euler–Maruyama integration of the interacting and frozen-field systems.
//!
//! One scheme drives both:
//! `θ_{j+1} = θ_j + (−∂_θΨ(θ_j, w) + β_j)·dt + σ√dt·ξ_{site,step}`,
//! where `β_j` is the empirical interaction field (interacting run) or an
//! external field evaluated at the left endpoint (frozen run). Identical
//! seeds give identical noise in both, so the two runs coincide pathwise
//! when the interaction vanishes.

use ldp_model::{validate, BetaField, ModelSpec, Violation};
use ldp_numerics::KeyedRng;
use rayon::prelude::*;

use crate::ensemble::PathEnsemble;
use crate::environment::{sample_environment, EnvironmentSample};
use crate::force::interaction_force;
use crate::{SimulateError, TAG_INIT, TAG_REPLICA, TAG_STEP};

/// Abort bound on |θ|; crossing it reports the step and site.
pub const GUARD_BOUND: f64 = 1e6;

/// Seed for replica `r` of a batch, derived so replica streams never collide.
pub fn replica_seed(seed: u64, replica: u64) -> u64 {
    KeyedRng::new(seed).raw([TAG_REPLICA, replica])
}

/// Violations that make integration itself meaningless. σ = 0 is allowed
/// here (degenerate ODE mode used by oracle checks) even though the standing
/// assumptions ask for σ > 0.
fn fatal_violations(spec: &ModelSpec) -> Vec<Violation> {
    validate(spec)
        .into_iter()
        .filter(|v| !(v.assumption == "noise_strength" && spec.sigma == 0.0))
        .collect()
}

fn integrate(
    spec: &ModelSpec,
    env: &EnvironmentSample,
    positions: &[f64],
    steps: usize,
    rng: &KeyedRng,
    mut beta_at: impl FnMut(usize, &[f64], &mut [f64]),
) -> Result<Vec<f64>, SimulateError> {
    let sites = spec.lattice.num_sites();
    let d = spec.lattice.d;
    let dt = spec.horizon / steps as f64;
    let noise_scale = spec.sigma * dt.sqrt();
    let init_rng = rng.derive(TAG_INIT);
    let step_rng = rng.derive(TAG_STEP);

    let mut thetas = vec![0.0; (steps + 1) * sites];
    thetas[..sites].par_iter_mut().enumerate().for_each(|(k, out)| {
        let x = &positions[k * d..(k + 1) * d];
        *out = spec.initial.sample(x, init_rng.normal([k as u64]));
    });

    let mut beta = vec![0.0; sites];
    for j in 0..steps {
        let (done, rest) = thetas.split_at_mut((j + 1) * sites);
        let old = &done[j * sites..];
        beta_at(j, old, &mut beta);
        let new = &mut rest[..sites];
        let beta_ref = &beta;
        new.par_iter_mut().enumerate().for_each(|(k, out)| {
            let drift = spec.drift_with_field(env.w(k), old[k], beta_ref[k]);
            *out = old[k] + drift * dt + noise_scale * step_rng.normal([k as u64, j as u64]);
        });
        if let Some((site, value)) =
            new.iter().enumerate().find(|(_, v)| !v.is_finite() || v.abs() > GUARD_BOUND).map(|(k, v)| (k, *v))
        {
            return Err(SimulateError::Overflow { step: j + 1, site, value });
        }
    }
    Ok(thetas)
}

/// The interacting system: the per-step field is the empirical interaction
/// force recomputed from the left-endpoint state.
pub fn simulate_interacting(spec: &ModelSpec, steps: usize, seed: u64) -> Result<PathEnsemble, SimulateError> {
    let violations = fatal_violations(spec);
    if !violations.is_empty() {
        return Err(SimulateError::InvalidModel(violations));
    }
    if steps == 0 {
        return Err(SimulateError::NoSteps);
    }
    let rng = KeyedRng::new(seed);
    let env = sample_environment(spec, &rng);
    let positions = PathEnsemble::positions_of(spec);
    let thetas = integrate(spec, &env, &positions, steps, &rng, |_, old, beta| {
        beta.copy_from_slice(&interaction_force(&spec.lattice, &spec.kernel, &env, old));
    })?;
    Ok(PathEnsemble {
        spec: spec.clone(),
        env,
        steps,
        dt: spec.horizon / steps as f64,
        seed,
        scheme: "euler-maruyama".into(),
        positions,
        thetas,
    })
}

/// Independent sites driven by an external field `β(t, x, w)` evaluated on
/// the time grid (left endpoint). Uses the same noise keys as
/// `simulate_interacting`.
pub fn simulate_frozen<F: BetaField + Sync>(
    spec: &ModelSpec,
    field: &F,
    steps: usize,
    seed: u64,
) -> Result<PathEnsemble, SimulateError> {
    let violations = fatal_violations(spec);
    if !violations.is_empty() {
        return Err(SimulateError::InvalidModel(violations));
    }
    if steps == 0 {
        return Err(SimulateError::NoSteps);
    }
    let dt = spec.horizon / steps as f64;
    if field.horizon() < spec.horizon - 0.5 * dt {
        return Err(SimulateError::HorizonMismatch { field: field.horizon(), horizon: spec.horizon });
    }
    let rng = KeyedRng::new(seed);
    let env = sample_environment(spec, &rng);
    let positions = PathEnsemble::positions_of(spec);
    let d = spec.lattice.d;
    let thetas = integrate(spec, &env, &positions, steps, &rng, |j, _, beta| {
        let t = j as f64 * dt;
        beta.par_iter_mut().enumerate().for_each(|(k, b)| {
            *b = field.beta(t, &positions[k * d..(k + 1) * d], env.w(k));
        });
    })?;
    Ok(PathEnsemble {
        spec: spec.clone(),
        env,
        steps,
        dt,
        seed,
        scheme: "euler-maruyama".into(),
        positions,
        thetas,
    })
}

/// The non-interacting reference dynamics: the same spec with the kernel
/// zeroed and identical noise keys, so matched seeds couple the runs.
pub fn simulate_reference(spec: &ModelSpec, steps: usize, seed: u64) -> Result<PathEnsemble, SimulateError> {
    let mut reference = spec.clone();
    reference.kernel = ldp_model::KernelSpec::zero();
    simulate_interacting(&reference, steps, seed)
}
