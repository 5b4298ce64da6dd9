//! Certified lower bound on the rate from checkpoint marginals.
//!
//! Fix times `0 = t_0 < t_1 < … < t_r`.  For any bounded test function `f`,
//! `⟨μ_{t_i}, f⟩ − ⟨μ_{t_{i−1}}, log U_{t_{i−1},t_i} e^f⟩` is a lower bound
//! on the entropy the flow spends on `[t_{i−1}, t_i]`, where `U` is the
//! backward semigroup of the linearized dynamics along the flow's own field;
//! likewise `⟨μ_0, f⟩ − log⟨μ_0^{ref}, e^f⟩` bounds the initial entropy.
//! Summing the suprema over a finite-dimensional span of test functions
//! gives a quantity below the full rate by construction — every evaluated
//! point is a certificate, so the concave ascent can stop early without
//! invalidating the result.
//!
//! On the grid `U` over one step is exactly the transpose inverse of the
//! forward implicit-Euler matrix, so for a solved flow each pair term is
//! `≤ 0` with equality at `f = 0`, and the bound collapses to zero as it
//! must.

use crate::basis::TestBasis;
use crate::norm::Flagged;
use crate::RateError;
use ldp_model::ModelSpec;
use ldp_numerics::logspace::log_sum_exp;
use ldp_numerics::stats::ksum_iter;
use ldp_numerics::KeyedRng;
use ldp_pde::{
    conservative_generator, face_drifts, initial_slice, FrozenField, GridDensityPath, Tridiag,
};
use rayon::prelude::*;

/// Test-function values are clamped to this magnitude before exponentiating;
/// the clamped function is still an admissible bounded test function.
const F_CAP: f64 = 60.0;
const MAX_ITER: usize = 150;
/// Positivity floor before taking logarithms of marched vectors.
const LOG_FLOOR: f64 = 1e-300;

/// Maximize a concave function whose every evaluation is a valid bound.
/// Returns the best value seen (at least the exact zero at `c = 0`) and
/// whether the ascent stopped with a substantial gradient remaining.
fn maximize(
    dim: usize,
    value_grad: &(dyn Fn(&[f64]) -> (f64, Vec<f64>) + Sync),
    value_only: &(dyn Fn(&[f64]) -> f64 + Sync),
) -> (f64, bool) {
    let mut best = 0.0f64; // f ≡ 0 gives exactly zero
    let mut stalled = false;
    let rng = KeyedRng::new(97);
    for restart in 0..3u64 {
        let mut c: Vec<f64> = if restart == 0 {
            vec![0.0; dim]
        } else {
            (0..dim).map(|b| 0.1 * rng.normal([restart, b as u64])).collect()
        };
        let (mut v, mut g) = value_grad(&c);
        best = best.max(v);
        let mut step = 1.0f64;
        let mut iter = 0;
        loop {
            let gn2: f64 = g.iter().map(|x| x * x).sum();
            if gn2.sqrt() <= 1e-9 * (1.0 + v.abs()) {
                break;
            }
            if iter >= MAX_ITER {
                if gn2.sqrt() > 1e-4 * (1.0 + v.abs()) {
                    stalled = true;
                }
                break;
            }
            iter += 1;
            let mut t = step;
            let mut accepted = false;
            for _ in 0..30 {
                let trial: Vec<f64> = c.iter().zip(&g).map(|(a, b)| a + t * b).collect();
                let tv = value_only(&trial);
                if tv >= v + 0.3 * t * gn2 {
                    c = trial;
                    let r = value_grad(&c);
                    v = r.0;
                    g = r.1;
                    best = best.max(v);
                    step = (t * 2.0).min(1e6);
                    accepted = true;
                    break;
                }
                t *= 0.5;
            }
            if !accepted {
                if gn2.sqrt() > 1e-4 * (1.0 + v.abs()) {
                    stalled = true;
                }
                break;
            }
        }
    }
    (best, stalled)
}

/// Sum `Σ_b c_b f_b` over one fiber's cells, clamped to `±F_CAP`.
fn fiber_test_values(c: &[f64], fvals: &[Vec<f64>], f: usize, n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n];
    for (cb, table) in c.iter().zip(fvals) {
        if *cb == 0.0 {
            continue;
        }
        let row = &table[f * n..(f + 1) * n];
        for l in 0..n {
            out[l] += cb * row[l];
        }
    }
    for v in out.iter_mut() {
        *v = v.clamp(-F_CAP, F_CAP);
    }
    out
}

/// Certified lower bound on the rate of `flow` based on its marginals at the
/// given checkpoint times (plus the initial time) and the given dictionary.
#[allow(non_snake_case)]
pub fn rate_S2_lower_bound(
    flow: &GridDensityPath,
    checkpoints: &[f64],
    spec: &ModelSpec,
    basis: &TestBasis,
) -> Result<Flagged, RateError> {
    let nt = flow.num_times();
    if nt < 2 {
        return Err(RateError::TooFewTimes { need: 2, got: nt });
    }
    let dt = flow.times[1] - flow.times[0];
    for w in flow.times.windows(2) {
        if ((w[1] - w[0]) - dt).abs() > 1e-9 * dt.max(1e-12) {
            return Err(RateError::BadTimes("time grid is not uniform".into()));
        }
    }
    if (basis.theta_max - flow.theta.theta_max).abs() > 1e-12 {
        return Err(RateError::Mismatch(format!(
            "basis truncation radius {} differs from the grid radius {}",
            basis.theta_max, flow.theta.theta_max
        )));
    }
    if basis.env_dim() != 0 && basis.env_dim() != spec.environment.dim {
        return Err(RateError::Mismatch(format!(
            "basis monomials use {} environment coordinates, model has {}",
            basis.env_dim(),
            spec.environment.dim
        )));
    }
    if checkpoints.is_empty() {
        return Err(RateError::BadTimes("no checkpoint times given".into()));
    }
    let mut indices = Vec::with_capacity(checkpoints.len());
    let mut prev_idx = 0usize;
    for &t in checkpoints {
        let rel = (t - flow.times[0]) / dt;
        let idx = rel.round();
        if idx < 0.0 || idx as usize >= nt {
            return Err(RateError::BadTimes(format!("checkpoint {t} outside the stored horizon")));
        }
        let idx = idx as usize;
        if (flow.times[idx] - t).abs() > 1e-9 * flow.times[nt - 1].abs().max(1.0) {
            return Err(RateError::BadTimes(format!("checkpoint {t} not on the time grid")));
        }
        if idx < prev_idx {
            return Err(RateError::BadTimes("checkpoint times must be nondecreasing".into()));
        }
        indices.push(idx);
        prev_idx = idx;
    }

    let field = FrozenField::from_flow(spec, flow);
    let theta = &flow.theta;
    let n = theta.n_theta;
    let h = theta.h();
    let inv_nx = 1.0 / flow.space.nx as f64;
    let dim = basis.len();
    let tab = basis.theta_tables(&theta.centers());
    let mut weights = Vec::new();
    let mut fiber_meta: Vec<(usize, Vec<f64>)> = Vec::new();
    let mut fvals = vec![Vec::new(); dim];
    for (_f, i, _q, w, omega) in flow.space.fibers() {
        weights.push(omega * inv_nx);
        let x = flow.space.x_center(i);
        for b in 0..dim {
            let (se, it) = basis.split(b);
            let sev = basis.space_env_value(se, x, w);
            fvals[b].extend(tab.val[it].iter().map(|tv| sev * tv));
        }
        fiber_meta.push((i, w.to_vec()));
    }
    let fibers = weights.len();

    // pairing coefficients ⟨μ_j, f_b⟩ for a stored slice
    let pair_with = |j: usize| -> Vec<f64> {
        (0..dim)
            .map(|b| {
                ksum_iter((0..fibers).map(|f| {
                    let xi = flow.fiber(j, f);
                    weights[f] * h * ksum_iter((0..n).map(|l| xi[l] * fvals[b][f * n + l]))
                }))
            })
            .collect()
    };

    let mut total = 0.0f64;
    let mut any_stalled = false;

    // initial term: ⟨μ_0, f⟩ − log⟨ref, e^f⟩ with the discretized product
    // reference as atoms
    {
        let ref_slice = initial_slice(spec, theta, &flow.space)?;
        let raw: Vec<f64> = (0..fibers * n)
            .map(|k| weights[k / n] * h * ref_slice[k])
            .collect();
        let total_ref = ksum_iter(raw.iter().copied());
        let log_r: Vec<f64> = raw.iter().map(|&m| (m / total_ref).ln()).collect();
        let a0 = pair_with(0);
        let logs_for = |c: &[f64]| -> Vec<f64> {
            let mut logs = vec![0.0; fibers * n];
            for f in 0..fibers {
                let fv = fiber_test_values(c, &fvals, f, n);
                for l in 0..n {
                    logs[f * n + l] = log_r[f * n + l] + fv[l];
                }
            }
            logs
        };
        let value_only = |c: &[f64]| -> f64 {
            let pairing: f64 = c.iter().zip(&a0).map(|(x, y)| x * y).sum();
            pairing - log_sum_exp(&logs_for(c))
        };
        let value_grad = |c: &[f64]| -> (f64, Vec<f64>) {
            let logs = logs_for(c);
            let lse = log_sum_exp(&logs);
            let pairing: f64 = c.iter().zip(&a0).map(|(x, y)| x * y).sum();
            let grad: Vec<f64> = (0..dim)
                .map(|b| {
                    a0[b]
                        - ksum_iter(
                            (0..fibers * n).map(|k| (logs[k] - lse).exp() * fvals[b][k]),
                        )
                })
                .collect();
            (pairing - lse, grad)
        };
        let (v, stalled) = maximize(dim, &value_grad, &value_only);
        total += v;
        any_stalled |= stalled;
    }

    // pair terms between consecutive checkpoints, starting from t_0
    let mut j_prev = 0usize;
    for &j_next in &indices {
        if j_next == j_prev {
            continue;
        }
        let (j0, j1) = (j_prev, j_next);
        j_prev = j_next;
        // one-step implicit matrices of the forward scheme on [j0, j1)
        let mats: Vec<Vec<Tridiag>> = fiber_meta
            .iter()
            .map(|(cell, w)| {
                (j0..j1)
                    .map(|j| {
                        let beta = field.beta_at_grid(j, *cell, w);
                        let faces = face_drifts(theta, &spec.potential, w, beta);
                        conservative_generator(theta, &faces, spec.sigma).identity_plus(dt)
                    })
                    .collect()
            })
            .collect();
        let a1 = pair_with(j1);
        let march = |g: Vec<f64>, f: usize| -> Vec<f64> {
            let mut g = g;
            for mat in mats[f].iter().rev() {
                g = mat.solve_transpose(&g);
            }
            g
        };
        let value_only = |c: &[f64]| -> f64 {
            let parts: Vec<(f64, f64)> = (0..fibers)
                .into_par_iter()
                .map(|f| {
                    let fv = fiber_test_values(c, &fvals, f, n);
                    let xi1 = flow.fiber(j1, f);
                    let t1 = weights[f] * h * ksum_iter((0..n).map(|l| xi1[l] * fv[l]));
                    let g = march(fv.iter().map(|v| v.exp()).collect(), f);
                    let xi0 = flow.fiber(j0, f);
                    let t2 = weights[f]
                        * h
                        * ksum_iter((0..n).map(|l| xi0[l] * g[l].max(LOG_FLOOR).ln()));
                    (t1, t2)
                })
                .collect();
            let v1 = ksum_iter(parts.iter().map(|p| p.0));
            let v2 = ksum_iter(parts.iter().map(|p| p.1));
            v1 - v2
        };
        let value_grad = |c: &[f64]| -> (f64, Vec<f64>) {
            let parts: Vec<(f64, Vec<f64>)> = (0..fibers)
                .into_par_iter()
                .map(|f| {
                    let fv = fiber_test_values(c, &fvals, f, n);
                    let xi0 = flow.fiber(j0, f);
                    let g0 = march(fv.iter().map(|v| v.exp()).collect(), f);
                    let t2 = weights[f]
                        * h
                        * ksum_iter((0..n).map(|l| xi0[l] * g0[l].max(LOG_FLOOR).ln()));
                    // U(e^F f_b) for the gradient of the log pairing
                    let mut grads = vec![0.0; dim];
                    for b in 0..dim {
                        let gb = march(
                            (0..n)
                                .map(|l| fv[l].exp() * fvals[b][f * n + l])
                                .collect(),
                            f,
                        );
                        grads[b] = weights[f]
                            * h
                            * ksum_iter(
                                (0..n).map(|l| xi0[l] * gb[l] / g0[l].max(LOG_FLOOR)),
                            );
                    }
                    (t2, grads)
                })
                .collect();
            let v2 = ksum_iter(parts.iter().map(|p| p.0));
            let xi1_pairing: f64 = {
                let fvs: Vec<f64> = (0..fibers)
                    .map(|f| {
                        let fv = fiber_test_values(c, &fvals, f, n);
                        let xi1 = flow.fiber(j1, f);
                        weights[f] * h * ksum_iter((0..n).map(|l| xi1[l] * fv[l]))
                    })
                    .collect();
                ksum_iter(fvs)
            };
            let grad: Vec<f64> = (0..dim)
                .map(|b| a1[b] - ksum_iter(parts.iter().map(|p| p.1[b])))
                .collect();
            (xi1_pairing - v2, grad)
        };
        let (v, stalled) = maximize(dim, &value_grad, &value_only);
        total += v;
        any_stalled |= stalled;
    }

    Ok(if any_stalled {
        Flagged::warned(total, "ascent stalled before the gradient vanished")
    } else {
        Flagged::finite(total)
    })
}
