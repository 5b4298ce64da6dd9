//! Recovering the control `h` from the pointwise residual.
//!
//! If the flow solves a controlled equation `∂_t μ = 𝕃*μ + ∂_θ(σ² h μ)`,
//! then `σ²(μh)(θ)` is the θ-antiderivative of the pointwise residual
//! `∂_t μ − 𝕃*μ`.  On the grid the residual of a fiber is the central time
//! difference plus the scheme's own conservative generator applied to the
//! slice, so its cumulative sums are exactly the face values of `σ²μh`; the
//! antiderivative closing at zero on the far face is precisely the statement
//! that the residual is a θ-gradient, and its failure is reported instead of
//! silently projected away.

use crate::norm::Flagged;
use crate::rate::{assemble_report, Route};
use crate::report::RateReport;
use crate::RateError;
use ldp_model::ModelSpec;
use ldp_numerics::stats::ksum_iter;
use ldp_pde::{conservative_generator, face_drifts, FrozenField, GridDensityPath};
use rayon::prelude::*;

/// Densities below this are treated as unoccupied: `h` is set to zero there
/// rather than dividing by vacuum.
pub const DENSITY_FLOOR: f64 = 1e-12;

/// Largest tolerated endpoint value of the residual antiderivative, relative
/// to the residual's L¹ size, before the gradient structure counts as broken.
const GRADIENT_TOL: f64 = 1e-6;

/// The recovered control on the interior of the time grid.
pub struct ControlGrid {
    /// Interior times `t_1 … t_{M−1}`.
    pub times: Vec<f64>,
    /// `h` values, laid out `[time][fiber][cell]`.
    pub values: Vec<f64>,
    pub fibers: usize,
    pub n_theta: usize,
    /// Per interior time: worst endpoint defect of the antiderivative over
    /// fibers, relative to `max(1, ‖residual‖₁)`.
    pub defects: Vec<f64>,
    /// Largest per-fiber mass fraction sitting below [`DENSITY_FLOOR`].
    pub floored_mass: f64,
    /// Set when some slice's residual is not a θ-gradient.
    pub flag: Option<String>,
}

impl ControlGrid {
    pub fn slice(&self, k: usize) -> &[f64] {
        let len = self.fibers * self.n_theta;
        &self.values[k * len..(k + 1) * len]
    }

    pub fn fiber(&self, k: usize, f: usize) -> &[f64] {
        let s = self.slice(k);
        &s[f * self.n_theta..(f + 1) * self.n_theta]
    }
}

/// Recover `h` on every interior slice of `flow` under `spec`'s dynamics.
pub fn h_recovery(flow: &GridDensityPath, spec: &ModelSpec) -> Result<ControlGrid, RateError> {
    let nt = flow.num_times();
    if nt < 3 {
        return Err(RateError::TooFewTimes { need: 3, got: nt });
    }
    let dt = flow.times[1] - flow.times[0];
    for w in flow.times.windows(2) {
        if ((w[1] - w[0]) - dt).abs() > 1e-9 * dt.max(1e-12) {
            return Err(RateError::BadTimes("time grid is not uniform".into()));
        }
    }
    let field = FrozenField::from_flow(spec, flow);
    let theta = &flow.theta;
    let n = theta.n_theta;
    let h = theta.h();
    let sigma2 = spec.sigma * spec.sigma;
    let fibers: Vec<(usize, Vec<f64>)> = flow
        .space
        .fibers()
        .map(|(_f, i, _q, w, _omega)| (i, w.to_vec()))
        .collect();
    let inv_2dt = 0.5 / dt;

    let per_slice: Vec<(Vec<f64>, f64, f64)> = (1..nt - 1)
        .into_par_iter()
        .map(|j| {
            let mut hs = vec![0.0; fibers.len() * n];
            let mut defect = 0.0f64;
            let mut floored = 0.0f64;
            for (f, (cell, w)) in fibers.iter().enumerate() {
                let beta = field.beta_at_grid(j, *cell, w);
                let faces = face_drifts(theta, &spec.potential, w, beta);
                let gen = conservative_generator(theta, &faces, spec.sigma);
                let xi = flow.fiber(j, f);
                let lxi = gen.apply(xi);
                let xi_prev = flow.fiber(j - 1, f);
                let xi_next = flow.fiber(j + 1, f);
                // face values of σ²μh: cumulative sums of the residual
                let mut p = 0.0;
                let mut p_faces = Vec::with_capacity(n + 1);
                p_faces.push(0.0);
                let mut l1 = 0.0;
                for l in 0..n {
                    let rho = (xi_next[l] - xi_prev[l]) * inv_2dt + lxi[l];
                    p += h * rho;
                    p_faces.push(p);
                    l1 += h * rho.abs();
                }
                defect = defect.max(p.abs() / l1.max(1.0));
                let mut below = 0.0;
                for l in 0..n {
                    if xi[l] >= DENSITY_FLOOR {
                        hs[f * n + l] = 0.5 * (p_faces[l] + p_faces[l + 1]) / (sigma2 * xi[l]);
                    } else {
                        below += h * xi[l];
                    }
                }
                floored = floored.max(below);
            }
            (hs, defect, floored)
        })
        .collect();

    let mut values = Vec::with_capacity((nt - 2) * fibers.len() * n);
    let mut defects = Vec::with_capacity(nt - 2);
    let mut floored_mass = 0.0f64;
    for (hs, defect, floored) in per_slice {
        values.extend(hs);
        defects.push(defect);
        floored_mass = floored_mass.max(floored);
    }
    let flag = defects
        .iter()
        .any(|&d| d > GRADIENT_TOL)
        .then(|| "residual is not a θ-gradient".to_string());
    Ok(ControlGrid {
        times: flow.times[1..nt - 1].to_vec(),
        values,
        fibers: fibers.len(),
        n_theta: n,
        defects,
        floored_mass,
        flag,
    })
}

/// Rate via the recovered control: `∫∫ (σ²/2) h² dμ dt` plus initial entropy.
pub fn rate_via_h(flow: &GridDensityPath, spec: &ModelSpec) -> Result<RateReport, RateError> {
    let grid = h_recovery(flow, spec)?;
    let h = flow.theta.h();
    let sigma2 = spec.sigma * spec.sigma;
    let inv_nx = 1.0 / flow.space.nx as f64;
    let weights: Vec<f64> = flow.space.fibers().map(|(_, _, _, _, omega)| omega * inv_nx).collect();
    let n = grid.n_theta;
    let costs: Vec<Flagged> = (0..grid.times.len())
        .map(|k| {
            if grid.defects[k] > GRADIENT_TOL {
                return Flagged::infinite("residual is not a θ-gradient");
            }
            let j = k + 1;
            let v = ksum_iter(weights.iter().enumerate().map(|(f, w_f)| {
                let xi = flow.fiber(j, f);
                let hf = grid.fiber(k, f);
                w_f * h
                    * ksum_iter((0..n).map(|l| xi[l] * 0.5 * sigma2 * hf[l] * hf[l]))
            }));
            Flagged::finite(v)
        })
        .collect();
    let dt = flow.times[1] - flow.times[0];
    assemble_report(flow, spec, costs, dt, Route::ViaH)
}

/// Largest `|h|` over the central window holding all but `mass_tail` of each
/// fiber's mass — the tails, where `h` divides by a vanishing density, are
/// excluded symmetrically (up to `mass_tail/2` per side).
pub fn h_window_sup(grid: &ControlGrid, flow: &GridDensityPath, mass_tail: f64) -> f64 {
    let n = grid.n_theta;
    let h = flow.theta.h();
    let mut sup = 0.0f64;
    for k in 0..grid.times.len() {
        let j = k + 1;
        for f in 0..grid.fibers {
            let xi = flow.fiber(j, f);
            let total: f64 = ksum_iter(xi.iter().copied()) * h;
            let half = 0.5 * mass_tail * total;
            let mut lo = 0;
            let mut acc = 0.0;
            while lo < n && acc + h * xi[lo] <= half {
                acc += h * xi[lo];
                lo += 1;
            }
            let mut hi = n;
            acc = 0.0;
            while hi > lo && acc + h * xi[hi - 1] <= half {
                acc += h * xi[hi - 1];
                hi -= 1;
            }
            let hf = grid.fiber(k, f);
            for l in lo..hi {
                sup = sup.max(hf[l].abs());
            }
        }
    }
    sup
}
