//! Per-site interaction field
//!
//! ```text
//! force_k = N^{−d} Σ_j J((k−j)/N, w^k, w^j) θ^j
//! ```
//!
//! as a naive double sum (the reference) and as an FFT fast path exploiting
//! the separable kernel forms: each rank-one environment term factors into a
//! circular convolution against `J¹` plus diagonal reweightings, giving
//! `O(N^d log N)` per evaluation.

use ldp_model::{KernelForm, KernelSpec, SpatialKernel, TorusLattice};
use ldp_numerics::fftconv::{circular_convolve, circular_convolve_2d};
use ldp_numerics::stats::ksum_iter;

use crate::environment::EnvironmentSample;
use crate::SimulateError;

/// Reference evaluation by direct summation over all site pairs, `O(N^{2d})`.
pub fn interaction_force_naive(
    lattice: &TorusLattice,
    kernel: &KernelSpec,
    env: &EnvironmentSample,
    thetas: &[f64],
) -> Vec<f64> {
    let sites = lattice.num_sites();
    let scale = 1.0 / sites as f64;
    let mut out = vec![0.0; sites];
    let mut disp = vec![0.0; lattice.d];
    for k in 0..sites {
        let wk = env.w(k);
        let mut acc = 0.0;
        for j in 0..sites {
            lattice.displacement(k, j, &mut disp);
            acc += kernel.evaluate(&disp, wk, env.w(j)) * thetas[j];
        }
        out[k] = acc * scale;
    }
    out
}

/// `J¹` sampled at all lattice displacements, indexed like the site array.
fn profile_table(lattice: &TorusLattice, spatial: &SpatialKernel) -> Result<Vec<f64>, SimulateError> {
    if lattice.d > 2 {
        return Err(SimulateError::UnsupportedDimension(lattice.d));
    }
    let n = lattice.n;
    let sites = lattice.num_sites();
    let mut table = vec![0.0; sites];
    let mut x = vec![0.0; lattice.d];
    for m in 0..sites {
        let c = lattice.coords(m);
        lattice.offset_point(&c[..lattice.d], &mut x);
        table[m] = spatial.evaluate(&x);
    }
    debug_assert_eq!(sites, n.pow(lattice.d as u32));
    Ok(table)
}

fn convolve_profile(lattice: &TorusLattice, spatial: &SpatialKernel, v: &[f64]) -> Result<Vec<f64>, SimulateError> {
    let table = profile_table(lattice, spatial)?;
    Ok(match lattice.d {
        1 => circular_convolve(&table, v),
        2 => circular_convolve_2d(&table, v, lattice.n, lattice.n),
        _ => unreachable!("profile_table rejects d > 2"),
    })
}

/// FFT fast path; supported on `d ≤ 2` lattices.
pub fn interaction_force_fft(
    lattice: &TorusLattice,
    kernel: &KernelSpec,
    env: &EnvironmentSample,
    thetas: &[f64],
) -> Result<Vec<f64>, SimulateError> {
    let sites = lattice.num_sites();
    let scale = 1.0 / sites as f64;
    match &kernel.form {
        KernelForm::Zero => Ok(vec![0.0; sites]),
        KernelForm::SeparableProduct { spatial, env: pair } => {
            let mut out = vec![0.0; sites];
            for term in &pair.terms {
                let v: Vec<f64> = (0..sites).map(|j| term.right.eval(env.w(j)) * thetas[j]).collect();
                let conv = convolve_profile(lattice, spatial, &v)?;
                for k in 0..sites {
                    out[k] += term.left.eval(env.w(k)) * conv[k];
                }
            }
            for o in &mut out {
                *o *= scale;
            }
            Ok(out)
        }
        KernelForm::SeparableSum { spatial, env: pair } => {
            let mut out = convolve_profile(lattice, spatial, thetas)?;
            for term in &pair.terms {
                let s = ksum_iter((0..sites).map(|j| term.right.eval(env.w(j)) * thetas[j]));
                for k in 0..sites {
                    out[k] += term.left.eval(env.w(k)) * s;
                }
            }
            for o in &mut out {
                *o *= scale;
            }
            Ok(out)
        }
    }
}

/// FFT fast path when available, otherwise the naive sum.
pub fn interaction_force(
    lattice: &TorusLattice,
    kernel: &KernelSpec,
    env: &EnvironmentSample,
    thetas: &[f64],
) -> Vec<f64> {
    match interaction_force_fft(lattice, kernel, env, thetas) {
        Ok(v) => v,
        Err(_) => interaction_force_naive(lattice, kernel, env, thetas),
    }
}
