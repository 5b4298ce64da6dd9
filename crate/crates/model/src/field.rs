//! Effective interaction field against weighted atom measures:
//! `β(x, w, μ) = ∫ J(x−x′, w, w′) θ′ μ(dx′, dw′, dθ′)`,
//! the drift being `b = −∂_θΨ + β`. The atoms view is borrowed so particle
//! ensembles can expose their state without copying.

use crate::kernel::KernelSpec;

/// Borrowed weighted atoms `(x′_i, w′_i, θ′_i, weight_i)` of a measure on
/// `T^d × W × ℝ`; positions and marks are flattened row-major.
#[derive(Clone, Copy, Debug)]
pub struct WeightedAtoms<'a> {
    pub d: usize,
    pub env_dim: usize,
    pub xs: &'a [f64],
    pub ws: &'a [f64],
    pub thetas: &'a [f64],
    pub weights: &'a [f64],
}

impl<'a> WeightedAtoms<'a> {
    pub fn len(&self) -> usize {
        self.thetas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.thetas.is_empty()
    }

    pub fn x(&self, i: usize) -> &'a [f64] {
        &self.xs[i * self.d..(i + 1) * self.d]
    }

    pub fn w(&self, i: usize) -> &'a [f64] {
        &self.ws[i * self.env_dim..(i + 1) * self.env_dim]
    }
}

/// `β(x, w, μ)` by direct summation over the atoms (reference evaluation; the
/// simulation crate has an equivalent FFT fast path on lattice ensembles).
pub fn effective_field(kernel: &KernelSpec, x: &[f64], w: &[f64], mu: &WeightedAtoms) -> f64 {
    let mut beta = 0.0;
    let mut disp = [0.0f64; crate::lattice::MAX_DIM];
    for i in 0..mu.len() {
        let xp = mu.x(i);
        for a in 0..mu.d {
            let mut dx = x[a] - xp[a];
            dx -= dx.floor();
            if dx >= 0.5 {
                dx -= 1.0;
            }
            disp[a] = dx;
        }
        beta += kernel.evaluate(&disp[..mu.d], w, mu.w(i)) * mu.thetas[i] * mu.weights[i];
    }
    beta
}

/// Time-space-environment field `β(t, x, w)` frozen from a measure flow; used
/// to drive one spin against a fixed background.
pub trait BetaField {
    fn beta(&self, t: f64, x: &[f64], w: &[f64]) -> f64;

    /// Largest time the field is defined for (unbounded by default).
    fn horizon(&self) -> f64 {
        f64::INFINITY
    }
}

/// The zero field (reference dynamics without interaction).
pub struct ZeroField;

impl BetaField for ZeroField {
    fn beta(&self, _t: f64, _x: &[f64], _w: &[f64]) -> f64 {
        0.0
    }
}
