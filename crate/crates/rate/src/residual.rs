//! Weak-form residual of a grid flow.
//!
//! For an interior time `t_j` the residual pairing with a test function `f`
//! is `⟨∂_t μ − 𝕃*μ, f⟩`, discretized as a central difference in time and an
//! integration-by-parts form of the generator,
//! `⟨μ, (σ²/2)∂²_θ f + b ∂_θ f⟩`, so the stored density is only ever
//! integrated against smooth functions, never differentiated.  The drift `b`
//! is the potential gradient plus the interaction field frozen from the flow
//! itself.

use crate::basis::{TestBasis, ThetaTables};
use crate::norm::ResidualCoeffs;
use crate::RateError;
use ldp_model::ModelSpec;
use ldp_numerics::stats::ksum_iter;
use ldp_pde::{FrozenField, GridDensityPath};

/// Precomputed per-fiber data shared by every time slice of one evaluation.
pub(crate) struct Assembler<'a> {
    spec: &'a ModelSpec,
    flow: &'a GridDensityPath,
    pub(crate) basis: &'a TestBasis,
    field: FrozenField,
    /// `ω_q / nx` per fiber: the measure of its `(x, w)` cell.
    weights: Vec<f64>,
    cells: Vec<usize>,
    ws: Vec<Vec<f64>>,
    /// `[fiber][se]` values of the space–environment factors.
    se_vals: Vec<f64>,
    /// `[fiber][l]` potential gradient at the θ centres.
    dpsi_tab: Vec<f64>,
    tab: ThetaTables,
    pub(crate) dt: f64,
}

impl<'a> Assembler<'a> {
    pub(crate) fn new(
        spec: &'a ModelSpec,
        flow: &'a GridDensityPath,
        basis: &'a TestBasis,
    ) -> Result<Self, RateError> {
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
        let field = FrozenField::from_flow(spec, flow);
        let n = flow.theta.n_theta;
        let n_se = basis.num_space_env();
        let inv_nx = 1.0 / flow.space.nx as f64;
        let mut weights = Vec::new();
        let mut cells = Vec::new();
        let mut ws = Vec::new();
        let mut se_vals = Vec::new();
        let mut dpsi_tab = Vec::new();
        for (_f, i, _q, w, omega) in flow.space.fibers() {
            weights.push(omega * inv_nx);
            cells.push(i);
            let x = flow.space.x_center(i);
            for se in 0..n_se {
                se_vals.push(basis.space_env_value(se, x, w));
            }
            for l in 0..n {
                dpsi_tab.push(spec.potential.dpsi(flow.theta.center(l), w));
            }
            ws.push(w.to_vec());
        }
        let tab = basis.theta_tables(&flow.theta.centers());
        Ok(Self { spec, flow, basis, field, weights, cells, ws, se_vals, dpsi_tab, tab, dt })
    }

    /// Largest valid interior index.
    pub(crate) fn max_interior(&self) -> usize {
        self.flow.num_times() - 2
    }

    pub(crate) fn check_interior(&self, j: usize) -> Result<(), RateError> {
        if j < 1 || j > self.max_interior() {
            return Err(RateError::BadTimeIndex { j, max: self.max_interior() });
        }
        Ok(())
    }

    pub(crate) fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// θ-moment vectors of one fiber at interior index `j`:
    /// `pt[it] = h Σ_l ξ̇_l T_it`, `gt[it] = h Σ_l ξ_l [(σ²/2)T''_it + u T'_it]`.
    fn fiber_moments(&self, j: usize, f: usize) -> (Vec<f64>, Vec<f64>) {
        let n = self.flow.theta.n_theta;
        let h = self.flow.theta.h();
        let sigma2 = self.spec.sigma * self.spec.sigma;
        let beta = self.field.beta_at_grid(j, self.cells[f], &self.ws[f]);
        let xi = &self.flow.fiber(j, f);
        let xi_prev = &self.flow.fiber(j - 1, f);
        let xi_next = &self.flow.fiber(j + 1, f);
        let dpsi = &self.dpsi_tab[f * n..(f + 1) * n];
        let inv_2dt = 0.5 / self.dt;
        let n_th = self.basis.num_theta();
        let mut pt = vec![0.0; n_th];
        let mut gt = vec![0.0; n_th];
        for it in 0..n_th {
            let tv = &self.tab.val[it];
            let td = &self.tab.d1[it];
            let t2 = &self.tab.d2[it];
            pt[it] = h * ksum_iter((0..n).map(|l| (xi_next[l] - xi_prev[l]) * inv_2dt * tv[l]));
            gt[it] = h * ksum_iter(
                (0..n).map(|l| xi[l] * (0.5 * sigma2 * t2[l] + (beta - dpsi[l]) * td[l])),
            );
        }
        (pt, gt)
    }

    /// θ-block of the Gram matrix of one fiber: `σ² h Σ_l ξ_l T'_it T'_jt`.
    fn fiber_gram(&self, j: usize, f: usize) -> Vec<f64> {
        let n = self.flow.theta.n_theta;
        let h = self.flow.theta.h();
        let sigma2 = self.spec.sigma * self.spec.sigma;
        let xi = &self.flow.fiber(j, f);
        let n_th = self.basis.num_theta();
        let mut g = vec![0.0; n_th * n_th];
        for it in 0..n_th {
            let ti = &self.tab.d1[it];
            for jt in it..n_th {
                let tj = &self.tab.d1[jt];
                let v = sigma2 * h * ksum_iter((0..n).map(|l| xi[l] * ti[l] * tj[l]));
                g[it * n_th + jt] = v;
                g[jt * n_th + it] = v;
            }
        }
        g
    }

    /// Pairing and generator vectors over the full dictionary.
    pub(crate) fn parts_at(&self, j: usize) -> Result<(Vec<f64>, Vec<f64>), RateError> {
        self.check_interior(j)?;
        let n_se = self.basis.num_space_env();
        let n_th = self.basis.num_theta();
        let dim = self.basis.len();
        let mut pairing = vec![0.0; dim];
        let mut generator = vec![0.0; dim];
        for f in 0..self.weights.len() {
            let (pt, gt) = self.fiber_moments(j, f);
            let w_f = self.weights[f];
            for se in 0..n_se {
                let e = w_f * self.se_vals[f * n_se + se];
                for it in 0..n_th {
                    pairing[se * n_th + it] += e * pt[it];
                    generator[se * n_th + it] += e * gt[it];
                }
            }
        }
        Ok((pairing, generator))
    }

    /// Residual pairings and Gram matrix over the full dictionary.
    pub(crate) fn coeffs_at(&self, j: usize) -> Result<ResidualCoeffs, RateError> {
        self.check_interior(j)?;
        let n_se = self.basis.num_space_env();
        let n_th = self.basis.num_theta();
        let dim = self.basis.len();
        let mut a = vec![0.0; dim];
        let mut gram = vec![0.0; dim * dim];
        for f in 0..self.weights.len() {
            let (pt, gt) = self.fiber_moments(j, f);
            let gth = self.fiber_gram(j, f);
            let w_f = self.weights[f];
            for se_b in 0..n_se {
                let eb = self.se_vals[f * n_se + se_b];
                for it in 0..n_th {
                    a[se_b * n_th + it] += w_f * eb * (pt[it] - gt[it]);
                }
                for se_c in 0..n_se {
                    let factor = w_f * eb * self.se_vals[f * n_se + se_c];
                    for it in 0..n_th {
                        let row = (se_b * n_th + it) * dim + se_c * n_th;
                        for jt in 0..n_th {
                            gram[row + jt] += factor * gth[it * n_th + jt];
                        }
                    }
                }
            }
        }
        Ok(ResidualCoeffs { a, gram, dim })
    }

    /// Residual of a single fiber against a θ-only dictionary, unweighted:
    /// the conditional spin law is tested on its own.
    pub(crate) fn fiber_coeffs_at(&self, j: usize, f: usize) -> Result<ResidualCoeffs, RateError> {
        self.check_interior(j)?;
        let (pt, gt) = self.fiber_moments(j, f);
        let gram = self.fiber_gram(j, f);
        let a: Vec<f64> = pt.iter().zip(&gt).map(|(p, g)| p - g).collect();
        let dim = self.basis.num_theta();
        Ok(ResidualCoeffs { a, gram, dim })
    }
}

/// Residual pairings and Gram matrix of `flow` at interior time index `j`,
/// with the drift read off from `spec` and the flow's own interaction field.
pub fn residual_coeffs(
    flow: &GridDensityPath,
    j: usize,
    basis: &TestBasis,
    spec: &ModelSpec,
) -> Result<ResidualCoeffs, RateError> {
    Assembler::new(spec, flow, basis)?.coeffs_at(j)
}

/// The two halves of the residual pairing separately: time derivative and
/// generator, `a = pairing − generator`.
pub fn residual_parts(
    flow: &GridDensityPath,
    j: usize,
    basis: &TestBasis,
    spec: &ModelSpec,
) -> Result<(Vec<f64>, Vec<f64>), RateError> {
    Assembler::new(spec, flow, basis)?.parts_at(j)
}
