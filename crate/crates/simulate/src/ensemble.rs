//! A sampled ensemble of spin paths on the uniform time grid, plus the
//! `φ(θ) = 1 + θ²` confinement statistic.

use ldp_model::ModelSpec;
use ldp_numerics::stats::ksum_iter;

use crate::environment::EnvironmentSample;

/// Spin trajectories for all sites on the grid `t_j = j·dt`, `j = 0..=steps`,
/// together with the frozen environment and integrator metadata. Spins are
/// stored time-major (`thetas[j·sites + k]`) so a time slice is contiguous.
#[derive(Clone, Debug)]
pub struct PathEnsemble {
    pub spec: ModelSpec,
    pub env: EnvironmentSample,
    pub steps: usize,
    pub dt: f64,
    pub seed: u64,
    pub scheme: String,
    /// Site positions `k/N`, site-major (`positions[k·d .. (k+1)·d]`).
    pub positions: Vec<f64>,
    pub thetas: Vec<f64>,
}

impl PathEnsemble {
    pub fn sites(&self) -> usize {
        self.spec.lattice.num_sites()
    }

    /// Number of grid times, `steps + 1`.
    pub fn num_times(&self) -> usize {
        self.steps + 1
    }

    pub fn time(&self, j: usize) -> f64 {
        j as f64 * self.dt
    }

    /// All spins at grid time `j`.
    pub fn slice(&self, j: usize) -> &[f64] {
        let sites = self.sites();
        &self.thetas[j * sites..(j + 1) * sites]
    }

    pub fn theta(&self, site: usize, j: usize) -> f64 {
        self.thetas[j * self.sites() + site]
    }

    /// Position of site `k`.
    pub fn x(&self, k: usize) -> &[f64] {
        let d = self.spec.lattice.d;
        &self.positions[k * d..(k + 1) * d]
    }

    pub(crate) fn positions_of(spec: &ModelSpec) -> Vec<f64> {
        let sites = spec.lattice.num_sites();
        let d = spec.lattice.d;
        let mut xs = vec![0.0; sites * d];
        for k in 0..sites {
            spec.lattice.position(k, &mut xs[k * d..(k + 1) * d]);
        }
        xs
    }
}

/// `sup_t ∫ (1+θ²) dμ̂_t` over the grid: the smallest radius `R` whose
/// sublevel class `C_{φ,R}` contains the empirical flow.
pub fn phi_statistic(ens: &PathEnsemble) -> f64 {
    let sites = ens.sites() as f64;
    (0..ens.num_times())
        .map(|j| {
            let s = ens.slice(j);
            1.0 + ksum_iter(s.iter().map(|&t| t * t)) / sites
        })
        .fold(f64::NEG_INFINITY, f64::max)
}
