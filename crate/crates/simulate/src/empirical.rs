//! Empirical measures built from an ensemble: the time-`t` particle measure
//! `μ̂_t = N^{−d} Σ_k δ_{(k/N, w^k, θ^k_t)}`, the path-space measure
//! `L = N^{−d} Σ_k δ_{(k/N, w^k, θ^k_·)}`, and the projection `Π` from the
//! latter to the former. The projection reuses the stored values verbatim, so
//! `project_pi(path_measure(e), j)` equals `empirical_at(e, j)` bitwise.

use ldp_model::WeightedAtoms;

use crate::ensemble::PathEnsemble;

/// Uniformly weighted atoms `(x_k, w_k, θ_k)` at a single time.
#[derive(Clone, Debug, PartialEq)]
pub struct ParticleMeasure {
    pub d: usize,
    pub env_dim: usize,
    pub xs: Vec<f64>,
    pub ws: Vec<f64>,
    pub thetas: Vec<f64>,
    pub weights: Vec<f64>,
}

impl ParticleMeasure {
    pub fn len(&self) -> usize {
        self.thetas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.thetas.is_empty()
    }

    /// Borrowed view for field/drift evaluation.
    pub fn atoms(&self) -> WeightedAtoms<'_> {
        WeightedAtoms {
            d: self.d,
            env_dim: self.env_dim,
            xs: &self.xs,
            ws: &self.ws,
            thetas: &self.thetas,
            weights: &self.weights,
        }
    }
}

/// Uniformly weighted atoms `(x_k, w_k, θ_k-path)` on a shared time grid;
/// paths stored site-major (`paths[k·(steps+1) + j]`).
#[derive(Clone, Debug, PartialEq)]
pub struct PathEmpiricalMeasure {
    pub d: usize,
    pub env_dim: usize,
    pub times: Vec<f64>,
    pub xs: Vec<f64>,
    pub ws: Vec<f64>,
    pub paths: Vec<f64>,
    pub weights: Vec<f64>,
}

impl PathEmpiricalMeasure {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Trajectory of atom `k`.
    pub fn path(&self, k: usize) -> &[f64] {
        let m = self.times.len();
        &self.paths[k * m..(k + 1) * m]
    }
}

/// `μ̂_{t_j}`; panics if `j` is outside the time grid.
pub fn empirical_at(ens: &PathEnsemble, j: usize) -> ParticleMeasure {
    assert!(j < ens.num_times(), "time index {j} outside 0..={}", ens.steps);
    let sites = ens.sites();
    ParticleMeasure {
        d: ens.spec.lattice.d,
        env_dim: ens.env.env_dim,
        xs: ens.positions.clone(),
        ws: ens.env.values.clone(),
        thetas: ens.slice(j).to_vec(),
        weights: vec![1.0 / sites as f64; sites],
    }
}

/// The empirical measure on path space.
pub fn path_measure(ens: &PathEnsemble) -> PathEmpiricalMeasure {
    let sites = ens.sites();
    let m = ens.num_times();
    let mut paths = vec![0.0; sites * m];
    for j in 0..m {
        let s = ens.slice(j);
        for k in 0..sites {
            paths[k * m + j] = s[k];
        }
    }
    PathEmpiricalMeasure {
        d: ens.spec.lattice.d,
        env_dim: ens.env.env_dim,
        times: (0..m).map(|j| ens.time(j)).collect(),
        xs: ens.positions.clone(),
        ws: ens.env.values.clone(),
        paths,
        weights: vec![1.0 / sites as f64; sites],
    }
}

/// The time-`t_j` marginal map `Π`; atom-for-atom equal to `empirical_at`.
pub fn project_pi(l: &PathEmpiricalMeasure, j: usize) -> ParticleMeasure {
    let m = l.times.len();
    assert!(j < m, "time index {j} outside 0..{m}");
    ParticleMeasure {
        d: l.d,
        env_dim: l.env_dim,
        xs: l.xs.clone(),
        ws: l.ws.clone(),
        thetas: (0..l.len()).map(|k| l.paths[k * m + j]).collect(),
        weights: l.weights.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::run::simulate_interacting;
    use ldp_model::{EnvLaw, EnvironmentSpec, InitialSpec, KernelSpec, ModelSpec, PotentialSpec, TorusLattice};

    fn sample_run(n: usize) -> PathEnsemble {
        let spec = ModelSpec {
            lattice: TorusLattice::new(1, n),
            potential: PotentialSpec::harmonic(),
            kernel: KernelSpec::constant(0.2),
            environment: EnvironmentSpec {
                dim: 1,
                lo: vec![-1.0],
                hi: vec![1.0],
                law: EnvLaw::Discrete { weights: vec![0.5, 0.5], atoms: vec![vec![-0.5], vec![0.5]] },
            },
            initial: InitialSpec::gaussian(0.1, 0.25),
            sigma: 1.0,
            horizon: 0.5,
        };
        simulate_interacting(&spec, 16, 77).unwrap()
    }

    #[test]
    fn projection_commutes_exactly() {
        let ens = sample_run(12);
        let l = path_measure(&ens);
        for j in [0, 7, 16] {
            assert_eq!(project_pi(&l, j), empirical_at(&ens, j));
        }
    }

    #[test]
    fn projection_preserves_position_and_mark_marginals() {
        let ens = sample_run(12);
        let l = path_measure(&ens);
        let first = project_pi(&l, 0);
        for j in 1..=16 {
            let pj = project_pi(&l, j);
            assert_eq!(pj.xs, first.xs);
            assert_eq!(pj.ws, first.ws);
            assert_eq!(pj.weights, first.weights);
        }
    }

    #[test]
    fn single_site_measure_is_one_full_atom() {
        let ens = sample_run(1);
        let mu = empirical_at(&ens, 3);
        assert_eq!(mu.len(), 1);
        assert_eq!(mu.weights, vec![1.0]);
        assert_eq!(mu.thetas[0], ens.theta(0, 3));
    }

    #[test]
    #[should_panic]
    fn out_of_range_time_index_panics() {
        let ens = sample_run(4);
        empirical_at(&ens, 17);
    }
}
