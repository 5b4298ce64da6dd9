//! The interaction functional and the log Radon–Nikodym weights.
//!
//! With `B^N(θ) = (1/2N^d) Σ_{i,j} J((i−j)/N, wⁱ, wʲ) θⁱθʲ` and `βᵢ(t)` the
//! empirical interaction field `∂_{θⁱ}B^N(θ_t)`, the functional of the path
//! empirical measure reads
//!
//! ```text
//! F(L^N) = −(1/2N^d) ∫₀ᵀ Σ_i βᵢ(t)² dt + (1/N^d)[B^N(θ_T) − B^N(θ_0)],
//! ```
//!
//! and the interacting law has density `exp(N^d F − correction)` against the
//! non-interacting reference, where the Itô correction is
//! `½·T·N^{−d}·Σ_i J(0, wⁱ, wⁱ)`.  The fast evaluation reuses the ensemble
//! force routine per stored time slice; a literal triple-sum of the defining
//! expression (cubic in the site count) is kept as the cross-check oracle.

use ldp_model::{PotentialSpec, TorusLattice};
use ldp_numerics::quad::trapezoid;
use ldp_numerics::stats::ksum_iter;
use ldp_simulate::{interaction_force, EnvironmentSample, PathEnsemble};
use rayon::prelude::*;

use ldp_model::KernelSpec;

/// `B^N(θ)`: the interaction energy of one state slice, evaluated as
/// `½ Σ_k θ_k · force_k` with the shared per-site field routine.
pub fn interaction_energy(
    lattice: &TorusLattice,
    kernel: &KernelSpec,
    env: &EnvironmentSample,
    thetas: &[f64],
) -> f64 {
    let force = interaction_force(lattice, kernel, env, thetas);
    0.5 * ksum_iter(thetas.iter().zip(&force).map(|(&t, &f)| t * f))
}

/// The two pieces of `F(L^N)` and their sum.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct FParts {
    /// `−(1/2N^d)∫ Σ_i βᵢ² dt` (trapezoid over the stored grid).
    pub quadratic: f64,
    /// `(1/N^d)[B^N(θ_T) − B^N(θ_0)]`.
    pub boundary: f64,
    pub total: f64,
}

/// Evaluate `F` on the paths of an ensemble (fast path: one field solve per
/// stored time).
#[allow(non_snake_case)]
pub fn F_functional(ens: &PathEnsemble) -> FParts {
    let lattice = &ens.spec.lattice;
    let kernel = &ens.spec.kernel;
    let sites = ens.sites() as f64;
    let m = ens.num_times();
    let per_time: Vec<f64> = (0..m)
        .into_par_iter()
        .map(|j| {
            let beta = interaction_force(lattice, kernel, &ens.env, ens.slice(j));
            ksum_iter(beta.iter().map(|b| b * b)) / sites
        })
        .collect();
    let quadratic = -0.5 * trapezoid(&per_time, ens.dt);
    let b0 = interaction_energy(lattice, kernel, &ens.env, ens.slice(0));
    let bt = interaction_energy(lattice, kernel, &ens.env, ens.slice(m - 1));
    let boundary = (bt - b0) / sites;
    FParts { quadratic, boundary, total: quadratic + boundary }
}

/// Literal evaluation of the defining triple sum, cubic in the site count:
/// the outer two atoms carry the paths, the inner atom couples them through
/// the product of two kernel factors.  Reference oracle for [`F_functional`].
pub fn f_functional_literal(ens: &PathEnsemble) -> f64 {
    let lattice = &ens.spec.lattice;
    let kernel = &ens.spec.kernel;
    let sites = ens.sites();
    let w = 1.0 / sites as f64;
    let m = ens.num_times();
    let mut disp = vec![0.0; lattice.d];
    let mut disp2 = vec![0.0; lattice.d];

    let mut quad = 0.0;
    let mut boundary = 0.0;
    for j in 0..sites {
        for k in 0..sites {
            let mut inner = 0.0;
            for i in 0..sites {
                lattice.displacement(i, j, &mut disp);
                lattice.displacement(i, k, &mut disp2);
                inner += w
                    * kernel.evaluate(&disp, ens.env.w(i), ens.env.w(j))
                    * kernel.evaluate(&disp2, ens.env.w(i), ens.env.w(k));
            }
            let prod: Vec<f64> = (0..m).map(|t| ens.theta(j, t) * ens.theta(k, t)).collect();
            quad += w * w * inner * trapezoid(&prod, ens.dt);

            lattice.displacement(j, k, &mut disp);
            let jv = kernel.evaluate(&disp, ens.env.w(j), ens.env.w(k));
            boundary += 0.5
                * w
                * w
                * jv
                * (ens.theta(j, m - 1) * ens.theta(k, m - 1) - ens.theta(j, 0) * ens.theta(k, 0));
        }
    }
    -0.5 * quad + boundary
}

/// Log density of the interacting law against the non-interacting reference,
/// evaluated on paths sampled under the reference:
/// `N^d·F(L^N) − ½·T·N^{−d}·Σ_i J(0, wⁱ, wⁱ)`.
pub fn log_rn_interacting(ens: &PathEnsemble) -> f64 {
    let sites = ens.sites();
    let zero = vec![0.0; ens.spec.lattice.d];
    let diag = ksum_iter(
        (0..sites).map(|i| ens.spec.kernel.evaluate(&zero, ens.env.w(i), ens.env.w(i))),
    );
    let correction = 0.5 * ens.spec.horizon * diag / sites as f64;
    sites as f64 * F_functional(ens).total - correction
}

/// Log density of the `−∂_θΨ`-drift diffusion against driftless Brownian
/// motion along one path on the uniform grid:
///
/// ```text
/// Ψ(θ_0, w) − Ψ(θ_T, w) + ½∫∂²_θΨ(θ_t) dt − ½∫(∂_θΨ(θ_t, w))² dt.
/// ```
pub fn log_rn_psi_to_wiener(potential: &PotentialSpec, path: &[f64], dt: f64, w: &[f64]) -> f64 {
    let second: Vec<f64> = path.iter().map(|&t| potential.d2psi(t)).collect();
    let grad_sq: Vec<f64> = path
        .iter()
        .map(|&t| {
            let g = potential.dpsi(t, w);
            g * g
        })
        .collect();
    potential.psi(path[0], w) - potential.psi(path[path.len() - 1], w)
        + 0.5 * trapezoid(&second, dt)
        - 0.5 * trapezoid(&grad_sq, dt)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ldp_model::{
        EnvPairKernel, EnvironmentSpec, InitialSpec, ModelSpec, SpatialKernel,
    };
    use ldp_numerics::KeyedRng;

    /// Hand-assembled ensemble: explicit paths, environment, and kernel.
    fn ensemble(n: usize, steps: usize, kernel: KernelSpec, ws: Vec<f64>, thetas: Vec<f64>) -> PathEnsemble {
        let spec = ModelSpec {
            lattice: TorusLattice::new(1, n),
            potential: PotentialSpec::harmonic(),
            kernel,
            environment: EnvironmentSpec {
                dim: 1,
                lo: vec![-1.0],
                hi: vec![1.0],
                law: ldp_model::EnvLaw::Uniform,
            },
            initial: InitialSpec::point(0.0),
            sigma: 1.0,
            horizon: 1.0,
        };
        let sites = spec.lattice.num_sites();
        let mut positions = vec![0.0; sites * spec.lattice.d];
        for k in 0..sites {
            spec.lattice.position(k, &mut positions[k..k + 1]);
        }
        PathEnsemble {
            env: EnvironmentSample { env_dim: 1, values: ws },
            steps,
            dt: 1.0 / steps as f64,
            seed: 0,
            scheme: "hand".into(),
            positions,
            thetas,
            spec,
        }
    }

    fn random_instance(rng: &KeyedRng, trial: u64) -> PathEnsemble {
        let n = 2 + (rng.raw([trial, 0]) % 5) as usize; // 2..=6 sites
        let steps = 2 + (rng.raw([trial, 1]) % 7) as usize; // 2..=8 steps
        let spatial = match rng.raw([trial, 2]) % 3 {
            0 => SpatialKernel::Constant { value: 0.4 },
            1 => SpatialKernel::Cosine { amplitude: 0.7, frequency: 1 },
            _ => SpatialKernel::GaussianBump { amplitude: 0.9, width: 0.2 },
        };
        let env_pair = if rng.raw([trial, 3]) % 2 == 0 {
            EnvPairKernel::unit()
        } else {
            EnvPairKernel::product_first_coord()
        };
        let kernel = if rng.raw([trial, 4]) % 2 == 0 {
            KernelSpec::product(spatial, env_pair)
        } else {
            KernelSpec::sum(spatial, env_pair)
        };
        let ws: Vec<f64> = (0..n).map(|k| rng.uniform([trial, 5, k as u64]) - 0.5).collect();
        let thetas: Vec<f64> =
            (0..n * (steps + 1)).map(|k| rng.normal([trial, 6, k as u64])).collect();
        ensemble(n, steps, kernel, ws, thetas)
    }

    #[test]
    fn zero_kernel_zeroes_every_functional() {
        let rng = KeyedRng::new(7);
        let thetas: Vec<f64> = (0..4 * 5).map(|k| rng.normal([k as u64])).collect();
        let ens = ensemble(4, 4, KernelSpec::zero(), vec![0.1, -0.2, 0.3, 0.0], thetas);
        assert_eq!(
            interaction_energy(&ens.spec.lattice, &ens.spec.kernel, &ens.env, ens.slice(0)),
            0.0
        );
        assert_eq!(F_functional(&ens).total, 0.0);
        assert_eq!(log_rn_interacting(&ens), 0.0);
    }

    #[test]
    fn two_site_unit_kernel_energy() {
        let lattice = TorusLattice::new(1, 2);
        let kernel = KernelSpec::constant(1.0);
        let env = EnvironmentSample { env_dim: 1, values: vec![0.0, 0.0] };
        // B = 1/(2·2) Σ_{i,j} θᵢθⱼ = ¼·(θ₀+θ₁)²
        let b = interaction_energy(&lattice, &kernel, &env, &[1.0, 1.0]);
        assert!((b - 1.0).abs() < 1e-14, "B = {b}");
        // quadratic form: invariant under the global sign flip
        let flipped = interaction_energy(&lattice, &kernel, &env, &[-1.0, -1.0]);
        assert_eq!(b, flipped);
    }

    #[test]
    fn fast_f_matches_the_literal_triple_sum() {
        let rng = KeyedRng::new(411);
        for trial in 0..60 {
            let ens = random_instance(&rng, trial);
            let fast = F_functional(&ens).total;
            let literal = f_functional_literal(&ens);
            let tol = 1e-9 * literal.abs().max(1.0);
            assert!(
                (fast - literal).abs() <= tol,
                "trial {trial}: fast {fast} vs literal {literal}"
            );
        }
    }

    #[test]
    fn frozen_paths_isolate_the_quadratic_term() {
        let rng = KeyedRng::new(88);
        let n = 4;
        let slice: Vec<f64> = (0..n).map(|k| rng.normal([k as u64])).collect();
        let steps = 6;
        let thetas: Vec<f64> = (0..=steps).flat_map(|_| slice.iter().copied()).collect();
        let ws = vec![0.25, -0.5, 0.0, 0.4];
        let ens = ensemble(n, steps, KernelSpec::constant(0.3), ws, thetas);
        let f = F_functional(&ens);
        assert_eq!(f.boundary, 0.0);
        let beta = interaction_force(&ens.spec.lattice, &ens.spec.kernel, &ens.env, &slice);
        let expect = -0.5 * ens.spec.horizon * ksum_iter(beta.iter().map(|b| b * b)) / n as f64;
        assert!((f.quadratic - expect).abs() <= 1e-14 * expect.abs().max(1.0));
    }

    #[test]
    fn constant_diagonal_gives_half_ct_correction() {
        let rng = KeyedRng::new(19);
        let c = 0.35;
        let n = 5;
        let thetas: Vec<f64> = (0..n * 4).map(|k| rng.normal([k as u64])).collect();
        let ens = ensemble(n, 3, KernelSpec::constant(c), vec![0.0; n], thetas);
        let lr = log_rn_interacting(&ens);
        let f = F_functional(&ens).total;
        let correction = n as f64 * f - lr;
        assert!((correction - 0.5 * ens.spec.horizon * c).abs() < 1e-14);
    }

    #[test]
    fn psi_to_wiener_closed_forms() {
        // Ψ ≡ 0: the two laws coincide
        let zero = PotentialSpec { coeffs: vec![0.0] };
        let path = [0.3, -0.1, 0.7, 0.2];
        assert_eq!(log_rn_psi_to_wiener(&zero, &path, 0.25, &[0.0]), 0.0);

        // constant path θ ≡ a under the harmonic well: ½T − ½a²T
        let harmonic = PotentialSpec::harmonic();
        let a = 1.7;
        let constant = [a; 5];
        let got = log_rn_psi_to_wiener(&harmonic, &constant, 0.25, &[0.0]);
        assert!((got - (0.5 - 0.5 * a * a)).abs() < 1e-12, "got {got}");
    }

    #[test]
    fn w_shift_invariance_holds_only_without_env_coupling() {
        let rng = KeyedRng::new(5);
        let n = 4;
        let steps = 3;
        let thetas: Vec<f64> = (0..n * (steps + 1)).map(|k| rng.normal([k as u64])).collect();
        let ws = vec![0.1, 0.2, 0.3, 0.4];
        let shifted: Vec<f64> = ws.iter().map(|w| w + 0.2).collect();
        let spatial = SpatialKernel::Cosine { amplitude: 0.6, frequency: 1 };

        // environment-blind kernel: adding a constant to every w changes nothing
        let blind = KernelSpec::product(spatial.clone(), EnvPairKernel::unit());
        let base = F_functional(&ensemble(n, steps, blind.clone(), ws.clone(), thetas.clone()));
        let moved = F_functional(&ensemble(n, steps, blind, shifted.clone(), thetas.clone()));
        assert_eq!(base.total, moved.total);

        // first-coordinate product coupling: the same shift moves F
        let coupled = KernelSpec::product(spatial, EnvPairKernel::product_first_coord());
        let base = F_functional(&ensemble(n, steps, coupled.clone(), ws, thetas.clone()));
        let moved = F_functional(&ensemble(n, steps, coupled, shifted, thetas));
        assert!((base.total - moved.total).abs() > 1e-9);
    }
}
