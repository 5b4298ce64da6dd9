//! Forward solver for the limiting measure flow. Freezing the interaction
//! field over one time step decouples the `(x, w)` fibers into independent
//! one-dimensional drift–diffusion solves; the field itself is a circular
//! convolution over space cells thanks to the separable kernel forms:
//!
//!   product: `β(x, w) = Σ_a g_a(w) · (J¹ ∗ C_a)(x)`,
//!            `C_a(x') = Σ_q ω_q h_a(w_q) m₁(x', q)`,
//!   sum:     `β(x, w) = (J¹ ∗ M)(x) + Σ_a g_a(w) · ⟨h_a m₁⟩`,
//!
//! with `m₁` the per-fiber first moment of the spin density.

use crate::density::{GridDensityPath, initial_slice};
use crate::flux::{conservative_generator, total_mass};
use crate::grid::{Boundary, SpaceEnvGrid, ThetaGrid};
use crate::PdeError;
use ldp_model::{BetaField, EnvFeature, KernelForm, KernelSpec, ModelSpec, SpatialKernel};
use ldp_numerics::fftconv::circular_convolve;
use ldp_numerics::stats::ksum_iter;
use rayon::prelude::*;

/// Spatial profile sampled at the cell displacements `m/nx`, reduced to
/// `[−1/2, 1/2)`.
fn spatial_cell_profile(spatial: &SpatialKernel, nx: usize) -> Vec<f64> {
    (0..nx)
        .map(|m| {
            let mut x = m as f64 / nx as f64;
            if x >= 0.5 {
                x -= 1.0;
            }
            spatial.evaluate(&[x])
        })
        .collect()
}

fn left_features(kernel: &KernelSpec) -> Vec<EnvFeature> {
    match &kernel.form {
        KernelForm::Zero => Vec::new(),
        KernelForm::SeparableProduct { env, .. } | KernelForm::SeparableSum { env, .. } => {
            env.terms.iter().map(|t| t.left.clone()).collect()
        }
    }
}

/// Field of one time slice: `β(x_i, w) = base[i] + Σ_a g_a(w)·coefs[a][i]`.
struct FieldSlice {
    base: Vec<f64>,
    coefs: Vec<Vec<f64>>,
}

fn field_slice(spec: &ModelSpec, theta: &ThetaGrid, space: &SpaceEnvGrid, slice: &[f64]) -> FieldSlice {
    let nx = space.nx;
    let n = theta.n_theta;
    let h = theta.h();
    // first moment of every fiber
    let m1: Vec<f64> = (0..space.total_fibers())
        .map(|f| {
            let xi = &slice[f * n..(f + 1) * n];
            h * ksum_iter((0..n).map(|l| theta.center(l) * xi[l]))
        })
        .collect();
    let inv_nx = 1.0 / nx as f64;
    match &spec.kernel.form {
        KernelForm::Zero => FieldSlice { base: vec![0.0; nx], coefs: Vec::new() },
        KernelForm::SeparableProduct { spatial, env } => {
            let j1 = spatial_cell_profile(spatial, nx);
            let coefs = env
                .terms
                .iter()
                .map(|term| {
                    let c: Vec<f64> = (0..nx)
                        .map(|i| {
                            let off = space.fiber_offset(i);
                            ksum_iter((0..space.num_nodes(i)).map(|q| {
                                let (w, omega) = space.node(i, q);
                                omega * term.right.eval(w) * m1[off + q]
                            }))
                        })
                        .collect();
                    circular_convolve(&j1, &c).into_iter().map(|v| v * inv_nx).collect()
                })
                .collect();
            FieldSlice { base: vec![0.0; nx], coefs }
        }
        KernelForm::SeparableSum { spatial, env } => {
            let j1 = spatial_cell_profile(spatial, nx);
            let mtot: Vec<f64> = (0..nx)
                .map(|i| {
                    let off = space.fiber_offset(i);
                    ksum_iter((0..space.num_nodes(i)).map(|q| space.node(i, q).1 * m1[off + q]))
                })
                .collect();
            let base = circular_convolve(&j1, &mtot).into_iter().map(|v| v * inv_nx).collect();
            let coefs = env
                .terms
                .iter()
                .map(|term| {
                    let mut parts = Vec::with_capacity(space.total_fibers());
                    for i in 0..nx {
                        let off = space.fiber_offset(i);
                        for q in 0..space.num_nodes(i) {
                            let (w, omega) = space.node(i, q);
                            parts.push(omega * term.right.eval(w) * m1[off + q]);
                        }
                    }
                    let s = inv_nx * ksum_iter(parts);
                    vec![s; nx]
                })
                .collect();
            FieldSlice { base, coefs }
        }
    }
}

/// Interaction field extracted from a solved flow and frozen: evaluates
/// `β(t, x, w)` by bilinear interpolation in `(t, x)` and exactly in `w`
/// (the environment enters through the kernel's affine features only).
pub struct FrozenField {
    nx: usize,
    times: Vec<f64>,
    base: Vec<f64>,
    coefs: Vec<Vec<f64>>,
    features: Vec<EnvFeature>,
}

impl FrozenField {
    pub fn from_flow(spec: &ModelSpec, flow: &GridDensityPath) -> Self {
        let nx = flow.space.nx;
        let nt = flow.num_times();
        let features = left_features(&spec.kernel);
        let mut base = Vec::with_capacity(nt * nx);
        let mut coefs = vec![Vec::with_capacity(nt * nx); features.len()];
        for j in 0..nt {
            let fs = field_slice(spec, &flow.theta, &flow.space, flow.slice(j));
            base.extend_from_slice(&fs.base);
            for (a, c) in fs.coefs.into_iter().enumerate() {
                coefs[a].extend_from_slice(&c);
            }
        }
        Self { nx, times: flow.times.clone(), base, coefs, features }
    }

    /// Stored flow times.
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// Field value at stored time index `j` and cell `i` (no interpolation).
    pub fn beta_at_grid(&self, j: usize, i: usize, w: &[f64]) -> f64 {
        let idx = j * self.nx + i;
        let mut v = self.base[idx];
        for (a, feat) in self.features.iter().enumerate() {
            v += feat.eval(w) * self.coefs[a][idx];
        }
        v
    }

    fn time_weights(&self, t: f64) -> (usize, usize, f64) {
        let nt = self.times.len();
        if nt == 1 {
            return (0, 0, 0.0);
        }
        let dt = self.times[1] - self.times[0];
        let u = (t / dt).clamp(0.0, (nt - 1) as f64);
        let j0 = (u.floor() as usize).min(nt - 2);
        (j0, j0 + 1, u - j0 as f64)
    }

    fn x_weights(&self, x: f64) -> (usize, usize, f64) {
        if self.nx == 1 {
            return (0, 0, 0.0);
        }
        let u = x * self.nx as f64 - 0.5;
        let fl = u.floor();
        let frac = u - fl;
        let i0 = (fl.rem_euclid(self.nx as f64)) as usize % self.nx;
        (i0, (i0 + 1) % self.nx, frac)
    }
}

impl BetaField for FrozenField {
    fn beta(&self, t: f64, x: &[f64], w: &[f64]) -> f64 {
        let (j0, j1, ft) = self.time_weights(t);
        let (i0, i1, fx) = self.x_weights(x[0]);
        let mut corners = [0.0; 4];
        for (k, (j, i)) in [(j0, i0), (j0, i1), (j1, i0), (j1, i1)].into_iter().enumerate() {
            corners[k] = self.beta_at_grid(j, i, w);
        }
        (corners[0] * (1.0 - fx) + corners[1] * fx) * (1.0 - ft) + (corners[2] * (1.0 - fx) + corners[3] * fx) * ft
    }

    fn horizon(&self) -> f64 {
        *self.times.last().unwrap()
    }
}

/// Extra drift added on top of the model drift, as a function of
/// `(t, x, w, θ)`.
pub type ControlFn = dyn Fn(f64, f64, &[f64], f64) -> f64 + Sync;

/// Integrates the measure flow from the discretized initial slice `xi0`
/// (fiber-major, each fiber of unit mass) over `steps` implicit Euler steps of
/// the exponentially fitted flux, refreshing the field from the current slice
/// at the start of every step.
pub fn solve_mckean_vlasov(
    spec: &ModelSpec,
    theta: &ThetaGrid,
    space: &SpaceEnvGrid,
    xi0: &[f64],
    steps: usize,
) -> Result<GridDensityPath, PdeError> {
    solve_core(spec, theta, space, xi0, steps, None)
}

/// Law of the controlled single-spin dynamics: the model drift plus
/// `control(t, x, w, θ)`, with the interaction field refreshed from the
/// controlled flow itself.
pub fn solve_controlled(
    spec: &ModelSpec,
    theta: &ThetaGrid,
    space: &SpaceEnvGrid,
    xi0: &[f64],
    steps: usize,
    control: &ControlFn,
) -> Result<GridDensityPath, PdeError> {
    solve_core(spec, theta, space, xi0, steps, Some(control))
}

fn solve_core(
    spec: &ModelSpec,
    theta: &ThetaGrid,
    space: &SpaceEnvGrid,
    xi0: &[f64],
    steps: usize,
    control: Option<&ControlFn>,
) -> Result<GridDensityPath, PdeError> {
    let violations = ldp_model::validate(spec);
    if !violations.is_empty() {
        return Err(PdeError::InvalidModel(violations));
    }
    if spec.lattice.d != 1 {
        return Err(PdeError::UnsupportedDimension(spec.lattice.d));
    }
    if theta.boundary != Boundary::NoFlux {
        return Err(PdeError::WrongBoundary { expected: Boundary::NoFlux });
    }
    if steps == 0 {
        return Err(PdeError::NoSteps);
    }
    let n = theta.n_theta;
    let h = theta.h();
    let fibers = space.total_fibers();
    let slice_len = fibers * n;
    if xi0.len() != slice_len {
        return Err(PdeError::ShapeMismatch { expected: slice_len, got: xi0.len() });
    }
    let dt = spec.horizon / steps as f64;

    let mut values = vec![0.0; (steps + 1) * slice_len];
    let mut clip_count = 0usize;
    for f in 0..fibers {
        let src = &xi0[f * n..(f + 1) * n];
        let mass = total_mass(h, src);
        if (mass - 1.0).abs() > 1e-6 {
            return Err(PdeError::NotNormalized { fiber: f, mass });
        }
        let dst = &mut values[f * n..(f + 1) * n];
        for (d, &v) in dst.iter_mut().zip(src) {
            if v < 0.0 {
                if v < -1e-12 {
                    clip_count += 1;
                }
                *d = 0.0;
            } else {
                *d = v / mass;
            }
        }
    }

    // drift faces split into the w-dependent potential part (static per fiber)
    // and the field value added per step
    let dpsi_faces: Vec<f64> = {
        let mut buf = vec![0.0; fibers * (n + 1)];
        for (fiber, _i, _q, w, _omega) in space.fibers() {
            for (k, v) in buf[fiber * (n + 1)..(fiber + 1) * (n + 1)].iter_mut().enumerate() {
                *v = -spec.potential.dpsi(theta.face(k), w);
            }
        }
        buf
    };
    let features = left_features(&spec.kernel);

    let mut faces_all = vec![0.0; fibers * (n + 1)];
    for j in 0..steps {
        let (head, tail) = values.split_at_mut((j + 1) * slice_len);
        let old = &head[j * slice_len..];
        let new = &mut tail[..slice_len];
        let t_j = j as f64 * dt;

        let fs = field_slice(spec, theta, space, old);
        for (f, i, _q, w, _omega) in space.fibers() {
            let mut b = fs.base[i];
            for (a, feat) in features.iter().enumerate() {
                b += feat.eval(w) * fs.coefs[a][i];
            }
            let x = space.x_center(i);
            let block = &mut faces_all[f * (n + 1)..(f + 1) * (n + 1)];
            for (k, v) in block.iter_mut().enumerate() {
                *v = dpsi_faces[f * (n + 1) + k] + b;
                if let Some(c) = control {
                    *v += c(t_j, x, w, theta.face(k));
                }
            }
        }

        let max_u = faces_all.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if max_u * dt > h {
            return Err(PdeError::CflExceeded { max_drift: max_u, dt, suggested_dt: h / max_u });
        }

        new.par_chunks_mut(n).enumerate().for_each(|(f, chunk)| {
            let faces = &faces_all[f * (n + 1)..(f + 1) * (n + 1)];
            let m = conservative_generator(theta, faces, spec.sigma).identity_plus(dt);
            let sol = m.solve(&old[f * n..(f + 1) * n]);
            chunk.copy_from_slice(&sol);
        });

        for v in new.iter_mut() {
            if !v.is_finite() {
                return Err(PdeError::Corrupt("non-finite density during time stepping".into()));
            }
            if *v < 0.0 {
                if *v < -1e-12 {
                    clip_count += 1;
                }
                *v = 0.0;
            }
        }
    }

    let times = (0..=steps).map(|j| j as f64 * dt).collect();
    Ok(GridDensityPath { theta: theta.clone(), space: space.clone(), times, values, clip_count })
}

/// Convenience wrapper: discretize `ν_x`, then solve.
pub fn solve_from_initial_law(
    spec: &ModelSpec,
    theta: &ThetaGrid,
    space: &SpaceEnvGrid,
    steps: usize,
) -> Result<GridDensityPath, PdeError> {
    let xi0 = initial_slice(spec, theta, space)?;
    solve_mckean_vlasov(spec, theta, space, &xi0, steps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ldp_model::{
        EnvLaw, EnvPairKernel, EnvironmentSpec, InitialSpec, ModelSpec, PotentialSpec, TorusLattice,
    };

    fn ou_spec(kernel: KernelSpec, initial: InitialSpec, horizon: f64) -> ModelSpec {
        ModelSpec {
            lattice: TorusLattice { d: 1, n: 8 },
            potential: PotentialSpec::harmonic(),
            kernel,
            environment: EnvironmentSpec::frozen(vec![0.0]),
            initial,
            sigma: 1.0,
            horizon,
        }
    }

    #[test]
    fn stationary_density_is_a_fixed_point() {
        // harmonic well, no interaction: e^{−θ²} is stationary and the
        // exponentially fitted flux preserves its discretization exactly
        let spec = ou_spec(KernelSpec::zero(), InitialSpec::gaussian(0.0, 0.25), 1.0);
        let theta = ThetaGrid::new(6.0, 256, Boundary::NoFlux);
        let space = SpaceEnvGrid::from_spec(&spec, 1, 4);
        let mut xi0: Vec<f64> = theta.sample(|t| (-t * t).exp());
        let mass = theta.h() * xi0.iter().sum::<f64>();
        for v in &mut xi0 {
            *v /= mass;
        }
        let flow = solve_mckean_vlasov(&spec, &theta, &space, &xi0, 256).unwrap();
        let h = theta.h();
        let mut l1 = 0.0;
        for l in 0..theta.n_theta {
            l1 += h * (flow.fiber(flow.num_times() - 1, 0)[l] - xi0[l]).abs();
        }
        assert!(l1 < 1e-3, "stationary drift {l1}");
        assert_eq!(flow.clip_count, 0);
    }

    #[test]
    fn relaxation_moments_match_closed_form() {
        let spec = ou_spec(KernelSpec::zero(), InitialSpec::gaussian(1.0, 0.1), 1.0);
        let theta = ThetaGrid::new(6.0, 256, Boundary::NoFlux);
        let space = SpaceEnvGrid::from_spec(&spec, 1, 4);
        let flow = solve_from_initial_law(&spec, &theta, &space, 512).unwrap();
        assert!(flow.max_mass_defect() < 1e-8, "mass defect {}", flow.max_mass_defect());
        for j in [0, 128, 256, 384, 512] {
            let t = flow.times[j];
            let (m, v) = flow.mean_var_at(j);
            let m_exact = (-t).exp();
            let v_exact = 0.1 * (-2.0 * t).exp() + 0.5 * (1.0 - (-2.0 * t).exp());
            assert!((m - m_exact).abs() < 1e-2, "t = {t}: mean {m} vs {m_exact}");
            assert!((v - v_exact).abs() < 1e-2, "t = {t}: var {v} vs {v_exact}");
        }
    }

    #[test]
    fn refinement_shrinks_moment_error() {
        let spec = ou_spec(KernelSpec::zero(), InitialSpec::gaussian(1.0, 0.1), 1.0);
        let space = SpaceEnvGrid::from_spec(&spec, 1, 4);
        let err_at = |n_theta: usize, steps: usize| {
            let theta = ThetaGrid::new(6.0, n_theta, Boundary::NoFlux);
            let flow = solve_from_initial_law(&spec, &theta, &space, steps).unwrap();
            let (m, v) = flow.mean_var_at(steps);
            let m_exact = (-1.0f64).exp();
            let v_exact = 0.1 * (-2.0f64).exp() + 0.5 * (1.0 - (-2.0f64).exp());
            (m - m_exact).abs() + (v - v_exact).abs()
        };
        let coarse = err_at(128, 256);
        let fine = err_at(256, 512);
        assert!(
            coarse > 1.5 * fine,
            "refinement ratio {} (coarse {coarse}, fine {fine})",
            coarse / fine
        );
    }

    #[test]
    fn mean_field_coupling_shifts_the_decay_rate() {
        // constant kernel c: the mean solves m' = −m + c·m
        let spec = ou_spec(KernelSpec::constant(0.3), InitialSpec::gaussian(1.0, 0.1), 1.0);
        let theta = ThetaGrid::new(6.0, 256, Boundary::NoFlux);
        let space = SpaceEnvGrid::from_spec(&spec, 4, 4);
        let flow = solve_from_initial_law(&spec, &theta, &space, 512).unwrap();
        let (m, _) = flow.mean_var_at(512);
        let m_exact = (-0.7f64).exp();
        assert!((m - m_exact).abs() < 1e-2, "mean {m} vs {m_exact}");
        // the frozen field reports c·(global mean) at every cell
        let field = FrozenField::from_flow(&spec, &flow);
        for j in [0, 256, 512] {
            let (mj, _) = flow.mean_var_at(j);
            for i in 0..4 {
                let b = field.beta_at_grid(j, i, &[0.0]);
                assert!((b - 0.3 * mj).abs() < 1e-12, "beta {b} vs {}", 0.3 * mj);
            }
        }
        assert_eq!(field.horizon(), 1.0);
    }

    /// Brute-force field from a slice: quadrature over all cells and nodes.
    fn direct_beta(
        spec: &ModelSpec,
        theta: &ThetaGrid,
        space: &SpaceEnvGrid,
        slice: &[f64],
        i: usize,
        w: &[f64],
    ) -> f64 {
        let n = theta.n_theta;
        let h = theta.h();
        let mut beta = 0.0;
        for (fiber, ip, _q, wp, omega) in space.fibers() {
            let xi = &slice[fiber * n..(fiber + 1) * n];
            let m1 = h * ksum_iter((0..n).map(|l| theta.center(l) * xi[l]));
            let mut dx = space.x_center(i) - space.x_center(ip);
            dx -= dx.floor();
            if dx >= 0.5 {
                dx -= 1.0;
            }
            beta += (1.0 / space.nx as f64) * omega * spec.kernel.evaluate(&[dx], w, wp) * m1;
        }
        beta
    }

    #[test]
    fn convolution_field_matches_direct_quadrature() {
        use ldp_model::SpatialKernel;
        let env = EnvironmentSpec {
            dim: 1,
            lo: vec![-1.0],
            hi: vec![1.0],
            law: EnvLaw::Discrete { weights: vec![0.3, 0.7], atoms: vec![vec![-1.0], vec![0.5]] },
        };
        let kernels = [
            KernelSpec::product(
                SpatialKernel::Cosine { amplitude: 0.4, frequency: 1 },
                EnvPairKernel::product_first_coord(),
            ),
            KernelSpec::sum(
                SpatialKernel::GaussianBump { amplitude: 0.2, width: 0.15 },
                // 0.2·w·w′, scaled so the additive part keeps the interaction weak
                EnvPairKernel {
                    terms: vec![ldp_model::EnvTerm {
                        left: EnvFeature { constant: 0.0, linear: vec![0.2] },
                        right: EnvFeature::coord(0),
                    }],
                },
            ),
        ];
        for kernel in kernels {
            let mut spec = ou_spec(kernel, InitialSpec::gaussian(0.8, 0.2), 0.2);
            spec.environment = env.clone();
            let theta = ThetaGrid::new(6.0, 64, Boundary::NoFlux);
            let space = SpaceEnvGrid::from_spec(&spec, 12, 4);
            let flow = solve_from_initial_law(&spec, &theta, &space, 16).unwrap();
            let j = flow.num_times() - 1;
            let field = FrozenField::from_flow(&spec, &flow);
            for i in [0, 3, 7, 11] {
                for w in [[-1.0], [0.5]] {
                    let fast = field.beta_at_grid(j, i, &w);
                    let slow = direct_beta(&spec, &theta, &space, flow.slice(j), i, &w);
                    assert!((fast - slow).abs() < 1e-10, "cell {i}: {fast} vs {slow}");
                }
            }
        }
    }

    #[test]
    fn field_interpolates_between_cells_and_times() {
        let spec = ou_spec(KernelSpec::constant(0.4), InitialSpec::gaussian(1.0, 0.1), 1.0);
        let theta = ThetaGrid::new(6.0, 128, Boundary::NoFlux);
        let space = SpaceEnvGrid::from_spec(&spec, 4, 4);
        let flow = solve_from_initial_law(&spec, &theta, &space, 128).unwrap();
        let field = FrozenField::from_flow(&spec, &flow);
        // spatially homogeneous: interpolation in x is flat
        let b_mid = field.beta(0.5, &[0.37], &[0.0]);
        let b_cell = field.beta_at_grid(64, 0, &[0.0]);
        assert!((b_mid - b_cell).abs() < 1e-12);
        // in time: between stored slices, between the endpoint values
        let b0 = field.beta_at_grid(32, 0, &[0.0]);
        let b1 = field.beta_at_grid(33, 0, &[0.0]);
        let bt = field.beta(0.5 * (flow.times[32] + flow.times[33]), &[0.1], &[0.0]);
        let (lo, hi) = (b0.min(b1), b0.max(b1));
        assert!(bt >= lo - 1e-14 && bt <= hi + 1e-14);
        // beyond the horizon: clamped, not extrapolated
        let b_end = field.beta(5.0, &[0.1], &[0.0]);
        assert!((b_end - field.beta_at_grid(128, 0, &[0.0])).abs() < 1e-14);
    }

    #[test]
    fn constant_control_shifts_the_stationary_mean() {
        // b = −θ + c relaxes the mean towards c: m(t) = c + (m₀ − c)e^{−t}
        let spec = ou_spec(KernelSpec::zero(), InitialSpec::gaussian(0.0, 0.25), 1.0);
        let theta = ThetaGrid::new(6.0, 256, Boundary::NoFlux);
        let space = SpaceEnvGrid::from_spec(&spec, 1, 4);
        let xi0 = initial_slice(&spec, &theta, &space).unwrap();
        let c = 0.8;
        let flow = solve_controlled(&spec, &theta, &space, &xi0, 512, &move |_t, _x, _w, _th| c).unwrap();
        for j in [256, 512] {
            let t = flow.times[j];
            let (m, _) = flow.mean_var_at(j);
            let m_exact = c * (1.0 - (-t).exp());
            assert!((m - m_exact).abs() < 1e-2, "t = {t}: mean {m} vs {m_exact}");
        }
    }

    #[test]
    fn too_coarse_time_step_is_rejected_with_suggestion() {
        let spec = ou_spec(KernelSpec::zero(), InitialSpec::gaussian(0.0, 0.25), 1.0);
        let theta = ThetaGrid::new(6.0, 256, Boundary::NoFlux);
        let space = SpaceEnvGrid::from_spec(&spec, 1, 4);
        match solve_from_initial_law(&spec, &theta, &space, 10) {
            Err(PdeError::CflExceeded { max_drift, dt, suggested_dt }) => {
                assert!((dt - 0.1).abs() < 1e-15);
                assert!(max_drift > 5.9 && max_drift < 6.1, "max drift {max_drift}");
                assert!(suggested_dt < theta.h() / max_drift + 1e-12);
            }
            other => panic!("expected step-size rejection, got {other:?}"),
        }
    }

    #[test]
    fn unnormalized_initial_slice_is_rejected() {
        let spec = ou_spec(KernelSpec::zero(), InitialSpec::gaussian(0.0, 0.25), 1.0);
        let theta = ThetaGrid::new(6.0, 256, Boundary::NoFlux);
        let space = SpaceEnvGrid::from_spec(&spec, 1, 4);
        let mut xi0 = initial_slice(&spec, &theta, &space).unwrap();
        for v in &mut xi0 {
            *v *= 1.01;
        }
        assert!(matches!(
            solve_mckean_vlasov(&spec, &theta, &space, &xi0, 64),
            Err(PdeError::NotNormalized { .. })
        ));
    }

    #[test]
    fn invalid_model_and_dimension_are_rejected() {
        let mut spec = ou_spec(KernelSpec::zero(), InitialSpec::gaussian(0.0, 0.25), 1.0);
        let theta = ThetaGrid::new(6.0, 64, Boundary::NoFlux);
        let space = SpaceEnvGrid::from_spec(&spec, 1, 4);
        let xi0 = initial_slice(&spec, &theta, &space).unwrap();
        spec.sigma = 0.0;
        assert!(matches!(
            solve_mckean_vlasov(&spec, &theta, &space, &xi0, 64),
            Err(PdeError::InvalidModel(_))
        ));
        let mut spec2 = ou_spec(KernelSpec::zero(), InitialSpec::gaussian(0.0, 0.25), 1.0);
        spec2.lattice = TorusLattice { d: 2, n: 4 };
        assert!(matches!(
            solve_mckean_vlasov(&spec2, &theta, &space, &xi0, 64),
            Err(PdeError::UnsupportedDimension(2))
        ));
        assert!(matches!(
            solve_mckean_vlasov(
                &ou_spec(KernelSpec::zero(), InitialSpec::gaussian(0.0, 0.25), 1.0),
                &ThetaGrid::new(6.0, 64, Boundary::Absorbing),
                &space,
                &xi0,
                64
            ),
            Err(PdeError::WrongBoundary { .. })
        ));
    }
}
