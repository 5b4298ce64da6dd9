//! Rate of a controlled dynamics: simulate a flow driven by an explicit
//! extra drift `δ(t,x,w,θ)` and price it as
//!
//! ```text
//! I(Q) = KL(initial ‖ reference) + ∫₀ᵀ ∬ δ²/(2σ²) dμ_t dt,
//! ```
//!
//! the initial entropy plus the quadratic running cost of the tilt.  By the
//! contraction principle the pushed-forward density path can cost no more
//! than this under the occupation-field rate, which gives a cheap
//! cross-check: evaluating the dual-norm rate on the controlled flow must
//! come out at or below `I(Q)` up to discretization error.

use crate::entropy::{initial_entropy_slice, EntropyDecomposition};
use crate::norm::Flagged;
use crate::RateError;
use ldp_model::{InitialSpec, ModelSpec};
use ldp_numerics::quad::trapezoid;
use ldp_numerics::stats::ksum_iter;
use ldp_pde::{initial_slice, solve_controlled, GridDensityPath, SpaceEnvGrid, ThetaGrid};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Mass allowed in the outermost grid cells before the truncation radius is
/// deemed too small for the control being applied.
pub const BOUNDARY_MASS_TOL: f64 = 1e-4;

/// The extra drift defining a controlled dynamics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ControlDrift {
    /// No tilt: the controlled dynamics is the original one.
    Uncontrolled,
    /// A constant push `δ ≡ c`.
    AdditiveConstant { c: f64 },
    /// A linear tilt `δ = slope · θ`, stiffening or destabilizing the well.
    LinearTilt { slope: f64 },
}

impl ControlDrift {
    /// Control value at one space-environment-state point.
    pub fn eval(&self, _t: f64, _x: f64, _w: &[f64], theta: f64) -> f64 {
        match self {
            ControlDrift::Uncontrolled => 0.0,
            ControlDrift::AdditiveConstant { c } => *c,
            ControlDrift::LinearTilt { slope } => slope * theta,
        }
    }
}

/// A controlled dynamics: optionally restart from a different initial
/// profile, then follow the original field plus the given drift.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ControlledSde {
    /// Replacement initial condition; `None` keeps the model's own.
    pub initial: Option<InitialSpec>,
    pub drift: ControlDrift,
}

impl Default for ControlledSde {
    fn default() -> Self {
        ControlledSde { initial: None, drift: ControlDrift::Uncontrolled }
    }
}

/// The priced control: total value, its two ingredients, and the flow the
/// control produces (for feeding into the other rate evaluations).
#[derive(Clone, Debug)]
pub struct ControlledRate {
    /// `cost + initial.total`, with any boundary-mass warning attached.
    pub value: Flagged,
    /// Time-integrated quadratic running cost `∫∬ δ²/(2σ²) dμ dt`.
    pub cost: Flagged,
    /// Entropy of the (possibly replaced) initial profile against the
    /// model's reference initial law.
    pub initial: EntropyDecomposition,
    pub flow: GridDensityPath,
}

/// Price the control `q` on the model `spec` over the model's horizon.
#[allow(non_snake_case)]
pub fn rate_I_controlled(
    q: &ControlledSde,
    spec: &ModelSpec,
    theta: &ThetaGrid,
    space: &SpaceEnvGrid,
    steps: usize,
) -> Result<ControlledRate, RateError> {
    let mut spec_q = spec.clone();
    if let Some(init) = &q.initial {
        spec_q.initial = init.clone();
    }
    let xi0 = initial_slice(&spec_q, theta, space)?;
    let drift = q.drift.clone();
    let flow = solve_controlled(&spec_q, theta, space, &xi0, steps, &move |t, x, w, th| {
        drift.eval(t, x, w, th)
    })?;

    let cost = if matches!(q.drift, ControlDrift::Uncontrolled) {
        Flagged::finite(0.0)
    } else {
        let h = theta.h();
        let inv_nx = 1.0 / space.nx as f64;
        let half_inv_sigma_sq = 0.5 / (spec.sigma * spec.sigma);
        let centers = theta.centers();
        let per_time: Vec<f64> = (0..flow.num_times())
            .into_par_iter()
            .map(|j| {
                let t = flow.times[j];
                ksum_iter(space.fibers().map(|(f, i, _q, w, omega)| {
                    let x = space.x_center(i);
                    let xi = flow.fiber(j, f);
                    omega
                        * inv_nx
                        * h
                        * ksum_iter(xi.iter().zip(&centers).map(|(&d, &th)| {
                            let delta = q.drift.eval(t, x, w, th);
                            d * delta * delta * half_inv_sigma_sq
                        }))
                }))
            })
            .collect();
        let dt = flow.times[1] - flow.times[0];
        Flagged::finite(trapezoid(&per_time, dt))
    };

    // entropy of the realized initial slice against the *original* model
    let initial = initial_entropy_slice(theta, space, flow.slice(0), spec)?;
    let mut value = cost.plus(&initial.total);
    let boundary = flow.boundary_mass();
    if boundary > BOUNDARY_MASS_TOL {
        value = value.plus(&Flagged::warned(
            0.0,
            format!("boundary mass {boundary:.3e} exceeds truncation tolerance"),
        ));
    }
    Ok(ControlledRate { value, cost, initial, flow })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::TestBasis;
    use crate::rate::rate_S;
    use crate::testflows::ou_half_spec;
    use ldp_pde::Boundary;

    #[test]
    fn the_null_control_costs_nothing() {
        let spec = ou_half_spec();
        let theta = ThetaGrid::new(6.0, 128, Boundary::NoFlux);
        let space = SpaceEnvGrid::from_spec(&spec, 1, 1);
        let out =
            rate_I_controlled(&ControlledSde::default(), &spec, &theta, &space, 128).unwrap();
        assert_eq!(out.cost.as_f64(), 0.0);
        assert!(out.value.as_f64().abs() <= 1e-10, "value {}", out.value.as_f64());
        assert!(out.value.flag.is_none());
    }

    #[test]
    fn a_constant_push_is_priced_at_half_c_squared_t() {
        let spec = ou_half_spec();
        let theta = ThetaGrid::new(6.0, 256, Boundary::NoFlux);
        let space = SpaceEnvGrid::from_spec(&spec, 1, 1);
        let q = ControlledSde {
            initial: None,
            drift: ControlDrift::AdditiveConstant { c: 0.6 },
        };
        let out = rate_I_controlled(&q, &spec, &theta, &space, 256).unwrap();
        let expect = 0.5 * 0.6 * 0.6; // σ = 1, T = 1
        assert!(
            (out.cost.as_f64() - expect).abs() <= 0.02 * expect,
            "cost {} vs {expect}",
            out.cost.as_f64()
        );
        assert!(out.initial.total.as_f64().abs() <= 1e-10);

        // contraction: the density path the control produces can be priced
        // by the dual-norm rate at no more than I(Q)
        let basis = TestBasis::theta_only(6, 6.0);
        let s = rate_S(&out.flow, &spec, &basis).unwrap().s.unwrap().as_f64();
        assert!(
            s <= out.value.as_f64() + 0.02,
            "dual-norm rate {s} above the control price {}",
            out.value.as_f64()
        );
    }

    #[test]
    fn replacing_the_initial_profile_charges_its_entropy() {
        let mut spec = ou_half_spec();
        spec.initial = InitialSpec::gaussian(0.0, 0.25);
        let theta = ThetaGrid::new(6.0, 256, Boundary::NoFlux);
        let space = SpaceEnvGrid::from_spec(&spec, 1, 1);
        let q = ControlledSde {
            initial: Some(InitialSpec::gaussian(1.0, 0.25)),
            drift: ControlDrift::Uncontrolled,
        };
        let out = rate_I_controlled(&q, &spec, &theta, &space, 256).unwrap();
        assert_eq!(out.cost.as_f64(), 0.0);
        // KL(N(1,¼) ‖ N(0,¼)) = (1−0)²/(2·¼) = 2
        assert!(
            (out.value.as_f64() - 2.0).abs() <= 0.02,
            "value {}",
            out.value.as_f64()
        );
    }

    #[test]
    fn a_destabilizing_tilt_trips_the_boundary_warning() {
        let spec = ou_half_spec();
        let theta = ThetaGrid::new(4.0, 128, Boundary::NoFlux);
        let space = SpaceEnvGrid::from_spec(&spec, 1, 1);
        let q = ControlledSde {
            initial: None,
            drift: ControlDrift::LinearTilt { slope: 2.0 },
        };
        // net drift +θ: the variance grows to ≈ e² − ½ and a visible mass
        // fraction reaches |θ| = 4
        let out = rate_I_controlled(&q, &spec, &theta, &space, 128).unwrap();
        let flag = out.value.flag.as_deref().unwrap_or("");
        assert!(flag.contains("boundary mass"), "flag {flag:?}");
        assert!(out.value.is_finite());
    }
}
