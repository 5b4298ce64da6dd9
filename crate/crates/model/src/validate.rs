//! Standing-assumption checks on a full model description. Violations carry
//! the failed assumption and a quantitative detail; an empty report means the
//! description is inside the supported class.

use crate::environment::EnvLaw;
use crate::initial::ThetaLaw;
use crate::kernel::{KernelForm, SpatialKernel};
use crate::ModelSpec;

#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub assumption: &'static str,
    pub detail: String,
}

fn violation(list: &mut Vec<Violation>, assumption: &'static str, detail: String) {
    list.push(Violation { assumption, detail });
}

/// Checks: potential shape, positive σ and horizon, kernel evenness, the
/// growth condition `c_Ψ > ‖J̄‖₁`, environment box/law consistency, and
/// integrability `sup_x ∫e^{2Ψ}dν_x < ∞` for the supported initial laws.
pub fn validate(spec: &ModelSpec) -> Vec<Violation> {
    let mut out = Vec::new();

    if !spec.potential.well_formed() {
        violation(&mut out, "potential_shape", format!("degree {} (must be even >= 2 with positive leading coefficient)", spec.potential.degree()));
    }
    if !(spec.sigma > 0.0) {
        violation(&mut out, "noise_strength", format!("sigma = {}", spec.sigma));
    }
    if !(spec.horizon > 0.0) {
        violation(&mut out, "time_horizon", format!("horizon = {}", spec.horizon));
    }

    let defect = match &spec.kernel.form {
        KernelForm::Zero => 0.0,
        KernelForm::SeparableProduct { spatial, .. } | KernelForm::SeparableSum { spatial, .. } => {
            if matches!(spatial, SpatialKernel::Tabulated { .. }) && spec.lattice.d != 1 {
                violation(&mut out, "kernel_dimension", "tabulated spatial profile requires d = 1".into());
            }
            spatial.evenness_defect()
        }
    };
    if defect > 1e-12 {
        violation(&mut out, "kernel_evenness", format!("max |J1(x) - J1(-x)| = {defect:.3e}"));
    }

    check_environment(spec, &mut out);

    // growth condition: c_Ψ > ‖J̄‖₁
    if spec.potential.well_formed() && environment_box_ok(spec) {
        let c = spec.potential.c_psi();
        let l1 = spec.kernel.envelope_l1(spec.lattice.d, &spec.environment);
        if !(c > l1) {
            violation(&mut out, "growth_condition", format!("c_psi = {c} <= envelope L1 = {l1}"));
        }
    }

    // integrability of e^{2Ψ} under the initial law
    if spec.potential.well_formed() {
        match spec.initial.law {
            ThetaLaw::PointMass => {}
            ThetaLaw::Gaussian { variance } => {
                if !(variance > 0.0) {
                    violation(&mut out, "initial_law", format!("gaussian variance = {variance}"));
                } else if spec.potential.degree() > 2 {
                    violation(&mut out, "initial_integrability", "e^{2*potential} is not integrable against a gaussian when the degree exceeds two".into());
                } else {
                    let c2 = spec.potential.coeffs[2];
                    let bound = 1.0 / (4.0 * c2);
                    if variance >= bound {
                        violation(&mut out, "initial_integrability", format!("gaussian variance {variance} >= 1/(4 c2) = {bound}"));
                    }
                }
            }
        }
    }

    out
}

fn environment_box_ok(spec: &ModelSpec) -> bool {
    let env = &spec.environment;
    env.dim >= 1
        && env.lo.len() == env.dim
        && env.hi.len() == env.dim
        && env.lo.iter().zip(&env.hi).all(|(l, h)| l.is_finite() && h.is_finite() && l < h)
}

fn check_environment(spec: &ModelSpec, out: &mut Vec<Violation>) {
    let env = &spec.environment;
    if !environment_box_ok(spec) {
        violation(out, "environment_box", format!("dim {} lo {:?} hi {:?}", env.dim, env.lo, env.hi));
        return;
    }
    let check_law = |law: &EnvLaw, ctx: &str, out: &mut Vec<Violation>| match law {
        EnvLaw::Point { w } => {
            if w.len() != env.dim || !inside(env, w) {
                violation(out, "environment_support", format!("{ctx}: point {w:?} outside box"));
            }
        }
        EnvLaw::Discrete { weights, atoms } => {
            check_atoms(env, weights, atoms, ctx, out);
        }
        EnvLaw::CosineTilt { weights, atoms, tilts, modulation, .. } => {
            check_atoms(env, weights, atoms, ctx, out);
            if tilts.len() != weights.len() {
                violation(out, "environment_law", format!("{ctx}: {} tilts for {} atoms", tilts.len(), weights.len()));
            }
            for &t in tilts {
                if (modulation * t).abs() >= 1.0 {
                    violation(out, "environment_law", format!("{ctx}: modulation*tilt = {} leaves the simplex", modulation * t));
                }
            }
        }
        EnvLaw::Uniform => {}
        EnvLaw::PiecewiseX { .. } => {
            violation(out, "environment_law", format!("{ctx}: nested piecewise laws are not supported"));
        }
    };
    match &env.law {
        EnvLaw::PiecewiseX { breaks, pieces } => {
            if breaks.len() != pieces.len()
                || breaks.windows(2).any(|p| p[0] >= p[1])
                || breaks.last().map(|&b| b < 1.0).unwrap_or(true)
            {
                violation(out, "environment_law", format!("piecewise breaks {breaks:?} must be increasing and end at >= 1"));
            }
            for (i, p) in pieces.iter().enumerate() {
                check_law(p, &format!("piece {i}"), out);
            }
        }
        other => check_law(other, "law", out),
    }
}

fn inside(env: &crate::EnvironmentSpec, w: &[f64]) -> bool {
    w.iter()
        .zip(env.lo.iter().zip(&env.hi))
        .all(|(v, (l, h))| *v >= *l && *v <= *h)
}

fn check_atoms(env: &crate::EnvironmentSpec, weights: &[f64], atoms: &[Vec<f64>], ctx: &str, out: &mut Vec<Violation>) {
    if weights.len() != atoms.len() || weights.is_empty() {
        violation(out, "environment_law", format!("{ctx}: {} weights for {} atoms", weights.len(), atoms.len()));
        return;
    }
    if weights.iter().any(|&p| p < 0.0) || (weights.iter().sum::<f64>() - 1.0).abs() > 1e-10 {
        violation(out, "environment_law", format!("{ctx}: weights {weights:?} are not a probability vector"));
    }
    for a in atoms {
        if a.len() != env.dim || !inside(env, a) {
            violation(out, "environment_support", format!("{ctx}: atom {a:?} outside box"));
        }
    }
}
