//! Total rate of a grid flow: time-integrated dual norms plus initial entropy.
//!
//! Two routes that must agree: `rate_S` tests the full residual against a
//! mixed `(x, w, θ)` dictionary; `rate_S_TW` tests each `(x, w)` fiber with
//! θ-only functions and averages the fiberwise squared norms.  On a grid with
//! a single fiber the two are arithmetically identical.

use crate::entropy::initial_entropy;
use crate::norm::{minus_one_norm_sq, Flagged};
use crate::report::RateReport;
use crate::residual::Assembler;
use crate::{RateError, TestBasis};
use ldp_numerics::stats::ksum_iter;
use ldp_pde::GridDensityPath;
use rayon::prelude::*;

/// Per-cell mass drift beyond which the spatial marginal no longer counts
/// as Lebesgue and the rate is `+∞`.
const LEBESGUE_TOL: f64 = 1e-6;

/// Time integral of a curve known only at the interior times: trapezoid with
/// the endpoint values extended constantly to the boundary half-intervals.
pub(crate) fn integrate_curve(values: &[Flagged], dt: f64) -> Flagged {
    let mut flags: Vec<&str> = Vec::new();
    let mut infinite = false;
    for v in values {
        if let Some(f) = &v.flag {
            if !flags.contains(&f.as_str()) {
                flags.push(f);
            }
        }
        infinite |= !v.is_finite();
    }
    let flag = if flags.is_empty() { None } else { Some(flags.join("; ")) };
    if infinite {
        return Flagged { value: None, flag };
    }
    let sum = ksum_iter(values.iter().map(|v| v.as_f64()));
    let ends = values.first().map_or(0.0, |v| v.as_f64())
        + values.last().map_or(0.0, |v| v.as_f64());
    Flagged { value: Some(dt * sum + 0.5 * dt * ends), flag }
}

/// Largest second spin moment over the stored times.
fn sup_second_moment(flow: &GridDensityPath) -> f64 {
    (0..flow.num_times())
        .map(|j| {
            let (m, v) = flow.mean_var_at(j);
            v + m * m
        })
        .fold(0.0, f64::max)
}

fn lebesgue_flag(flow: &GridDensityPath) -> Option<Flagged> {
    (flow.max_mass_defect() > LEBESGUE_TOL).then(|| Flagged::infinite("x-marginal not Lebesgue"))
}

/// Which representation a norm curve belongs to.
pub(crate) enum Route {
    Mixed,
    Fiberwise,
    ViaH,
}

pub(crate) fn assemble_report(
    flow: &GridDensityPath,
    spec: &ldp_model::ModelSpec,
    norms: Vec<Flagged>,
    dt: f64,
    route: Route,
) -> Result<RateReport, RateError> {
    let integral = integrate_curve(&norms, dt);
    let entropy = initial_entropy(flow, spec)?;
    let mut s = integral.plus(&entropy.total);
    if let Some(leb) = lebesgue_flag(flow) {
        s = s.plus(&leb);
    }
    let times = flow.times[1..flow.num_times() - 1].to_vec();
    let mut report = RateReport {
        times,
        initial_entropy: entropy.total,
        entropy_conditional_term: entropy.conditional,
        entropy_environment_term: entropy.environment,
        sup_second_moment: sup_second_moment(flow),
        ..Default::default()
    };
    match route {
        Route::Mixed => {
            report.norm_sq = Some(norms);
            report.time_integral = Some(integral);
            report.s = Some(s);
        }
        Route::Fiberwise => {
            report.norm_sq_txw = Some(norms);
            report.time_integral_txw = Some(integral);
            report.s_txw = Some(s);
        }
        Route::ViaH => {
            report.norm_sq_h = Some(norms);
            report.time_integral_h = Some(integral);
            report.via_h = Some(s);
        }
    }
    report.update_deltas();
    Ok(report)
}

/// Rate of `flow` under `spec`: `∫ ‖∂_t μ − 𝕃*μ‖²_{-1,μ} dt` tested against
/// the mixed dictionary, plus the entropy of the initial slice.
#[allow(non_snake_case)]
pub fn rate_S(
    flow: &GridDensityPath,
    spec: &ldp_model::ModelSpec,
    basis: &TestBasis,
) -> Result<RateReport, RateError> {
    let asm = Assembler::new(spec, flow, basis)?;
    let norms: Vec<Flagged> = (1..=asm.max_interior())
        .into_par_iter()
        .map(|j| asm.coeffs_at(j).map(|rc| minus_one_norm_sq(&rc)))
        .collect::<Result<_, _>>()?;
    assemble_report(flow, spec, norms, asm.dt, Route::Mixed)
}

/// Fiberwise variant: θ-only dual norms per `(x, w)` fiber, averaged with
/// the cell–quadrature weights, plus the same initial entropy.
#[allow(non_snake_case)]
pub fn rate_S_TW(
    flow: &GridDensityPath,
    spec: &ldp_model::ModelSpec,
    basis: &TestBasis,
) -> Result<RateReport, RateError> {
    if !basis.is_theta_only() {
        return Err(RateError::NotThetaOnly);
    }
    let asm = Assembler::new(spec, flow, basis)?;
    let weights = asm.weights().to_vec();
    let norms: Vec<Flagged> = (1..=asm.max_interior())
        .into_par_iter()
        .map(|j| {
            let mut slice_val = Flagged::finite(0.0);
            for (f, w_f) in weights.iter().enumerate() {
                let rc = asm.fiber_coeffs_at(j, f)?;
                slice_val = slice_val.plus(&minus_one_norm_sq(&rc).times(*w_f));
            }
            Ok::<_, RateError>(slice_val)
        })
        .collect::<Result<_, _>>()?;
    assemble_report(flow, spec, norms, asm.dt, Route::Fiberwise)
}
