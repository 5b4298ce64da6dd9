//! Importance-sampling identity checks and exponential-moment diagnostics.
//!
//! The same expectation computed two ways must agree: directly under the
//! interacting dynamics, and as a weighted average under the non-interacting
//! reference with weights `e^{log_rn}`. Matched replica seeds couple the two
//! ensembles, so with a vanishing kernel the comparison is exact replica for
//! replica. The moment table estimates `E[e^{κθ_T²}]` under the reference and
//! flags κ values where a single sample dominates the sum — the empirical
//! signature of a divergent exponential moment.

use std::path::Path;

use ldp_model::ModelSpec;
use ldp_numerics::stats::{ksum_iter, variance};
use ldp_simulate::{replica_seed, simulate_interacting, simulate_reference, PathEnsemble};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::functional::log_rn_interacting;
use crate::GirsanovError;

/// Weighted averages whose effective sample size falls below this are flagged
/// as weight-degenerate.
pub const ESS_FLOOR: f64 = 10.0;

/// A κ row is flagged divergent when one pooled sample carries more than this
/// share of the whole sum.
pub const DIVERGENCE_SHARE: f64 = 0.05;

/// Bounded statistics of a path ensemble (boundedness by construction).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Statistic {
    /// `G ≡ 1`: checks the normalization of the weights.
    One,
    /// Mean spin at the terminal time, clipped to `[−bound, bound]`.
    MeanSpinClipped { bound: f64 },
}

impl Statistic {
    pub fn eval(&self, ens: &PathEnsemble) -> f64 {
        match self {
            Statistic::One => 1.0,
            Statistic::MeanSpinClipped { bound } => {
                let last = ens.slice(ens.num_times() - 1);
                let m = ksum_iter(last.iter().copied()) / last.len() as f64;
                m.clamp(-*bound, *bound)
            }
        }
    }
}

/// Both sides of the identity with their Monte Carlo errors.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IdentityReport {
    /// Plain mean under the interacting dynamics.
    pub lhs: f64,
    pub lhs_se: f64,
    /// Weight-times-statistic mean under the reference dynamics
    /// (unnormalized: the weights themselves carry the mass).
    pub rhs: f64,
    pub rhs_se: f64,
    /// `(Σw)²/Σw²` of the replica weights.
    pub ess: f64,
    /// Set when the effective sample size drops below [`ESS_FLOOR`].
    pub flag: Option<String>,
    pub replicas: u64,
}

impl IdentityReport {
    pub fn write_json(&self, path: &Path) -> Result<(), GirsanovError> {
        let f = std::fs::File::create(path)?;
        serde_json::to_writer_pretty(std::io::BufWriter::new(f), self)?;
        Ok(())
    }
}

pub(crate) fn ess(weights: &[f64]) -> f64 {
    let s = ksum_iter(weights.iter().copied());
    let s2 = ksum_iter(weights.iter().map(|w| w * w));
    if s2 == 0.0 {
        0.0
    } else {
        s * s / s2
    }
}

/// Compare `E[G]` under the interacting law with the weighted reference
/// average, replica seeds matched pairwise.
pub fn importance_identity_check(
    spec: &ModelSpec,
    statistic: &Statistic,
    steps: usize,
    replicas: u64,
    seed: u64,
) -> Result<IdentityReport, GirsanovError> {
    if replicas == 0 {
        return Err(GirsanovError::NoReplicas);
    }
    let direct: Vec<f64> = (0..replicas)
        .into_par_iter()
        .map(|r| {
            let ens = simulate_interacting(spec, steps, replica_seed(seed, r))?;
            Ok(statistic.eval(&ens))
        })
        .collect::<Result<_, GirsanovError>>()?;
    let weighted: Vec<(f64, f64)> = (0..replicas)
        .into_par_iter()
        .map(|r| {
            let mut ens = simulate_reference(spec, steps, replica_seed(seed, r))?;
            ens.spec.kernel = spec.kernel.clone();
            Ok((log_rn_interacting(&ens).exp(), statistic.eval(&ens)))
        })
        .collect::<Result<_, GirsanovError>>()?;

    let r = replicas as f64;
    let lhs = ksum_iter(direct.iter().copied()) / r;
    let lhs_se = (variance(&direct) / r).sqrt();
    let products: Vec<f64> = weighted.iter().map(|(w, g)| w * g).collect();
    let rhs = ksum_iter(products.iter().copied()) / r;
    let rhs_se = (variance(&products) / r).sqrt();
    let weights: Vec<f64> = weighted.iter().map(|(w, _)| *w).collect();
    let ess = ess(&weights);
    let flag =
        (ess < ESS_FLOOR).then(|| format!("effective sample size {ess:.1} below {ESS_FLOOR}"));
    Ok(IdentityReport { lhs, lhs_se, rhs, rhs_se, ess, flag, replicas })
}

/// One κ of the exponential-moment table.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct MomentRow {
    pub kappa: f64,
    /// Pooled Monte Carlo estimate of `E[e^{κθ_T²}]`.
    pub estimate: f64,
    pub stderr: f64,
    /// Largest single-sample share of the pooled sum.
    pub max_share: f64,
    /// `max_share > DIVERGENCE_SHARE`: the estimate is dominated by its
    /// extremes and the underlying moment is suspect.
    pub flagged: bool,
}

/// Moment rows plus the quadratic growth constant they are judged against:
/// κ below `c_Ψ/σ²`-type thresholds should sit comfortably unflagged.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MomentTable {
    pub rows: Vec<MomentRow>,
    pub c_psi: f64,
}

impl MomentTable {
    pub fn write_json(&self, path: &Path) -> Result<(), GirsanovError> {
        let f = std::fs::File::create(path)?;
        serde_json::to_writer_pretty(std::io::BufWriter::new(f), self)?;
        Ok(())
    }

    pub fn any_flagged(&self) -> bool {
        self.rows.iter().any(|r| r.flagged)
    }
}

/// Estimate `E[e^{κθ_T²}]` under the reference dynamics for each κ, pooling
/// the terminal spins of all sites across replicas.
pub fn moment_diagnostics(
    spec: &ModelSpec,
    kappas: &[f64],
    steps: usize,
    replicas: u64,
    seed: u64,
) -> Result<MomentTable, GirsanovError> {
    if replicas == 0 {
        return Err(GirsanovError::NoReplicas);
    }
    let terminal: Vec<Vec<f64>> = (0..replicas)
        .into_par_iter()
        .map(|r| {
            let ens = simulate_reference(spec, steps, replica_seed(seed, r))?;
            Ok(ens.slice(ens.num_times() - 1).to_vec())
        })
        .collect::<Result<_, GirsanovError>>()?;
    let pooled: Vec<f64> = terminal.into_iter().flatten().collect();
    let n = pooled.len() as f64;

    let rows = kappas
        .iter()
        .map(|&kappa| {
            let samples: Vec<f64> = pooled.iter().map(|&t| (kappa * t * t).exp()).collect();
            let total = ksum_iter(samples.iter().copied());
            let max = samples.iter().copied().fold(0.0f64, f64::max);
            let max_share = max / total;
            MomentRow {
                kappa,
                estimate: total / n,
                stderr: (variance(&samples) / n).sqrt(),
                max_share,
                flagged: max_share > DIVERGENCE_SHARE,
            }
        })
        .collect();
    Ok(MomentTable { rows, c_psi: spec.potential.c_psi() })
}
