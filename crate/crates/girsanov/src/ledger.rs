//! Replica-batch bookkeeping of the change-of-measure decomposition.
//!
//! Each reference replica contributes one row holding every piece of its log
//! Radon–Nikodym weight — `F`, the interaction energies at the two endpoints,
//! and the Itô correction — so the weight can be reconstructed exactly from
//! the parts and audited offline.

use std::path::Path;

use ldp_model::ModelSpec;
use ldp_numerics::stats::ksum_iter;
use ldp_simulate::{replica_seed, simulate_reference};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::functional::{interaction_energy, F_functional};
use crate::GirsanovError;

/// One replica's decomposition; `log_rn = sites·f_value − ito_correction`
/// holds exactly by construction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LedgerRow {
    pub replica: u64,
    /// `F(L^N)` on this replica's reference paths.
    pub f_value: f64,
    /// Interaction energy `B^N` at time 0.
    pub b_initial: f64,
    /// Interaction energy `B^N` at time T.
    pub b_terminal: f64,
    /// `½·T·N^{−d}·Σ_i J(0, wⁱ, wⁱ)`.
    pub ito_correction: f64,
    /// Log Radon–Nikodym weight of the interacting law.
    pub log_rn: f64,
}

/// Rows for a batch of reference replicas, in replica order.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct GirsanovLedger {
    pub rows: Vec<LedgerRow>,
}

impl GirsanovLedger {
    /// Simulate `replicas` independent reference batches and decompose each
    /// weight. Replicas run in parallel; the row order is deterministic.
    pub fn collect(
        spec: &ModelSpec,
        steps: usize,
        replicas: u64,
        seed: u64,
    ) -> Result<Self, GirsanovError> {
        if replicas == 0 {
            return Err(GirsanovError::NoReplicas);
        }
        let rows = (0..replicas)
            .into_par_iter()
            .map(|r| {
                let mut ens = simulate_reference(spec, steps, replica_seed(seed, r))?;
                // paths stay the reference paths; F is a functional of the
                // interacting kernel, so restore it before evaluating
                ens.spec.kernel = spec.kernel.clone();
                let parts = F_functional(&ens);
                let lattice = &ens.spec.lattice;
                let b_initial =
                    interaction_energy(lattice, &ens.spec.kernel, &ens.env, ens.slice(0));
                let b_terminal = interaction_energy(
                    lattice,
                    &ens.spec.kernel,
                    &ens.env,
                    ens.slice(ens.num_times() - 1),
                );
                let sites = ens.sites();
                let zero = vec![0.0; lattice.d];
                let diag = ksum_iter(
                    (0..sites).map(|i| ens.spec.kernel.evaluate(&zero, ens.env.w(i), ens.env.w(i))),
                );
                let ito_correction = 0.5 * ens.spec.horizon * diag / sites as f64;
                Ok(LedgerRow {
                    replica: r,
                    f_value: parts.total,
                    b_initial,
                    b_terminal,
                    ito_correction,
                    log_rn: sites as f64 * parts.total - ito_correction,
                })
            })
            .collect::<Result<Vec<_>, GirsanovError>>()?;
        Ok(Self { rows })
    }

    /// The log weights, in replica order.
    pub fn log_weights(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.log_rn).collect()
    }

    /// Write `replica, F, correction, weight` rows (weight = e^{log_rn}).
    pub fn write_csv(&self, path: &Path) -> Result<(), GirsanovError> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["replica", "F", "correction", "weight"])?;
        for row in &self.rows {
            w.serialize((row.replica, row.f_value, row.ito_correction, row.log_rn.exp()))?;
        }
        w.flush()?;
        Ok(())
    }
}
