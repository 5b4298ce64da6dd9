//! Serializable summary of a rate-function evaluation.

use crate::norm::Flagged;
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Everything a rate evaluation produced: per-time norm curves, their time
/// integrals, the entropy of the initial slice, and the assembled totals for
/// whichever representations were run.  Missing pieces stay `None` so reports
/// from different representations can be merged with [`RateReport::absorb`].
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct RateReport {
    /// Interior evaluation times of the norm curves.
    pub times: Vec<f64>,
    /// Squared dual norm per interior time, mixed-dictionary route.
    pub norm_sq: Option<Vec<Flagged>>,
    /// Squared dual norm per interior time, fiberwise θ-only route.
    pub norm_sq_txw: Option<Vec<Flagged>>,
    /// Control cost density per interior time, recovered-h route.
    pub norm_sq_h: Option<Vec<Flagged>>,
    pub time_integral: Option<Flagged>,
    pub time_integral_txw: Option<Flagged>,
    pub time_integral_h: Option<Flagged>,
    /// Entropy of the initial slice against the product reference.
    pub initial_entropy: Flagged,
    pub entropy_conditional_term: Flagged,
    pub entropy_environment_term: Flagged,
    /// Largest second spin moment over stored times (truncation diagnostic).
    pub sup_second_moment: f64,
    /// Total rate, mixed-dictionary route.
    pub s: Option<Flagged>,
    /// Total rate, fiberwise route.
    pub s_txw: Option<Flagged>,
    /// Total rate, recovered-h route.
    pub via_h: Option<Flagged>,
    /// Relative gap `|s − s_txw| / max(|s|, ε)` when both are finite.
    pub delta_s_txw: Option<f64>,
    /// Relative gap `|s − via_h| / max(|s|, ε)` when both are finite.
    pub delta_s_h: Option<f64>,
}

fn rel_gap(a: &Flagged, b: &Flagged) -> Option<f64> {
    match (a.value, b.value) {
        (Some(x), Some(y)) => Some((x - y).abs() / x.abs().max(1e-12)),
        _ => None,
    }
}

impl RateReport {
    /// Copy any field the other report filled in that this one left empty,
    /// then refresh the cross-representation gaps.
    pub fn absorb(&mut self, other: &RateReport) {
        if self.times.is_empty() {
            self.times = other.times.clone();
        }
        macro_rules! take {
            ($field:ident) => {
                if self.$field.is_none() {
                    self.$field = other.$field.clone();
                }
            };
        }
        take!(norm_sq);
        take!(norm_sq_txw);
        take!(norm_sq_h);
        take!(time_integral);
        take!(time_integral_txw);
        take!(time_integral_h);
        take!(s);
        take!(s_txw);
        take!(via_h);
        self.sup_second_moment = self.sup_second_moment.max(other.sup_second_moment);
        self.update_deltas();
    }

    pub fn update_deltas(&mut self) {
        self.delta_s_txw = match (&self.s, &self.s_txw) {
            (Some(a), Some(b)) => rel_gap(a, b),
            _ => None,
        };
        self.delta_s_h = match (&self.s, &self.via_h) {
            (Some(a), Some(b)) => rel_gap(a, b),
            _ => None,
        };
    }

    pub fn write_json(&self, path: impl AsRef<Path>) -> Result<(), crate::RateError> {
        let file = std::fs::File::create(path)?;
        serde_json::to_writer_pretty(std::io::BufWriter::new(file), self)?;
        Ok(())
    }

    /// Norm curves as CSV: one row per interior time, `inf` for flagged
    /// entries, empty cells for curves that were not computed.
    pub fn write_norm_csv(&self, path: impl AsRef<Path>) -> Result<(), crate::RateError> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["time", "norm_sq", "norm_sq_txw", "norm_sq_h"])?;
        let cell = |curve: &Option<Vec<Flagged>>, k: usize| -> String {
            match curve {
                Some(c) => match c[k].value {
                    Some(v) => format!("{v:.17e}"),
                    None => "inf".to_string(),
                },
                None => String::new(),
            }
        };
        for (k, t) in self.times.iter().enumerate() {
            w.write_record(&[
                format!("{t:.17e}"),
                cell(&self.norm_sq, k),
                cell(&self.norm_sq_txw, k),
                cell(&self.norm_sq_h, k),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}
