//! Dual (minus-one) norm of a weak-form residual.
//!
//! Against a dictionary `{f_b}` the residual is summarized by the pairings
//! `a_b = ⟨∂_t μ − 𝕃*μ, f_b⟩` and the Gram matrix
//! `M_{bc} = σ²∫ ∂_θ f_b ∂_θ f_c dμ`.  The squared dual norm restricted to
//! the span is `sup_c [aᵀc − ½ cᵀMc] = ½ aᵀM⁺a`, evaluated here both as the
//! quadratic supremum and as the Rayleigh quotient at the maximizer; the two
//! agree iff the maximizer is genuine, which guards the pseudo-inverse.

use ldp_numerics::linalg::sym_eigen;
use serde::{Deserialize, Serialize};

/// Relative eigenvalue cutoff below which Gram directions count as null.
pub const GRAM_PINV_CUTOFF: f64 = 1e-10;
/// Out-of-range tolerance (relative to ‖a‖) before the norm is declared +∞.
pub const RANGE_TOL: f64 = 1e-6;

/// A number that may instead be `+∞` for a stated reason, or carry a warning.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Flagged {
    /// Finite value, or `None` for `+∞`.
    pub value: Option<f64>,
    /// Reason the value is infinite, or a warning attached to a finite one.
    pub flag: Option<String>,
}

impl Default for Flagged {
    fn default() -> Self {
        Flagged::finite(0.0)
    }
}

impl Flagged {
    pub fn finite(value: f64) -> Self {
        Flagged { value: Some(value), flag: None }
    }

    pub fn infinite(reason: impl Into<String>) -> Self {
        Flagged { value: None, flag: Some(reason.into()) }
    }

    pub fn warned(value: f64, warning: impl Into<String>) -> Self {
        Flagged { value: Some(value), flag: Some(warning.into()) }
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_some()
    }

    /// The value, with `+∞` standing in for a flagged one.
    pub fn as_f64(&self) -> f64 {
        self.value.unwrap_or(f64::INFINITY)
    }

    /// Nonnegative rescaling, leaving any flag in place.
    pub fn times(&self, k: f64) -> Flagged {
        Flagged { value: self.value.map(|v| v * k), flag: self.flag.clone() }
    }

    /// Sum of two flagged values; infinite if either is, warnings joined.
    pub fn plus(&self, other: &Flagged) -> Flagged {
        let flag = match (&self.flag, &other.flag) {
            (None, None) => None,
            (Some(a), None) => Some(a.clone()),
            (None, Some(b)) => Some(b.clone()),
            (Some(a), Some(b)) if a == b => Some(a.clone()),
            (Some(a), Some(b)) => Some(format!("{a}; {b}")),
        };
        match (self.value, other.value) {
            (Some(a), Some(b)) => Flagged { value: Some(a + b), flag },
            _ => Flagged { value: None, flag },
        }
    }
}

/// Pairings and Gram matrix of one time slice against a test dictionary.
#[derive(Clone, Debug)]
pub struct ResidualCoeffs {
    /// `⟨∂_t μ − 𝕃*μ, f_b⟩` per dictionary element.
    pub a: Vec<f64>,
    /// `σ² ∫ ∂_θ f_b ∂_θ f_c dμ`, row-major symmetric.
    pub gram: Vec<f64>,
    pub dim: usize,
}

/// Squared dual norm `½ aᵀ M⁺ a`, or `+∞` when `a` sticks out of the range
/// of `M` (the residual is not absolutely continuous in the tested sense).
///
/// Panics if the quadratic-supremum and Rayleigh evaluations disagree beyond
/// `1e-9` — that would mean the spectral decomposition is unusable.
pub fn minus_one_norm_sq(rc: &ResidualCoeffs) -> Flagged {
    assert_eq!(rc.a.len(), rc.dim);
    assert_eq!(rc.gram.len(), rc.dim * rc.dim);
    let a_norm = rc.a.iter().map(|v| v * v).sum::<f64>().sqrt();
    if a_norm == 0.0 {
        return Flagged::finite(0.0);
    }
    let eig = sym_eigen(&rc.gram, rc.dim);
    if eig.range_residual(&rc.a, GRAM_PINV_CUTOFF) > RANGE_TOL * a_norm {
        return Flagged::infinite("residual pairing outside the range of the Gram matrix");
    }
    let c = eig.pinv_apply(&rc.a, GRAM_PINV_CUTOFF);
    let ac: f64 = rc.a.iter().zip(&c).map(|(x, y)| x * y).sum();
    let mut cmc = 0.0;
    for i in 0..rc.dim {
        let mut row = 0.0;
        for j in 0..rc.dim {
            row += rc.gram[i * rc.dim + j] * c[j];
        }
        cmc += c[i] * row;
    }
    let quadratic = ac - 0.5 * cmc;
    let rayleigh = if cmc > 0.0 { ac * ac / (2.0 * cmc) } else { 0.0 };
    let scale = 1.0f64.max(quadratic.abs()).max(rayleigh.abs());
    assert!(
        (quadratic - rayleigh).abs() <= 1e-9 * scale,
        "dual-norm evaluations disagree: {quadratic} vs {rayleigh}"
    );
    Flagged::finite(quadratic.max(0.0))
}
