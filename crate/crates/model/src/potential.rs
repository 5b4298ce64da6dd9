//! Single-spin potential `Ψ(θ, w) = Ψ̄(θ) + w₁θ`, with `Ψ̄` a polynomial of
//! even degree ≥ 2 and positive leading coefficient. The quadratic growth
//! constant `c_Ψ = liminf Ψ̄(θ)/θ²` is the leading coefficient at degree two
//! and `+∞` above.

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PotentialSpec {
    /// Coefficients of `Ψ̄`, low order first: `Ψ̄(θ) = Σ_i coeffs[i] θ^i`.
    pub coeffs: Vec<f64>,
}

impl PotentialSpec {
    /// Panics unless the polynomial has even degree ≥ 2 with positive leading
    /// coefficient (the shape `validate` also re-checks on deserialized specs).
    pub fn new(coeffs: Vec<f64>) -> Self {
        let s = Self { coeffs };
        assert!(s.well_formed(), "potential must have even degree >= 2 with positive leading coefficient");
        s
    }

    /// Harmonic well `Ψ̄ = θ²/2`.
    pub fn harmonic() -> Self {
        Self::new(vec![0.0, 0.0, 0.5])
    }

    pub fn well_formed(&self) -> bool {
        let deg = self.degree();
        deg >= 2 && deg % 2 == 0 && self.coeffs[deg] > 0.0
    }

    /// Degree after stripping trailing zero coefficients.
    pub fn degree(&self) -> usize {
        let mut d = self.coeffs.len().saturating_sub(1);
        while d > 0 && self.coeffs[d] == 0.0 {
            d -= 1;
        }
        d
    }

    /// `Ψ̄(θ)` by Horner evaluation.
    pub fn bar_value(&self, theta: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * theta + c)
    }

    /// `Ψ̄′(θ)`.
    pub fn bar_deriv(&self, theta: f64) -> f64 {
        let mut acc = 0.0;
        for i in (1..self.coeffs.len()).rev() {
            acc = acc * theta + i as f64 * self.coeffs[i];
        }
        acc
    }

    /// `Ψ̄″(θ)`.
    pub fn bar_second_deriv(&self, theta: f64) -> f64 {
        let mut acc = 0.0;
        for i in (2..self.coeffs.len()).rev() {
            acc = acc * theta + (i * (i - 1)) as f64 * self.coeffs[i];
        }
        acc
    }

    /// Full potential `Ψ(θ, w) = Ψ̄(θ) + w₁θ`.
    pub fn psi(&self, theta: f64, w: &[f64]) -> f64 {
        self.bar_value(theta) + w.first().copied().unwrap_or(0.0) * theta
    }

    /// `∂_θΨ(θ, w) = Ψ̄′(θ) + w₁`.
    pub fn dpsi(&self, theta: f64, w: &[f64]) -> f64 {
        self.bar_deriv(theta) + w.first().copied().unwrap_or(0.0)
    }

    /// `∂²_θΨ(θ, w) = Ψ̄″(θ)`.
    pub fn d2psi(&self, theta: f64) -> f64 {
        self.bar_second_deriv(theta)
    }

    /// Quadratic growth constant `c_Ψ`.
    pub fn c_psi(&self) -> f64 {
        let deg = self.degree();
        if deg == 2 {
            self.coeffs[2]
        } else {
            f64::INFINITY
        }
    }
}
