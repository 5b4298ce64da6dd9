//! Initial spin laws `ν_x`: a point mass or Gaussian centered at a smooth
//! mean profile `g(x)`, constant or cosine-modulated in `x₁`.

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MeanProfile {
    Constant { value: f64 },
    /// `g(x) = offset + amplitude·cos(2π·frequency·x₁)`.
    Cosine { offset: f64, amplitude: f64, frequency: u32 },
}

impl MeanProfile {
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            MeanProfile::Constant { value } => *value,
            MeanProfile::Cosine { offset, amplitude, frequency } => {
                offset
                    + amplitude
                        * (std::f64::consts::TAU * *frequency as f64 * x.first().copied().unwrap_or(0.0)).cos()
            }
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ThetaLaw {
    PointMass,
    Gaussian { variance: f64 },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InitialSpec {
    pub profile: MeanProfile,
    pub law: ThetaLaw,
}

impl InitialSpec {
    pub fn gaussian(mean: f64, variance: f64) -> Self {
        Self { profile: MeanProfile::Constant { value: mean }, law: ThetaLaw::Gaussian { variance } }
    }

    pub fn point(mean: f64) -> Self {
        Self { profile: MeanProfile::Constant { value: mean }, law: ThetaLaw::PointMass }
    }

    pub fn mean_at(&self, x: &[f64]) -> f64 {
        self.profile.eval(x)
    }

    pub fn variance(&self) -> f64 {
        match self.law {
            ThetaLaw::PointMass => 0.0,
            ThetaLaw::Gaussian { variance } => variance,
        }
    }

    /// Draw `θ₀ ~ ν_x` from a caller-supplied standard normal.
    pub fn sample(&self, x: &[f64], normal: f64) -> f64 {
        self.mean_at(x) + self.variance().sqrt() * normal
    }

    /// Density of `ν_x` at `θ` (`None` for a point mass).
    pub fn density(&self, x: &[f64], theta: f64) -> Option<f64> {
        match self.law {
            ThetaLaw::PointMass => None,
            ThetaLaw::Gaussian { variance } => {
                let m = self.mean_at(x);
                let z = (theta - m) * (theta - m) / (2.0 * variance);
                Some((-z).exp() / (std::f64::consts::TAU * variance).sqrt())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cosine_profile() {
        let p = MeanProfile::Cosine { offset: 0.5, amplitude: 0.25, frequency: 2 };
        assert!((p.eval(&[0.0]) - 0.75).abs() < 1e-15);
        assert!((p.eval(&[0.25]) - 0.25).abs() < 1e-15); // cos(2π·2·¼) = cos(π) = −1
    }

    #[test]
    fn gaussian_density_normalizes() {
        let s = InitialSpec::gaussian(1.0, 0.3);
        let h = 0.01;
        let mass: f64 = (-1000..2000)
            .map(|i| s.density(&[0.0], i as f64 * h).unwrap() * h)
            .sum();
        assert!((mass - 1.0).abs() < 1e-8);
        assert!((s.sample(&[0.0], 2.0) - (1.0 + 0.3f64.sqrt() * 2.0)).abs() < 1e-15);
    }
}
