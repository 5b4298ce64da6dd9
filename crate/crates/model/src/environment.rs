//! Environment marks: a compact box `W ⊂ ℝ^m` and a position-dependent family
//! of laws `ζ_x` on it (constant, piecewise-constant in `x₁`, or continuously
//! modulated discrete weights). Each law exposes exact (or Gauss–Legendre)
//! quadrature nodes and inverse-CDF sampling from caller-supplied uniforms.

use ldp_numerics::quad::gauss_legendre_on;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EnvLaw {
    /// Point mass at `w`.
    Point { w: Vec<f64> },
    /// Finitely many atoms with fixed weights.
    Discrete { weights: Vec<f64>, atoms: Vec<Vec<f64>> },
    /// Product uniform over the box.
    Uniform,
    /// Different base law on each cell `[breaks[i−1], breaks[i])` of `x₁`
    /// (breaks strictly increasing, ending at 1).
    PiecewiseX { breaks: Vec<f64>, pieces: Vec<EnvLaw> },
    /// Discrete atoms whose weights are continuously modulated in `x₁`:
    /// weight_i(x) ∝ weights[i]·(1 + modulation·tilts[i]·cos(2π·frequency·x₁)).
    CosineTilt {
        weights: Vec<f64>,
        atoms: Vec<Vec<f64>>,
        tilts: Vec<f64>,
        modulation: f64,
        frequency: u32,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EnvironmentSpec {
    /// Mark dimension m ≥ 1 (the first coordinate couples into the potential).
    pub dim: usize,
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub law: EnvLaw,
}

impl EnvironmentSpec {
    /// Environment that is identically `w` (still a valid one-point box).
    pub fn frozen(w: Vec<f64>) -> Self {
        let dim = w.len();
        Self {
            dim,
            lo: w.iter().map(|v| v - 1.0).collect(),
            hi: w.iter().map(|v| v + 1.0).collect(),
            law: EnvLaw::Point { w },
        }
    }

    fn resolve<'a>(law: &'a EnvLaw, x: &[f64]) -> (&'a EnvLaw, f64) {
        match law {
            EnvLaw::PiecewiseX { breaks, pieces } => {
                let x1 = x.first().copied().unwrap_or(0.0);
                let mut idx = pieces.len() - 1;
                for (i, &b) in breaks.iter().enumerate() {
                    if x1 < b {
                        idx = i;
                        break;
                    }
                }
                (&pieces[idx], x.first().copied().unwrap_or(0.0))
            }
            other => (other, x.first().copied().unwrap_or(0.0)),
        }
    }

    fn tilted_weights(weights: &[f64], tilts: &[f64], modulation: f64, frequency: u32, x1: f64) -> Vec<f64> {
        let c = (std::f64::consts::TAU * frequency as f64 * x1).cos();
        let raw: Vec<f64> = weights
            .iter()
            .zip(tilts)
            .map(|(&p, &t)| p * (1.0 + modulation * t * c))
            .collect();
        let z: f64 = raw.iter().sum();
        raw.into_iter().map(|p| p / z).collect()
    }

    /// Quadrature representation of `ζ_x`: nodes with weights summing to one.
    /// Exact for point/discrete laws; `order` Gauss–Legendre nodes per
    /// coordinate for the uniform law.
    pub fn quadrature(&self, x: &[f64], order: usize) -> (Vec<Vec<f64>>, Vec<f64>) {
        let (law, x1) = Self::resolve(&self.law, x);
        match law {
            EnvLaw::Point { w } => (vec![w.clone()], vec![1.0]),
            EnvLaw::Discrete { weights, atoms } => (atoms.clone(), weights.clone()),
            EnvLaw::CosineTilt { weights, atoms, tilts, modulation, frequency } => (
                atoms.clone(),
                Self::tilted_weights(weights, tilts, *modulation, *frequency, x1),
            ),
            EnvLaw::Uniform => {
                let mut nodes: Vec<Vec<f64>> = vec![Vec::new()];
                let mut weights: Vec<f64> = vec![1.0];
                for c in 0..self.dim {
                    let (xs, ws) = gauss_legendre_on::<f64>(order, self.lo[c], self.hi[c]);
                    let density = 1.0 / (self.hi[c] - self.lo[c]);
                    let mut next_nodes = Vec::with_capacity(nodes.len() * order);
                    let mut next_weights = Vec::with_capacity(nodes.len() * order);
                    for (node, wgt) in nodes.iter().zip(&weights) {
                        for (xi, wi) in xs.iter().zip(&ws) {
                            let mut n = node.clone();
                            n.push(*xi);
                            next_nodes.push(n);
                            next_weights.push(wgt * wi * density);
                        }
                    }
                    nodes = next_nodes;
                    weights = next_weights;
                }
                (nodes, weights)
            }
            EnvLaw::PiecewiseX { .. } => unreachable!("resolved above"),
        }
    }

    /// Sample a mark at position `x` from caller-supplied uniform draws
    /// (consumed in a fixed coordinate order, so keyed callers stay
    /// deterministic).
    pub fn sample(&self, x: &[f64], mut unif: impl FnMut() -> f64) -> Vec<f64> {
        let (law, x1) = Self::resolve(&self.law, x);
        match law {
            EnvLaw::Point { w } => w.clone(),
            EnvLaw::Discrete { weights, atoms } => {
                let u = unif();
                Self::pick(weights, atoms, u)
            }
            EnvLaw::CosineTilt { weights, atoms, tilts, modulation, frequency } => {
                let w = Self::tilted_weights(weights, tilts, *modulation, *frequency, x1);
                let u = unif();
                Self::pick(&w, atoms, u)
            }
            EnvLaw::Uniform => (0..self.dim)
                .map(|c| self.lo[c] + (self.hi[c] - self.lo[c]) * unif())
                .collect(),
            EnvLaw::PiecewiseX { .. } => unreachable!("resolved above"),
        }
    }

    fn pick(weights: &[f64], atoms: &[Vec<f64>], u: f64) -> Vec<f64> {
        let mut acc = 0.0;
        for (p, a) in weights.iter().zip(atoms) {
            acc += p;
            if u <= acc {
                return a.clone();
            }
        }
        atoms.last().expect("discrete law needs atoms").clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn symmetric_pair() -> EnvironmentSpec {
        EnvironmentSpec {
            dim: 1,
            lo: vec![-1.0],
            hi: vec![1.0],
            law: EnvLaw::Discrete { weights: vec![0.5, 0.5], atoms: vec![vec![-0.5], vec![0.5]] },
        }
    }

    #[test]
    fn quadrature_weights_sum_to_one() {
        let d = symmetric_pair();
        let (nodes, weights) = d.quadrature(&[0.3], 4);
        assert_eq!(nodes.len(), 2);
        assert!((weights.iter().sum::<f64>() - 1.0).abs() < 1e-15);

        let u = EnvironmentSpec { dim: 2, lo: vec![0.0, -1.0], hi: vec![1.0, 1.0], law: EnvLaw::Uniform };
        let (nodes, weights) = u.quadrature(&[0.0], 3);
        assert_eq!(nodes.len(), 9);
        assert!((weights.iter().sum::<f64>() - 1.0).abs() < 1e-13);
        // second moment of uniform[0,1] via the nodes: 1/3
        let m2: f64 = nodes.iter().zip(&weights).map(|(n, w)| n[0] * n[0] * w).sum();
        assert!((m2 - 1.0 / 3.0).abs() < 1e-13);
    }

    #[test]
    fn piecewise_switches_at_breaks() {
        let env = EnvironmentSpec {
            dim: 1,
            lo: vec![-1.0],
            hi: vec![1.0],
            law: EnvLaw::PiecewiseX {
                breaks: vec![0.5, 1.0],
                pieces: vec![EnvLaw::Point { w: vec![-1.0] }, EnvLaw::Point { w: vec![1.0] }],
            },
        };
        assert_eq!(env.quadrature(&[0.2], 1).0[0][0], -1.0);
        assert_eq!(env.quadrature(&[0.7], 1).0[0][0], 1.0);
    }

    #[test]
    fn cosine_tilt_normalizes_and_modulates() {
        let env = EnvironmentSpec {
            dim: 1,
            lo: vec![-1.0],
            hi: vec![1.0],
            law: EnvLaw::CosineTilt {
                weights: vec![0.5, 0.5],
                atoms: vec![vec![-0.5], vec![0.5]],
                tilts: vec![1.0, -1.0],
                modulation: 0.4,
                frequency: 1,
            },
        };
        let (_, w0) = env.quadrature(&[0.0], 1); // cos = 1 → tilt fully on
        assert!((w0[0] - 0.7).abs() < 1e-15 && (w0[1] - 0.3).abs() < 1e-15);
        let (_, wq) = env.quadrature(&[0.25], 1); // cos = 0 → untilted
        assert!((wq[0] - 0.5).abs() < 1e-12);
        assert!((w0.iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn sampling_matches_weights() {
        let d = symmetric_pair();
        let rng = ldp_numerics::KeyedRng::new(5);
        let mut plus = 0usize;
        for i in 0..20_000u64 {
            let mut draw = 0u64;
            let w = d.sample(&[0.0], || {
                draw += 1;
                rng.uniform([i, draw])
            });
            if w[0] > 0.0 {
                plus += 1;
            }
        }
        let frac = plus as f64 / 20_000.0;
        assert!((frac - 0.5).abs() < 0.02, "fraction {frac}");
    }
}
