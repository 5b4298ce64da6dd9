//! Entropy of an empirical triple law and its certified lower bounds.
//!
//! The initial data of the particle system lives on a finite grid of
//! `(x, w, y)` triples: site position, environment value, initial spin bin.
//! The rate of observing an empirical law `Γ` against the product reference
//! `R = dx ⊗ ζ ⊗ ν` is the relative entropy `H(Γ‖R)`, computed exactly and
//! split into its environment and conditional layers.  Alongside, a growing
//! dictionary of bounded test functions produces variational lower bounds
//! `⟨Γ, f⟩ − ∫ log⟨R(·|x), e^f⟩ dx` whose running maximum increases towards
//! the exact value — the bounds are certificates, not approximations.

use crate::norm::Flagged;
use crate::RateError;
use ldp_numerics::logspace::log_sum_exp;
use ldp_numerics::stats::ksum_iter;

/// Clip for log-likelihood-ratio test functions, keeping them bounded.
const LLR_CLIP: f64 = 40.0;

/// Nonnegative masses on a finite `(x, w, y)` grid, stored `[x][w][y]`.
#[derive(Clone, Debug)]
pub struct MassTable {
    pub nx: usize,
    pub nw: usize,
    pub ny: usize,
    pub mass: Vec<f64>,
}

impl MassTable {
    pub fn new(nx: usize, nw: usize, ny: usize, mass: Vec<f64>) -> Result<Self, RateError> {
        if mass.len() != nx * nw * ny {
            return Err(RateError::Mismatch(format!(
                "{} masses on a {nx}×{nw}×{ny} grid",
                mass.len()
            )));
        }
        if mass.iter().any(|&m| !(m >= 0.0)) {
            return Err(RateError::Mismatch("masses must be nonnegative".into()));
        }
        Ok(Self { nx, nw, ny, mass })
    }

    pub fn get(&self, i: usize, q: usize, y: usize) -> f64 {
        self.mass[(i * self.nw + q) * self.ny + y]
    }

    pub fn total(&self) -> f64 {
        ksum_iter(self.mass.iter().copied())
    }

    /// Mass of one space cell.
    fn x_mass(&self, i: usize) -> f64 {
        let stride = self.nw * self.ny;
        ksum_iter(self.mass[i * stride..(i + 1) * stride].iter().copied())
    }
}

/// Exact entropy, its layers, and the dictionary lower bounds.
#[derive(Clone, Debug)]
pub struct SanovReport {
    /// `H(Γ‖R)` over the joint grid.
    pub exact: Flagged,
    /// Spin layer: expected entropy of `Γ(y|x,w)` against `R(y|x,w)`.
    pub conditional: Flagged,
    /// Environment layer: entropy of the `(x, w)`-marginals.
    pub environment: Flagged,
    /// Running maxima of the dictionary bounds, nondecreasing by
    /// construction, each one `≤ exact`.
    pub lower_bounds: Vec<f64>,
}

fn kl_term(p: f64, r: f64, violated: &mut bool) -> f64 {
    if p <= 0.0 {
        0.0
    } else if r <= 0.0 {
        *violated = true;
        0.0
    } else {
        p * (p / r).ln()
    }
}

/// Entropy of `gamma` against `reference`, with `family_size` dictionary
/// bounds.  Both tables must be probability masses; the reference must have
/// a uniform space marginal, and `gamma` is flagged if its own does not.
pub fn sanov_rate(
    gamma: &MassTable,
    reference: &MassTable,
    family_size: usize,
) -> Result<SanovReport, RateError> {
    if (gamma.nx, gamma.nw, gamma.ny) != (reference.nx, reference.nw, reference.ny) {
        return Err(RateError::Mismatch(format!(
            "law on {}×{}×{} against reference on {}×{}×{}",
            gamma.nx, gamma.nw, gamma.ny, reference.nx, reference.nw, reference.ny
        )));
    }
    let gt = gamma.total();
    if (gt - 1.0).abs() > 1e-6 {
        return Err(RateError::Unnormalized { which: "empirical law".into(), mass: gt });
    }
    let rt = reference.total();
    if (rt - 1.0).abs() > 1e-6 {
        return Err(RateError::Unnormalized { which: "reference law".into(), mass: rt });
    }
    let nx = gamma.nx;
    let inv_nx = 1.0 / nx as f64;
    for i in 0..nx {
        if (reference.x_mass(i) - inv_nx).abs() > 1e-6 {
            return Err(RateError::Mismatch(
                "reference space marginal is not uniform".into(),
            ));
        }
    }
    let lebesgue = (0..nx).any(|i| (gamma.x_mass(i) - inv_nx).abs() > 1e-6);

    // exact value and its two layers
    let (nw, ny) = (gamma.nw, gamma.ny);
    let mut joint_violated = false;
    let mut env_violated = false;
    let mut joint = 0.0;
    let mut environment = 0.0;
    let mut conditional = 0.0;
    for i in 0..nx {
        for q in 0..nw {
            let g_marg = ksum_iter((0..ny).map(|y| gamma.get(i, q, y)));
            let r_marg = ksum_iter((0..ny).map(|y| reference.get(i, q, y)));
            environment += kl_term(g_marg, r_marg, &mut env_violated);
            for y in 0..ny {
                joint += kl_term(gamma.get(i, q, y), reference.get(i, q, y), &mut joint_violated);
                if g_marg > 0.0 && r_marg > 0.0 {
                    conditional += g_marg
                        * kl_term(
                            gamma.get(i, q, y) / g_marg,
                            reference.get(i, q, y) / r_marg,
                            &mut joint_violated,
                        );
                }
            }
        }
    }
    let wrap = |v: f64, violated: bool| {
        if lebesgue {
            Flagged::infinite("x-marginal not Lebesgue")
        } else if violated {
            Flagged::infinite("mass outside the support of the reference")
        } else {
            Flagged::finite(v)
        }
    };

    // dictionary of bounded test functions, in a fixed order
    let stride = nw * ny;
    let llr: Vec<f64> = (0..gamma.mass.len())
        .map(|k| {
            let g = gamma.mass[k];
            let r = reference.mass[k];
            if g <= 0.0 {
                -LLR_CLIP
            } else if r <= 0.0 {
                LLR_CLIP
            } else {
                (g / r).ln().clamp(-LLR_CLIP, LLR_CLIP)
            }
        })
        .collect();
    let value = |f: &dyn Fn(usize, usize, usize) -> f64| -> f64 {
        let pairing = ksum_iter(
            (0..gamma.mass.len())
                .map(|k| gamma.mass[k] * f(k / stride, (k / ny) % nw, k % ny)),
        );
        let log_terms = ksum_iter((0..nx).map(|i| {
            let logs: Vec<f64> = (0..stride)
                .map(|s| {
                    let r = reference.mass[i * stride + s];
                    let fv = f(i, s / ny, s % ny);
                    if r <= 0.0 {
                        f64::NEG_INFINITY
                    } else {
                        (nx as f64 * r).ln() + fv
                    }
                })
                .collect();
            log_sum_exp(&logs)
        }));
        pairing - inv_nx * log_terms
    };

    let mut lower_bounds = Vec::with_capacity(family_size);
    let mut best = f64::NEG_INFINITY;
    let mut member = 0usize;
    let rem = family_size.saturating_sub(1 + ny + nw);
    while lower_bounds.len() < family_size {
        let v = if member == 0 {
            value(&|_, _, _| 0.0)
        } else if member < 1 + ny {
            let y0 = member - 1;
            value(&move |_, _, y| if y == y0 { 1.0 } else { 0.0 })
        } else if member < 1 + ny + nw {
            let q0 = member - 1 - ny;
            value(&move |_, q, _| if q == q0 { 1.0 } else { 0.0 })
        } else {
            let j = member - ny - nw; // 1..=rem, ending at the full ratio
            let c = j as f64 / rem as f64;
            let llr = &llr;
            value(&move |i, q, y| c * llr[(i * nw + q) * ny + y])
        };
        best = best.max(v);
        lower_bounds.push(best);
        member += 1;
    }

    Ok(SanovReport {
        exact: wrap(joint, joint_violated),
        conditional: wrap(conditional, joint_violated),
        environment: wrap(environment, env_violated),
        lower_bounds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bernoulli_pair(p: f64, q: f64) -> (MassTable, MassTable) {
        let gamma = MassTable::new(1, 1, 2, vec![1.0 - q, q]).unwrap();
        let reference = MassTable::new(1, 1, 2, vec![1.0 - p, p]).unwrap();
        (gamma, reference)
    }

    #[test]
    fn matching_laws_have_zero_rate_and_zero_bounds() {
        let r = MassTable::new(2, 2, 2, vec![0.125; 8]).unwrap();
        let rep = sanov_rate(&r, &r, 8).unwrap();
        assert_eq!(rep.exact.as_f64(), 0.0);
        assert_eq!(rep.conditional.as_f64(), 0.0);
        assert_eq!(rep.environment.as_f64(), 0.0);
        for w in rep.lower_bounds.windows(2) {
            assert!(w[1] >= w[0]);
        }
        assert!(rep.lower_bounds.iter().all(|&b| b.abs() <= 1e-12));
    }

    #[test]
    fn bernoulli_flip_matches_the_closed_form() {
        let (gamma, reference) = bernoulli_pair(0.5, 0.2);
        let rep = sanov_rate(&gamma, &reference, 16).unwrap();
        let exact = 0.2f64 * (0.2f64 / 0.5).ln() + 0.8 * (0.8f64 / 0.5).ln();
        assert!((rep.exact.as_f64() - exact).abs() < 1e-12);
        // single environment atom: everything sits in the conditional layer
        assert!(rep.environment.as_f64().abs() < 1e-15);
        assert!((rep.conditional.as_f64() - exact).abs() < 1e-12);
        for w in rep.lower_bounds.windows(2) {
            assert!(w[1] >= w[0]);
        }
        for &b in &rep.lower_bounds {
            assert!(b <= exact + 1e-9);
        }
        let last = *rep.lower_bounds.last().unwrap();
        assert!(last >= exact - 1e-3, "final bound {last} vs exact {exact}");
    }

    #[test]
    fn layers_add_up_with_a_nontrivial_environment() {
        // Γ: product of tilted env (0.3, 0.7) and y-laws depending on w
        let g = vec![
            // x = 0
            0.3 * 0.8, 0.3 * 0.2, 0.7 * 0.4, 0.7 * 0.6,
            // x = 1
            0.3 * 0.5, 0.3 * 0.5, 0.7 * 0.9, 0.7 * 0.1,
        ];
        let g: Vec<f64> = g.into_iter().map(|v| v / 2.0).collect();
        let r = vec![0.5 * 0.5; 8].into_iter().map(|v| v / 2.0).collect();
        let gamma = MassTable::new(2, 2, 2, g).unwrap();
        let reference = MassTable::new(2, 2, 2, r).unwrap();
        let rep = sanov_rate(&gamma, &reference, 12).unwrap();
        let sum = rep.conditional.as_f64() + rep.environment.as_f64();
        assert!((rep.exact.as_f64() - sum).abs() < 1e-12);
        assert!(rep.environment.as_f64() > 0.05);
        for &b in &rep.lower_bounds {
            assert!(b <= rep.exact.as_f64() + 1e-9);
        }
        let last = *rep.lower_bounds.last().unwrap();
        assert!(last >= rep.exact.as_f64() - 1e-3);
    }

    #[test]
    fn non_uniform_space_marginal_is_flagged() {
        let g = MassTable::new(2, 1, 2, vec![0.4, 0.3, 0.2, 0.1]).unwrap();
        let r = MassTable::new(2, 1, 2, vec![0.25; 4]).unwrap();
        let rep = sanov_rate(&g, &r, 4).unwrap();
        assert!(!rep.exact.is_finite());
        assert!(rep.exact.flag.as_deref().unwrap().contains("Lebesgue"));
    }

    #[test]
    fn support_violation_is_infinite_but_bounds_stay_certified() {
        let gamma = MassTable::new(1, 1, 3, vec![0.5, 0.5, 0.0]).unwrap();
        let reference = MassTable::new(1, 1, 3, vec![0.5, 0.0, 0.5]).unwrap();
        let rep = sanov_rate(&gamma, &reference, 10).unwrap();
        assert!(!rep.exact.is_finite());
        for w in rep.lower_bounds.windows(2) {
            assert!(w[1] >= w[0]);
        }
        // the clipped ratio pushes the bound far up, as it should
        assert!(*rep.lower_bounds.last().unwrap() > 1.0);
    }

    #[test]
    fn shape_and_normalization_are_checked() {
        let a = MassTable::new(1, 1, 2, vec![0.5, 0.5]).unwrap();
        let b = MassTable::new(1, 2, 1, vec![0.5, 0.5]).unwrap();
        assert!(matches!(sanov_rate(&a, &b, 2), Err(RateError::Mismatch(_))));
        let c = MassTable::new(1, 1, 2, vec![0.5, 0.6]).unwrap();
        assert!(matches!(
            sanov_rate(&c, &a, 2),
            Err(RateError::Unnormalized { .. })
        ));
        assert!(MassTable::new(1, 1, 2, vec![0.5]).is_err());
        assert!(MassTable::new(1, 1, 2, vec![0.5, -0.5]).is_err());
    }
}
