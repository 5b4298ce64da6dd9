//! Interaction kernel `J(x, w, w′)`: an even spatial part on the torus
//! combined with a finite-rank environment part `Σ_a g_a(w)·h_a(w′)` (affine
//! features), either multiplicatively or additively. The dominating envelope
//! `J̄(x) ≥ sup_{w,w′}|J(x,w,w′)|` and its L¹/L² norms feed the growth
//! condition `c_Ψ > ‖J̄‖₁`.

use serde::{Deserialize, Serialize};

use crate::environment::EnvironmentSpec;

/// Even spatial profile `J¹` on the torus; arguments are displacements already
/// reduced to `[−1/2, 1/2)^d`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpatialKernel {
    Constant { value: f64 },
    /// `amplitude · Π_a cos(2π·frequency·x_a)`.
    Cosine { amplitude: f64, frequency: u32 },
    /// `amplitude · exp(−|x|²/(2·width²))` with the torus distance.
    GaussianBump { amplitude: f64, width: f64 },
    /// One-dimensional table on the uniform grid `i/len, i = 0..len`, linearly
    /// interpolated with wraparound; must be even under `x → −x`.
    Tabulated { values: Vec<f64> },
}

impl SpatialKernel {
    pub fn evaluate(&self, x: &[f64]) -> f64 {
        match self {
            SpatialKernel::Constant { value } => *value,
            SpatialKernel::Cosine { amplitude, frequency } => {
                let mut v = *amplitude;
                for &xa in x {
                    v *= (std::f64::consts::TAU * *frequency as f64 * xa).cos();
                }
                v
            }
            SpatialKernel::GaussianBump { amplitude, width } => {
                let r2: f64 = x.iter().map(|&xa| xa * xa).sum();
                amplitude * (-r2 / (2.0 * width * width)).exp()
            }
            SpatialKernel::Tabulated { values } => {
                let n = values.len();
                assert!(x.len() == 1 && n >= 1, "tabulated profile is one-dimensional");
                let mut u = x[0] - x[0].floor(); // into [0,1)
                u *= n as f64;
                let i = u.floor() as usize % n;
                let frac = u - u.floor();
                let j = (i + 1) % n;
                values[i] * (1.0 - frac) + values[j] * frac
            }
        }
    }

    /// Largest asymmetry `|J¹(x) − J¹(−x)|` over the table (0 for closed forms).
    pub fn evenness_defect(&self) -> f64 {
        match self {
            SpatialKernel::Tabulated { values } => {
                let n = values.len();
                let mut worst = 0.0f64;
                for i in 0..n {
                    worst = worst.max((values[i] - values[(n - i) % n]).abs());
                }
                worst
            }
            _ => 0.0,
        }
    }
}

/// Affine environment feature `constant + Σ_c linear[c]·w_c`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EnvFeature {
    pub constant: f64,
    #[serde(default)]
    pub linear: Vec<f64>,
}

impl EnvFeature {
    pub fn one() -> Self {
        Self { constant: 1.0, linear: Vec::new() }
    }

    /// Feature selecting coordinate `c` of the mark.
    pub fn coord(c: usize) -> Self {
        let mut linear = vec![0.0; c + 1];
        linear[c] = 1.0;
        Self { constant: 0.0, linear }
    }

    pub fn eval(&self, w: &[f64]) -> f64 {
        let mut v = self.constant;
        for (c, &l) in self.linear.iter().enumerate() {
            v += l * w.get(c).copied().unwrap_or(0.0);
        }
        v
    }

    /// Exact sup of |feature| over the environment box (affine ⇒ attained at a corner).
    pub fn sup_abs(&self, env: &EnvironmentSpec) -> f64 {
        let mut lo = self.constant;
        let mut hi = self.constant;
        for (c, &l) in self.linear.iter().enumerate() {
            let (a, b) = (l * env.lo[c], l * env.hi[c]);
            lo += a.min(b);
            hi += a.max(b);
        }
        lo.abs().max(hi.abs())
    }
}

/// One rank-one environment term `g(w)·h(w′)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EnvTerm {
    pub left: EnvFeature,
    pub right: EnvFeature,
}

/// Finite-rank environment part `J²(w, w′) = Σ_a g_a(w)·h_a(w′)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EnvPairKernel {
    pub terms: Vec<EnvTerm>,
}

impl EnvPairKernel {
    pub fn unit() -> Self {
        Self { terms: vec![EnvTerm { left: EnvFeature::one(), right: EnvFeature::one() }] }
    }

    /// `w·w′` on the first mark coordinate.
    pub fn product_first_coord() -> Self {
        Self { terms: vec![EnvTerm { left: EnvFeature::coord(0), right: EnvFeature::coord(0) }] }
    }

    pub fn eval(&self, w: &[f64], w_other: &[f64]) -> f64 {
        self.terms.iter().map(|t| t.left.eval(w) * t.right.eval(w_other)).sum()
    }

    /// Upper bound `Σ_a sup|g_a|·sup|h_a|` on `sup_{w,w′}|J²|` over the box.
    pub fn sup_bound(&self, env: &EnvironmentSpec) -> f64 {
        self.terms.iter().map(|t| t.left.sup_abs(env) * t.right.sup_abs(env)).sum()
    }
}

/// Structural form of the kernel.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KernelForm {
    /// No interaction (`J ≡ 0`); the reference dynamics.
    Zero,
    /// `J = J¹(x) · J²(w, w′)`.
    SeparableProduct { spatial: SpatialKernel, env: EnvPairKernel },
    /// `J = J¹(x) + J²(w, w′)`.
    SeparableSum { spatial: SpatialKernel, env: EnvPairKernel },
}

/// Full interaction kernel: a structural form plus optional user-supplied
/// envelope norms (overriding the quadrature values when the user knows them
/// in closed form).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KernelSpec {
    #[serde(flatten)]
    pub form: KernelForm,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l1_override: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l2_override: Option<f64>,
}

impl From<KernelForm> for KernelSpec {
    fn from(form: KernelForm) -> Self {
        Self { form, l1_override: None, l2_override: None }
    }
}

impl KernelSpec {
    pub fn zero() -> Self {
        KernelForm::Zero.into()
    }

    /// Space- and environment-independent kernel `J ≡ value`.
    pub fn constant(value: f64) -> Self {
        KernelForm::SeparableProduct {
            spatial: SpatialKernel::Constant { value },
            env: EnvPairKernel::unit(),
        }
        .into()
    }

    pub fn product(spatial: SpatialKernel, env: EnvPairKernel) -> Self {
        KernelForm::SeparableProduct { spatial, env }.into()
    }

    pub fn sum(spatial: SpatialKernel, env: EnvPairKernel) -> Self {
        KernelForm::SeparableSum { spatial, env }.into()
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.form, KernelForm::Zero)
    }

    /// `J(x, w, w′)` with `x` a displacement in `[−1/2, 1/2)^d`.
    pub fn evaluate(&self, x: &[f64], w: &[f64], w_other: &[f64]) -> f64 {
        match &self.form {
            KernelForm::Zero => 0.0,
            KernelForm::SeparableProduct { spatial, env } => spatial.evaluate(x) * env.eval(w, w_other),
            KernelForm::SeparableSum { spatial, env } => spatial.evaluate(x) + env.eval(w, w_other),
        }
    }

    /// Pointwise dominating envelope `J̄(x)`.
    pub fn envelope(&self, x: &[f64], env_spec: &EnvironmentSpec) -> f64 {
        match &self.form {
            KernelForm::Zero => 0.0,
            KernelForm::SeparableProduct { spatial, env } => spatial.evaluate(x).abs() * env.sup_bound(env_spec),
            KernelForm::SeparableSum { spatial, env } => spatial.evaluate(x).abs() + env.sup_bound(env_spec),
        }
    }

    /// `‖J̄‖_{L¹(T^d)}`: the override when given, else midpoint quadrature
    /// (exact enough for thresholding).
    pub fn envelope_l1(&self, d: usize, env_spec: &EnvironmentSpec) -> f64 {
        if let Some(v) = self.l1_override {
            return v;
        }
        self.envelope_norm(d, env_spec, 1.0)
    }

    /// `‖J̄‖_{L²(T^d)}`.
    pub fn envelope_l2(&self, d: usize, env_spec: &EnvironmentSpec) -> f64 {
        if let Some(v) = self.l2_override {
            return v;
        }
        self.envelope_norm(d, env_spec, 2.0)
    }

    fn envelope_norm(&self, d: usize, env_spec: &EnvironmentSpec, p: f64) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let n: usize = if d == 1 { 8192 } else { 256 };
        let mut acc = 0.0;
        let cell = (1.0 / n as f64).powi(d as i32);
        let mut x = vec![0.0; d];
        let total = n.pow(d as u32);
        for lin in 0..total {
            let mut rest = lin;
            for a in (0..d).rev() {
                let i = rest % n;
                rest /= n;
                let mut xa = (i as f64 + 0.5) / n as f64;
                if xa >= 0.5 {
                    xa -= 1.0;
                }
                x[a] = xa;
            }
            acc += self.envelope(&x, env_spec).powf(p) * cell;
        }
        acc.powf(1.0 / p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::environment::{EnvLaw, EnvironmentSpec};

    fn unit_env() -> EnvironmentSpec {
        EnvironmentSpec {
            dim: 1,
            lo: vec![-1.0],
            hi: vec![1.0],
            law: EnvLaw::Point { w: vec![0.0] },
        }
    }

    #[test]
    fn constant_kernel_norms() {
        let env = unit_env();
        let k = KernelSpec::constant(0.1);
        assert!((k.evaluate(&[0.3], &[0.5], &[-0.5]) - 0.1).abs() < 1e-15);
        assert!((k.envelope_l1(1, &env) - 0.1).abs() < 1e-12);
        assert!((k.envelope_l2(1, &env) - 0.1).abs() < 1e-12);
    }

    #[test]
    fn cosine_l1_matches_closed_form() {
        // ∫₀¹ |a·cos(2πx)| dx = 2a/π
        let env = unit_env();
        let k = KernelSpec::product(
            SpatialKernel::Cosine { amplitude: 0.3, frequency: 1 }, EnvPairKernel::unit());
        let expect = 2.0 * 0.3 / std::f64::consts::PI;
        assert!((k.envelope_l1(1, &env) - expect).abs() < 1e-6);
    }

    #[test]
    fn product_env_term_evaluates() {
        let k = KernelSpec::product(
            SpatialKernel::Constant { value: 2.0 }, EnvPairKernel::product_first_coord());
        assert!((k.evaluate(&[0.0], &[0.5], &[-0.25]) - 2.0 * 0.5 * -0.25).abs() < 1e-15);
        let env = unit_env();
        // envelope = 2·sup|w|·sup|w'| = 2 over the box [−1,1]
        assert!((k.envelope(&[0.1], &env) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn tabulated_interpolates_and_checks_evenness() {
        let even = SpatialKernel::Tabulated { values: vec![1.0, 0.5, 0.2, 0.5] };
        assert!(even.evenness_defect() < 1e-15);
        assert!((even.evaluate(&[0.25]) - 0.5).abs() < 1e-15);
        assert!((even.evaluate(&[0.125]) - 0.75).abs() < 1e-15); // halfway between 1.0 and 0.5
        let odd = SpatialKernel::Tabulated { values: vec![0.0, 1.0, 0.0, -1.0] };
        assert!(odd.evenness_defect() > 1.9);
    }

    #[test]
    fn norm_overrides_take_precedence() {
        let env = unit_env();
        let mut k = KernelSpec::constant(0.1);
        k.l1_override = Some(0.25);
        assert!((k.envelope_l1(1, &env) - 0.25).abs() < 1e-15);
        assert!((k.envelope_l2(1, &env) - 0.1).abs() < 1e-12);
    }

    #[test]
    fn separable_sum_envelope_adds() {
        let env = unit_env();
        let k = KernelSpec::sum(
            SpatialKernel::Constant { value: 0.2 }, EnvPairKernel::product_first_coord());
        assert!((k.envelope(&[0.0], &env) - 1.2).abs() < 1e-15);
        assert!((k.evaluate(&[0.0], &[0.5], &[0.5]) - 0.45).abs() < 1e-15);
    }
}
