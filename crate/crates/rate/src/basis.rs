//! Test-function dictionary `f(x, w, θ) = X(x)·W(w)·T(θ)`.
//!
//! `X` runs over Fourier modes on the unit torus up to frequency `k_x`,
//! `W` over monomials in the environment coordinates of total degree ≤ `k_w`,
//! and `T_j(θ) = He_j(θ)/√(j!) · χ(θ)` over probabilists' Hermite polynomials
//! damped by a C² bump `χ` that equals 1 on `|θ| ≤ 0.7·Θ` and vanishes for
//! `|θ| ≥ 0.9·Θ`, so every element is supported strictly inside the
//! truncation window and has closed-form θ-derivatives.

/// Spatial factor of a dictionary element.
#[derive(Clone, Copy, Debug)]
enum XMode {
    One,
    Cos(usize),
    Sin(usize),
}

impl XMode {
    fn eval(self, x: f64) -> f64 {
        match self {
            XMode::One => 1.0,
            XMode::Cos(j) => (2.0 * std::f64::consts::PI * j as f64 * x).cos(),
            XMode::Sin(j) => (2.0 * std::f64::consts::PI * j as f64 * x).sin(),
        }
    }
}

/// Separable test-function dictionary tied to a truncation radius.
#[derive(Clone, Debug)]
pub struct TestBasis {
    pub k_x: usize,
    pub k_w: usize,
    pub k_theta: usize,
    pub theta_max: f64,
    x_modes: Vec<XMode>,
    w_monos: Vec<Vec<usize>>,
}

/// All monomial exponents over `dim` variables with total degree ≤ `max_deg`,
/// ordered by degree, then lexicographically.
fn monomials(dim: usize, max_deg: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for deg in 0..=max_deg {
        let mut stack = vec![(Vec::new(), deg)];
        while let Some((prefix, rem)) = stack.pop() {
            if prefix.len() == dim {
                if rem == 0 {
                    out.push(prefix);
                }
                continue;
            }
            if prefix.len() + 1 == dim {
                let mut full = prefix;
                full.push(rem);
                out.push(full);
                continue;
            }
            // pushed ascending so the largest leading exponent is popped first
            for e in 0..=rem {
                let mut next = prefix.clone();
                next.push(e);
                stack.push((next, rem - e));
            }
        }
        if dim == 0 {
            break; // only the empty exponent, once
        }
    }
    out
}

impl TestBasis {
    pub fn new(k_x: usize, k_w: usize, env_dim: usize, k_theta: usize, theta_max: f64) -> Self {
        let mut x_modes = vec![XMode::One];
        for j in 1..=k_x {
            x_modes.push(XMode::Cos(j));
            x_modes.push(XMode::Sin(j));
        }
        let w_monos = monomials(env_dim, k_w);
        Self { k_x, k_w, k_theta, theta_max, x_modes, w_monos }
    }

    /// Dictionary with a single constant `(x, w)` factor.
    pub fn theta_only(k_theta: usize, theta_max: f64) -> Self {
        Self::new(0, 0, 0, k_theta, theta_max)
    }

    pub fn len(&self) -> usize {
        self.num_space_env() * self.num_theta()
    }

    pub fn is_empty(&self) -> bool {
        false // always holds the constant×T_0 element
    }

    /// True when the `(x, w)` factor is trivial, so elements depend on θ only.
    pub fn is_theta_only(&self) -> bool {
        self.num_space_env() == 1
    }

    pub(crate) fn num_theta(&self) -> usize {
        self.k_theta + 1
    }

    pub(crate) fn num_space_env(&self) -> usize {
        self.x_modes.len() * self.w_monos.len()
    }

    /// Number of environment coordinates the monomial factors consume.
    pub(crate) fn env_dim(&self) -> usize {
        self.w_monos[0].len()
    }

    pub(crate) fn split(&self, b: usize) -> (usize, usize) {
        (b / self.num_theta(), b % self.num_theta())
    }

    pub(crate) fn space_env_value(&self, se: usize, x: f64, w: &[f64]) -> f64 {
        let n_monos = self.w_monos.len();
        let xv = self.x_modes[se / n_monos].eval(x);
        let mono = &self.w_monos[se % n_monos];
        let mut wv = 1.0;
        for (c, &e) in mono.iter().enumerate() {
            for _ in 0..e {
                wv *= w[c];
            }
        }
        xv * wv
    }

    /// `(χ, χ', χ'')` at θ.
    fn cutoff(&self, theta: f64) -> (f64, f64, f64) {
        let r1 = 0.9 * self.theta_max;
        let r0 = 0.7 * self.theta_max;
        let a = theta.abs();
        if a <= r0 {
            return (1.0, 0.0, 0.0);
        }
        if a >= r1 {
            return (0.0, 0.0, 0.0);
        }
        let d = r1 - r0;
        let u = (r1 - a) / d;
        let s = u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
        let sp = 30.0 * u * u * (1.0 - u) * (1.0 - u);
        let spp = 60.0 * u * (1.0 - u) * (1.0 - 2.0 * u);
        let sg = -theta.signum() / d;
        (s, sp * sg, spp / (d * d))
    }

    /// `(T_j, T_j', T_j'')` for all j ≤ k_θ at one point.
    pub(crate) fn theta_values(&self, theta: f64) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let n = self.num_theta();
        let (chi, dchi, d2chi) = self.cutoff(theta);
        // He_j by recurrence; He'_j = j·He_{j−1}, He''_j = j(j−1)·He_{j−2}
        let mut he = vec![0.0; n.max(2)];
        he[0] = 1.0;
        if n > 1 {
            he[1] = theta;
        }
        for j in 2..n {
            he[j] = theta * he[j - 1] - (j as f64 - 1.0) * he[j - 2];
        }
        let mut t = vec![0.0; n];
        let mut dt = vec![0.0; n];
        let mut d2t = vec![0.0; n];
        let mut norm = 1.0; // 1/√(j!)
        for j in 0..n {
            if j > 0 {
                norm /= (j as f64).sqrt();
            }
            let h0 = he[j];
            let h1 = if j >= 1 { j as f64 * he[j - 1] } else { 0.0 };
            let h2 = if j >= 2 { (j * (j - 1)) as f64 * he[j - 2] } else { 0.0 };
            t[j] = norm * h0 * chi;
            dt[j] = norm * (h1 * chi + h0 * dchi);
            d2t[j] = norm * (h2 * chi + 2.0 * h1 * dchi + h0 * d2chi);
        }
        (t, dt, d2t)
    }

    /// Tables `[j][l]` of `T_j`, `T_j'`, `T_j''` over a set of θ points.
    pub(crate) fn theta_tables(&self, points: &[f64]) -> ThetaTables {
        let n = self.num_theta();
        let mut tab = ThetaTables {
            val: vec![vec![0.0; points.len()]; n],
            d1: vec![vec![0.0; points.len()]; n],
            d2: vec![vec![0.0; points.len()]; n],
        };
        for (l, &p) in points.iter().enumerate() {
            let (t, dt, d2t) = self.theta_values(p);
            for j in 0..n {
                tab.val[j][l] = t[j];
                tab.d1[j][l] = dt[j];
                tab.d2[j][l] = d2t[j];
            }
        }
        tab
    }

    pub fn eval(&self, b: usize, x: f64, w: &[f64], theta: f64) -> f64 {
        let (se, it) = self.split(b);
        self.space_env_value(se, x, w) * self.theta_values(theta).0[it]
    }

    pub fn eval_dtheta(&self, b: usize, x: f64, w: &[f64], theta: f64) -> f64 {
        let (se, it) = self.split(b);
        self.space_env_value(se, x, w) * self.theta_values(theta).1[it]
    }

    pub fn eval_d2theta(&self, b: usize, x: f64, w: &[f64], theta: f64) -> f64 {
        let (se, it) = self.split(b);
        self.space_env_value(se, x, w) * self.theta_values(theta).2[it]
    }
}

/// Per-element θ tables at the grid centres.
pub(crate) struct ThetaTables {
    pub val: Vec<Vec<f64>>,
    pub d1: Vec<Vec<f64>>,
    pub d2: Vec<Vec<f64>>,
}
