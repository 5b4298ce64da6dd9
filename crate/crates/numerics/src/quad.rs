//! Quadrature rules: composite trapezoid on uniform samples and
//! Gauss–Legendre nodes/weights (Newton iteration on the Legendre recurrence,
//! accurate to machine precision for the small orders used here).

use crate::real::Real;
use crate::stats::KahanSum;

/// Composite trapezoid of uniformly spaced samples with spacing `dx`.
pub fn trapezoid<F: Real>(values: &[F], dx: F) -> F {
    if values.len() < 2 {
        return F::zero();
    }
    let mut acc = KahanSum::default();
    for (i, &v) in values.iter().enumerate() {
        let w = if i == 0 || i == values.len() - 1 { F::of(0.5) } else { F::one() };
        acc.add(w * v);
    }
    acc.total() * dx
}

/// Legendre Pₙ(x) and its derivative by the three-term recurrence.
fn legendre_pair<F: Real>(n: usize, x: F) -> (F, F) {
    let mut p0 = F::one();
    let mut p1 = x;
    if n == 0 {
        return (p0, F::zero());
    }
    for k in 2..=n {
        let kf = F::from_usize(k).unwrap();
        let next = ((F::of(2.0) * kf - F::one()) * x * p1 - (kf - F::one()) * p0) / kf;
        p0 = p1;
        p1 = next;
    }
    let dp = F::from_usize(n).unwrap() * (x * p1 - p0) / (x * x - F::one());
    (p1, dp)
}

/// Gauss–Legendre rule of order `n` on [−1, 1]: `(nodes, weights)`.
pub fn gauss_legendre<F: Real>(n: usize) -> (Vec<F>, Vec<F>) {
    assert!(n >= 1);
    let mut nodes = vec![F::zero(); n];
    let mut weights = vec![F::zero(); n];
    for i in 0..n {
        let guess = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut x = F::of(guess);
        for _ in 0..60 {
            let (p, dp) = legendre_pair(n, x);
            let step = p / dp;
            x = x - step;
            if step.abs() < F::of(1e-16) {
                break;
            }
        }
        let (_, dp) = legendre_pair(n, x);
        nodes[i] = x;
        weights[i] = F::of(2.0) / ((F::one() - x * x) * dp * dp);
    }
    nodes.reverse();
    weights.reverse();
    (nodes, weights)
}

/// Gauss–Legendre rule mapped to [a, b].
pub fn gauss_legendre_on<F: Real>(n: usize, a: F, b: F) -> (Vec<F>, Vec<F>) {
    let (xs, ws) = gauss_legendre::<F>(n);
    let half = (b - a) * F::of(0.5);
    let mid = (b + a) * F::of(0.5);
    (
        xs.iter().map(|&x| mid + half * x).collect(),
        ws.iter().map(|&w| w * half).collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trapezoid_on_linear_is_exact() {
        let xs: Vec<f64> = (0..=10).map(|i| 2.0 * i as f64 / 10.0).collect();
        assert!((trapezoid(&xs, 0.1) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn gauss_legendre_matches_known_order_three() {
        let (x, w) = gauss_legendre::<f64>(3);
        let r = (3.0f64 / 5.0).sqrt();
        assert!((x[0] + r).abs() < 1e-14 && x[1].abs() < 1e-14 && (x[2] - r).abs() < 1e-14);
        assert!((w[0] - 5.0 / 9.0).abs() < 1e-14);
        assert!((w[1] - 8.0 / 9.0).abs() < 1e-14);
    }

    #[test]
    fn integrates_polynomials_exactly() {
        // order n is exact through degree 2n−1
        let (x, w) = gauss_legendre_on::<f64>(5, 0.0, 1.0);
        let val: f64 = x.iter().zip(&w).map(|(&x, &w)| w * x.powi(9)).sum();
        assert!((val - 0.1).abs() < 1e-14);
        let total: f64 = w.iter().sum();
        assert!((total - 1.0).abs() < 1e-14);
    }
}
