//! Thomas algorithm for tridiagonal systems (the implicit diffusion step of
//! the finite-volume solvers). No pivoting: the matrices assembled there are
//! strictly diagonally dominant M-matrices.

use crate::real::Real;

/// Solves the system with sub-diagonal `lower` (length n−1), diagonal `diag`
/// (length n) and super-diagonal `upper` (length n−1).
pub fn solve_tridiagonal<F: Real>(lower: &[F], diag: &[F], upper: &[F], rhs: &[F]) -> Vec<F> {
    let n = diag.len();
    assert!(n >= 1 && lower.len() == n - 1 && upper.len() == n - 1 && rhs.len() == n);
    let mut c = vec![F::zero(); n];
    let mut d = vec![F::zero(); n];
    c[0] = upper.first().copied().unwrap_or(F::zero()) / diag[0];
    d[0] = rhs[0] / diag[0];
    for i in 1..n {
        let m = diag[i] - lower[i - 1] * c[i - 1];
        if i < n - 1 {
            c[i] = upper[i] / m;
        }
        d[i] = (rhs[i] - lower[i - 1] * d[i - 1]) / m;
    }
    let mut x = vec![F::zero(); n];
    x[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_discrete_laplacian() {
        // (−1, 2, −1) system with rhs = e_2 (n = 4): solution from direct inversion.
        let n = 4;
        let lower = vec![-1.0f64; n - 1];
        let upper = vec![-1.0f64; n - 1];
        let diag = vec![2.0f64; n];
        let rhs = vec![0.0f64, 1.0, 0.0, 0.0];
        let x = solve_tridiagonal(&lower, &diag, &upper, &rhs);
        // verify by multiplication
        for i in 0..n {
            let mut ax = 2.0 * x[i];
            if i > 0 {
                ax -= x[i - 1];
            }
            if i < n - 1 {
                ax -= x[i + 1];
            }
            assert!((ax - rhs[i]).abs() < 1e-13);
        }
    }

    #[test]
    fn one_cell_system() {
        let x = solve_tridiagonal::<f64>(&[], &[4.0], &[], &[2.0]);
        assert!((x[0] - 0.5).abs() < 1e-15);
    }
}
