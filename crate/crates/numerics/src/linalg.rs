//! Small dense symmetric linear algebra: cyclic Jacobi eigendecomposition,
//! eigenvalue-thresholded pseudo-inverse application with an explicit range
//! check, and a conjugate-gradient solver used as an independent route to the
//! same quadratic optimum.

use crate::real::Real;

/// Eigendecomposition of a symmetric matrix; `vectors` is column-major
/// (`vectors[j*n + i]` = component i of eigenvector j), `values[j]` its
/// eigenvalue.
#[derive(Clone, Debug)]
pub struct SymEigen<F> {
    pub n: usize,
    pub values: Vec<F>,
    pub vectors: Vec<F>,
}

/// Cyclic Jacobi iteration; `a` is row-major symmetric n×n.
pub fn sym_eigen<F: Real>(a: &[F], n: usize) -> SymEigen<F> {
    assert_eq!(a.len(), n * n);
    let mut m = a.to_vec();
    let mut v = vec![F::zero(); n * n];
    for j in 0..n {
        v[j * n + j] = F::one();
    }
    let idx = |r: usize, c: usize| r * n + c;
    for _sweep in 0..100 {
        let mut off = F::zero();
        for p in 0..n {
            for q in (p + 1)..n {
                off += m[idx(p, q)] * m[idx(p, q)];
            }
        }
        if off.sqrt() <= F::of(1e-30) {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[idx(p, q)];
                if apq == F::zero() {
                    continue;
                }
                let theta = (m[idx(q, q)] - m[idx(p, p)]) / (F::of(2.0) * apq);
                let t = {
                    let s = if theta >= F::zero() { F::one() } else { -F::one() };
                    s / (theta.abs() + (theta * theta + F::one()).sqrt())
                };
                let c = F::one() / (t * t + F::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[idx(k, p)];
                    let mkq = m[idx(k, q)];
                    m[idx(k, p)] = c * mkp - s * mkq;
                    m[idx(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[idx(p, k)];
                    let mqk = m[idx(q, k)];
                    m[idx(p, k)] = c * mpk - s * mqk;
                    m[idx(q, k)] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[idx(k, p)];
                    let vkq = v[idx(k, q)];
                    v[idx(k, p)] = c * vkp - s * vkq;
                    v[idx(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut values = vec![F::zero(); n];
    for j in 0..n {
        values[j] = m[idx(j, j)];
    }
    // column-major copy of V's columns
    let mut vectors = vec![F::zero(); n * n];
    for j in 0..n {
        for i in 0..n {
            vectors[j * n + i] = v[idx(i, j)];
        }
    }
    SymEigen { n, values, vectors }
}

impl<F: Real> SymEigen<F> {
    fn cutoff(&self, rel: F) -> F {
        let mut mx = F::zero();
        for &l in &self.values {
            if l.abs() > mx {
                mx = l.abs();
            }
        }
        rel * mx
    }

    /// x = M⁺ b keeping eigenvalues with |λ| > rel·max|λ|.
    pub fn pinv_apply(&self, b: &[F], rel: F) -> Vec<F> {
        let cut = self.cutoff(rel);
        let n = self.n;
        let mut x = vec![F::zero(); n];
        for j in 0..n {
            let l = self.values[j];
            if l.abs() <= cut {
                continue;
            }
            let col = &self.vectors[j * n..(j + 1) * n];
            let mut dot = F::zero();
            for i in 0..n {
                dot += col[i] * b[i];
            }
            let coef = dot / l;
            for i in 0..n {
                x[i] += coef * col[i];
            }
        }
        x
    }

    /// Euclidean norm of the component of `b` outside the retained range.
    pub fn range_residual(&self, b: &[F], rel: F) -> F {
        let cut = self.cutoff(rel);
        let n = self.n;
        let mut proj = vec![F::zero(); n];
        for j in 0..n {
            if self.values[j].abs() <= cut {
                continue;
            }
            let col = &self.vectors[j * n..(j + 1) * n];
            let mut dot = F::zero();
            for i in 0..n {
                dot += col[i] * b[i];
            }
            for i in 0..n {
                proj[i] += dot * col[i];
            }
        }
        let mut s = F::zero();
        for i in 0..n {
            let d = b[i] - proj[i];
            s += d * d;
        }
        s.sqrt()
    }
}

/// Conjugate gradients for a symmetric positive semi-definite system
/// `matvec(x) = b`; returns the iterate when the residual norm falls below
/// `tol·‖b‖` or after `max_iter` sweeps.
pub fn cg_solve<F: Real>(matvec: impl Fn(&[F]) -> Vec<F>, b: &[F], tol: F, max_iter: usize) -> Vec<F> {
    let n = b.len();
    let mut x = vec![F::zero(); n];
    let mut r = b.to_vec();
    let mut p = r.clone();
    let dot = |u: &[F], v: &[F]| {
        let mut s = F::zero();
        for i in 0..u.len() {
            s += u[i] * v[i];
        }
        s
    };
    let bnorm = dot(b, b).sqrt().max(F::of(1e-300));
    let mut rs = dot(&r, &r);
    for _ in 0..max_iter {
        if rs.sqrt() <= tol * bnorm {
            break;
        }
        let ap = matvec(&p);
        let denom = dot(&p, &ap);
        if denom <= F::zero() {
            break;
        }
        let alpha = rs / denom;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let rs_new = dot(&r, &r);
        let beta = rs_new / rs;
        for i in 0..n {
            p[i] = r[i] + beta * p[i];
        }
        rs = rs_new;
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matmul(a: &[f64], x: &[f64], n: usize) -> Vec<f64> {
        (0..n).map(|i| (0..n).map(|j| a[i * n + j] * x[j]).sum()).collect()
    }

    #[test]
    fn eigen_of_two_by_two() {
        // [[2,1],[1,2]] has eigenvalues 1 and 3.
        let a = [2.0, 1.0, 1.0, 2.0];
        let e = sym_eigen(&a, 2);
        let mut vals: Vec<f64> = e.values.clone();
        vals.sort_by(|x, y| x.partial_cmp(y).unwrap());
        assert!((vals[0] - 1.0).abs() < 1e-12 && (vals[1] - 3.0).abs() < 1e-12);
        for j in 0..2 {
            let col = &e.vectors[j * 2..j * 2 + 2];
            let av = matmul(&a, col, 2);
            for i in 0..2 {
                assert!((av[i] - e.values[j] * col[i]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn pinv_solves_full_rank_system() {
        let a = [4.0, 1.0, 0.5, 1.0, 3.0, 0.2, 0.5, 0.2, 2.0];
        let e = sym_eigen(&a, 3);
        let b = [1.0, -2.0, 0.5];
        let x = e.pinv_apply(&b, 1e-10);
        let ax = matmul(&a, &x, 3);
        for i in 0..3 {
            assert!((ax[i] - b[i]).abs() < 1e-10);
        }
        assert!(e.range_residual(&b, 1e-10) < 1e-12);
    }

    #[test]
    fn range_residual_detects_null_component() {
        // rank-1 projector onto (1,0): b with a (0,1)-component is outside the range.
        let a: [f64; 4] = [1.0, 0.0, 0.0, 0.0];
        let e = sym_eigen(&a, 2);
        assert!((e.range_residual(&[0.3, 0.4], 1e-10) - 0.4).abs() < 1e-12);
        assert!(e.range_residual(&[0.3, 0.0], 1e-10) < 1e-14);
    }

    #[test]
    fn cg_matches_pinv_route() {
        let a = [4.0, 1.0, 0.5, 1.0, 3.0, 0.2, 0.5, 0.2, 2.0];
        let b = [0.2, 1.0, -0.7];
        let e = sym_eigen(&a, 3);
        let x1 = e.pinv_apply(&b, 1e-10);
        let x2 = cg_solve(|x| matmul(&a, x, 3), &b, 1e-14, 100);
        for i in 0..3 {
            assert!((x1[i] - x2[i]).abs() < 1e-10);
        }
    }
}
