//! Circular convolution on periodic grids via FFT,
//! `out[k] = Σ_j kernel[(k−j) mod n]·v[j]`, in one and two dimensions.
//! Plans are rebuilt per call (cheap at the sizes used) so calls are pure.

use rustfft::num_complex::Complex;
use rustfft::{FftNum, FftPlanner};

use crate::real::Real;

fn fft_all<F: FftNum>(data: &mut [Complex<F>], len: usize, forward: bool) {
    let mut planner = FftPlanner::<F>::new();
    let fft = if forward { planner.plan_fft_forward(len) } else { planner.plan_fft_inverse(len) };
    for chunk in data.chunks_exact_mut(len) {
        fft.process(chunk);
    }
}

/// 1-D circular convolution of equal-length slices.
pub fn circular_convolve<F: Real + FftNum>(kernel: &[F], v: &[F]) -> Vec<F> {
    let n = kernel.len();
    assert_eq!(v.len(), n);
    let mut a: Vec<Complex<F>> = kernel.iter().map(|&x| Complex::new(x, F::zero())).collect();
    let mut b: Vec<Complex<F>> = v.iter().map(|&x| Complex::new(x, F::zero())).collect();
    fft_all(&mut a, n, true);
    fft_all(&mut b, n, true);
    for i in 0..n {
        a[i] = a[i] * b[i];
    }
    fft_all(&mut a, n, false);
    let scale = F::one() / F::from_usize(n).unwrap();
    a.iter().map(|c| c.re * scale).collect()
}

/// 2-D circular convolution of row-major `rows × cols` grids.
pub fn circular_convolve_2d<F: Real + FftNum>(kernel: &[F], v: &[F], rows: usize, cols: usize) -> Vec<F> {
    assert_eq!(kernel.len(), rows * cols);
    assert_eq!(v.len(), rows * cols);
    let to_c = |s: &[F]| -> Vec<Complex<F>> { s.iter().map(|&x| Complex::new(x, F::zero())).collect() };
    let mut a = to_c(kernel);
    let mut b = to_c(v);
    let transpose = |s: &[Complex<F>]| -> Vec<Complex<F>> {
        let mut t = vec![Complex::new(F::zero(), F::zero()); s.len()];
        for r in 0..rows {
            for c in 0..cols {
                t[c * rows + r] = s[r * cols + c];
            }
        }
        t
    };
    for m in [&mut a, &mut b] {
        fft_all(m, cols, true);
        let mut t = transpose(m);
        fft_all(&mut t, rows, true);
        *m = t; // now column-major (cols × rows)
    }
    for i in 0..a.len() {
        a[i] = a[i] * b[i];
    }
    fft_all(&mut a, rows, false);
    // transpose back to row-major
    let mut back = vec![Complex::new(F::zero(), F::zero()); a.len()];
    for c in 0..cols {
        for r in 0..rows {
            back[r * cols + c] = a[c * rows + r];
        }
    }
    fft_all(&mut back, cols, false);
    let scale = F::one() / F::from_usize(rows * cols).unwrap();
    back.iter().map(|c| c.re * scale).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn direct_1d(kernel: &[f64], v: &[f64]) -> Vec<f64> {
        let n = kernel.len();
        (0..n)
            .map(|k| (0..n).map(|j| kernel[(n + k - j) % n] * v[j]).sum())
            .collect()
    }

    #[test]
    fn matches_direct_sum_1d() {
        let kernel = [0.5, 0.25, -0.1, 0.0, 0.3, 0.05];
        let v = [1.0, -2.0, 0.5, 3.0, 0.0, 1.5];
        let fast = circular_convolve(&kernel, &v);
        let slow = direct_1d(&kernel, &v);
        for i in 0..6 {
            assert!((fast[i] - slow[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn matches_direct_sum_2d() {
        let (rows, cols) = (4, 3);
        let kernel: Vec<f64> = (0..rows * cols).map(|i| (i as f64 * 0.37).sin()).collect();
        let v: Vec<f64> = (0..rows * cols).map(|i| (i as f64 * 0.11).cos()).collect();
        let fast = circular_convolve_2d(&kernel, &v, rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                let mut s = 0.0;
                for rp in 0..rows {
                    for cp in 0..cols {
                        let kr = (rows + r - rp) % rows;
                        let kc = (cols + c - cp) % cols;
                        s += kernel[kr * cols + kc] * v[rp * cols + cp];
                    }
                }
                assert!((fast[r * cols + c] - s).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn convolution_with_delta_is_identity() {
        let mut kernel = vec![0.0; 8];
        kernel[0] = 1.0;
        let v: Vec<f64> = (0..8).map(|i| i as f64).collect();
        let out = circular_convolve(&kernel, &v);
        for i in 0..8 {
            assert!((out[i] - v[i]).abs() < 1e-13);
        }
    }
}
