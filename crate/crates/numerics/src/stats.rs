//! Compensated summation and basic sample statistics with a fixed
//! (index-ordered) accumulation order, so results do not depend on thread
//! scheduling.

use crate::real::Real;

/// Kahan–Neumaier compensated accumulator.
#[derive(Clone, Copy, Debug)]
pub struct KahanSum<F> {
    sum: F,
    comp: F,
}

impl<F: Real> Default for KahanSum<F> {
    fn default() -> Self {
        Self { sum: F::zero(), comp: F::zero() }
    }
}

impl<F: Real> KahanSum<F> {
    #[inline]
    pub fn add(&mut self, x: F) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> F {
        self.sum + self.comp
    }
}

/// Compensated sum of a slice.
pub fn ksum<F: Real>(xs: &[F]) -> F {
    ksum_iter(xs.iter().copied())
}

/// Compensated sum of an iterator, accumulated in iteration order.
pub fn ksum_iter<F: Real>(xs: impl IntoIterator<Item = F>) -> F {
    let mut acc = KahanSum::default();
    for x in xs {
        acc.add(x);
    }
    acc.total()
}

/// Sample mean.
pub fn mean<F: Real>(xs: &[F]) -> F {
    ksum(xs) / F::from_usize(xs.len().max(1)).unwrap()
}

/// Unbiased sample variance (0 for fewer than two samples).
pub fn variance<F: Real>(xs: &[F]) -> F {
    if xs.len() < 2 {
        return F::zero();
    }
    let m = mean(xs);
    let mut acc = KahanSum::default();
    for &x in xs {
        acc.add((x - m) * (x - m));
    }
    acc.total() / F::from_usize(xs.len() - 1).unwrap()
}

/// Standard error of the sample mean.
pub fn stderr<F: Real>(xs: &[F]) -> F {
    (variance(xs) / F::from_usize(xs.len().max(1)).unwrap()).sqrt()
}
