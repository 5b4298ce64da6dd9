//! Counter-based random streams.
//!
//! Every variate is a pure function of `(seed, key tuple)`: the generator holds
//! no mutable state, so parallel consumers can draw "their" values in any
//! schedule and still produce bit-identical results. Keys are absorbed
//! sequentially (order-sensitive) and whitened with the splitmix64 finalizer.

/// Bijective 64-bit finalizer (splitmix64 / murmur-style avalanche).
#[inline]
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[inline]
fn absorb(state: u64, key: u64) -> u64 {
    mix(state ^ key.wrapping_add(0x9E37_79B9_7F4A_7C15).wrapping_mul(0xD134_2543_DE82_EF95))
}

/// Stateless keyed generator; cloning or sharing it is free and safe.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KeyedRng {
    base: u64,
}

impl KeyedRng {
    pub fn new(seed: u64) -> Self {
        Self { base: mix(seed.wrapping_add(0x9E37_79B9_7F4A_7C15)) }
    }

    /// Child stream: equivalent to prefixing every later key tuple with `tag`.
    pub fn derive(&self, tag: u64) -> Self {
        Self { base: absorb(self.base, tag) }
    }

    /// Raw 64 bits for a key tuple.
    #[inline]
    pub fn raw<const K: usize>(&self, keys: [u64; K]) -> u64 {
        let mut s = self.base;
        for k in keys {
            s = absorb(s, k);
        }
        s
    }

    /// Uniform variate in the open interval (0,1); safe to pass to `ln`.
    #[inline]
    pub fn uniform<const K: usize>(&self, keys: [u64; K]) -> f64 {
        ((self.raw(keys) >> 11) as f64 + 0.5) * (1.0 / 9_007_199_254_740_992.0)
    }

    /// Standard normal variate via Box–Muller on two sub-draws of the key tuple.
    #[inline]
    pub fn normal<const K: usize>(&self, keys: [u64; K]) -> f64 {
        let mut s = self.base;
        for k in keys {
            s = absorb(s, k);
        }
        let u1 = ((absorb(s, 0) >> 11) as f64 + 0.5) * (1.0 / 9_007_199_254_740_992.0);
        let u2 = ((absorb(s, 1) >> 11) as f64 + 0.5) * (1.0 / 9_007_199_254_740_992.0);
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pure_function_of_keys() {
        let r = KeyedRng::new(7);
        assert_eq!(r.raw([1, 2, 3]), r.raw([1, 2, 3]));
        assert_ne!(r.raw([1, 2, 3]), r.raw([3, 2, 1]));
        assert_ne!(r.raw([0]), KeyedRng::new(8).raw([0]));
        assert_eq!(r.derive(5).raw([2]), r.raw([5, 2]));
    }

    #[test]
    fn uniform_is_strictly_inside_unit_interval() {
        let r = KeyedRng::new(123);
        for i in 0..10_000u64 {
            let u = r.uniform([i]);
            assert!(u > 0.0 && u < 1.0);
        }
    }

    #[test]
    fn uniform_moments() {
        let r = KeyedRng::new(2024);
        let n = 200_000u64;
        let (mut m1, mut m2) = (0.0, 0.0);
        for i in 0..n {
            let u = r.uniform([i]);
            m1 += u;
            m2 += u * u;
        }
        m1 /= n as f64;
        m2 /= n as f64;
        assert!((m1 - 0.5).abs() < 2e-3, "mean {m1}");
        assert!((m2 - 1.0 / 3.0).abs() < 2e-3, "second moment {m2}");
    }

    #[test]
    fn normal_moments() {
        let r = KeyedRng::new(99);
        let n = 200_000u64;
        let (mut m1, mut m2, mut m4) = (0.0, 0.0, 0.0);
        for i in 0..n {
            let z = r.normal([i]);
            m1 += z;
            m2 += z * z;
            m4 += z * z * z * z;
        }
        m1 /= n as f64;
        m2 /= n as f64;
        m4 /= n as f64;
        assert!(m1.abs() < 1e-2, "mean {m1}");
        assert!((m2 - 1.0).abs() < 2e-2, "variance {m2}");
        assert!((m4 - 3.0).abs() < 1e-1, "fourth moment {m4}");
    }
}
