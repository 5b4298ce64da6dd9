//! Frozen environment draw `w^{k} ~ ζ_{k/N}`, independent across sites,
//! sampled once and immutable for the whole path.

use ldp_model::ModelSpec;
use ldp_numerics::KeyedRng;

use crate::TAG_ENV;

/// One mark per lattice site, stored site-major (`values[k·m .. (k+1)·m]`).
#[derive(Clone, Debug, PartialEq)]
pub struct EnvironmentSample {
    pub env_dim: usize,
    pub values: Vec<f64>,
}

impl EnvironmentSample {
    pub fn len(&self) -> usize {
        self.values.len() / self.env_dim
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Mark at site `k`.
    #[inline]
    pub fn w(&self, k: usize) -> &[f64] {
        &self.values[k * self.env_dim..(k + 1) * self.env_dim]
    }
}

/// Independent site draws, site `k` from `ζ_{k/N}`; a pure function of the
/// generator's seed.
pub fn sample_environment(spec: &ModelSpec, rng: &KeyedRng) -> EnvironmentSample {
    let sites = spec.lattice.num_sites();
    let dim = spec.environment.dim;
    let r = rng.derive(TAG_ENV);
    let mut values = Vec::with_capacity(sites * dim);
    let mut x = vec![0.0; spec.lattice.d];
    for k in 0..sites {
        spec.lattice.position(k, &mut x);
        let mut draw = 0u64;
        let w = spec.environment.sample(&x, || {
            let u = r.uniform([k as u64, draw]);
            draw += 1;
            u
        });
        debug_assert_eq!(w.len(), dim);
        values.extend_from_slice(&w);
    }
    EnvironmentSample { env_dim: dim, values }
}
