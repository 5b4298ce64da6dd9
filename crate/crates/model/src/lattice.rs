//! Periodic lattice `T^d_N`: sites are multi-indices `k ∈ {0,…,N−1}^d`,
//! embedded in the unit torus at `k/N`. Displacements are always reduced to
//! the fundamental window `[−1/2, 1/2)^d`.

use serde::{Deserialize, Serialize};

/// Max supported spatial dimension (simulation uses d ∈ {1, 2}).
pub const MAX_DIM: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorusLattice {
    /// Spatial dimension d ≥ 1.
    pub d: usize,
    /// Sites per axis N ≥ 1.
    pub n: usize,
}

impl TorusLattice {
    pub fn new(d: usize, n: usize) -> Self {
        assert!(d >= 1 && d <= MAX_DIM, "dimension out of range");
        assert!(n >= 1);
        Self { d, n }
    }

    /// Total number of sites `N^d`.
    pub fn num_sites(&self) -> usize {
        self.n.pow(self.d as u32)
    }

    /// Multi-index of a linear site id (row-major, axis 0 slowest).
    pub fn coords(&self, lin: usize) -> [usize; MAX_DIM] {
        let mut c = [0usize; MAX_DIM];
        let mut rest = lin;
        for a in (0..self.d).rev() {
            c[a] = rest % self.n;
            rest /= self.n;
        }
        c
    }

    /// Linear site id of a multi-index.
    pub fn linear(&self, coords: &[usize]) -> usize {
        let mut lin = 0;
        for a in 0..self.d {
            lin = lin * self.n + (coords[a] % self.n);
        }
        lin
    }

    /// Torus position `k/N ∈ [0,1)^d` of a site.
    pub fn position(&self, lin: usize, out: &mut [f64]) {
        let c = self.coords(lin);
        for a in 0..self.d {
            out[a] = c[a] as f64 / self.n as f64;
        }
    }

    /// Displacement `(k−j)/N` reduced to `[−1/2, 1/2)^d`.
    pub fn displacement(&self, k: usize, j: usize, out: &mut [f64]) {
        let ck = self.coords(k);
        let cj = self.coords(j);
        for a in 0..self.d {
            let mut x = (ck[a] as f64 - cj[a] as f64) / self.n as f64;
            x -= x.floor(); // into [0,1)
            if x >= 0.5 {
                x -= 1.0;
            }
            out[a] = x;
        }
    }

    /// Torus point `o/N` of a raw per-axis offset, reduced to `[−1/2, 1/2)`.
    pub fn offset_point(&self, offset: &[usize], out: &mut [f64]) {
        for a in 0..self.d {
            let mut x = offset[a] as f64 / self.n as f64;
            if x >= 0.5 {
                x -= 1.0;
            }
            out[a] = x;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_linear_coords() {
        let l = TorusLattice::new(2, 5);
        assert_eq!(l.num_sites(), 25);
        for lin in 0..25 {
            let c = l.coords(lin);
            assert_eq!(l.linear(&c[..2]), lin);
        }
    }

    #[test]
    fn displacement_wraps_to_half_open_window() {
        let l = TorusLattice::new(1, 4);
        let mut d = [0.0];
        l.displacement(0, 3, &mut d); // (0−3)/4 = −0.75 → +0.25
        assert!((d[0] - 0.25).abs() < 1e-15);
        l.displacement(0, 2, &mut d); // −0.5 wraps to −0.5 ∈ [−0.5, 0.5)
        assert!((d[0] + 0.5).abs() < 1e-15);
        l.displacement(3, 0, &mut d); // 0.75 → −0.25
        assert!((d[0] + 0.25).abs() < 1e-15);
    }

    #[test]
    fn positions_cover_uniform_grid() {
        let l = TorusLattice::new(1, 8);
        let mut x = [0.0];
        l.position(5, &mut x);
        assert!((x[0] - 0.625).abs() < 1e-15);
    }
}
