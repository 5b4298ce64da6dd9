//! Discretization grids: a uniform cell-centred grid for the spin variable and
//! a periodic space grid carrying the environment quadrature of `ζ_x` per cell.

use ldp_model::ModelSpec;
use serde::{Deserialize, Serialize};

/// Boundary treatment of the truncated spin interval.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    /// Reflecting: the flux vanishes at `±Θ_max`; conserves mass.
    NoFlux,
    /// Dirichlet zero at `±Θ_max`; sub-stochastic (killed) evolution.
    Absorbing,
}

/// Cell-centred grid on `[−Θ_max, Θ_max]`: cells `l = 0..n_theta` with centres
/// `−Θ_max + (l + ½)h` and faces `−Θ_max + i·h`, `h = 2Θ_max/n_theta`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ThetaGrid {
    pub theta_max: f64,
    pub n_theta: usize,
    pub boundary: Boundary,
}

impl ThetaGrid {
    pub fn new(theta_max: f64, n_theta: usize, boundary: Boundary) -> Self {
        assert!(theta_max > 0.0, "spin truncation must be positive");
        assert!(n_theta >= 16, "need at least 16 spin cells");
        Self { theta_max, n_theta, boundary }
    }

    /// Cell width.
    pub fn h(&self) -> f64 {
        2.0 * self.theta_max / self.n_theta as f64
    }

    /// Centre of cell `l`.
    pub fn center(&self, l: usize) -> f64 {
        -self.theta_max + (l as f64 + 0.5) * self.h()
    }

    /// Face `i = 0..=n_theta` (face 0 and face n are the interval ends).
    pub fn face(&self, i: usize) -> f64 {
        -self.theta_max + i as f64 * self.h()
    }

    pub fn centers(&self) -> Vec<f64> {
        (0..self.n_theta).map(|l| self.center(l)).collect()
    }

    /// Evaluate a closure on every cell centre.
    pub fn sample(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        (0..self.n_theta).map(|l| f(self.center(l))).collect()
    }

    /// Linear interpolation of cell values at `theta` (constant extrapolation
    /// past the outermost centres).
    pub fn interp(&self, values: &[f64], theta: f64) -> f64 {
        assert_eq!(values.len(), self.n_theta);
        let u = (theta + self.theta_max) / self.h() - 0.5;
        if u <= 0.0 {
            return values[0];
        }
        let last = self.n_theta - 1;
        if u >= last as f64 {
            return values[last];
        }
        let l = u.floor() as usize;
        let frac = u - l as f64;
        values[l] * (1.0 - frac) + values[l + 1] * frac
    }
}

/// Truncation radius heuristic: six standard deviations of the widest spin
/// marginal the model is expected to produce, shifted by the largest initial
/// mean.
pub fn suggested_theta_max(spec: &ModelSpec) -> f64 {
    let init_sd = spec.initial.variance().sqrt();
    let mean_bound = match &spec.initial.profile {
        ldp_model::MeanProfile::Constant { value } => value.abs(),
        ldp_model::MeanProfile::Cosine { offset, amplitude, .. } => offset.abs() + amplitude.abs(),
    };
    // stationary spread: exact for a quadratic well, σ as a fallback scale for
    // steeper (thinner-tailed) potentials
    let stationary_sd = if spec.potential.degree() == 2 {
        let c2 = *spec.potential.coeffs.last().unwrap();
        (spec.sigma * spec.sigma / (4.0 * c2)).sqrt()
    } else {
        spec.sigma
    };
    6.0 * init_sd.max(stationary_sd) + mean_bound
}

/// Environment quadrature attached to one space cell: nodes (flattened
/// `q·env_dim`) and weights summing to one.
#[derive(Clone, Debug, Serialize, Deserialize)]
struct CellNodes {
    ws: Vec<f64>,
    weights: Vec<f64>,
}

/// Periodic cell grid on the unit torus (d = 1) with the quadrature of `ζ_x`
/// evaluated at each cell centre. A "fiber" is one `(cell, node)` pair; fibers
/// are numbered cell-major with per-cell offsets (node counts may vary across
/// cells for piecewise laws).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpaceEnvGrid {
    pub nx: usize,
    pub env_dim: usize,
    cells: Vec<CellNodes>,
    offsets: Vec<usize>,
}

impl SpaceEnvGrid {
    /// Builds the grid from the model's environment law; `order` is the node
    /// count per coordinate for continuous laws (discrete laws are exact).
    pub fn from_spec(spec: &ModelSpec, nx: usize, order: usize) -> Self {
        assert!(nx >= 1);
        let env_dim = spec.environment.dim;
        let mut cells = Vec::with_capacity(nx);
        let mut offsets = Vec::with_capacity(nx + 1);
        let mut total = 0;
        for i in 0..nx {
            offsets.push(total);
            let x = [(i as f64 + 0.5) / nx as f64];
            let (nodes, weights) = spec.environment.quadrature(&x, order);
            let mut ws = Vec::with_capacity(nodes.len() * env_dim);
            for node in &nodes {
                ws.extend_from_slice(node);
            }
            total += weights.len();
            cells.push(CellNodes { ws, weights });
        }
        offsets.push(total);
        Self { nx, env_dim, cells, offsets }
    }

    /// Centre of space cell `i`.
    pub fn x_center(&self, i: usize) -> f64 {
        (i as f64 + 0.5) / self.nx as f64
    }

    pub fn num_nodes(&self, i: usize) -> usize {
        self.cells[i].weights.len()
    }

    /// Mark and weight of node `q` in cell `i`.
    pub fn node(&self, i: usize, q: usize) -> (&[f64], f64) {
        let c = &self.cells[i];
        (&c.ws[q * self.env_dim..(q + 1) * self.env_dim], c.weights[q])
    }

    /// Fiber index of `(i, q = 0)`.
    pub fn fiber_offset(&self, i: usize) -> usize {
        self.offsets[i]
    }

    pub fn total_fibers(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    /// Inverse of the fiber numbering.
    pub fn fiber_cell(&self, fiber: usize) -> (usize, usize) {
        let i = match self.offsets.binary_search(&fiber) {
            Ok(mut k) => {
                // land on the last cell starting at this offset (empty cells cannot occur,
                // but equal offsets would mean one did)
                while k + 1 < self.offsets.len() - 1 && self.offsets[k + 1] == fiber {
                    k += 1;
                }
                k
            }
            Err(k) => k - 1,
        };
        (i, fiber - self.offsets[i])
    }

    /// Iterate fibers as `(fiber, cell, node, mark, weight)`.
    pub fn fibers(&self) -> impl Iterator<Item = (usize, usize, usize, &[f64], f64)> + '_ {
        (0..self.nx).flat_map(move |i| {
            (0..self.num_nodes(i)).map(move |q| {
                let (w, wgt) = self.node(i, q);
                (self.offsets[i] + q, i, q, w, wgt)
            })
        })
    }
}
