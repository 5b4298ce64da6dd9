//! Shared numeric foundation for the workspace: a floating-point scalar trait,
//! counter-based random streams, quadrature rules, compensated log-space sums,
//! small dense symmetric eigenproblems, tridiagonal solves and circular FFT
//! convolution.
//!
//! Everything here is deterministic: no global state, no thread-dependent
//! reduction orders.

pub mod fftconv;
pub mod linalg;
pub mod logspace;
pub mod quad;
pub mod real;
pub mod rng;
pub mod special;
pub mod stats;
pub mod tridiag;

pub use real::{Real, Scalar};
pub use rng::KeyedRng;
