//! Berezin-Toeplitz quantization of the sphere, checked against the formal
//! Moyal-Weyl deformation quantization.
//!
//! The crate builds the matrix algebras `End(H_N)` of holomorphic sections of
//! `O(N + k0)` over the sphere, the Toeplitz and geometric quantization maps
//! into them, and the asymptotic and index-theoretic comparisons with the
//! formal side: trace polynomials, the classifying class `theta`, and the
//! normalization `beta = 1` of the trace.

pub mod asymptotics;
pub mod cli;
pub mod error;
pub mod index;
pub mod moyal;
pub mod quantize;
pub mod report;
pub mod section;
pub mod sphere;

pub use error::{Error, Result};
