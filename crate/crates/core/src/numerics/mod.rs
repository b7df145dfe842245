//! Complex scalars and matrices, determinants, spectral norm and unitary
//! dilation of contractions.

mod json;
mod linalg;
mod matrix;
pub mod random;

use num_complex::Complex64 as C64;
use thiserror::Error;

pub use json::{matrix_from_json, matrix_to_json, MatrixJson};
pub use linalg::{
    determinant, embed_contraction, hermitian_eigen, hermitian_sqrt, spectral_norm, unitarity_deviation,
    HermitianEigen, UnitaryMatrix, CONTRACTION_SLACK, UNITARITY_TOLERANCE,
};
pub use matrix::ComplexMatrix;

/// Default comparison tolerance.
pub const DEFAULT_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericsError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is {rows}x{cols}, expected a square matrix")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix must have dimension at least 1")]
    Empty,
    #[error("spectral norm {norm} exceeds 1")]
    NormExceedsOne { norm: f64 },
    #[error("matrix is not unitary (max deviation of U†U from I is {deviation:e})")]
    NotUnitary { deviation: f64 },
    #[error("matrix has non-finite entries")]
    NonFinite,
    #[error("malformed matrix JSON: {0}")]
    Parse(String),
}

/// Error of `a` against `b`: relative when the magnitudes exceed one,
/// absolute otherwise.
pub fn scaled_error(a: C64, b: C64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1.0)
}

pub fn approx_eq(a: C64, b: C64, tolerance: f64) -> bool {
    scaled_error(a, b) <= tolerance
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tolerance_is_relative_above_one() {
        assert!(approx_eq(C64::new(1e6, 0.0), C64::new(1e6 + 1e-3, 0.0), 1e-8));
        assert!(!approx_eq(C64::new(1e-3, 0.0), C64::new(2e-3, 0.0), 1e-8));
        assert!(approx_eq(C64::new(1e-3, 0.0), C64::new(1e-3 + 1e-10, 0.0), 1e-8));
    }
}
