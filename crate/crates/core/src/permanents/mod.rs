//! Exact permanents: the brute-force oracle, Ryser, Glynn and its
//! repeated-row variants, Glynn–Kan, Cauchy–Binet, and an exact rational path
//! for integer-matrix identities.
//!
//! Conventions: the permanent of a non-square matrix is 0 and the permanent
//! of the empty matrix is 1. Formulas that are only valid when `|p| = |q|`
//! return 0 (and log a warning) on mismatched weights.

mod cauchy_binet;
mod exact;
mod glynn;
mod glynn_kan;
mod naive;
mod ryser;

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::combinatorics::{repeat_matrix, RepetitionPattern};
use crate::numerics::ComplexMatrix;

pub use cauchy_binet::permanent_cauchy_binet;
pub use exact::{permanent_exact_naive, permanent_exact_repeated, RationalMatrix};
pub use glynn::{permanent_glynn, permanent_glynn_repeated_rows, permanent_roots_of_unity};
pub use glynn_kan::{permanent_glynn_kan, permanent_glynn_kan_repeated};
pub use naive::permanent_naive;
pub use ryser::{permanent_ryser, permanent_ryser_repeated};

/// Largest number of summands any grid-based formula will evaluate.
pub const TERM_BUDGET: u128 = 10_000_000;

pub const NAIVE_MAX_DIM: usize = 10;
pub const RYSER_MAX_DIM: usize = 30;
pub const GLYNN_MAX_DIM: usize = 30;
pub const GLYNN_KAN_MAX_DIM: usize = 14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Naive,
    Ryser,
    Glynn,
    GlynnRepeatedRows,
    GlynnRootsOfUnity,
    GlynnKan,
    GlynnKanRepeated,
    CauchyBinet,
}

impl Algorithm {
    pub const ALL: [Algorithm; 8] = [
        Algorithm::Naive,
        Algorithm::Ryser,
        Algorithm::Glynn,
        Algorithm::GlynnRepeatedRows,
        Algorithm::GlynnRootsOfUnity,
        Algorithm::GlynnKan,
        Algorithm::GlynnKanRepeated,
        Algorithm::CauchyBinet,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Naive => "naive",
            Algorithm::Ryser => "ryser",
            Algorithm::Glynn => "glynn",
            Algorithm::GlynnRepeatedRows => "glynn-repeated-rows",
            Algorithm::GlynnRootsOfUnity => "glynn-roots-of-unity",
            Algorithm::GlynnKan => "glynn-kan",
            Algorithm::GlynnKanRepeated => "glynn-kan-repeated",
            Algorithm::CauchyBinet => "cauchy-binet",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.to_ascii_lowercase().replace('_', "-");
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == key)
            .or(match key.as_str() {
                "roots-of-unity" | "roots" => Some(Algorithm::GlynnRootsOfUnity),
                "gk" => Some(Algorithm::GlynnKan),
                _ => None,
            })
            .ok_or_else(|| {
                let names: Vec<_> = Algorithm::ALL.iter().map(|a| a.name()).collect();
                format!("unknown algorithm '{s}' (expected one of: {})", names.join(", "))
            })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PermanentResult {
    pub value: C64,
    pub algorithm: Algorithm,
    pub term_count: u64,
}

impl PermanentResult {
    fn new(value: C64, algorithm: Algorithm, term_count: u64) -> Self {
        Self { value, algorithm, term_count }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PermanentError {
    #[error("{algorithm}: size {size} exceeds the limit {limit}")]
    TooLarge { algorithm: Algorithm, size: u128, limit: u128 },
    #[error("pattern length {found} does not match matrix dimension {expected}")]
    PatternMismatch { expected: usize, found: usize },
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
}

fn check_dim(algorithm: Algorithm, dim: usize, limit: usize) -> Result<(), PermanentError> {
    if dim > limit {
        return Err(PermanentError::TooLarge { algorithm, size: dim as u128, limit: limit as u128 });
    }
    Ok(())
}

fn check_budget(algorithm: Algorithm, terms: u128) -> Result<(), PermanentError> {
    if terms > TERM_BUDGET {
        return Err(PermanentError::TooLarge { algorithm, size: terms, limit: TERM_BUDGET });
    }
    Ok(())
}

fn check_pattern(a: &ComplexMatrix, pat: &RepetitionPattern) -> Result<usize, PermanentError> {
    let dim = a.dim().map_err(|_| PermanentError::NotSquare { rows: a.rows(), cols: a.cols() })?;
    if pat.len() != dim {
        return Err(PermanentError::PatternMismatch { expected: dim, found: pat.len() });
    }
    Ok(dim)
}

fn weight_mismatch(algorithm: Algorithm, pat: &RepetitionPattern) -> PermanentResult {
    log::warn!(
        "{algorithm}: |p| = {} differs from |q| = {}, permanent taken as 0",
        pat.rows.weight(),
        pat.cols.weight()
    );
    PermanentResult::new(C64::new(0.0, 0.0), algorithm, 0)
}

/// Below this many summands a formula runs on the calling thread.
const PARALLEL_THRESHOLD: u64 = 1 << 16;

/// Sums `chunk(start, end)` over a partition of `[0, total)`. Chunk results
/// are added in index order, so the value does not depend on the thread count.
fn chunked_sum<F>(total: u64, chunk: F) -> C64
where
    F: Fn(u64, u64) -> C64 + Sync,
{
    if total < PARALLEL_THRESHOLD {
        return chunk(0, total);
    }
    let pieces = 256u64.min(total);
    let step = total.div_ceil(pieces);
    let parts: Vec<C64> = (0..pieces)
        .into_par_iter()
        .map(|k| {
            let start = k * step;
            let end = ((k + 1) * step).min(total);
            if start >= end {
                C64::new(0.0, 0.0)
            } else {
                chunk(start, end)
            }
        })
        .collect();
    parts.into_iter().sum()
}

/// `(−1)^n`.
#[inline]
fn alternating(n: usize) -> f64 {
    if n.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// `(−1)^{popcount(bits)}`: the sign product of a ±1 vector encoded as bits.
#[inline]
fn parity_sign(bits: u64) -> f64 {
    if bits.count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// `Per(A_{p,q})` through the named algorithm. `b` is only used by
/// Cauchy–Binet (which computes `Per((AB)_{p,q})`); it defaults to the identity.
pub fn permanent_with(
    algorithm: Algorithm,
    a: &ComplexMatrix,
    pattern: Option<&RepetitionPattern>,
    b: Option<&ComplexMatrix>,
) -> Result<PermanentResult, PermanentError> {
    let dim = a.dim().map_err(|_| PermanentError::NotSquare { rows: a.rows(), cols: a.cols() })?;
    let ones = RepetitionPattern::ones(dim);
    let pat = pattern.unwrap_or(&ones);
    check_pattern(a, pat)?;
    match algorithm {
        Algorithm::Naive => permanent_naive(&repeat_matrix(a, pat)),
        Algorithm::Ryser => permanent_ryser_repeated(a, pat),
        Algorithm::Glynn => permanent_glynn(&repeat_matrix(a, pat)),
        Algorithm::GlynnKan => permanent_glynn_kan(&repeat_matrix(a, pat)),
        Algorithm::GlynnRepeatedRows => {
            if pat.cols.iter().any(|&k| k != 1) {
                // Per(A_{p,q}) = Per((A^T)_{q,p}) moves any column pattern of
                // ones to the row side; otherwise repeat columns explicitly.
                if pat.rows.iter().all(|&k| k == 1) {
                    return permanent_glynn_repeated_rows(&a.transpose(), &pat.cols);
                }
                return permanent_glynn(&repeat_matrix(a, pat));
            }
            permanent_glynn_repeated_rows(a, &pat.rows)
        }
        Algorithm::GlynnRootsOfUnity => permanent_roots_of_unity(a, pat),
        Algorithm::GlynnKanRepeated => permanent_glynn_kan_repeated(a, pat),
        Algorithm::CauchyBinet => {
            let id = ComplexMatrix::identity(dim);
            permanent_cauchy_binet(a, b.unwrap_or(&id), pat)
        }
    }
}
