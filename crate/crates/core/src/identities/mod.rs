//! Executable permanent identities. Each verifier builds both sides
//! independently (left sides from brute-force permanents of repeated
//! matrices, right sides from the series engine or closed forms) and reports
//! the largest coefficient discrepancy.

mod battery;
mod even;
mod generating;
mod mmmt;
mod sn;

use std::collections::BTreeMap;

use num_complex::Complex64 as C64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::combinatorics::{repeat_matrix, MultiIndex, RepetitionPattern};
use crate::numerics::{ComplexMatrix, NumericsError};
use crate::permanents::{permanent_exact_repeated, permanent_naive, permanent_ryser_repeated, PermanentError, RationalMatrix};
use crate::series::{det_series, Coeff, DegreeCap, SeriesError, TruncatedSeries};

pub use battery::{run_battery, run_identity, BatteryEntry, BATTERY, IDENTITY_OPERATIONS};
pub use even::{verify_even_matrix, verify_tmss_overlap, EvenMode};
pub use generating::{
    verify_generating_function, verify_laplace, verify_sum_formula, verify_sum_of_permanents, GeneratingFunction,
};
pub use even::tmss_tail_bound;
pub use mmmt::{
    dixon_closed_form, dixon_matrix, verify_corollary_rank_one, verify_dixon, verify_macmahon, verify_macmahon_exact,
    verify_mmmt_n, verify_mmmt_n_reduction, verify_mmmt_two, verify_mmmt_two_reductions, verify_monomial_glynn,
};
pub use sn::{sn_value, verify_sn_identity, SN_MAX_ORDER};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub identity_name: String,
    /// Largest discrepancy over the checked coefficients: absolute for
    /// magnitudes up to 1, relative above. Zero means exact agreement.
    pub max_abs_error: f64,
    pub num_coefficients_checked: usize,
    pub caps_used: DegreeCap,
    pub tolerance: f64,
    pub ring: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub worst_coefficient: Option<MultiIndex>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty", default)]
    pub details: BTreeMap<String, String>,
}

impl IdentityReport {
    /// Combines sub-checks of one identity under a single name.
    pub fn merge(name: &str, parts: Vec<IdentityReport>) -> IdentityReport {
        let mut out = IdentityReport {
            identity_name: name.to_string(),
            max_abs_error: 0.0,
            num_coefficients_checked: 0,
            caps_used: parts.first().map(|p| p.caps_used.clone()).unwrap_or_else(|| DegreeCap::new(vec![])),
            tolerance: parts.iter().map(|p| p.tolerance).fold(f64::INFINITY, f64::min),
            ring: parts.first().map(|p| p.ring.clone()).unwrap_or_default(),
            passed: true,
            worst_coefficient: None,
            details: BTreeMap::new(),
        };
        for p in parts {
            if out.worst_coefficient.is_none() || p.max_abs_error > out.max_abs_error {
                out.max_abs_error = p.max_abs_error;
                out.worst_coefficient = p.worst_coefficient.clone();
            }
            out.num_coefficients_checked += p.num_coefficients_checked;
            out.passed &= p.passed;
            out.details.insert(
                format!("{}.max_abs_error", p.identity_name),
                format!("{:e}", p.max_abs_error),
            );
            for (k, v) in p.details {
                out.details.insert(format!("{}.{k}", p.identity_name), v);
            }
        }
        if !out.tolerance.is_finite() {
            out.tolerance = 0.0;
        }
        out
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IdentityError {
    #[error(transparent)]
    Permanent(#[from] PermanentError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error("|p| = {p} and |q| = {q} must be equal")]
    WeightMismatch { p: usize, q: usize },
    #[error("matrix dimension {0} is odd")]
    OddDimension(usize),
    #[error("amplitude {0} is not strictly inside the unit disk")]
    AmplitudeOutOfRange(f64),
    #[error("{0}")]
    InvalidInput(String),
}

/// Scaled coefficient distance for any ring.
fn coefficient_error<R: Coeff>(a: &R, b: &R) -> f64 {
    let scale = a.magnitude().max(b.magnitude()).max(1.0);
    a.distance(b) / scale
}

/// Accumulates coefficient comparisons for one report.
struct Tally {
    name: String,
    cap: DegreeCap,
    ring: &'static str,
    tolerance: f64,
    worst: f64,
    worst_at: Option<MultiIndex>,
    count: usize,
    details: BTreeMap<String, String>,
}

impl Tally {
    fn new<R: Coeff>(name: &str, cap: &DegreeCap, tolerance: f64) -> Self {
        Self {
            name: name.to_string(),
            cap: cap.clone(),
            ring: R::RING,
            tolerance,
            worst: 0.0,
            worst_at: None,
            count: 0,
            details: BTreeMap::new(),
        }
    }

    fn compare<R: Coeff>(&mut self, at: &MultiIndex, lhs: &R, rhs: &R) {
        let err = coefficient_error(lhs, rhs);
        if self.worst_at.is_none() || err > self.worst {
            self.worst = err;
            self.worst_at = Some(at.clone());
        }
        self.count += 1;
    }

    fn compare_series<R: Coeff>(&mut self, lhs: &TruncatedSeries<R>, rhs: &TruncatedSeries<R>) {
        for ((e, a), (_, b)) in lhs.terms().zip(rhs.terms()) {
            self.compare(&e, a, b);
        }
    }

    fn detail(&mut self, key: &str, value: impl ToString) {
        self.details.insert(key.to_string(), value.to_string());
    }

    fn finish(self) -> IdentityReport {
        IdentityReport {
            identity_name: self.name,
            max_abs_error: self.worst,
            num_coefficients_checked: self.count,
            caps_used: self.cap,
            tolerance: self.tolerance,
            ring: self.ring.to_string(),
            passed: self.worst <= self.tolerance,
            worst_coefficient: self.worst_at,
            details: self.details,
        }
    }
}

/// Largest repeated-matrix size handed to the brute-force oracle. Larger
/// repetitions use the multiset Ryser sum, which the permanents tests pin
/// to the brute-force values.
const ORACLE_NAIVE_MAX: usize = 8;

/// Reference `Per(A_{p,q})` for left-hand sides.
fn oracle_permanent(a: &ComplexMatrix, pat: &RepetitionPattern) -> Result<C64, IdentityError> {
    if !pat.square_compatible() {
        return Ok(C64::zero());
    }
    if pat.rows.weight() <= ORACLE_NAIVE_MAX {
        Ok(permanent_naive(&repeat_matrix(a, pat))?.value)
    } else {
        Ok(permanent_ryser_repeated(a, pat)?.value)
    }
}

fn oracle_permanent_exact(a: &RationalMatrix, pat: &RepetitionPattern) -> Result<BigRational, IdentityError> {
    Ok(permanent_exact_repeated(a, pat)?)
}

fn ratio_f64(r: &num_bigint::BigUint) -> f64 {
    r.to_f64().unwrap_or(f64::INFINITY)
}

/// A square matrix with entries in a coefficient ring.
type RingMatrix<R> = Vec<Vec<R>>;

fn complex_rows(a: &ComplexMatrix) -> RingMatrix<C64> {
    (0..a.rows()).map(|i| a.row(i).to_vec()).collect()
}

type SeriesMatrix<R> = Vec<Vec<TruncatedSeries<R>>>;

fn constant_series_matrix<R: Coeff>(a: &RingMatrix<R>, cap: &DegreeCap) -> SeriesMatrix<R> {
    a.iter().map(|row| row.iter().map(|c| TruncatedSeries::constant(cap.clone(), c.clone())).collect()).collect()
}

fn identity_series_matrix<R: Coeff>(dim: usize, cap: &DegreeCap) -> SeriesMatrix<R> {
    (0..dim)
        .map(|i| {
            (0..dim)
                .map(|j| if i == j { TruncatedSeries::one(cap.clone()) } else { TruncatedSeries::zero(cap.clone()) })
                .collect()
        })
        .collect()
}

/// `Diag(z_{offset}, ..., z_{offset+dim−1})`.
fn diag_variables<R: Coeff>(dim: usize, offset: usize, cap: &DegreeCap) -> SeriesMatrix<R> {
    (0..dim)
        .map(|i| {
            (0..dim)
                .map(|j| if i == j { TruncatedSeries::variable(cap.clone(), offset + i) } else { TruncatedSeries::zero(cap.clone()) })
                .collect()
        })
        .collect()
}

fn series_matmul<R: Coeff>(a: &SeriesMatrix<R>, b: &SeriesMatrix<R>) -> Result<SeriesMatrix<R>, SeriesError> {
    let n = a.len();
    let k = b.len();
    let cols = b.first().map_or(0, Vec::len);
    let cap = a[0][0].cap().clone();
    let mut out = vec![vec![TruncatedSeries::zero(cap); cols]; n];
    for i in 0..n {
        for (l, b_row) in b.iter().enumerate().take(k) {
            if a[i][l].constant_term().is_zero() && a[i][l].total_degree().is_none() {
                continue;
            }
            for j in 0..cols {
                out[i][j] = out[i][j].add(&a[i][l].mul(&b_row[j])?)?;
            }
        }
    }
    Ok(out)
}

/// `1/Det(I − K)` for a series matrix `K` with zero constant terms.
fn inverse_det_i_minus<R: Coeff>(k: &SeriesMatrix<R>) -> Result<TruncatedSeries<R>, SeriesError> {
    let cap = k[0][0].cap().clone();
    let id = identity_series_matrix::<R>(k.len(), &cap);
    let m: SeriesMatrix<R> = id
        .iter()
        .zip(k)
        .map(|(ri, rk)| ri.iter().zip(rk).map(|(a, b)| a.sub(b)).collect::<Result<Vec<_>, _>>())
        .collect::<Result<_, _>>()?;
    det_series(&m)?.inverse()
}

/// Values of `1/p!` as ring elements.
fn inv_factorial<R: Coeff>(p: &MultiIndex) -> R {
    let f = p.factorial_product();
    match f.to_i64() {
        Some(v) => R::from_ratio(1, v),
        None => R::one() / big_to_ring::<R>(&f),
    }
}

fn big_to_ring<R: Coeff>(v: &num_bigint::BigUint) -> R {
    // repeated doubling keeps this exact in the rational ring
    let mut acc = R::zero();
    let two = R::from_ratio(2, 1);
    for bit in (0..v.bits()).rev() {
        acc = acc * two.clone();
        if v.bit(bit) {
            acc = acc + R::one();
        }
    }
    acc
}

fn rational_from_i64(rows: &[&[i64]]) -> RationalMatrix {
    rows.iter().map(|r| r.iter().map(|&x| BigRational::from_integer(x.into())).collect()).collect()
}

#[cfg(test)]
mod tests {
    use num_traits::One;

    use super::*;

    #[test]
    fn big_integer_conversion_is_exact() {
        let f = crate::combinatorics::factorial(25);
        let r: BigRational = big_to_ring(&f);
        assert_eq!(r, BigRational::from_integer(f.into()));
        let p = MultiIndex::from([21, 3]);
        let inv: BigRational = inv_factorial(&p);
        assert_eq!(inv * BigRational::from_integer(p.factorial_product().into()), BigRational::one());
    }

    #[test]
    fn merged_reports_keep_worst_case() {
        let cap = DegreeCap::uniform(1, 1);
        let mut a = Tally::new::<C64>("a", &cap, 1e-8);
        a.compare(&MultiIndex::from([0]), &C64::new(1.0, 0.0), &C64::new(1.0, 1e-9));
        let mut b = Tally::new::<C64>("b", &cap, 1e-8);
        b.compare(&MultiIndex::from([1]), &C64::new(1.0, 0.0), &C64::new(1.0, 1e-6));
        let merged = IdentityReport::merge("ab", vec![a.finish(), b.finish()]);
        assert!(!merged.passed);
        assert_eq!(merged.worst_coefficient, Some(MultiIndex::from([1])));
        assert_eq!(merged.num_coefficients_checked, 2);
        assert!(rational_from_i64(&[&[1]])[0][0].is_one());
    }
}
