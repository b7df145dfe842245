use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{check_budget, Algorithm, PermanentError};
use crate::combinatorics::{binomial, RepetitionPattern};

/// Square matrix of exact rationals, as nested rows.
pub type RationalMatrix = Vec<Vec<BigRational>>;

/// Exact `Σ_σ Π a_{k,σ(k)}` by recursive expansion along the first row.
/// Oracle for the exact path on small matrices.
pub fn permanent_exact_naive(a: &[Vec<BigRational>]) -> BigRational {
    let m = a.len();
    let mut used = vec![false; m];
    fn expand(a: &[Vec<BigRational>], row: usize, used: &mut [bool]) -> BigRational {
        if row == a.len() {
            return BigRational::one();
        }
        let mut acc = BigRational::zero();
        for j in 0..a.len() {
            if used[j] || a[row][j].is_zero() {
                continue;
            }
            used[j] = true;
            acc += &a[row][j] * expand(a, row + 1, used);
            used[j] = false;
        }
        acc
    }
    expand(a, 0, &mut used)
}

/// Exact `Per(A_{p,q})` by the multiset Ryser formula
/// `Σ_{0≤k≤q} (−1)^{|q|−|k|} Π_j C(q_j,k_j) Π_i (Σ_j k_j a_ij)^{p_i}`,
/// which needs `Π (q_j+1)` terms however large `|p|` gets.
pub fn permanent_exact_repeated(
    a: &[Vec<BigRational>],
    pat: &RepetitionPattern,
) -> Result<BigRational, PermanentError> {
    let m = a.len();
    if pat.len() != m || a.iter().any(|row| row.len() != m) {
        return Err(PermanentError::PatternMismatch { expected: m, found: pat.len() });
    }
    if !pat.square_compatible() {
        log::warn!("exact permanent: |p| != |q|, taken as 0");
        return Ok(BigRational::zero());
    }
    let q = pat.cols.parts();
    let p = pat.rows.parts();
    let terms: u128 = q.iter().map(|&k| k as u128 + 1).product();
    check_budget(Algorithm::Ryser, terms)?;

    let mut k = vec![0usize; m];
    let mut total = BigRational::zero();
    loop {
        let weight: BigInt = q.iter().zip(&k).map(|(&qj, &kj)| BigInt::from(binomial(qj, kj))).product();
        let mut prod = BigRational::from_integer(weight);
        for i in 0..m {
            if p[i] == 0 {
                continue;
            }
            let s: BigRational = (0..m).filter(|&j| k[j] > 0).map(|j| &a[i][j] * BigInt::from(k[j])).sum();
            if s.is_zero() {
                prod = BigRational::zero();
                break;
            }
            prod *= num_traits::pow(s, p[i]);
        }
        let removed: usize = q.iter().zip(&k).map(|(qj, kj)| qj - kj).sum();
        if removed % 2 == 1 {
            total -= prod;
        } else {
            total += prod;
        }
        let mut j = 0;
        while j < m {
            if k[j] < q[j] {
                k[j] += 1;
                break;
            }
            k[j] = 0;
            j += 1;
        }
        if j == m {
            break;
        }
    }
    debug_assert!(!total.is_negative() || !total.is_positive());
    Ok(total)
}
