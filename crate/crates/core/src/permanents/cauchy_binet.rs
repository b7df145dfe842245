use num_complex::Complex64 as C64;
use num_traits::{One, Zero};

use super::{check_budget, check_pattern, permanent_ryser_repeated, weight_mismatch, Algorithm, PermanentError, PermanentResult};
use crate::combinatorics::{enumerate_weight, weight_class_size, RepetitionPattern};
use crate::numerics::ComplexMatrix;
use num_traits::ToPrimitive;

/// `Per((AB)_{p,q}) = Σ_{|k|=n} Per(A_{p,k}) Per(B_{k,q}) / k!`.
///
/// Only `|k| = |p|` contributes since the other repetitions are not square.
/// The inner permanents use the multiset Ryser form.
pub fn permanent_cauchy_binet(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    pat: &RepetitionPattern,
) -> Result<PermanentResult, PermanentError> {
    let m = check_pattern(a, pat)?;
    check_pattern(b, pat)?;
    if !pat.square_compatible() {
        return Ok(weight_mismatch(Algorithm::CauchyBinet, pat));
    }
    let n = pat.rows.weight();
    if n == 0 {
        return Ok(PermanentResult::new(C64::one(), Algorithm::CauchyBinet, 1));
    }
    let count = weight_class_size(m, n).to_u128().unwrap_or(u128::MAX);
    // each term runs two inner permanents of at most (n+1)^m terms
    let inner = ((n + 1) as u128).saturating_pow(m as u32).min(1u128 << n.min(100));
    check_budget(Algorithm::CauchyBinet, count.saturating_mul(2 * inner))?;

    let mut total = C64::zero();
    for k in enumerate_weight(m, n) {
        let left = RepetitionPattern::new(pat.rows.clone(), k.clone());
        let right = RepetitionPattern::new(k.clone(), pat.cols.clone());
        let pa = permanent_ryser_repeated(a, &left)?.value;
        if pa.is_zero() {
            continue;
        }
        let pb = permanent_ryser_repeated(b, &right)?.value;
        total += pa * pb / k.factorial_f64();
    }
    Ok(PermanentResult::new(total, Algorithm::CauchyBinet, count as u64))
}
