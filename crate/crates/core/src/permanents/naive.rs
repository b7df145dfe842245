use num_complex::Complex64 as C64;
use num_traits::{One, Zero};

use super::{check_dim, Algorithm, PermanentError, PermanentResult, NAIVE_MAX_DIM};
use crate::combinatorics::factorial;
use crate::numerics::ComplexMatrix;

/// `Σ_σ Π_k a_{k,σ(k)}` over all `m!` permutations, enumerated by Heap's
/// algorithm. This is the oracle every other formula is checked against.
pub fn permanent_naive(a: &ComplexMatrix) -> Result<PermanentResult, PermanentError> {
    if !a.is_square() {
        return Ok(PermanentResult::new(C64::zero(), Algorithm::Naive, 0));
    }
    let m = a.rows();
    check_dim(Algorithm::Naive, m, NAIVE_MAX_DIM)?;
    if m == 0 {
        return Ok(PermanentResult::new(C64::one(), Algorithm::Naive, 1));
    }
    let mut perm: Vec<usize> = (0..m).collect();
    let mut counters = vec![0usize; m];
    let product = |perm: &[usize]| perm.iter().enumerate().fold(C64::one(), |acc, (i, &j)| acc * a[(i, j)]);
    let mut total = product(&perm);
    let mut i = 1;
    while i < m {
        if counters[i] < i {
            let swap_with = if i % 2 == 0 { 0 } else { counters[i] };
            perm.swap(swap_with, i);
            total += product(&perm);
            counters[i] += 1;
            i = 1;
        } else {
            counters[i] = 0;
            i += 1;
        }
    }
    let terms = u64::try_from(factorial(m)).unwrap_or(u64::MAX);
    Ok(PermanentResult::new(total, Algorithm::Naive, terms))
}
