use num_complex::Complex64 as C64;
use num_traits::{One, Zero};

use super::{
    alternating, check_budget, check_dim, check_pattern, chunked_sum, parity_sign, weight_mismatch, Algorithm, PermanentError,
    PermanentResult, RYSER_MAX_DIM,
};
use crate::combinatorics::{binomial_f64, RepetitionPattern};
use crate::numerics::ComplexMatrix;

/// Ryser's inclusion–exclusion over column subsets,
/// `(−1)^m Σ_S (−1)^{|S|} Π_i Σ_{j∈S} a_ij`, visiting subsets in Gray-code
/// order so each step updates the row sums by a single column.
pub fn permanent_ryser(a: &ComplexMatrix) -> Result<PermanentResult, PermanentError> {
    if !a.is_square() {
        return Ok(PermanentResult::new(C64::zero(), Algorithm::Ryser, 0));
    }
    let m = a.rows();
    check_dim(Algorithm::Ryser, m, RYSER_MAX_DIM)?;
    if m == 0 {
        return Ok(PermanentResult::new(C64::one(), Algorithm::Ryser, 1));
    }
    let total = 1u64 << m;
    let sum = chunked_sum(total, |start, end| ryser_chunk(a, start, end));
    let value = sum * alternating(m);
    Ok(PermanentResult::new(value, Algorithm::Ryser, total - 1))
}

fn ryser_chunk(a: &ComplexMatrix, start: u64, end: u64) -> C64 {
    let m = a.rows();
    let mut gray = start ^ (start >> 1);
    let mut sums = vec![C64::zero(); m];
    for j in 0..m {
        if gray >> j & 1 == 1 {
            for (i, s) in sums.iter_mut().enumerate() {
                *s += a[(i, j)];
            }
        }
    }
    let term = |gray: u64, sums: &[C64]| sums.iter().product::<C64>() * parity_sign(gray);
    let mut acc = term(gray, &sums);
    for k in start + 1..end {
        let j = k.trailing_zeros() as usize;
        gray ^= 1 << j;
        if gray >> j & 1 == 1 {
            for (i, s) in sums.iter_mut().enumerate() {
                *s += a[(i, j)];
            }
        } else {
            for (i, s) in sums.iter_mut().enumerate() {
                *s -= a[(i, j)];
            }
        }
        acc += term(gray, &sums);
    }
    acc
}

/// `Per(A_{p,q})` by Ryser's formula over sub-multisets of the repeated
/// columns:
/// `Σ_{0≤k≤q} (−1)^{|q|−|k|} Π_j C(q_j, k_j) Π_i (Σ_j k_j a_ij)^{p_i}`.
/// Costs `Π (q_j + 1)` terms instead of `2^{|q|}`.
pub fn permanent_ryser_repeated(a: &ComplexMatrix, pat: &RepetitionPattern) -> Result<PermanentResult, PermanentError> {
    let m = check_pattern(a, pat)?;
    if !pat.square_compatible() {
        return Ok(weight_mismatch(Algorithm::Ryser, pat));
    }
    let n = pat.rows.weight();
    if n == 0 {
        return Ok(PermanentResult::new(C64::one(), Algorithm::Ryser, 1));
    }
    let q = pat.cols.parts();
    let p = pat.rows.parts();
    let terms: u128 = q.iter().map(|&k| k as u128 + 1).product();
    check_budget(Algorithm::Ryser, terms)?;

    let mut k = vec![0usize; m];
    let mut sums = vec![C64::zero(); m];
    let mut total = C64::zero();
    loop {
        let weight: f64 = q.iter().zip(&k).map(|(&qj, &kj)| binomial_f64(qj, kj)).product();
        let removed: usize = q.iter().zip(&k).map(|(qj, kj)| qj - kj).sum();
        let prod = sums
            .iter()
            .zip(p)
            .filter(|(_, &pi)| pi > 0)
            .fold(C64::one(), |acc, (s, &pi)| acc * s.powu(pi as u32));
        total += prod * (weight * alternating(removed));

        // odometer step; sums are rebuilt from k so rounding does not drift
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
        for (i, s) in sums.iter_mut().enumerate() {
            *s = (0..m).map(|c| a[(i, c)] * k[c] as f64).sum();
        }
    }
    Ok(PermanentResult::new(total, Algorithm::Ryser, terms as u64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::repeat_matrix;
    use crate::numerics::random::{random_disk_matrix, seeded_rng};
    use crate::numerics::scaled_error;
    use crate::permanents::permanent_naive;

    #[test]
    fn small_cases() {
        assert_eq!(permanent_ryser(&ComplexMatrix::identity(4)).unwrap().value, C64::one());
        assert_eq!(permanent_ryser(&ComplexMatrix::ones(5)).unwrap().value, C64::new(120.0, 0.0));
        assert_eq!(permanent_ryser(&ComplexMatrix::ones(5)).unwrap().term_count, 31);
    }

    #[test]
    fn matches_naive_on_random_matrices() {
        let mut rng = seeded_rng(50);
        for m in 1..=7 {
            let a = random_disk_matrix(m, &mut rng);
            let r = permanent_ryser(&a).unwrap().value;
            let n = permanent_naive(&a).unwrap().value;
            assert!(scaled_error(r, n) <= 1e-9, "m={m}: {r} vs {n}");
        }
    }

    #[test]
    fn repeated_form_matches_naive() {
        let mut rng = seeded_rng(51);
        let a = random_disk_matrix(3, &mut rng);
        for (p, q) in [([2, 1, 0], [1, 1, 1]), ([0, 0, 4], [2, 0, 2]), ([3, 3, 0], [1, 2, 3])] {
            let pat = RepetitionPattern::new(p, q);
            let r = permanent_ryser_repeated(&a, &pat).unwrap();
            let n = permanent_naive(&repeat_matrix(&a, &pat)).unwrap().value;
            assert!(scaled_error(r.value, n) <= 1e-10, "{p:?},{q:?}: {} vs {n}", r.value);
        }
    }

    #[test]
    fn repeated_form_conventions() {
        let a = ComplexMatrix::ones(2);
        let empty = RepetitionPattern::new([0, 0], [0, 0]);
        assert_eq!(permanent_ryser_repeated(&a, &empty).unwrap().value, C64::one());
        let mismatch = RepetitionPattern::new([1, 0], [1, 1]);
        assert_eq!(permanent_ryser_repeated(&a, &mismatch).unwrap().value, C64::zero());
    }
}
