use std::f64::consts::TAU;

use num_complex::Complex64 as C64;
use num_traits::{One, Zero};

use super::{
    check_budget, check_dim, check_pattern, chunked_sum, parity_sign, weight_mismatch, Algorithm, PermanentError,
    PermanentResult, GLYNN_MAX_DIM,
};
use crate::combinatorics::{MultiIndex, RepetitionPattern};
use crate::numerics::ComplexMatrix;

/// Glynn's formula
/// `2^{1−m} Σ_{x∈{±1}^m, x_1=1} (Π x) Π_i Σ_j a_ij x_j`,
/// with Gray-code sign flips updating one column contribution per step.
pub fn permanent_glynn(a: &ComplexMatrix) -> Result<PermanentResult, PermanentError> {
    if !a.is_square() {
        return Ok(PermanentResult::new(C64::zero(), Algorithm::Glynn, 0));
    }
    let m = a.rows();
    check_dim(Algorithm::Glynn, m, GLYNN_MAX_DIM)?;
    if m == 0 {
        return Ok(PermanentResult::new(C64::one(), Algorithm::Glynn, 1));
    }
    let total = 1u64 << (m - 1);
    let ones = vec![1u32; m];
    // x_1 is pinned to +1: the free signs are columns 1..m
    let sum = chunked_sum(total, |start, end| sign_sum_chunk(a, &ones, 1, start, end));
    Ok(PermanentResult::new(sum / total as f64, Algorithm::Glynn, total))
}

/// `Per(A_{q,1})` for an `n×n` matrix `A`:
/// `δ_{|q|,n} 2^{−n} Σ_{x∈{±1}^n} (Π x) Π_i (Σ_j a_ij x_j)^{q_i}`.
pub fn permanent_glynn_repeated_rows(a: &ComplexMatrix, q: &MultiIndex) -> Result<PermanentResult, PermanentError> {
    let n = a.dim().map_err(|_| PermanentError::NotSquare { rows: a.rows(), cols: a.cols() })?;
    if q.len() != n {
        return Err(PermanentError::PatternMismatch { expected: n, found: q.len() });
    }
    if q.weight() != n {
        let pat = RepetitionPattern::new(q.clone(), MultiIndex::ones(n));
        return Ok(weight_mismatch(Algorithm::GlynnRepeatedRows, &pat));
    }
    check_dim(Algorithm::GlynnRepeatedRows, n, GLYNN_MAX_DIM)?;
    if n == 0 {
        return Ok(PermanentResult::new(C64::one(), Algorithm::GlynnRepeatedRows, 1));
    }
    let total = 1u64 << n;
    let powers: Vec<u32> = q.iter().map(|&k| k as u32).collect();
    let sum = chunked_sum(total, |start, end| sign_sum_chunk(a, &powers, 0, start, end));
    Ok(PermanentResult::new(sum / total as f64, Algorithm::GlynnRepeatedRows, total))
}

/// Sum of `(Π x) Π_i (Σ_j a_ij x_j)^{powers_i}` for Gray codes in
/// `[start, end)`. Bit `b` of the code is the sign of column `offset + b`;
/// columns before `offset` stay at `+1`.
fn sign_sum_chunk(a: &ComplexMatrix, powers: &[u32], offset: usize, start: u64, end: u64) -> C64 {
    let m = a.rows();
    let mut gray = start ^ (start >> 1);
    let sign_of = |gray: u64, j: usize| if j >= offset && gray >> (j - offset) & 1 == 1 { -1.0 } else { 1.0 };
    let mut sums: Vec<C64> = (0..m).map(|i| (0..m).map(|j| a[(i, j)] * sign_of(gray, j)).sum()).collect();
    let term = |gray: u64, sums: &[C64]| {
        let prod = sums
            .iter()
            .zip(powers)
            .filter(|(_, &k)| k > 0)
            .fold(C64::one(), |acc, (s, &k)| acc * if k == 1 { *s } else { s.powu(k) });
        prod * parity_sign(gray)
    };
    let mut acc = term(gray, &sums);
    for k in start + 1..end {
        let b = k.trailing_zeros() as usize;
        gray ^= 1 << b;
        let j = b + offset;
        // the sign of column j just flipped: new contribution minus old is ±2a_ij
        let delta = if gray >> b & 1 == 1 { -2.0 } else { 2.0 };
        for (i, s) in sums.iter_mut().enumerate() {
            *s += a[(i, j)] * delta;
        }
        acc += term(gray, &sums);
    }
    acc
}

/// Roots-of-unity form for repeated rows and columns:
/// `Per(A_{p,q}) = (q!/N^m) Σ_{x∈μ_N^m} x^{−q} (Ax)^p` with `N = n = |p| = |q|`.
///
/// With `N = n` the grid cannot tell exponent `n` from exponent `0`, so when
/// `q` puts all `n` repetitions on one column (and `m ≥ 2`) the coefficient
/// of another monomial leaks in. Roots of order `n + 1` are used in that case.
pub fn permanent_roots_of_unity(a: &ComplexMatrix, pat: &RepetitionPattern) -> Result<PermanentResult, PermanentError> {
    let m = check_pattern(a, pat)?;
    if !pat.square_compatible() {
        return Ok(weight_mismatch(Algorithm::GlynnRootsOfUnity, pat));
    }
    let n = pat.rows.weight();
    if n == 0 {
        return Ok(PermanentResult::new(C64::one(), Algorithm::GlynnRootsOfUnity, 1));
    }
    let order = grid_order(&pat.cols, n);
    let terms = (order as u128).pow(m as u32);
    check_budget(Algorithm::GlynnRootsOfUnity, terms)?;

    let roots: Vec<C64> = (0..order).map(|k| C64::from_polar(1.0, TAU * k as f64 / order as f64)).collect();
    let q = pat.cols.parts();
    let p = pat.rows.parts();
    // x_0 runs fastest; the chunk index enumerates the other m−1 digits
    let outer = (order as u64).pow(m as u32 - 1);
    let sum = chunked_sum(outer, |start, end| {
        let mut acc = C64::zero();
        let mut digits = vec![0usize; m];
        for idx in start..end {
            let mut rest = idx;
            for d in digits.iter_mut().skip(1) {
                *d = (rest % order as u64) as usize;
                rest /= order as u64;
            }
            let base: Vec<C64> = (0..m).map(|i| (1..m).map(|j| a[(i, j)] * roots[digits[j]]).sum()).collect();
            let mut exponent: usize = (1..m).map(|j| digits[j] * q[j]).sum();
            for k0 in 0..order {
                exponent += if k0 == 0 { 0 } else { q[0] };
                let x0 = roots[k0];
                let prod = (0..m)
                    .filter(|&i| p[i] > 0)
                    .fold(C64::one(), |acc, i| acc * (base[i] + a[(i, 0)] * x0).powu(p[i] as u32));
                // x^{−q} = conj(ω^{Σ k_j q_j})
                acc += prod * roots[exponent % order].conj();
            }
        }
        acc
    });
    let scale = pat.cols.factorial_f64() / terms as f64;
    Ok(PermanentResult::new(sum * scale, Algorithm::GlynnRootsOfUnity, terms as u64))
}

/// Order of the root-of-unity grid that extracts `[x^q]` from a degree-`n`
/// form without aliasing.
fn grid_order(q: &MultiIndex, n: usize) -> usize {
    let concentrated = q.len() >= 2 && q.iter().any(|&k| k == n);
    if concentrated {
        n + 1
    } else {
        n
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::repeat_matrix;
    use crate::numerics::random::{random_disk_matrix, seeded_rng};
    use crate::numerics::scaled_error;
    use crate::permanents::permanent_naive;

    #[test]
    fn single_entry() {
        let a = ComplexMatrix::from_rows(&[[C64::new(0.3, -1.2)]]);
        let r = permanent_glynn(&a).unwrap();
        assert_eq!(r.value, C64::new(0.3, -1.2));
        assert_eq!(r.term_count, 1);
    }

    #[test]
    fn dixon_matrix_vanishes() {
        let a = ComplexMatrix::from_real_rows(&[[0.0, 1.0, -1.0], [-1.0, 0.0, 1.0], [1.0, -1.0, 0.0]]);
        assert_eq!(permanent_naive(&a).unwrap().value, C64::zero());
        assert!(permanent_glynn(&a).unwrap().value.norm() < 1e-15);
    }

    #[test]
    fn matches_naive_on_random_matrices() {
        let mut rng = seeded_rng(60);
        for m in 1..=7 {
            let a = random_disk_matrix(m, &mut rng);
            let g = permanent_glynn(&a).unwrap();
            let n = permanent_naive(&a).unwrap().value;
            assert!(scaled_error(g.value, n) <= 1e-9, "m={m}");
            assert_eq!(g.term_count, 1 << (m - 1));
        }
    }

    #[test]
    fn repeated_rows_reduce_to_glynn() {
        let a = random_disk_matrix(5, &mut seeded_rng(61));
        let r = permanent_glynn_repeated_rows(&a, &MultiIndex::ones(5)).unwrap().value;
        assert!(scaled_error(r, permanent_glynn(&a).unwrap().value) < 1e-12);
    }

    #[test]
    fn repeated_rows_match_naive() {
        let a = random_disk_matrix(4, &mut seeded_rng(62));
        let q = MultiIndex::from([2, 1, 1, 0]);
        let r = permanent_glynn_repeated_rows(&a, &q).unwrap();
        let oracle = permanent_naive(&repeat_matrix(&a, &RepetitionPattern::new(q, MultiIndex::ones(4)))).unwrap();
        assert!(scaled_error(r.value, oracle.value) <= 1e-9);
        assert_eq!(r.term_count, 16);
    }

    #[test]
    fn repeated_rows_weight_guard() {
        let a = random_disk_matrix(3, &mut seeded_rng(63));
        let r = permanent_glynn_repeated_rows(&a, &MultiIndex::from([1, 1, 0])).unwrap();
        assert_eq!(r.value, C64::zero());
    }

    #[test]
    fn roots_of_unity_cases() {
        let id = ComplexMatrix::identity(2);
        let r = permanent_roots_of_unity(&id, &RepetitionPattern::new([2, 0], [2, 0])).unwrap();
        assert!((r.value - 2.0).norm() < 1e-14);

        let a = random_disk_matrix(2, &mut seeded_rng(64));
        let pat = RepetitionPattern::new([2, 0], [1, 1]);
        let oracle = permanent_naive(&repeat_matrix(&a, &pat)).unwrap().value;
        assert!(scaled_error(permanent_roots_of_unity(&a, &pat).unwrap().value, oracle) < 1e-12);

        let a = random_disk_matrix(5, &mut seeded_rng(65));
        let r = permanent_roots_of_unity(&a, &RepetitionPattern::ones(5)).unwrap();
        assert!(scaled_error(r.value, permanent_glynn(&a).unwrap().value) <= 1e-8);
        assert_eq!(r.term_count, 5u64.pow(5));
    }

    #[test]
    fn roots_of_unity_concentrated_columns() {
        // with order-n roots this pattern would pick up [x_1^2](x_1)^2 = 1
        let id = ComplexMatrix::identity(2);
        let r = permanent_roots_of_unity(&id, &RepetitionPattern::new([2, 0], [0, 2])).unwrap();
        assert!(r.value.norm() < 1e-14);
        let a = random_disk_matrix(3, &mut seeded_rng(66));
        for (p, q) in [([1, 1, 0], [0, 2, 0]), ([0, 0, 1], [1, 0, 0]), ([3, 0, 0], [0, 0, 3])] {
            let pat = RepetitionPattern::new(p, q);
            let oracle = permanent_naive(&repeat_matrix(&a, &pat)).unwrap().value;
            assert!(scaled_error(permanent_roots_of_unity(&a, &pat).unwrap().value, oracle) < 1e-12);
        }
    }
}
