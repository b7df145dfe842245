//! MacMahon's master theorem and its two- and N-matrix generalizations, the
//! rank-one corollary, the monomial form of Glynn's formula and Dixon's
//! identity.

use num_bigint::BigInt;
use num_complex::Complex64 as C64;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{
    complex_rows, constant_series_matrix, diag_variables, inv_factorial, inverse_det_i_minus, oracle_permanent,
    oracle_permanent_exact, rational_from_i64, series_matmul, IdentityError, IdentityReport, RingMatrix, SeriesMatrix,
    Tally,
};
use crate::combinatorics::{binomial, enumerate_bounded, factorial, MultiIndex, RepetitionPattern};
use crate::numerics::ComplexMatrix;
use crate::permanents::RationalMatrix;
use crate::series::{Coeff, DegreeCap, SeriesError, TruncatedSeries};

/// Largest number of coefficients a verifier will tabulate.
pub(super) const COEFFICIENT_BUDGET: usize = 1 << 18;

pub(super) fn check_cap(cap: &DegreeCap, num_vars: usize) -> Result<(), IdentityError> {
    if cap.num_vars() != num_vars {
        return Err(IdentityError::InvalidInput(format!(
            "degree cap has {} variables, expected {num_vars}",
            cap.num_vars()
        )));
    }
    if cap.size() > COEFFICIENT_BUDGET {
        return Err(SeriesError::TooLarge { dim: cap.size(), limit: COEFFICIENT_BUDGET }.into());
    }
    Ok(())
}

pub(super) fn square_dim(a: &ComplexMatrix) -> Result<usize, IdentityError> {
    let m = a.dim()?;
    if m == 0 {
        return Err(IdentityError::InvalidInput("matrix must be non-empty".into()));
    }
    Ok(m)
}

/// `Z_1 A_1 Z_2 A_2 ··· Z_N A_N` with `Z_k` the diagonal of variable group `k`.
pub(super) fn chain_product<R: Coeff>(mats: &[RingMatrix<R>], cap: &DegreeCap) -> Result<SeriesMatrix<R>, SeriesError> {
    let m = mats[0].len();
    let mut acc: Option<SeriesMatrix<R>> = None;
    for (k, a) in mats.iter().enumerate() {
        let za = series_matmul(&diag_variables::<R>(m, k * m, cap), &constant_series_matrix(a, cap))?;
        acc = Some(match acc {
            None => za,
            Some(prev) => series_matmul(&prev, &za)?,
        });
    }
    Ok(acc.expect("at least one matrix"))
}

/// `x^T A y` in variables `x_0..x_{m−1}, y_0..y_{m−1}`.
pub(super) fn bilinear_form(a: &ComplexMatrix, cap: &DegreeCap) -> Result<TruncatedSeries<C64>, SeriesError> {
    let m = a.rows();
    let mut s = TruncatedSeries::zero(cap.clone());
    let mut e = vec![0; 2 * m];
    for i in 0..m {
        for j in 0..m {
            e[i] = 1;
            e[m + j] = 1;
            s = s.add(&TruncatedSeries::monomial(cap.clone(), &e, a[(i, j)]))?;
            e[i] = 0;
            e[m + j] = 0;
        }
    }
    Ok(s)
}

/// `Π_i (Σ_j a_ij z_j)^{p_i}`.
fn monomial_product<R: Coeff>(a: &RingMatrix<R>, p: &MultiIndex, cap: &DegreeCap) -> Result<TruncatedSeries<R>, SeriesError> {
    let mut acc = TruncatedSeries::one(cap.clone());
    for (row, &pi) in a.iter().zip(p.iter()) {
        if pi > 0 {
            acc = acc.mul(&TruncatedSeries::linear(cap.clone(), row).powu(pi))?;
        }
    }
    Ok(acc)
}

fn macmahon_core<R: Coeff>(
    name: &str,
    a: &RingMatrix<R>,
    cap: &DegreeCap,
    tolerance: f64,
    per: impl Fn(&MultiIndex) -> Result<R, IdentityError>,
) -> Result<IdentityReport, IdentityError> {
    let rhs = inverse_det_i_minus(&chain_product(std::slice::from_ref(a), cap)?)?;
    let mut tally = Tally::new::<R>(name, cap, tolerance);
    for p in enumerate_bounded(cap.caps()) {
        let lhs = per(&p)? * inv_factorial::<R>(&p);
        tally.compare(&p, &lhs, rhs.coefficient(&p)?);
    }
    Ok(tally.finish())
}

/// `Σ_p z^p/p! Per(A_{p,p}) = 1/Det(I − ZA)` in complex floating point.
pub fn verify_macmahon(a: &ComplexMatrix, cap: &DegreeCap, tolerance: f64) -> Result<IdentityReport, IdentityError> {
    let m = square_dim(a)?;
    check_cap(cap, m)?;
    macmahon_core("macmahon", &complex_rows(a), cap, tolerance, |p| {
        oracle_permanent(a, &RepetitionPattern::new(p.clone(), p.clone()))
    })
}

/// Exact rational version of [`verify_macmahon`]; passes only on exact
/// agreement of every coefficient.
pub fn verify_macmahon_exact(a: &RationalMatrix, cap: &DegreeCap) -> Result<IdentityReport, IdentityError> {
    let m = a.len();
    if m == 0 || a.iter().any(|r| r.len() != m) {
        return Err(IdentityError::InvalidInput("matrix must be square and non-empty".into()));
    }
    check_cap(cap, m)?;
    macmahon_core("macmahon-exact", a, cap, 0.0, |p| {
        oracle_permanent_exact(a, &RepetitionPattern::new(p.clone(), p.clone()))
    })
}

pub fn dixon_matrix() -> RationalMatrix {
    rational_from_i64(&[&[0, 1, -1], &[-1, 0, 1], &[1, -1, 0]])
}

/// `(−1)^n (3n)!/(n!)³`.
pub fn dixon_closed_form(n: usize) -> BigInt {
    let v = BigInt::from(factorial(3 * n) / factorial(n).pow(3));
    if n % 2 == 1 {
        -v
    } else {
        v
    }
}

fn dixon_binomial_sum(n: usize) -> BigInt {
    (0..=2 * n)
        .map(|k| {
            let c = BigInt::from(binomial(2 * n, k)).pow(3);
            if k % 2 == 1 {
                -c
            } else {
                c
            }
        })
        .sum()
}

/// Dixon's identity at `p = (2n,2n,2n)` for the antisymmetric matrix
/// `[[0,1,−1],[−1,0,1],[1,−1,0]]`: the coefficient `[z^p]` of
/// `1/Det(I − ZA)`, of `(Az)^p`, the oracle `Per(A_{p,p})/p!`, the
/// alternating cube sum and `(−1)^n (3n)!/(n!)³` must all coincide exactly.
pub fn verify_dixon(n: usize) -> Result<IdentityReport, IdentityError> {
    if n == 0 {
        return Err(IdentityError::InvalidInput("Dixon's identity needs n ≥ 1".into()));
    }
    let a = dixon_matrix();
    let p = MultiIndex::from([2 * n; 3]);
    let cap = DegreeCap::uniform(3, 2 * n);
    check_cap(&cap, 3)?;

    let det_side = inverse_det_i_minus(&chain_product(std::slice::from_ref(&a), &cap)?)?.coefficient(&p)?.clone();
    let monomial_side = monomial_product(&a, &p, &cap)?.coefficient(&p)?.clone();
    let oracle = oracle_permanent_exact(&a, &RepetitionPattern::new(p.clone(), p.clone()))? * inv_factorial::<BigRational>(&p);
    let binomial_side = BigRational::from_integer(dixon_binomial_sum(n));
    let closed = BigRational::from_integer(dixon_closed_form(n));

    let mut tally = Tally::new::<BigRational>(&format!("dixon-n{n}"), &cap, 0.0);
    for (label, v) in [
        ("inverse-determinant", &det_side),
        ("monomial", &monomial_side),
        ("permanent", &oracle),
        ("binomial-sum", &binomial_side),
    ] {
        tally.compare(&p, v, &closed);
        tally.detail(label, v);
    }
    tally.detail("closed-form", &closed);
    Ok(tally.finish())
}

/// Coefficient tables of `Σ x^p y^q/(p!q!) Per(A_{p,q}) Per(B_{s})` where
/// `s = (q,p)` when `swap` and `(p,q)` otherwise.
fn two_matrix_table(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    cap: &DegreeCap,
    swap: bool,
) -> Result<TruncatedSeries<C64>, IdentityError> {
    let m = a.rows();
    let mut out = TruncatedSeries::zero(cap.clone());
    for e in enumerate_bounded(cap.caps()) {
        let (p, q) = e.split_at(m);
        if p.weight() != q.weight() {
            continue;
        }
        let pat_a = RepetitionPattern::new(p.clone(), q.clone());
        let pat_b = if swap { pat_a.transposed() } else { pat_a.clone() };
        let v = oracle_permanent(a, &pat_a)? * oracle_permanent(b, &pat_b)? / (p.factorial_f64() * q.factorial_f64());
        out.set_coefficient(&e, v)?;
    }
    Ok(out)
}

fn two_matrix_rhs(a: &ComplexMatrix, b: &ComplexMatrix, cap: &DegreeCap) -> Result<TruncatedSeries<C64>, IdentityError> {
    Ok(inverse_det_i_minus(&chain_product(&[complex_rows(a), complex_rows(b)], cap)?)?)
}

/// Both forms of the two-matrix master theorem:
/// `Per(A_{p,q}) Per(B_{q,p}) ↔ 1/Det(I − XAYB)` and
/// `Per(A_{p,q}) Per(B_{p,q}) ↔ 1/Det(I − XAYB^T)`, plus equality of the
/// first form's tables with the second form applied to `B^T`.
pub fn verify_mmmt_two(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    cap: &DegreeCap,
    tolerance: f64,
) -> Result<IdentityReport, IdentityError> {
    let m = square_dim(a)?;
    if b.rows() != m || b.cols() != m {
        return Err(IdentityError::InvalidInput("A and B must have equal dimensions".into()));
    }
    check_cap(cap, 2 * m)?;
    let bt = b.transpose();

    let lhs_swapped = two_matrix_table(a, b, cap, true)?;
    let rhs_swapped = two_matrix_rhs(a, b, cap)?;
    let lhs_direct = two_matrix_table(a, b, cap, false)?;
    let rhs_direct = two_matrix_rhs(a, &bt, cap)?;
    // second form evaluated at B^T: Per((B^T)_{p,q}) and Det(I − XAY(B^T)^T)
    let lhs_direct_t = two_matrix_table(a, &bt, cap, false)?;
    let rhs_direct_t = two_matrix_rhs(a, &bt.transpose(), cap)?;

    let mut parts = Vec::new();
    for (name, l, r) in [
        ("theorem-form", &lhs_swapped, &rhs_swapped),
        ("transposed-form", &lhs_direct, &rhs_direct),
        ("table-lhs", &lhs_swapped, &lhs_direct_t),
        ("table-rhs", &rhs_swapped, &rhs_direct_t),
    ] {
        let mut t = Tally::new::<C64>(name, cap, tolerance);
        t.compare_series(l, r);
        parts.push(t.finish());
    }
    Ok(IdentityReport::merge("mmmt-two", parts))
}

/// Reductions of the two-matrix theorem: at `B = I` the right side is
/// MacMahon's series in the merged variables `x_i y_i`, and at `B = J_m` it is
/// `1/(1 − x^T A y)`.
pub fn verify_mmmt_two_reductions(a: &ComplexMatrix, cap: &DegreeCap, tolerance: f64) -> Result<IdentityReport, IdentityError> {
    let m = square_dim(a)?;
    check_cap(cap, 2 * m)?;

    let with_identity = two_matrix_rhs(a, &ComplexMatrix::identity(m), cap)?;
    let merged_cap = DegreeCap::new(cap.caps()[..m].iter().zip(&cap.caps()[m..]).map(|(x, y)| *x.min(y)).collect());
    let macmahon = inverse_det_i_minus(&chain_product(&[complex_rows(a)], &merged_cap)?)?;
    let mut t_id = Tally::new::<C64>("identity-b", cap, tolerance);
    for (e, v) in with_identity.terms() {
        let (p, q) = e.split_at(m);
        let expected = if p == q { *macmahon.coefficient(&p)? } else { C64::zero() };
        t_id.compare(&e, v, &expected);
    }

    let with_ones = two_matrix_rhs(a, &ComplexMatrix::ones(m), cap)?;
    let geometric = TruncatedSeries::one(cap.clone()).sub(&bilinear_form(a, cap)?)?.inverse()?;
    let mut t_ones = Tally::new::<C64>("all-ones-b", cap, tolerance);
    t_ones.compare_series(&with_ones, &geometric);
    let lhs_ones = two_matrix_table(a, &ComplexMatrix::ones(m), cap, true)?;
    t_ones.compare_series(&lhs_ones, &geometric);

    Ok(IdentityReport::merge("mmmt-two-reductions", vec![t_id.finish(), t_ones.finish()]))
}

/// N-matrix chain: `Σ Π z_k^{p_k}/p_k! Per(A1_{p1,p2}) ··· Per(AN_{pN,p1})
/// = 1/Det(I − Z1 A1 ··· ZN AN)`.
pub fn verify_mmmt_n(matrices: &[ComplexMatrix], cap: &DegreeCap, tolerance: f64) -> Result<IdentityReport, IdentityError> {
    if matrices.len() < 2 {
        return Err(IdentityError::InvalidInput("the chain needs at least two matrices".into()));
    }
    let m = square_dim(&matrices[0])?;
    if matrices.iter().any(|a| a.rows() != m || a.cols() != m) {
        return Err(IdentityError::InvalidInput("chain matrices must have equal dimensions".into()));
    }
    let n = matrices.len();
    check_cap(cap, n * m)?;
    let rings: Vec<RingMatrix<C64>> = matrices.iter().map(complex_rows).collect();
    let rhs = inverse_det_i_minus(&chain_product(&rings, cap)?)?;

    let mut tally = Tally::new::<C64>(&format!("mmmt-n{n}"), cap, tolerance);
    for e in enumerate_bounded(cap.caps()) {
        let groups: Vec<MultiIndex> = e.parts().chunks(m).map(|c| MultiIndex::new(c.to_vec())).collect();
        let w = groups[0].weight();
        let mut lhs = C64::zero();
        if groups.iter().all(|g| g.weight() == w) {
            lhs = C64::one();
            for k in 0..n {
                let pat = RepetitionPattern::new(groups[k].clone(), groups[(k + 1) % n].clone());
                lhs *= oracle_permanent(&matrices[k], &pat)? / groups[k].factorial_f64();
            }
        }
        tally.compare(&e, &lhs, rhs.coefficient(&e)?);
    }
    Ok(tally.finish())
}

/// Three-matrix chain with `A3 = I`: the coefficient at `(p1, p2, p3)` is
/// `δ_{p1,p3}` times the two-matrix coefficient at `(p1, p2)`.
pub fn verify_mmmt_n_reduction(
    a1: &ComplexMatrix,
    a2: &ComplexMatrix,
    cap: &DegreeCap,
    tolerance: f64,
) -> Result<IdentityReport, IdentityError> {
    let m = square_dim(a1)?;
    check_cap(cap, 2 * m)?;
    let cap3 = cap.concat(&DegreeCap::new(cap.caps()[..m].to_vec()));
    check_cap(&cap3, 3 * m)?;
    let three = inverse_det_i_minus(&chain_product(
        &[complex_rows(a1), complex_rows(a2), complex_rows(&ComplexMatrix::identity(m))],
        &cap3,
    )?)?;
    let two = two_matrix_rhs(a1, a2, cap)?;
    let mut tally = Tally::new::<C64>("mmmt-n-reduction", &cap3, tolerance);
    for (e, v) in three.terms() {
        let (p12, p3) = e.split_at(2 * m);
        let expected = if p12.parts()[..m] == *p3.parts() { *two.coefficient(&p12)? } else { C64::zero() };
        tally.compare(&e, v, &expected);
    }
    Ok(tally.finish())
}

/// `Per(A_{p,q}) = (p!q!/n!) [x^p y^q] (x^T A y)^n`.
pub fn verify_corollary_rank_one(
    a: &ComplexMatrix,
    p: &MultiIndex,
    q: &MultiIndex,
    tolerance: f64,
) -> Result<IdentityReport, IdentityError> {
    let m = square_dim(a)?;
    if p.len() != m || q.len() != m {
        return Err(IdentityError::InvalidInput("p and q must have one entry per row".into()));
    }
    if p.weight() != q.weight() {
        return Err(IdentityError::WeightMismatch { p: p.weight(), q: q.weight() });
    }
    let n = p.weight();
    let e = p.concat(q);
    let cap = DegreeCap::new(e.parts().to_vec());
    let power = bilinear_form(a, &cap)?.powu(n);
    let scale = p.factorial_f64() * q.factorial_f64() / crate::combinatorics::factorial_f64(n);
    let rhs = power.coefficient(&e)? * scale;
    let lhs = oracle_permanent(a, &RepetitionPattern::new(p.clone(), q.clone()))?;
    let mut tally = Tally::new::<C64>("corollary-rank-one", &cap, tolerance);
    tally.compare(&e, &lhs, &rhs);
    Ok(tally.finish())
}

/// Monomial form of Glynn's formula: `Σ_q z^q/q! Per(A_{p,q}) = (Az)^p`.
pub fn verify_monomial_glynn(
    a: &ComplexMatrix,
    p: &MultiIndex,
    cap: &DegreeCap,
    tolerance: f64,
) -> Result<IdentityReport, IdentityError> {
    let m = square_dim(a)?;
    if p.len() != m {
        return Err(IdentityError::InvalidInput("p must have one entry per row".into()));
    }
    check_cap(cap, m)?;
    let rhs = monomial_product(&complex_rows(a), p, cap)?;
    let mut tally = Tally::new::<C64>("monomial-glynn", cap, tolerance);
    for q in enumerate_bounded(cap.caps()) {
        let lhs = if q.weight() == p.weight() {
            oracle_permanent(a, &RepetitionPattern::new(p.clone(), q.clone()))? / q.factorial_f64()
        } else {
            C64::zero()
        };
        tally.compare(&q, &lhs, rhs.coefficient(&q)?);
    }
    Ok(tally.finish())
}
