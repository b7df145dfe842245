//! Identities for permanents of even-sized matrices, in which
//! `V_w = [[0, Diag w], [Diag w, 0]]` pairs each mode with its partner, and the
//! two-mode-squeezed overlap they specialize to for unitaries.

use num_complex::Complex64 as C64;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::mmmt::{check_cap, square_dim};
use super::{oracle_permanent, series_matmul, IdentityError, IdentityReport, SeriesMatrix, Tally};
use crate::combinatorics::{binomial_f64, enumerate_bounded, MultiIndex, RepetitionPattern};
use crate::numerics::{determinant, ComplexMatrix, UnitaryMatrix};
use crate::series::{det_series, DegreeCap, TruncatedSeries};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EvenMode {
    /// `Per(M)` from the `z^m` coefficient of a sign-averaged univariate series.
    SingleCoefficient,
    /// The full generating function in `2m` variables.
    FullSeries,
}

fn half_dim(mat: &ComplexMatrix) -> Result<usize, IdentityError> {
    let d = square_dim(mat)?;
    if d % 2 == 1 {
        return Err(IdentityError::OddDimension(d));
    }
    Ok(d / 2)
}

/// Numeric `V_w`.
fn swap_diag(w: &[C64]) -> ComplexMatrix {
    let m = w.len();
    ComplexMatrix::from_fn(2 * m, 2 * m, |i, j| if j == (i + m) % (2 * m) { w[i % m] } else { C64::zero() })
}

/// `V_w` with `w` the variables `offset..offset+m`.
fn swap_diag_series(m: usize, offset: usize, cap: &DegreeCap) -> SeriesMatrix<C64> {
    (0..2 * m)
        .map(|i| {
            (0..2 * m)
                .map(|j| {
                    if j == (i + m) % (2 * m) {
                        TruncatedSeries::variable(cap.clone(), offset + i % m)
                    } else {
                        TruncatedSeries::zero(cap.clone())
                    }
                })
                .collect()
        })
        .collect()
}

fn constant_matrix(a: &ComplexMatrix, cap: &DegreeCap) -> SeriesMatrix<C64> {
    (0..a.rows()).map(|i| (0..a.cols()).map(|j| TruncatedSeries::constant(cap.clone(), a[(i, j)])).collect()).collect()
}

/// `I − K` for a series matrix `K`.
fn identity_minus(k: SeriesMatrix<C64>) -> SeriesMatrix<C64> {
    k.into_iter()
        .enumerate()
        .map(|(i, row)| {
            row.into_iter()
                .enumerate()
                .map(|(j, s)| if i == j { TruncatedSeries::one(s.cap().clone()).sub(&s).expect("same cap") } else { s.neg() })
                .collect()
        })
        .collect()
}

/// `1/sqrt(Det(I − z V_x M V_y M^T))` coefficient at `z^m`.
fn single_sign_coefficient(mat: &ComplexMatrix, x: &[C64], y: &[C64]) -> Result<C64, IdentityError> {
    let m = x.len();
    let k = swap_diag(x).matmul(mat)?.matmul(&swap_diag(y))?.matmul(&mat.transpose())?;
    let cap = DegreeCap::new(vec![m]);
    let z = TruncatedSeries::<C64>::variable(cap.clone(), 0);
    let zk: SeriesMatrix<C64> =
        (0..2 * m).map(|i| (0..2 * m).map(|j| z.scale(&k[(i, j)])).collect()).collect();
    let s = det_series(&identity_minus(zk))?.sqrt_inverse()?;
    Ok(*s.coefficient(&MultiIndex::from([m]))?)
}

fn signs(bits: usize, m: usize) -> Vec<C64> {
    (0..m).map(|i| if bits >> i & 1 == 1 { -C64::one() } else { C64::one() }).collect()
}

/// `Per(M) = [z^m] 4^{−m} Σ_{x,y∈{±1}^m} (Πx)(Πy) / sqrt(Det(I − z V_x M V_y M^T))`
/// or the full `2m`-variable generating function
/// `Σ x^p y^q/(p!q!) Per(M_{p⊕p,q⊕q}) = 1/sqrt(Det(I − V_x M V_y M^T))`.
/// The square root is the branch with constant term 1.
pub fn verify_even_matrix(
    mat: &ComplexMatrix,
    mode: EvenMode,
    cap: Option<&DegreeCap>,
    tolerance: f64,
) -> Result<IdentityReport, IdentityError> {
    let m = half_dim(mat)?;
    match mode {
        EvenMode::SingleCoefficient => {
            let mut total = C64::zero();
            for xb in 0..1usize << m {
                let x = signs(xb, m);
                for yb in 0..1usize << m {
                    let y = signs(yb, m);
                    let sign = if (xb.count_ones() + yb.count_ones()) % 2 == 1 { -1.0 } else { 1.0 };
                    total += single_sign_coefficient(mat, &x, &y)? * sign;
                }
            }
            total /= 4f64.powi(m as i32);
            let lhs = oracle_permanent(mat, &RepetitionPattern::ones(2 * m))?;
            let cap = DegreeCap::new(vec![m]);
            let mut tally = Tally::new::<C64>("even-matrix-single", &cap, tolerance);
            tally.compare(&MultiIndex::from([m]), &lhs, &total);
            Ok(tally.finish())
        }
        EvenMode::FullSeries => {
            let default_cap = DegreeCap::uniform(2 * m, 2);
            let cap = cap.unwrap_or(&default_cap);
            check_cap(cap, 2 * m)?;
            let k = series_matmul(
                &series_matmul(&series_matmul(&swap_diag_series(m, 0, cap), &constant_matrix(mat, cap))?, &swap_diag_series(m, m, cap))?,
                &constant_matrix(&mat.transpose(), cap),
            )?;
            let rhs = det_series(&identity_minus(k))?.sqrt_inverse()?;
            let mut tally = Tally::new::<C64>("even-matrix-full", cap, tolerance);
            for e in enumerate_bounded(cap.caps()) {
                let (p, q) = e.split_at(m);
                let lhs = if p.weight() == q.weight() {
                    let pat = RepetitionPattern::new(p.concat(&p), q.concat(&q));
                    oracle_permanent(mat, &pat)? / (p.factorial_f64() * q.factorial_f64())
                } else {
                    C64::zero()
                };
                tally.compare(&e, &lhs, rhs.coefficient(&e)?);
            }
            Ok(tally.finish())
        }
    }
}

/// Steps used to follow the square-root branch from `λ = μ = 0`.
const BRANCH_STEPS: usize = 256;

/// `1/sqrt(Det(I − V_λ U V_μ U^T))` on the branch continuous in `t` along
/// `(tλ, tμ)` and equal to 1 at `t = 0`.
fn overlap_closed_form(u: &ComplexMatrix, lambda: &[C64], mu: &[C64]) -> Result<C64, IdentityError> {
    let ut = u.transpose();
    let dim = u.rows();
    let mut root = C64::one();
    for step in 1..=BRANCH_STEPS {
        let t = step as f64 / BRANCH_STEPS as f64;
        let l: Vec<C64> = lambda.iter().map(|v| v * t).collect();
        let mu_t: Vec<C64> = mu.iter().map(|v| v * t).collect();
        let k = swap_diag(&l).matmul(u)?.matmul(&swap_diag(&mu_t))?.matmul(&ut)?;
        let det = determinant(&ComplexMatrix::identity(dim).sub(&k)?)?;
        let r = det.sqrt();
        root = if (r - root).norm() <= (r + root).norm() { r } else { -r };
    }
    Ok(root.inv())
}

/// Bound on the omitted orders `d > trunc`: each nonzero term has
/// `|λ^p μ^q Per(U_{p⊕p,q⊕q})/(p!q!)| ≤ r_λ^d r_μ^d` for unitary `U`, and
/// there are `C(d+m−1, m−1)²` of them at order `d`.
pub fn tmss_tail_bound(m: usize, r_lambda: f64, r_mu: f64, trunc: usize) -> f64 {
    let r = r_lambda * r_mu;
    if r == 0.0 {
        return 0.0;
    }
    let mut tail = 0.0;
    for d in trunc + 1.. {
        let term = binomial_f64(d + m - 1, m - 1).powi(2) * r.powi(d as i32);
        tail += term;
        if term < tail * 1e-17 || term < 1e-300 {
            break;
        }
    }
    tail
}

/// Two-mode-squeezed overlap: `Σ_{|p|,|q| ≤ trunc} λ^p μ^q/(p!q!) Per(U_{p⊕p,q⊕q})`
/// against the closed form `1/sqrt(Det(I − V_λ U V_μ U^T))`.
pub fn verify_tmss_overlap(
    u: &UnitaryMatrix,
    lambda: &[C64],
    mu: &[C64],
    trunc: usize,
    tolerance: f64,
) -> Result<IdentityReport, IdentityError> {
    let m = lambda.len();
    if mu.len() != m || u.dim() != 2 * m {
        return Err(IdentityError::InvalidInput(format!(
            "U must be {0}x{0} for amplitude vectors of length {m}",
            2 * m
        )));
    }
    for v in lambda.iter().chain(mu) {
        if v.norm() >= 1.0 {
            return Err(IdentityError::AmplitudeOutOfRange(v.norm()));
        }
    }
    let um = u.matrix();
    let mut lhs = C64::zero();
    let mut terms = 0usize;
    for d in 0..=trunc {
        let weight_class: Vec<MultiIndex> = crate::combinatorics::enumerate_weight(m, d).collect();
        for p in &weight_class {
            let lp: C64 = p.iter().zip(lambda).map(|(&k, l)| l.powu(k as u32)).product();
            for q in &weight_class {
                let mq: C64 = q.iter().zip(mu).map(|(&k, v)| v.powu(k as u32)).product();
                let pat = RepetitionPattern::new(p.concat(p), q.concat(q));
                lhs += lp * mq * oracle_permanent(um, &pat)? / (p.factorial_f64() * q.factorial_f64());
                terms += 1;
            }
        }
    }
    let rhs = overlap_closed_form(um, lambda, mu)?;
    let max_norm = |v: &[C64]| v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let tail = tmss_tail_bound(m, max_norm(lambda), max_norm(mu), trunc);

    let cap = DegreeCap::uniform(2 * m, trunc);
    let mut tally = Tally::new::<C64>("tmss-overlap", &cap, tolerance);
    tally.compare(&MultiIndex::from([trunc]), &lhs, &rhs);
    tally.detail("tail_bound", format!("{tail:e}"));
    tally.detail("terms", terms);
    let mut report = tally.finish();
    report.num_coefficients_checked = terms;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::random::{haar_unitary, random_disk_matrix, seeded_rng};

    #[test]
    fn identity_two_by_two() {
        let r = verify_even_matrix(&ComplexMatrix::identity(2), EvenMode::SingleCoefficient, None, 1e-12).unwrap();
        assert!(r.passed, "{r:?}");
        let r = verify_even_matrix(&ComplexMatrix::identity(2), EvenMode::FullSeries, None, 1e-12).unwrap();
        assert!(r.passed, "{r:?}");
    }

    #[test]
    fn single_coefficient_random() {
        let mut rng = seeded_rng(31);
        for dim in [4, 6] {
            let m = random_disk_matrix(dim, &mut rng);
            let r = verify_even_matrix(&m, EvenMode::SingleCoefficient, None, 1e-7).unwrap();
            assert!(r.passed, "{r:?}");
        }
    }

    #[test]
    fn full_series_random() {
        let mut rng = seeded_rng(32);
        let m = random_disk_matrix(4, &mut rng);
        let r = verify_even_matrix(&m, EvenMode::FullSeries, Some(&DegreeCap::uniform(4, 2)), 1e-8).unwrap();
        assert!(r.passed, "{r:?}");
        assert_eq!(r.num_coefficients_checked, 81);
    }

    #[test]
    fn block_diagonal_factorizes() {
        // for M = A ⊕ B the full series is the two-matrix table with B^T inside
        let mut rng = seeded_rng(33);
        let a = random_disk_matrix(2, &mut rng);
        let b = random_disk_matrix(2, &mut rng);
        let mat = a.direct_sum(&b);
        let cap = DegreeCap::uniform(4, 2);
        let r = verify_even_matrix(&mat, EvenMode::FullSeries, Some(&cap), 1e-8).unwrap();
        assert!(r.passed);
        for e in enumerate_bounded(cap.caps()) {
            let (p, q) = e.split_at(2);
            if p.weight() != q.weight() {
                continue;
            }
            let pat = RepetitionPattern::new(p.clone(), q.clone());
            let big = oracle_permanent(&mat, &RepetitionPattern::new(p.concat(&p), q.concat(&q))).unwrap();
            let split = oracle_permanent(&a, &pat).unwrap() * oracle_permanent(&b, &pat).unwrap();
            assert!((big - split).norm() < 1e-10);
        }
    }

    #[test]
    fn odd_dimension_is_rejected() {
        assert!(matches!(
            verify_even_matrix(&ComplexMatrix::identity(3), EvenMode::FullSeries, None, 1e-8),
            Err(IdentityError::OddDimension(3))
        ));
    }

    #[test]
    fn tmss_vanishing_amplitudes() {
        let u = UnitaryMatrix::balanced_beamsplitter();
        let r = verify_tmss_overlap(&u, &[C64::zero()], &[C64::zero()], 3, 1e-12).unwrap();
        assert_eq!(r.max_abs_error, 0.0);
    }

    #[test]
    fn tmss_random_unitary_within_tail() {
        let mut rng = seeded_rng(34);
        let u = haar_unitary(2, &mut rng);
        let l = [C64::from_polar(0.2, 0.7)];
        let mu = [C64::from_polar(0.2, -1.9)];
        let r = verify_tmss_overlap(&u, &l, &mu, 8, 1e-6).unwrap();
        assert!(r.passed, "{r:?}");
        let tail: f64 = r.details["tail_bound"].parse().unwrap();
        assert!(r.max_abs_error <= tail + 1e-13, "{r:?}");
    }

    #[test]
    fn tmss_identity_unitary_closed_form() {
        let l = [C64::new(0.3, 0.1), C64::new(-0.2, 0.4)];
        let mu = [C64::new(0.5, 0.0), C64::new(0.1, -0.6)];
        let u = UnitaryMatrix::identity(4);
        let closed: C64 = l.iter().zip(&mu).map(|(a, b)| (C64::one() - a * b).inv()).product();
        let rhs = overlap_closed_form(u.matrix(), &l, &mu).unwrap();
        assert!((rhs - closed).norm() < 1e-12);
        let r = verify_tmss_overlap(&u, &l, &mu, 10, 1e-4).unwrap();
        assert!(r.passed, "{r:?}");
    }

    #[test]
    fn tmss_rejects_large_amplitude() {
        let u = UnitaryMatrix::balanced_beamsplitter();
        assert!(matches!(
            verify_tmss_overlap(&u, &[C64::new(1.0, 0.0)], &[C64::zero()], 3, 1e-8),
            Err(IdentityError::AmplitudeOutOfRange(_))
        ));
    }
}
