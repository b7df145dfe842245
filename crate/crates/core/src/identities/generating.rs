//! The generating-function family for the permanent and the expansion
//! formulas it yields: the sum formula, the Laplace expansion and the
//! formula for the sum of two permanents.

use num_complex::Complex64 as C64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::mmmt::{bilinear_form, check_cap, square_dim};
use super::{oracle_permanent, ratio_f64, IdentityError, IdentityReport, Tally};
use crate::combinatorics::{binomial_f64, enumerate_bounded, enumerate_splits, factorial_f64, MultiIndex, RepetitionPattern};
use crate::numerics::ComplexMatrix;
use crate::series::{DegreeCap, TruncatedSeries};

/// Analytic functions `f` whose composition with `x^T A y` generates
/// permanents.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GeneratingFunction {
    /// `e^z`, giving Jackson's formula.
    Exp,
    /// `1/(1 − z)`.
    GeometricInverse,
    /// `z^n`.
    PowerN(usize),
    /// `−log(1 − z)`.
    LogInverse,
}

impl GeneratingFunction {
    pub fn name(self) -> String {
        match self {
            Self::Exp => "exp".into(),
            Self::GeometricInverse => "geometric-inverse".into(),
            Self::PowerN(n) => format!("power-{n}"),
            Self::LogInverse => "log-inverse".into(),
        }
    }

    /// Taylor coefficient `f_k`.
    pub fn coefficient(self, k: usize) -> f64 {
        match self {
            Self::Exp => 1.0 / factorial_f64(k),
            Self::GeometricInverse => 1.0,
            Self::PowerN(n) => f64::from(u8::from(k == n)),
            Self::LogInverse if k == 0 => 0.0,
            Self::LogInverse => 1.0 / k as f64,
        }
    }

    /// `f(s)` by the series engine's own transcendental routines, as a
    /// cross-check on the Horner composition.
    fn apply_directly(self, s: &TruncatedSeries<C64>) -> Result<TruncatedSeries<C64>, IdentityError> {
        let one = TruncatedSeries::one(s.cap().clone());
        Ok(match self {
            Self::Exp => s.exp()?,
            Self::GeometricInverse => one.sub(s)?.inverse()?,
            Self::PowerN(n) => s.powu(n),
            Self::LogInverse => one.sub(s)?.log()?.neg(),
        })
    }
}

/// `f(x^T A y) = Σ f_n n! x^p y^q/(p!q!) Per(A_{p,q})` coefficientwise, with
/// the right side also cross-checked against a direct evaluation of `f`.
pub fn verify_generating_function(
    a: &ComplexMatrix,
    f: GeneratingFunction,
    cap: &DegreeCap,
    tolerance: f64,
) -> Result<IdentityReport, IdentityError> {
    let m = square_dim(a)?;
    check_cap(cap, 2 * m)?;
    let s = bilinear_form(a, cap)?;
    let degree: usize = cap.caps()[..m].iter().sum::<usize>().min(cap.caps()[m..].iter().sum());
    let coeffs: Vec<C64> = (0..=degree).map(|k| C64::new(f.coefficient(k), 0.0)).collect();
    let composed = s.compose(&coeffs)?;
    let direct = f.apply_directly(&s)?;

    let name = format!("generating-function-{}", f.name());
    let mut series_tally = Tally::new::<C64>("composition", cap, tolerance);
    series_tally.compare_series(&composed, &direct);

    let mut tally = Tally::new::<C64>("coefficients", cap, tolerance);
    for e in enumerate_bounded(cap.caps()) {
        let (p, q) = e.split_at(m);
        let n = p.weight();
        let lhs = if n == q.weight() && f.coefficient(n) != 0.0 {
            let per = oracle_permanent(a, &RepetitionPattern::new(p.clone(), q.clone()))?;
            per * (f.coefficient(n) * factorial_f64(n) / (p.factorial_f64() * q.factorial_f64()))
        } else {
            C64::zero()
        };
        tally.compare(&e, &lhs, composed.coefficient(&e)?);
    }
    Ok(IdentityReport::merge(&name, vec![tally.finish(), series_tally.finish()]))
}

/// `p! / Π_k parts_k!`, exact then rounded once.
fn multinomial(total: &MultiIndex, parts: &[&MultiIndex]) -> f64 {
    let mut num = total.factorial_product();
    for part in parts {
        num /= part.factorial_product();
    }
    ratio_f64(&num)
}

fn pattern_of(p: &MultiIndex, q: &MultiIndex) -> RepetitionPattern {
    RepetitionPattern::new(p.clone(), q.clone())
}

fn check_pattern(a: &ComplexMatrix, pat: &RepetitionPattern) -> Result<usize, IdentityError> {
    let m = square_dim(a)?;
    if pat.len() != m {
        return Err(IdentityError::InvalidInput(format!("pattern has length {}, expected {m}", pat.len())));
    }
    Ok(m)
}

fn single_cap(pat: &RepetitionPattern) -> DegreeCap {
    DegreeCap::new(pat.rows.concat(&pat.cols).into_parts())
}

/// `Per((A+B)_{p,q}) = Σ_{s+t=p, u+v=q} p!q!/(s!t!u!v!) Per(A_{s,u}) Per(B_{t,v})`.
pub fn verify_sum_formula(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    pat: &RepetitionPattern,
    tolerance: f64,
) -> Result<IdentityReport, IdentityError> {
    check_pattern(a, pat)?;
    check_pattern(b, pat)?;
    let (p, q) = (&pat.rows, &pat.cols);
    let lhs = oracle_permanent(&a.add(b)?, pat)?;
    let mut rhs = C64::zero();
    if pat.square_compatible() {
        let col_splits: Vec<_> = enumerate_splits(q, 2, None).collect();
        for rows in enumerate_splits(p, 2, None) {
            for cols in &col_splits {
                if rows[0].weight() != cols[0].weight() {
                    continue;
                }
                let c = multinomial(p, &[&rows[0], &rows[1]]) * multinomial(q, &[&cols[0], &cols[1]]);
                rhs += oracle_permanent(a, &pattern_of(&rows[0], &cols[0]))?
                    * oracle_permanent(b, &pattern_of(&rows[1], &cols[1]))?
                    * c;
            }
        }
    }
    let cap = single_cap(pat);
    let mut tally = Tally::new::<C64>("sum-formula", &cap, tolerance);
    tally.compare(&p.concat(q), &lhs, &rhs);
    Ok(tally.finish())
}

/// Laplace expansion of `Per(A_{p,q})` into blocks of sizes `k` and
/// `l = |p| − k`, with prefactor `k! l!/(k+l)!`.
pub fn verify_laplace(a: &ComplexMatrix, pat: &RepetitionPattern, k: usize, tolerance: f64) -> Result<IdentityReport, IdentityError> {
    check_pattern(a, pat)?;
    let (p, q) = (&pat.rows, &pat.cols);
    if p.weight() != q.weight() {
        return Err(IdentityError::WeightMismatch { p: p.weight(), q: q.weight() });
    }
    let n = p.weight();
    if k > n {
        return Err(IdentityError::InvalidInput(format!("block size {k} exceeds |p| = {n}")));
    }
    let l = n - k;
    let lhs = oracle_permanent(a, pat)?;
    let weights = [Some(k), Some(l)];
    let col_splits: Vec<_> = enumerate_splits(q, 2, Some(&weights)).collect();
    let mut rhs = C64::zero();
    for rows in enumerate_splits(p, 2, Some(&weights)) {
        for cols in &col_splits {
            let c = multinomial(p, &[&rows[0], &rows[1]]) * multinomial(q, &[&cols[0], &cols[1]]);
            rhs += oracle_permanent(a, &pattern_of(&rows[0], &cols[0]))?
                * oracle_permanent(a, &pattern_of(&rows[1], &cols[1]))?
                * c;
        }
    }
    rhs *= factorial_f64(k) * factorial_f64(l) / factorial_f64(n);
    let mut tally = Tally::new::<C64>(&format!("laplace-k{k}"), &single_cap(pat), tolerance);
    tally.compare(&p.concat(q), &lhs, &rhs);
    Ok(tally.finish())
}

/// `Per(A_{p,q}) + Per(B_{p,q})` as an alternating sum over three-way
/// splits involving `A`, `B` and `A + B`.
pub fn verify_sum_of_permanents(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    pat: &RepetitionPattern,
    tolerance: f64,
) -> Result<IdentityReport, IdentityError> {
    check_pattern(a, pat)?;
    check_pattern(b, pat)?;
    let (p, q) = (&pat.rows, &pat.cols);
    if p.weight() != q.weight() {
        return Err(IdentityError::WeightMismatch { p: p.weight(), q: q.weight() });
    }
    let n = p.weight();
    if n == 0 {
        return Err(IdentityError::InvalidInput("the two-permanent formula needs |p| ≥ 1".into()));
    }
    let sum = a.add(b)?;
    let lhs = oracle_permanent(a, pat)? + oracle_permanent(b, pat)?;
    let mut rhs = C64::zero();
    for k in 0..=n / 2 {
        let weights = [Some(k), Some(k), None];
        let col_splits: Vec<_> = enumerate_splits(q, 3, Some(&weights)).collect();
        let mut inner = C64::zero();
        for rows in enumerate_splits(p, 3, Some(&weights)) {
            for cols in &col_splits {
                let c = multinomial(p, &[&rows[0], &rows[1], &rows[2]]) * multinomial(q, &[&cols[0], &cols[1], &cols[2]]);
                inner += oracle_permanent(a, &pattern_of(&rows[0], &cols[0]))?
                    * oracle_permanent(b, &pattern_of(&rows[1], &cols[1]))?
                    * oracle_permanent(&sum, &pattern_of(&rows[2], &cols[2]))?
                    * c;
            }
        }
        let sign = if k % 2 == 1 { -1.0 } else { 1.0 };
        rhs += inner * (sign / binomial_f64(n - 1, k));
    }
    let mut tally = Tally::new::<C64>("sum-of-permanents", &single_cap(pat), tolerance);
    tally.compare(&p.concat(q), &lhs, &rhs);
    Ok(tally.finish())
}
