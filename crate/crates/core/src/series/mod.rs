//! Truncated multivariate power series with per-variable degree caps.
//!
//! Coefficients live in a dense mixed-radix array (first variable slowest).
//! Any exponent whose component exceeds its cap is dropped, so every ring
//! operation is exact modulo the ideal generated by `z_i^{cap_i + 1}`.
//!
//! The coefficient ring is a type parameter: [`BigRational`] for exact
//! identities over integer matrices, [`C64`] for random complex matrices.
//! Mixing rings is a type error rather than a runtime check.

mod det;
mod transcendental;

use std::fmt::Debug;

use num_bigint::BigInt;
use num_complex::Complex64 as C64;
use num_rational::BigRational;
use num_traits::{Num, Signed, ToPrimitive};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::combinatorics::MultiIndex;

pub use det::{det_series, det_series_leibniz, LEIBNIZ_MAX_DIM};

/// Coefficient ring for [`TruncatedSeries`]. Both rings are fields, which
/// the inverse, power and logarithm recursions need.
pub trait Coeff: Num + Clone + Debug + Send + Sync + std::ops::Neg<Output = Self> + 'static {
    const RING: &'static str;

    /// The rational `num/den` as a ring element.
    fn from_ratio(num: i64, den: i64) -> Self;

    /// Size used for pivoting and error reporting.
    fn magnitude(&self) -> f64;

    fn distance(&self, other: &Self) -> f64 {
        (self.clone() - other.clone()).magnitude()
    }
}

impl Coeff for BigRational {
    const RING: &'static str = "exact-rational";

    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn magnitude(&self) -> f64 {
        self.abs().to_f64().unwrap_or(f64::INFINITY)
    }
}

impl Coeff for C64 {
    const RING: &'static str = "complex-float";

    fn from_ratio(num: i64, den: i64) -> Self {
        C64::new(num as f64 / den as f64, 0.0)
    }

    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

/// Per-variable maximum degree.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DegreeCap(Vec<usize>);

impl DegreeCap {
    pub fn new(caps: Vec<usize>) -> Self {
        Self(caps)
    }

    pub fn uniform(num_vars: usize, cap: usize) -> Self {
        Self(vec![cap; num_vars])
    }

    pub fn num_vars(&self) -> usize {
        self.0.len()
    }

    pub fn caps(&self) -> &[usize] {
        &self.0
    }

    /// `Π (cap_i + 1)`.
    pub fn size(&self) -> usize {
        self.0.iter().map(|&c| c + 1).product()
    }

    pub fn contains(&self, e: &[usize]) -> bool {
        e.len() == self.0.len() && e.iter().zip(&self.0).all(|(a, c)| a <= c)
    }

    /// Concatenated caps for `(x, y)` variable blocks.
    pub fn concat(&self, other: &DegreeCap) -> DegreeCap {
        let mut caps = self.0.clone();
        caps.extend_from_slice(&other.0);
        DegreeCap(caps)
    }
}

impl From<Vec<usize>> for DegreeCap {
    fn from(caps: Vec<usize>) -> Self {
        Self(caps)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SeriesError {
    #[error("degree caps differ: {left:?} vs {right:?}")]
    CapMismatch { left: DegreeCap, right: DegreeCap },
    #[error("constant term is not invertible")]
    NonInvertibleConstantTerm,
    #[error("constant term must be 1")]
    ConstantTermNotOne,
    #[error("constant term must be {expected}")]
    BadConstantTerm { expected: &'static str },
    #[error("exponent {exponent} exceeds the degree cap {cap:?}")]
    ExceedsCap { exponent: MultiIndex, cap: DegreeCap },
    #[error("series matrix of dimension {dim} is too large (limit {limit})")]
    TooLarge { dim: usize, limit: usize },
    #[error("series matrix is not square")]
    NotSquare,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedSeries<R: Coeff> {
    cap: DegreeCap,
    strides: Vec<usize>,
    coeffs: Vec<R>,
}

impl<R: Coeff> TruncatedSeries<R> {
    pub fn zero(cap: DegreeCap) -> Self {
        let mut strides = vec![1; cap.num_vars()];
        for i in (0..cap.num_vars().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * (cap.0[i + 1] + 1);
        }
        let len = cap.size();
        Self { cap, strides, coeffs: vec![R::zero(); len] }
    }

    pub fn constant(cap: DegreeCap, c: R) -> Self {
        let mut s = Self::zero(cap);
        s.coeffs[0] = c;
        s
    }

    pub fn one(cap: DegreeCap) -> Self {
        Self::constant(cap, R::one())
    }

    /// `c · z^e`, or zero if `e` is beyond the cap.
    pub fn monomial(cap: DegreeCap, e: &[usize], c: R) -> Self {
        let mut s = Self::zero(cap);
        if s.cap.contains(e) {
            let idx = s.index_of(e);
            s.coeffs[idx] = c;
        }
        s
    }

    /// The variable `z_i`.
    pub fn variable(cap: DegreeCap, i: usize) -> Self {
        let mut e = vec![0; cap.num_vars()];
        e[i] = 1;
        Self::monomial(cap, &e, R::one())
    }

    /// `Σ_i c_i z_i`.
    pub fn linear(cap: DegreeCap, coeffs: &[R]) -> Self {
        assert_eq!(coeffs.len(), cap.num_vars(), "one coefficient per variable");
        let mut s = Self::zero(cap);
        let mut e = vec![0; coeffs.len()];
        for (i, c) in coeffs.iter().enumerate() {
            e[i] = 1;
            if s.cap.contains(&e) {
                let idx = s.index_of(&e);
                s.coeffs[idx] = c.clone();
            }
            e[i] = 0;
        }
        s
    }

    pub fn cap(&self) -> &DegreeCap {
        &self.cap
    }

    pub fn num_vars(&self) -> usize {
        self.cap.num_vars()
    }

    /// Number of stored coefficients, `Π (cap_i + 1)`.
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn constant_term(&self) -> &R {
        &self.coeffs[0]
    }

    fn index_of(&self, e: &[usize]) -> usize {
        e.iter().zip(&self.strides).map(|(a, s)| a * s).sum()
    }

    /// Exponent tuple of flat index `idx`.
    pub fn exponent_of(&self, mut idx: usize) -> Vec<usize> {
        let mut e = vec![0; self.num_vars()];
        for (slot, s) in e.iter_mut().zip(&self.strides) {
            *slot = idx / s;
            idx %= s;
        }
        e
    }

    /// `[z^p] s`.
    pub fn coefficient(&self, p: &MultiIndex) -> Result<&R, SeriesError> {
        if !self.cap.contains(p.parts()) {
            return Err(SeriesError::ExceedsCap { exponent: p.clone(), cap: self.cap.clone() });
        }
        Ok(&self.coeffs[self.index_of(p.parts())])
    }

    pub fn set_coefficient(&mut self, p: &MultiIndex, c: R) -> Result<(), SeriesError> {
        if !self.cap.contains(p.parts()) {
            return Err(SeriesError::ExceedsCap { exponent: p.clone(), cap: self.cap.clone() });
        }
        let idx = self.index_of(p.parts());
        self.coeffs[idx] = c;
        Ok(())
    }

    /// All `(exponent, coefficient)` pairs in storage order, zeros included.
    pub fn terms(&self) -> impl Iterator<Item = (MultiIndex, &R)> + '_ {
        self.coeffs.iter().enumerate().map(|(i, c)| (MultiIndex::new(self.exponent_of(i)), c))
    }

    /// Nonzero entries as `(flat index, exponent, coefficient)`.
    fn nonzero(&self) -> Vec<(usize, Vec<usize>, &R)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (i, self.exponent_of(i), c))
            .collect()
    }

    /// Largest `|e|` with a nonzero coefficient (`None` for the zero series).
    pub fn total_degree(&self) -> Option<usize> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, _)| self.exponent_of(i).iter().sum())
            .max()
    }

    fn same_cap(&self, other: &Self) -> Result<(), SeriesError> {
        if self.cap != other.cap {
            return Err(SeriesError::CapMismatch { left: self.cap.clone(), right: other.cap.clone() });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, SeriesError> {
        self.same_cap(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.clone() + b.clone()).collect();
        Ok(Self { coeffs, ..self.clone_shape() })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, SeriesError> {
        self.same_cap(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.clone() - b.clone()).collect();
        Ok(Self { coeffs, ..self.clone_shape() })
    }

    pub fn neg(&self) -> Self {
        Self { coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(), ..self.clone_shape() }
    }

    pub fn scale(&self, c: &R) -> Self {
        Self { coeffs: self.coeffs.iter().map(|x| x.clone() * c.clone()).collect(), ..self.clone_shape() }
    }

    fn clone_shape(&self) -> Self {
        Self { cap: self.cap.clone(), strides: self.strides.clone(), coeffs: Vec::new() }
    }

    /// Truncated product. Only nonzero coefficients are visited, so sparse
    /// polynomials multiply quickly even at large caps.
    pub fn mul(&self, other: &Self) -> Result<Self, SeriesError> {
        self.same_cap(other)?;
        let mut out = Self::zero(self.cap.clone());
        let rhs = other.nonzero();
        let caps = self.cap.caps();
        for (i, e, a) in self.nonzero() {
            for (j, f, b) in &rhs {
                if e.iter().zip(f).zip(caps).all(|((x, y), c)| x + y <= *c) {
                    out.coeffs[i + j] = out.coeffs[i + j].clone() + a.clone() * (*b).clone();
                }
            }
        }
        Ok(out)
    }

    /// `s^k` by repeated squaring.
    pub fn powu(&self, mut k: usize) -> Self {
        let mut result = Self::one(self.cap.clone());
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul(&base).expect("same cap");
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base).expect("same cap");
            }
        }
        result
    }

    /// Coefficientwise ring change.
    pub fn map<S: Coeff>(&self, f: impl Fn(&R) -> S) -> TruncatedSeries<S> {
        TruncatedSeries { cap: self.cap.clone(), strides: self.strides.clone(), coeffs: self.coeffs.iter().map(f).collect() }
    }

    /// Largest coefficient distance, with the exponent where it occurs.
    pub fn max_distance(&self, other: &Self) -> Result<(f64, MultiIndex), SeriesError> {
        self.same_cap(other)?;
        let (idx, d) = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.distance(b))
            .enumerate()
            .fold((0, 0.0), |best, (i, d)| if d > best.1 { (i, d) } else { best });
        Ok((d, MultiIndex::new(self.exponent_of(idx))))
    }

    /// Iterator over flat indices with exponent tuples, for callers that fill
    /// series coefficient by coefficient.
    pub fn exponents(&self) -> impl Iterator<Item = MultiIndex> + '_ {
        (0..self.len()).map(|i| MultiIndex::new(self.exponent_of(i)))
    }
}
