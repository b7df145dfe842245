//! Multi-indices, repetition patterns `A_{p,q}` and enumerators over
//! restricted index sets.

use std::fmt;
use std::ops::Index;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::numerics::ComplexMatrix;

/// Tuple of non-negative integers: repetition counts, photon numbers or
/// monomial exponents. Serialized as a plain integer array.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(Vec<usize>);

impl MultiIndex {
    pub fn new(parts: Vec<usize>) -> Self {
        Self(parts)
    }

    pub fn zeros(len: usize) -> Self {
        Self(vec![0; len])
    }

    pub fn ones(len: usize) -> Self {
        Self(vec![1; len])
    }

    /// `1^{⊕n} ⊕ 0^{⊕(m−n)}`: one in each of the first `n` of `m` slots.
    pub fn ones_then_zeros(n: usize, m: usize) -> Self {
        Self((0..m).map(|k| usize::from(k < n)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn parts(&self) -> &[usize] {
        &self.0
    }

    pub fn into_parts(self) -> Vec<usize> {
        self.0
    }

    /// `|p| = p_1 + ... + p_m`.
    pub fn weight(&self) -> usize {
        self.0.iter().sum()
    }

    /// `p! = p_1! ... p_m!`, exact.
    pub fn factorial_product(&self) -> BigUint {
        self.0.iter().map(|&k| factorial(k)).product()
    }

    /// `p!` as a double. Exact up to 2^53.
    pub fn factorial_f64(&self) -> f64 {
        self.0.iter().map(|&k| factorial_f64(k)).product()
    }

    /// Componentwise `p ≤ q`.
    pub fn le(&self, other: &MultiIndex) -> bool {
        self.len() == other.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        assert_eq!(self.len(), other.len(), "multi-index length mismatch");
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Componentwise difference; `None` unless `other ≤ self`.
    pub fn checked_sub(&self, other: &MultiIndex) -> Option<MultiIndex> {
        if !other.le(self) {
            return None;
        }
        Some(MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect()))
    }

    /// `p ⊕ q`.
    pub fn concat(&self, other: &MultiIndex) -> MultiIndex {
        let mut parts = self.0.clone();
        parts.extend_from_slice(&other.0);
        MultiIndex(parts)
    }

    /// Splits `p ⊕ q` back at `at`.
    pub fn split_at(&self, at: usize) -> (MultiIndex, MultiIndex) {
        let (a, b) = self.0.split_at(at);
        (MultiIndex(a.to_vec()), MultiIndex(b.to_vec()))
    }

    pub fn iter(&self) -> std::slice::Iter<'_, usize> {
        self.0.iter()
    }
}

impl Index<usize> for MultiIndex {
    type Output = usize;

    fn index(&self, i: usize) -> &usize {
        &self.0[i]
    }
}

impl From<Vec<usize>> for MultiIndex {
    fn from(parts: Vec<usize>) -> Self {
        Self(parts)
    }
}

impl<const N: usize> From<[usize; N]> for MultiIndex {
    fn from(parts: [usize; N]) -> Self {
        Self(parts.to_vec())
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, k) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{k}")?;
        }
        write!(f, ")")
    }
}

/// Row and column repetition counts for `A_{p,q}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepetitionPattern {
    pub rows: MultiIndex,
    pub cols: MultiIndex,
}

impl RepetitionPattern {
    pub fn new(rows: impl Into<MultiIndex>, cols: impl Into<MultiIndex>) -> Self {
        let rows = rows.into();
        let cols = cols.into();
        assert_eq!(rows.len(), cols.len(), "row and column patterns must have the same length");
        Self { rows, cols }
    }

    /// `p = q = (1, ..., 1)`.
    pub fn ones(len: usize) -> Self {
        Self::new(MultiIndex::ones(len), MultiIndex::ones(len))
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// `|p| = |q|`, i.e. `A_{p,q}` is square.
    pub fn square_compatible(&self) -> bool {
        self.rows.weight() == self.cols.weight()
    }

    /// The common weight when square compatible.
    pub fn weight(&self) -> Option<usize> {
        self.square_compatible().then(|| self.rows.weight())
    }

    pub fn transposed(&self) -> Self {
        Self { rows: self.cols.clone(), cols: self.rows.clone() }
    }
}

/// `A_{p,q}`: row `i` repeated `p_i` times, then column `j` repeated `q_j`
/// times (zero repetitions delete). The result is `|p| × |q|`.
pub fn repeat_matrix(a: &ComplexMatrix, pattern: &RepetitionPattern) -> ComplexMatrix {
    assert_eq!(a.rows(), pattern.rows.len(), "row pattern length must match matrix rows");
    assert_eq!(a.cols(), pattern.cols.len(), "column pattern length must match matrix columns");
    let row_map = expand(&pattern.rows);
    let col_map = expand(&pattern.cols);
    ComplexMatrix::from_fn(row_map.len(), col_map.len(), |i, j| a[(row_map[i], col_map[j])])
}

/// `(2, 0, 1) -> [0, 0, 2]`: source index for each repeated slot.
pub fn expand(p: &MultiIndex) -> Vec<usize> {
    p.iter().enumerate().flat_map(|(i, &k)| std::iter::repeat_n(i, k)).collect()
}

pub fn factorial(n: usize) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * BigUint::from(k))
}

pub fn factorial_f64(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// `C(n, k)`, zero when `k > n`.
pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::ZERO;
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

pub fn binomial_f64(n: usize, k: usize) -> f64 {
    binomial(n, k).to_f64().unwrap_or(f64::INFINITY)
}

/// Number of `p ∈ ℕ^m` with `|p| = n`: `C(n + m − 1, m − 1)`.
pub fn weight_class_size(m: usize, n: usize) -> BigUint {
    if m == 0 {
        return if n == 0 { BigUint::one() } else { BigUint::ZERO };
    }
    binomial(n + m - 1, m - 1)
}

/// All `p ∈ ℕ^m` with `|p| = n`, in lexicographic order.
pub fn enumerate_weight(m: usize, n: usize) -> WeightIter {
    WeightIter::new(m, n)
}

pub struct WeightIter {
    current: Option<Vec<usize>>,
    n: usize,
}

impl WeightIter {
    fn new(m: usize, n: usize) -> Self {
        let current = if m == 0 {
            (n == 0).then(Vec::new)
        } else {
            let mut first = vec![0; m];
            first[m - 1] = n;
            Some(first)
        };
        Self { current, n }
    }
}

impl Iterator for WeightIter {
    type Item = MultiIndex;

    fn next(&mut self) -> Option<MultiIndex> {
        let out = self.current.take()?;
        let m = out.len();
        // Lexicographic successor among compositions of n: find the rightmost
        // position i < m−1 that can be increased, bump it and put the
        // remainder in the last slot.
        let mut next = out.clone();
        let mut advanced = false;
        if m >= 2 {
            for i in (0..m - 1).rev() {
                let prefix: usize = next[..=i].iter().sum();
                if prefix < self.n {
                    next[i] += 1;
                    for slot in next.iter_mut().skip(i + 1) {
                        *slot = 0;
                    }
                    let used: usize = next[..m - 1].iter().sum();
                    next[m - 1] = self.n - used;
                    advanced = true;
                    break;
                }
            }
        }
        if advanced {
            self.current = Some(next);
        }
        Some(MultiIndex(out))
    }
}

/// All `p ≤ cap` componentwise, in mixed-radix order (first component
/// slowest).
pub fn enumerate_bounded(cap: &[usize]) -> impl Iterator<Item = MultiIndex> + '_ {
    let total: usize = cap.iter().map(|&c| c + 1).product();
    (0..total).map(move |mut idx| {
        let mut parts = vec![0; cap.len()];
        for (slot, &c) in parts.iter_mut().zip(cap).rev() {
            *slot = idx % (c + 1);
            idx /= c + 1;
        }
        MultiIndex(parts)
    })
}

/// Ordered `parts`-tuples of multi-indices summing componentwise to `p`.
/// `weights[k] = Some(w)` keeps only tuples whose `k`-th member has weight `w`.
pub fn enumerate_splits(
    p: &MultiIndex,
    parts: usize,
    weights: Option<&[Option<usize>]>,
) -> impl Iterator<Item = Vec<MultiIndex>> {
    assert!((2..=3).contains(&parts), "splits into 2 or 3 parts are supported");
    if let Some(w) = weights {
        assert_eq!(w.len(), parts, "one weight constraint per part");
    }
    let weights: Vec<Option<usize>> = weights.map_or_else(|| vec![None; parts], <[_]>::to_vec);
    let mut out = Vec::new();
    let mut current = vec![vec![0; p.len()]; parts];
    split_rec(p.parts(), 0, &mut current, &mut out);
    out.into_iter().filter(move |split: &Vec<MultiIndex>| {
        split.iter().zip(&weights).all(|(part, w)| w.is_none_or(|w| part.weight() == w))
    })
}

fn split_rec(p: &[usize], pos: usize, current: &mut Vec<Vec<usize>>, out: &mut Vec<Vec<MultiIndex>>) {
    if pos == p.len() {
        out.push(current.iter().cloned().map(MultiIndex).collect());
        return;
    }
    let parts = current.len();
    // distribute p[pos] over `parts` slots
    fn distribute(
        remaining: usize,
        slot: usize,
        p: &[usize],
        pos: usize,
        current: &mut Vec<Vec<usize>>,
        out: &mut Vec<Vec<MultiIndex>>,
    ) {
        let parts = current.len();
        if slot == parts - 1 {
            current[slot][pos] = remaining;
            split_rec(p, pos + 1, current, out);
            return;
        }
        for k in 0..=remaining {
            current[slot][pos] = k;
            distribute(remaining - k, slot + 1, p, pos, current, out);
        }
    }
    debug_assert!(parts >= 2);
    distribute(p[pos], 0, p, pos, current, out);
}
