//! Inverse, rational powers, exp, log and composition.
//!
//! Each is an order-by-order recursion. Processing flat indices in increasing
//! order is enough: for `0 ≠ f ≤ e` the index of `e − f` is smaller than that
//! of `e`. Powers, exp and log use the Euler operator `D = Σ z_i ∂_i`, which
//! multiplies the coefficient of `z^e` by `|e|`.

use super::{Coeff, SeriesError, TruncatedSeries};

impl<R: Coeff> TruncatedSeries<R> {
    /// Terms `(flat index, exponent, |exponent|, coefficient)` of the nonzero,
    /// non-constant part.
    fn tail_terms(&self) -> Vec<(usize, Vec<usize>, usize, R)> {
        self.nonzero()
            .into_iter()
            .filter(|(i, _, _)| *i != 0)
            .map(|(i, e, c)| {
                let deg = e.iter().sum();
                (i, e, deg, c.clone())
            })
            .collect()
    }

    /// Calls `body(e_index, e, |e|, terms)` for every nonzero index in
    /// increasing order, with `terms` yielding `(f, |f|, s_f, index of e − f)`
    /// over the nonzero non-constant `f ≤ e`.
    fn recurse(&self, mut body: impl FnMut(usize, usize, &mut dyn Iterator<Item = (usize, &R, usize)>)) {
        let tail = self.tail_terms();
        for idx in 1..self.len() {
            let e = self.exponent_of(idx);
            let deg: usize = e.iter().sum();
            let mut it = tail
                .iter()
                .filter(|(fi, f, _, _)| *fi <= idx && f.iter().zip(&e).all(|(a, b)| a <= b))
                .map(|(fi, _, fdeg, c)| (*fdeg, c, idx - fi));
            body(idx, deg, &mut it);
        }
    }

    /// `1/s`, valid when the constant term is a unit.
    pub fn inverse(&self) -> Result<Self, SeriesError> {
        let s0 = self.constant_term().clone();
        if s0.is_zero() {
            return Err(SeriesError::NonInvertibleConstantTerm);
        }
        let inv0 = R::one() / s0;
        let mut out = Self::zero(self.cap.clone());
        out.coeffs[0] = inv0.clone();
        let mut coeffs = std::mem::take(&mut out.coeffs);
        self.recurse(|idx, _, terms| {
            let acc = terms.fold(R::zero(), |acc, (_, sf, rest)| acc + sf.clone() * coeffs[rest].clone());
            coeffs[idx] = -(acc * inv0.clone());
        });
        out.coeffs = coeffs;
        Ok(out)
    }

    /// `s^{num/den}` for a series with constant term 1, from `s·D(u) = α·u·D(s)`:
    /// `|e| u_e = Σ_{f≠0} (α|f| − (|e|−|f|)) s_f u_{e−f}`.
    pub fn pow_rational(&self, num: i64, den: i64) -> Result<Self, SeriesError> {
        if !self.constant_term().is_one() {
            return Err(SeriesError::ConstantTermNotOne);
        }
        let alpha = R::from_ratio(num, den);
        let mut out = Self::zero(self.cap.clone());
        let mut coeffs = std::mem::take(&mut out.coeffs);
        coeffs[0] = R::one();
        self.recurse(|idx, deg, terms| {
            let acc = terms.fold(R::zero(), |acc, (fdeg, sf, rest)| {
                let weight = alpha.clone() * R::from_ratio(fdeg as i64, 1) - R::from_ratio((deg - fdeg) as i64, 1);
                acc + weight * sf.clone() * coeffs[rest].clone()
            });
            coeffs[idx] = acc * R::from_ratio(1, deg as i64);
        });
        out.coeffs = coeffs;
        Ok(out)
    }

    /// `1/√s` with the branch fixed by constant term `+1`.
    pub fn sqrt_inverse(&self) -> Result<Self, SeriesError> {
        self.pow_rational(-1, 2)
    }

    /// `exp(s)` for `s_0 = 0`, from `D(f) = f·D(s)`.
    pub fn exp(&self) -> Result<Self, SeriesError> {
        if !self.constant_term().is_zero() {
            return Err(SeriesError::BadConstantTerm { expected: "0" });
        }
        let mut out = Self::zero(self.cap.clone());
        let mut coeffs = std::mem::take(&mut out.coeffs);
        coeffs[0] = R::one();
        self.recurse(|idx, deg, terms| {
            let acc = terms.fold(R::zero(), |acc, (fdeg, sf, rest)| {
                acc + R::from_ratio(fdeg as i64, 1) * sf.clone() * coeffs[rest].clone()
            });
            coeffs[idx] = acc * R::from_ratio(1, deg as i64);
        });
        out.coeffs = coeffs;
        Ok(out)
    }

    /// `log(s)` for `s_0 = 1`, from `s·D(l) = D(s)`.
    pub fn log(&self) -> Result<Self, SeriesError> {
        if !self.constant_term().is_one() {
            return Err(SeriesError::BadConstantTerm { expected: "1" });
        }
        let mut out = Self::zero(self.cap.clone());
        let mut coeffs = std::mem::take(&mut out.coeffs);
        let own = &self.coeffs;
        self.recurse(|idx, deg, terms| {
            let acc = terms.fold(R::zero(), |acc, (fdeg, sf, rest)| {
                acc + R::from_ratio((deg - fdeg) as i64, 1) * sf.clone() * coeffs[rest].clone()
            });
            coeffs[idx] = (R::from_ratio(deg as i64, 1) * own[idx].clone() - acc) * R::from_ratio(1, deg as i64);
        });
        out.coeffs = coeffs;
        Ok(out)
    }

    /// `Σ_n c_n s^n` for `s_0 = 0`, by Horner's rule. Terms beyond the total
    /// cap vanish, so the coefficient list may be longer than needed.
    pub fn compose(&self, c: &[R]) -> Result<Self, SeriesError> {
        if !self.constant_term().is_zero() {
            return Err(SeriesError::BadConstantTerm { expected: "0" });
        }
        let max_degree: usize = self.cap.caps().iter().sum();
        let used = &c[..c.len().min(max_degree + 1)];
        let mut acc = Self::zero(self.cap.clone());
        for cn in used.iter().rev() {
            acc = acc.mul(self)?;
            acc.coeffs[0] = acc.coeffs[0].clone() + cn.clone();
        }
        Ok(acc)
    }
}
