use super::{Coeff, SeriesError, TruncatedSeries};

/// Leibniz expansion is used up to this dimension.
pub const LEIBNIZ_MAX_DIM: usize = 8;

/// Determinant of a square matrix of series.
///
/// Small matrices (dimension ≤ 4) use the Leibniz sum, which keeps sparse
/// polynomial entries sparse. Larger ones use elimination with pivots whose
/// constant term is a unit in the series ring; a matrix without such pivots
/// falls back to Leibniz, up to dimension 8.
pub fn det_series<R: Coeff>(m: &[Vec<TruncatedSeries<R>>]) -> Result<TruncatedSeries<R>, SeriesError> {
    let d = check_square(m)?;
    if d <= 4 {
        return det_series_leibniz(m);
    }
    match det_by_elimination(m)? {
        Some(det) => Ok(det),
        None => det_series_leibniz(m),
    }
}

fn check_square<R: Coeff>(m: &[Vec<TruncatedSeries<R>>]) -> Result<usize, SeriesError> {
    let d = m.len();
    if m.iter().any(|row| row.len() != d) {
        return Err(SeriesError::NotSquare);
    }
    Ok(d)
}

/// `Σ_σ sgn(σ) Π_i m_{i,σ(i)}` with permutations from Heap's algorithm.
pub fn det_series_leibniz<R: Coeff>(m: &[Vec<TruncatedSeries<R>>]) -> Result<TruncatedSeries<R>, SeriesError> {
    let d = check_square(m)?;
    if d > LEIBNIZ_MAX_DIM {
        return Err(SeriesError::TooLarge { dim: d, limit: LEIBNIZ_MAX_DIM });
    }
    if d == 0 {
        return Err(SeriesError::NotSquare);
    }
    let cap = m[0][0].cap().clone();
    let term = |perm: &[usize]| -> Result<TruncatedSeries<R>, SeriesError> {
        let mut acc = m[0][perm[0]].clone();
        for (i, &j) in perm.iter().enumerate().skip(1) {
            if acc.coeffs.iter().all(|c| c.is_zero()) {
                break;
            }
            acc = acc.mul(&m[i][j])?;
        }
        Ok(acc)
    };
    let mut perm: Vec<usize> = (0..d).collect();
    let mut counters = vec![0usize; d];
    let mut sign_positive = true;
    let mut total = term(&perm)?;
    let mut i = 1;
    while i < d {
        if counters[i] < i {
            let swap_with = if i % 2 == 0 { 0 } else { counters[i] };
            perm.swap(swap_with, i);
            sign_positive = !sign_positive;
            let t = term(&perm)?;
            total = if sign_positive { total.add(&t)? } else { total.sub(&t)? };
            counters[i] += 1;
            i = 1;
        } else {
            counters[i] = 0;
            i += 1;
        }
    }
    debug_assert_eq!(total.cap(), &cap);
    Ok(total)
}

/// Gaussian elimination over the series ring. Returns `None` when some
/// column has no entry with a nonzero constant term.
fn det_by_elimination<R: Coeff>(m: &[Vec<TruncatedSeries<R>>]) -> Result<Option<TruncatedSeries<R>>, SeriesError> {
    let d = m.len();
    let mut a: Vec<Vec<TruncatedSeries<R>>> = m.to_vec();
    let cap = a[0][0].cap().clone();
    let mut det = TruncatedSeries::one(cap);
    for k in 0..d {
        let pivot = (k..d)
            .filter(|&r| !a[r][k].constant_term().is_zero())
            .max_by(|&x, &y| a[x][k].constant_term().magnitude().total_cmp(&a[y][k].constant_term().magnitude()));
        let Some(r) = pivot else {
            return Ok(None);
        };
        if r != k {
            a.swap(r, k);
            det = det.neg();
        }
        det = det.mul(&a[k][k])?;
        let inv = a[k][k].inverse()?;
        for i in k + 1..d {
            if a[i][k].coeffs.iter().all(|c| c.is_zero()) {
                continue;
            }
            let factor = a[i][k].mul(&inv)?;
            let (upper, lower) = a.split_at_mut(i);
            for (dst, src) in lower[0][k + 1..].iter_mut().zip(&upper[k][k + 1..]) {
                *dst = dst.sub(&factor.mul(src)?)?;
            }
        }
    }
    Ok(Some(det))
}

#[cfg(test)]
mod tests {
    use super::super::DegreeCap;
    use super::*;
    use crate::combinatorics::MultiIndex;
    use num_complex::Complex64 as C64;
    use num_rational::BigRational as Q;
    use num_traits::One;

    fn q(n: i64) -> Q {
        Q::from_ratio(n, 1)
    }

    /// `I − Diag(z) A` over the rationals.
    fn i_minus_za(a: &[Vec<i64>], cap: &DegreeCap) -> Vec<Vec<TruncatedSeries<Q>>> {
        let m = a.len();
        (0..m)
            .map(|i| {
                (0..m)
                    .map(|j| {
                        let delta = TruncatedSeries::constant(cap.clone(), q(i64::from(i == j)));
                        let z = TruncatedSeries::variable(cap.clone(), i).scale(&q(a[i][j]));
                        delta.sub(&z).unwrap()
                    })
                    .collect()
            })
            .collect()
    }

    fn cofactor(m: &[Vec<TruncatedSeries<Q>>]) -> TruncatedSeries<Q> {
        let d = m.len();
        if d == 1 {
            return m[0][0].clone();
        }
        let mut total = TruncatedSeries::zero(m[0][0].cap().clone());
        for j in 0..d {
            let minor: Vec<Vec<_>> =
                (1..d).map(|r| (0..d).filter(|&c| c != j).map(|c| m[r][c].clone()).collect()).collect();
            let t = m[0][j].mul(&cofactor(&minor)).unwrap();
            total = if j % 2 == 0 { total.add(&t).unwrap() } else { total.sub(&t).unwrap() };
        }
        total
    }

    #[test]
    fn scalar_identity_determinant() {
        let cap = DegreeCap::uniform(1, 3);
        let one = TruncatedSeries::<Q>::one(cap.clone());
        let z = TruncatedSeries::<Q>::variable(cap.clone(), 0);
        let entry = one.sub(&z).unwrap();
        let zero = TruncatedSeries::<Q>::zero(cap);
        let m = vec![vec![entry.clone(), zero.clone()], vec![zero, entry.clone()]];
        assert_eq!(det_series(&m).unwrap(), entry.mul(&entry).unwrap());
    }

    #[test]
    fn diagonal_is_product() {
        let cap = DegreeCap::uniform(2, 2);
        let d: Vec<TruncatedSeries<Q>> = (0..5)
            .map(|k| TruncatedSeries::linear(cap.clone(), &[q(k), q(1 - k)]).add(&TruncatedSeries::one(cap.clone())).unwrap())
            .collect();
        let m: Vec<Vec<_>> = (0..5)
            .map(|i| (0..5).map(|j| if i == j { d[i].clone() } else { TruncatedSeries::zero(cap.clone()) }).collect())
            .collect();
        let product = d.iter().skip(1).fold(d[0].clone(), |acc, x| acc.mul(x).unwrap());
        assert_eq!(det_series(&m).unwrap(), product);
        assert_eq!(det_series_leibniz(&m).unwrap(), product);
    }

    #[test]
    fn dixon_matrix_against_cofactor_expansion() {
        let cap = DegreeCap::uniform(3, 2);
        let dixon = vec![vec![0, 1, -1], vec![-1, 0, 1], vec![1, -1, 0]];
        let m = i_minus_za(&dixon, &cap);
        let det = det_series(&m).unwrap();
        assert_eq!(det, cofactor(&m));
        // 1 + z1z2 + z1z3 + z2z3
        assert_eq!(*det.coefficient(&MultiIndex::from([1, 1, 0])).unwrap(), q(1));
        assert_eq!(*det.coefficient(&MultiIndex::from([1, 1, 1])).unwrap(), q(0));
        assert!(det.total_degree().unwrap() <= 3);
    }

    #[test]
    fn elimination_agrees_with_leibniz() {
        let cap = DegreeCap::uniform(2, 2);
        let a: Vec<Vec<i64>> = (0..6).map(|i| (0..6).map(|j| ((3 * i + 5 * j) % 7) as i64 - 3).collect()).collect();
        let m: Vec<Vec<TruncatedSeries<Q>>> = (0..6)
            .map(|i| {
                (0..6)
                    .map(|j| {
                        let base = TruncatedSeries::constant(cap.clone(), q(i64::from(i == j) * 2 + a[i][j].signum()));
                        base.add(&TruncatedSeries::linear(cap.clone(), &[q(a[i][j]), q(a[j][i])])).unwrap()
                    })
                    .collect()
            })
            .collect();
        let leibniz = det_series_leibniz(&m).unwrap();
        assert_eq!(det_by_elimination(&m).unwrap().unwrap(), leibniz);
        assert_eq!(det_series(&m).unwrap(), leibniz);
    }

    #[test]
    fn polynomial_degree_is_bounded_by_dimension() {
        let cap = DegreeCap::uniform(3, 4);
        let a = vec![vec![2, -1, 3], vec![0, 5, 1], vec![-2, 1, 1]];
        let det = det_series(&i_minus_za(&a, &cap)).unwrap();
        assert!(det.total_degree().unwrap() <= 3);
        assert_eq!(*det.constant_term(), Q::one());
    }

    #[test]
    fn complex_entries() {
        let cap = DegreeCap::uniform(1, 2);
        let z = TruncatedSeries::<C64>::variable(cap.clone(), 0);
        let one = TruncatedSeries::<C64>::one(cap.clone());
        let m = vec![vec![one.clone(), z.clone()], vec![z.clone(), one.clone()]];
        let det = det_series(&m).unwrap();
        let expected = one.sub(&z.mul(&z).unwrap()).unwrap();
        assert!(det.max_distance(&expected).unwrap().0 < 1e-15);
        assert!(matches!(det_series::<C64>(&[vec![one.clone()], vec![]]), Err(SeriesError::NotSquare)));
    }
}
