//! `S_n(a,b) = Σ_k C(n,k)² a^k b^{n−k}` and the squaring identity obtained
//! from the two-matrix master theorem with `A = [[1,a],[1,b]]`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::mmmt::chain_product;
use super::{inverse_det_i_minus, oracle_permanent_exact, IdentityError, IdentityReport, Tally};
use crate::combinatorics::{binomial, factorial, MultiIndex, RepetitionPattern};
use crate::series::DegreeCap;

pub const SN_MAX_ORDER: usize = 8;

fn int(v: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(v.into())
}

pub fn sn_value(a: &BigRational, b: &BigRational, n: usize) -> BigRational {
    (0..=n)
        .map(|k| int(binomial(n, k).pow(2)) * num_traits::pow(a.clone(), k) * num_traits::pow(b.clone(), n - k))
        .fold(BigRational::zero(), |acc, t| acc + t)
}

/// `Σ_l C(2l,l) C(n+l,2l) (−1)^{n−l} (a−b)^{2n−2l} S_l(a², b²)`.
fn squared_expansion(a: &BigRational, b: &BigRational, n: usize) -> BigRational {
    let (a2, b2) = (a * a, b * b);
    let diff = a - b;
    (0..=n)
        .map(|l| {
            let mut t = int(binomial(2 * l, l) * binomial(n + l, 2 * l))
                * num_traits::pow(diff.clone(), 2 * (n - l))
                * sn_value(&a2, &b2, l);
            if (n - l) % 2 == 1 {
                t = -t;
            }
            t
        })
        .fold(BigRational::zero(), |acc, t| acc + t)
}

/// Exact check of `S_n(a,b)² = Σ_l C(2l,l) C(n+l,2l) (−1)^{n−l} (a−b)^{2n−2l} S_l(a²,b²)`,
/// tied to permanents by `Per(A_{(n,n),(n,n)}) = (n!)² S_n(a,b)` and to the
/// series by `[x^{(n,n)} y^{(n,n)}] 1/Det(I − XAYA^T) = S_n(a,b)²`. At
/// `a = b = 1` it also asserts `Σ_k C(n,k)² = C(2n,n)`.
pub fn verify_sn_identity(a: &BigRational, b: &BigRational, n: usize) -> Result<IdentityReport, IdentityError> {
    if n > SN_MAX_ORDER {
        return Err(IdentityError::InvalidInput(format!("order {n} exceeds {SN_MAX_ORDER}")));
    }
    let s = sn_value(a, b, n);
    let square = &s * &s;
    let cap = DegreeCap::uniform(4, n);
    let nn = MultiIndex::from([n, n]);
    let mut tally = Tally::new::<BigRational>(&format!("sn-identity-n{n}"), &cap, 0.0);

    tally.compare(&nn.concat(&nn), &squared_expansion(a, b, n), &square);

    let mat = vec![vec![BigRational::one(), a.clone()], vec![BigRational::one(), b.clone()]];
    let per = oracle_permanent_exact(&mat, &RepetitionPattern::new(nn.clone(), nn.clone()))?;
    let nfact = int(factorial(n));
    tally.compare(&nn, &per, &(&nfact * &nfact * &s));

    let transposed = vec![vec![BigRational::one(), BigRational::one()], vec![a.clone(), b.clone()]];
    let series = inverse_det_i_minus(&chain_product(&[mat, transposed], &cap)?)?;
    tally.compare(&nn.concat(&nn), series.coefficient(&nn.concat(&nn))?, &square);

    if a.is_one() && b.is_one() {
        tally.compare(&nn, &s, &int(binomial(2 * n, n)));
    }
    tally.detail("s_n", &s);
    Ok(tally.finish())
}
