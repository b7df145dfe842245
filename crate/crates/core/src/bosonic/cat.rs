use num_complex::Complex64 as C64;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{BosonicError, OutcomeDistribution, DISTRIBUTION_BUDGET};
use crate::combinatorics::{enumerate_weight, factorial_f64, weight_class_size, MultiIndex};
use crate::numerics::UnitaryMatrix;

/// `n` cat states `|cat_α⟩ ∝ |α⟩ − |−α⟩` in the first `n` of `m` modes,
/// vacuum elsewhere.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CatInputSpec {
    pub alpha: C64,
    pub n: usize,
    pub m: usize,
}

impl CatInputSpec {
    pub fn new(alpha: C64, n: usize, m: usize) -> Result<Self, BosonicError> {
        if n > m {
            return Err(BosonicError::InvalidInput(format!("{n} cat modes do not fit in {m} modes")));
        }
        if alpha.is_zero() {
            return Err(BosonicError::ZeroAmplitude);
        }
        Ok(Self { alpha, n, m })
    }

    fn check(&self, u: &UnitaryMatrix) -> Result<(), BosonicError> {
        if u.dim() != self.m {
            return Err(BosonicError::InvalidInput(format!("unitary is {0}x{0}, spec has {1} modes", u.dim(), self.m)));
        }
        Self::new(self.alpha, self.n, self.m).map(|_| ())
    }
}

/// `Σ_{x∈{±1}^n} Πx Π_i (Σ_{j<n} u_ij x_j)^{p_i}`, one Gray-code flip per term.
fn sign_sum(u: &UnitaryMatrix, n: usize, p: &MultiIndex) -> C64 {
    let um = u.matrix();
    let m = u.dim();
    let mut x = vec![1.0; n];
    let mut v: Vec<C64> = (0..m).map(|i| (0..n).map(|j| um[(i, j)]).sum()).collect();
    let mut total = C64::zero();
    let mut sign = 1.0;
    for k in 0..1u64 << n {
        if k > 0 {
            let j = k.trailing_zeros() as usize;
            x[j] = -x[j];
            sign = -sign;
            for (i, vi) in v.iter_mut().enumerate() {
                *vi += um[(i, j)] * (2.0 * x[j]);
            }
        }
        let term: C64 = v.iter().zip(p.iter()).map(|(vi, &pi)| vi.powu(pi as u32)).product();
        total += term * sign;
    }
    total
}

/// `⟨p|Û(|cat_α⟩^{⊗n} ⊗ |0⟩^{⊗(m−n)})`. Each cat mode has odd photon
/// parity, so the amplitude vanishes unless `|p| ≥ n` and `|p| ≡ n (mod 2)`.
pub fn cat_amplitude(u: &UnitaryMatrix, spec: &CatInputSpec, p: &MultiIndex) -> Result<C64, BosonicError> {
    spec.check(u)?;
    if p.len() != spec.m {
        return Err(BosonicError::InvalidInput(format!("occupation vector must have length {}", spec.m)));
    }
    let total = p.weight();
    if total < spec.n || (total - spec.n) % 2 == 1 {
        return Ok(C64::zero());
    }
    if spec.n >= 63 {
        return Err(BosonicError::TooLarge { size: u128::MAX, limit: DISTRIBUTION_BUDGET });
    }
    let x = spec.alpha.norm_sqr();
    let prefactor = spec.alpha.powu(total as u32)
        / (x.sinh().powf(spec.n as f64 / 2.0) * 2f64.powi(spec.n as i32) * p.factorial_f64().sqrt());
    Ok(prefactor * sign_sum(u, spec.n, p))
}

/// Probability that one cat mode holds `k` photons: `x^k/(k! sinh x)` for odd
/// `k`, with `x = |α|²`.
fn single_mode_pmf(x: f64, len: usize) -> Vec<f64> {
    let s = x.sinh();
    (0..len)
        .map(|k| if k % 2 == 1 { (k as f64 * x.ln() - factorial_f64(k).ln()).exp() / s } else { 0.0 })
        .collect()
}

/// Distribution of the total photon number of `n` cat modes up to `len − 1`
/// photons. A passive `Û` conserves photon number, so this is also the law
/// of `|p|` at the output.
pub fn photon_number_pmf(alpha: C64, n: usize, len: usize) -> Vec<f64> {
    let single = single_mode_pmf(alpha.norm_sqr(), len);
    let mut acc = vec![0.0; len];
    acc[0] = 1.0;
    for _ in 0..n {
        let mut next = vec![0.0; len];
        for (i, &a) in acc.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for (k, &b) in single.iter().enumerate().take(len - i) {
                next[i + k] += a * b;
            }
        }
        acc = next;
    }
    acc
}

/// Mass of the photon-number law beyond `cutoff`, summed directly to avoid
/// cancellation in `1 − head`.
fn analytic_tail(alpha: C64, n: usize, cutoff: usize) -> f64 {
    let mut len = cutoff + 64;
    loop {
        let pmf = photon_number_pmf(alpha, n, len);
        let tail: f64 = pmf[cutoff + 1..].iter().sum();
        let last = pmf[len - 8..].iter().sum::<f64>();
        if last <= tail * 1e-17 || last < 1e-300 || len > 4096 {
            return tail;
        }
        len *= 2;
    }
}

/// `P_cat(p)` for every `|p| ≤ cutoff` of the right parity.
pub fn cat_distribution(u: &UnitaryMatrix, spec: &CatInputSpec, cutoff: usize) -> Result<OutcomeDistribution, BosonicError> {
    spec.check(u)?;
    if cutoff < spec.n {
        return Err(BosonicError::InvalidInput(format!("cutoff {cutoff} is below n = {}", spec.n)));
    }
    let m = spec.m;
    let totals: Vec<usize> = (spec.n..=cutoff).step_by(2).collect();
    let outcomes: u128 = totals.iter().map(|&t| u128::try_from(weight_class_size(m, t)).unwrap_or(u128::MAX)).sum();
    let cost = outcomes.saturating_mul(1u128 << spec.n.min(127));
    if cost > DISTRIBUTION_BUDGET {
        return Err(BosonicError::TooLarge { size: cost, limit: DISTRIBUTION_BUDGET });
    }
    let support: std::collections::BTreeMap<_, _> = totals
        .iter()
        .flat_map(|&t| enumerate_weight(m, t))
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|p| {
            let amp = cat_amplitude(u, spec, &p)?;
            Ok((p, amp.norm_sqr()))
        })
        .collect::<Result<_, BosonicError>>()?;
    let enumerated: f64 = support.values().sum();
    Ok(OutcomeDistribution {
        support,
        cutoff,
        truncated_mass: (1.0 - enumerated).max(0.0),
        tail_bound: Some(analytic_tail(spec.alpha, spec.n, cutoff)),
    })
}

/// Fraction of cat-input outcomes with exactly `n` photons,
/// `(|α|²/sinh |α|²)^n`.
pub fn photon_fraction(alpha: C64, n: usize) -> Result<f64, BosonicError> {
    if alpha.is_zero() {
        return Err(BosonicError::ZeroAmplitude);
    }
    let x = alpha.norm_sqr();
    Ok((x / x.sinh()).powi(n as i32))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegimeReport {
    pub n: usize,
    pub m: usize,
    pub c: f64,
    /// `c n^{−1/4} (ln m)^{1/4}`.
    pub alpha: f64,
    /// `None` when `α = 0`, where cat sampling is undefined.
    pub photon_fraction: Option<f64>,
    /// Leading-order estimate `e^{−n α⁴/6}`.
    pub leading_order: f64,
    pub inverse_m: f64,
}

/// Cat amplitude on the `n^{−1/4} (ln m)^{1/4}` scale and the fraction of
/// samples it keeps.
pub fn amplitude_regime_check(n: usize, m: usize, c: f64) -> Result<RegimeReport, BosonicError> {
    if n == 0 || m == 0 {
        return Err(BosonicError::InvalidInput("n and m must be at least 1".into()));
    }
    let alpha = c * (n as f64).powf(-0.25) * (m as f64).ln().powf(0.25);
    let photon_fraction = if alpha == 0.0 { None } else { Some(photon_fraction(C64::new(alpha, 0.0), n)?) };
    Ok(RegimeReport {
        n,
        m,
        c,
        alpha,
        photon_fraction,
        leading_order: (-(n as f64) * alpha.powi(4) / 6.0).exp(),
        inverse_m: 1.0 / m as f64,
    })
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::bosonic::{bs_distribution, fock_amplitude};
    use num_traits::One;
    use crate::numerics::random::{haar_unitary, seeded_rng};

    fn spec(alpha: f64, n: usize, m: usize) -> CatInputSpec {
        CatInputSpec::new(C64::new(alpha, 0.0), n, m).unwrap()
    }

    #[test]
    fn photon_fraction_values() {
        assert_eq!(photon_fraction(C64::new(0.3, 0.1), 0).unwrap(), 1.0);
        assert!((photon_fraction(C64::new(1.0, 0.0), 1).unwrap() - 1.0 / 1f64.sinh()).abs() < 1e-15);
        assert!((photon_fraction(C64::new(1.0, 0.0), 1).unwrap() - 0.850918).abs() < 1e-6);
        assert!((photon_fraction(C64::new(0.5, 0.0), 2).unwrap() - 0.979_424_522_258_191).abs() < 1e-14);
        assert_eq!(photon_fraction(C64::zero(), 2), Err(BosonicError::ZeroAmplitude));
    }

    #[test]
    fn amplitude_matches_single_photon_amplitude_at_n_photons() {
        let mut rng = seeded_rng(61);
        let u = haar_unitary(4, &mut rng);
        let alpha = C64::from_polar(0.7, 0.4);
        let s = CatInputSpec::new(alpha, 2, 4).unwrap();
        let input = MultiIndex::ones_then_zeros(2, 4);
        let ratio = alpha.powu(2) / alpha.norm_sqr().sinh();
        for p in enumerate_weight(4, 2) {
            let cat = cat_amplitude(&u, &s, &p).unwrap();
            let fock = fock_amplitude(&u, &p, &input).unwrap();
            assert!((cat - ratio * fock).norm() < 1e-13, "{p}");
        }
    }

    #[test]
    fn parity_and_low_counts_vanish() {
        let mut rng = seeded_rng(62);
        let u = haar_unitary(3, &mut rng);
        let s = spec(0.8, 2, 3);
        for p in [MultiIndex::from([1, 0, 0]), MultiIndex::from([1, 1, 1]), MultiIndex::from([0, 0, 0])] {
            assert_eq!(cat_amplitude(&u, &s, &p).unwrap(), C64::zero());
            // the raw sign sum vanishes by symmetry as well
            assert!(sign_sum(&u, 2, &p).norm() < 1e-12);
        }
    }

    #[test]
    fn single_mode_cat_expansion() {
        let u = UnitaryMatrix::identity(1);
        let x: f64 = 0.9 * 0.9;
        let d = cat_distribution(&u, &spec(0.9, 1, 1), 9).unwrap();
        for k in (1..=9).step_by(2) {
            let expected = x.powi(k as i32) / (factorial_f64(k) * x.sinh());
            assert!((d.probability(&MultiIndex::from([k])) - expected).abs() < 1e-14);
        }
        assert_eq!(d.probability(&MultiIndex::from([2])), 0.0);
    }

    #[test]
    fn distribution_mass_and_tail() {
        let mut rng = seeded_rng(63);
        let u = haar_unitary(4, &mut rng);
        for alpha in [0.2, 0.5, 1.0] {
            let s = spec(alpha, 2, 4);
            let d = cat_distribution(&u, &s, 8).unwrap();
            let frac = photon_fraction(s.alpha, 2).unwrap();
            assert!((d.mass_at(2) - frac).abs() < 1e-10);
            assert_eq!(d.mass_at(3), 0.0);
            let tail = d.tail_bound.unwrap();
            assert!(d.truncated_mass >= 0.0);
            assert!(d.truncated_mass <= tail + 1e-12, "{} > {tail}", d.truncated_mass);
            // proportionality to single-photon statistics at n photons
            let bs = bs_distribution(&u, 2).unwrap();
            for (p, &v) in &bs.support {
                assert!((d.probability(p) - frac * v).abs() <= 1e-10 * v.max(1e-300) + 1e-16);
            }
        }
    }

    #[test]
    fn small_amplitude_concentrates_at_n() {
        let u = UnitaryMatrix::identity(2);
        let d = cat_distribution(&u, &spec(0.05, 2, 2), 6).unwrap();
        assert!(d.mass_at(2) >= 0.99);
    }

    #[test]
    fn photon_number_law_sums_to_one() {
        let pmf = photon_number_pmf(C64::new(1.2, 0.0), 3, 200);
        assert!((pmf.iter().sum::<f64>() - 1.0).abs() < 1e-13);
        assert!((pmf[3] - photon_fraction(C64::new(1.2, 0.0), 3).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn regime_scaling() {
        let r = amplitude_regime_check(16, 100, 1.0).unwrap();
        let f = r.photon_fraction.unwrap();
        assert!(f >= r.inverse_m);
        // leading order e^{−nα⁴/6} with corrections of order nα⁸
        assert!((f - r.leading_order).abs() <= 16.0 * r.alpha.powi(8));
        let zero = amplitude_regime_check(4, 10, 0.0).unwrap();
        assert_eq!(zero.alpha, 0.0);
        assert!(zero.photon_fraction.is_none());
    }

    #[test]
    fn spec_validation() {
        assert_eq!(CatInputSpec::new(C64::zero(), 1, 2), Err(BosonicError::ZeroAmplitude));
        assert!(CatInputSpec::new(C64::one(), 3, 2).is_err());
        let s = spec(0.5, 1, 2);
        assert!(cat_distribution(&UnitaryMatrix::identity(3), &s, 3).is_err());
        assert!(cat_distribution(&UnitaryMatrix::identity(2), &spec(0.5, 2, 2), 1).is_err());
    }
}
