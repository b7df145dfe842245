use num_complex::Complex64 as C64;
use num_traits::Zero;
use rayon::prelude::*;

use super::{BosonicError, OutcomeDistribution, DISTRIBUTION_BUDGET};
use crate::combinatorics::{enumerate_weight, repeat_matrix, weight_class_size, MultiIndex, RepetitionPattern};
use crate::numerics::UnitaryMatrix;
use crate::permanents::permanent_ryser;

/// `⟨p|Û|q⟩ = Per(U_{p,q})/sqrt(p! q!)`, zero unless `|p| = |q|`.
pub fn fock_amplitude(u: &UnitaryMatrix, p: &MultiIndex, q: &MultiIndex) -> Result<C64, BosonicError> {
    let m = u.dim();
    if p.len() != m || q.len() != m {
        return Err(BosonicError::InvalidInput(format!("occupation vectors must have length {m}")));
    }
    if p.weight() != q.weight() {
        return Ok(C64::zero());
    }
    let rep = repeat_matrix(u.matrix(), &RepetitionPattern::new(p.clone(), q.clone()));
    let per = permanent_ryser(&rep)?.value;
    Ok(per / (p.factorial_f64() * q.factorial_f64()).sqrt())
}

/// Output distribution for one photon in each of the first `n` modes.
pub fn bs_distribution(u: &UnitaryMatrix, n: usize) -> Result<OutcomeDistribution, BosonicError> {
    let m = u.dim();
    if n > m {
        return Err(BosonicError::InvalidInput(format!("{n} photons do not fit in {m} input modes")));
    }
    let outcomes: u128 = weight_class_size(m, n).try_into().unwrap_or(u128::MAX);
    let cost = outcomes.saturating_mul(1u128 << n.min(127));
    if cost > DISTRIBUTION_BUDGET {
        return Err(BosonicError::TooLarge { size: cost, limit: DISTRIBUTION_BUDGET });
    }
    let input = MultiIndex::ones_then_zeros(n, m);
    let support = enumerate_weight(m, n)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|p| {
            let amp = fock_amplitude(u, &p, &input)?;
            Ok((p, amp.norm_sqr()))
        })
        .collect::<Result<_, BosonicError>>()?;
    Ok(OutcomeDistribution { support, cutoff: n, truncated_mass: 0.0, tail_bound: Some(0.0) })
}
