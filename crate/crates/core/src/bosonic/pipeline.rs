use serde::{Deserialize, Serialize};

use super::{
    bs_distribution, cat_distribution, photon_fraction, sample, tv_distance, BosonicError, CatInputSpec,
    OutcomeDistribution, SampledOutcome,
};
use crate::numerics::UnitaryMatrix;

/// Conditions `dist` on `|p| = n` and renormalizes over the enumerated support.
pub fn reject_to_fixed_n(dist: &OutcomeDistribution, n: usize) -> Result<OutcomeDistribution, BosonicError> {
    let kept: std::collections::BTreeMap<_, _> =
        dist.support.iter().filter(|(p, _)| p.weight() == n).map(|(p, &v)| (p.clone(), v)).collect();
    let mass: f64 = kept.values().sum();
    if mass <= 0.0 {
        return Err(BosonicError::EmptyConditioning(n));
    }
    Ok(OutcomeDistribution {
        support: kept.into_iter().map(|(p, v)| (p, v / mass)).collect(),
        cutoff: n,
        truncated_mass: 0.0,
        tail_bound: Some(0.0),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineReport {
    pub samples: usize,
    pub kept: usize,
    pub overflow: usize,
    pub kept_fraction: f64,
    pub expected_fraction: f64,
    /// `sqrt(f(1−f)/samples)` at the expected fraction.
    pub binomial_stderr: f64,
    /// Total variation between the kept samples and the single-photon law.
    pub tv_distance: f64,
    /// `3 sqrt(support/kept)`.
    pub tv_threshold: f64,
    pub kept_samples: Vec<SampledOutcome>,
}

/// Samples the cat-input distribution, keeps draws with exactly `n` photons
/// and compares them with single-photon statistics.
pub fn rejection_sampling_pipeline(
    u: &UnitaryMatrix,
    spec: &CatInputSpec,
    cutoff: usize,
    count: usize,
    seed: u64,
) -> Result<PipelineReport, BosonicError> {
    let dist = cat_distribution(u, spec, cutoff)?;
    let draws = sample(&dist, count, seed);
    let overflow = draws.iter().filter(|s| **s == SampledOutcome::Overflow).count();
    let kept_samples: Vec<SampledOutcome> = draws
        .into_iter()
        .filter(|s| matches!(s, SampledOutcome::Fock(p) if p.weight() == spec.n))
        .collect();
    let kept = kept_samples.len();
    let bs = bs_distribution(u, spec.n)?;
    let expected = photon_fraction(spec.alpha, spec.n)?;
    let tv = if kept == 0 { 1.0 } else { tv_distance(&OutcomeDistribution::empirical(&kept_samples), &bs) };
    Ok(PipelineReport {
        samples: count,
        kept,
        overflow,
        kept_fraction: kept as f64 / count.max(1) as f64,
        expected_fraction: expected,
        binomial_stderr: (expected * (1.0 - expected) / count.max(1) as f64).sqrt(),
        tv_distance: tv,
        tv_threshold: 3.0 * (bs.support.len() as f64 / kept.max(1) as f64).sqrt(),
        kept_samples,
    })
}

#[cfg(test)]
mod tests {
    use num_complex::Complex64 as C64;

    use super::*;
    use crate::combinatorics::MultiIndex;
    use crate::numerics::random::{haar_unitary, seeded_rng};

    #[test]
    fn toy_rejection() {
        let support = [(MultiIndex::from([1, 0]), 0.3), (MultiIndex::from([2, 0]), 0.7)].into_iter().collect();
        let d = OutcomeDistribution { support, cutoff: 2, truncated_mass: 0.0, tail_bound: None };
        let r = reject_to_fixed_n(&d, 1).unwrap();
        assert_eq!(r.probability(&MultiIndex::from([1, 0])), 1.0);
        assert_eq!(r.support.len(), 1);
        assert_eq!(reject_to_fixed_n(&d, 3), Err(BosonicError::EmptyConditioning(3)));
    }

    #[test]
    fn rejection_of_fixed_number_distribution_is_identity() {
        let u = haar_unitary(3, &mut seeded_rng(71));
        let bs = bs_distribution(&u, 2).unwrap();
        let r = reject_to_fixed_n(&bs, 2).unwrap();
        assert!(tv_distance(&r, &bs) < 1e-15);
    }

    #[test]
    fn rejected_cat_statistics_are_single_photon_statistics() {
        let mut rng = seeded_rng(72);
        for (m, n) in [(2, 1), (3, 2), (4, 3)] {
            let u = haar_unitary(m, &mut rng);
            let spec = CatInputSpec::new(C64::from_polar(0.6, 1.1), n, m).unwrap();
            let cat = cat_distribution(&u, &spec, n + 4).unwrap();
            let rejected = reject_to_fixed_n(&cat, n).unwrap();
            assert!(tv_distance(&rejected, &bs_distribution(&u, n).unwrap()) <= 1e-12);
        }
    }

    #[test]
    fn pipeline_keeps_expected_fraction() {
        let u = haar_unitary(4, &mut seeded_rng(73));
        let spec = CatInputSpec::new(C64::new(0.3, 0.0), 2, 4).unwrap();
        let r = rejection_sampling_pipeline(&u, &spec, 8, 20_000, 5).unwrap();
        assert!((r.kept_fraction - r.expected_fraction).abs() <= 3.0 * r.binomial_stderr + 1.0 / 20_000.0);
        assert!(r.tv_distance <= r.tv_threshold);
        assert_eq!(r.kept, r.kept_samples.len());
    }
}
