//! Linear-optics simulator for single-photon and cat-state inputs: Fock
//! amplitudes, enumerated output distributions, seeded sampling and the
//! rejection step that turns cat-state samples into single-photon samples.

mod cat;
mod fock;
mod pipeline;

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::combinatorics::MultiIndex;
use crate::numerics::random::seeded_rng;
use crate::numerics::NumericsError;
use crate::permanents::PermanentError;

pub use cat::{
    amplitude_regime_check, cat_amplitude, cat_distribution, photon_fraction, photon_number_pmf, CatInputSpec,
    RegimeReport,
};
pub use fock::{bs_distribution, fock_amplitude};
pub use pipeline::{rejection_sampling_pipeline, reject_to_fixed_n, PipelineReport};

/// Largest number of outcome-times-term evaluations a distribution may need.
pub const DISTRIBUTION_BUDGET: u128 = 50_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BosonicError {
    #[error(transparent)]
    Permanent(#[from] PermanentError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error("enumeration needs {size} evaluations, above the limit of {limit}")]
    TooLarge { size: u128, limit: u128 },
    #[error("cat amplitude must be nonzero")]
    ZeroAmplitude,
    #[error("distribution has no mass at total photon number {0}")]
    EmptyConditioning(usize),
    #[error("{0}")]
    InvalidInput(String),
}

/// Photon counts per output mode.
pub type FockOutcome = MultiIndex;

/// One draw from an [`OutcomeDistribution`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SampledOutcome {
    Fock(FockOutcome),
    /// Stands in for all outcomes beyond the enumeration cutoff.
    Overflow,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutcomeDistribution {
    #[serde(with = "support_entries")]
    pub support: BTreeMap<FockOutcome, f64>,
    /// Largest total photon number enumerated.
    pub cutoff: usize,
    /// `1 − Σ support`.
    pub truncated_mass: f64,
    /// Analytic mass beyond the cutoff, where one is known.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub tail_bound: Option<f64>,
}

mod support_entries {
    use super::*;
    use serde::{Deserializer, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Entry {
        counts: FockOutcome,
        probability: f64,
    }

    pub fn serialize<S: Serializer>(map: &BTreeMap<FockOutcome, f64>, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(map.iter().map(|(k, &v)| Entry { counts: k.clone(), probability: v }))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<FockOutcome, f64>, D::Error> {
        let entries = Vec::<Entry>::deserialize(d)?;
        Ok(entries.into_iter().map(|e| (e.counts, e.probability)).collect())
    }
}

impl OutcomeDistribution {
    pub fn probability(&self, p: &FockOutcome) -> f64 {
        self.support.get(p).copied().unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.support.values().sum()
    }

    /// Mass on outcomes with `|p| = n`.
    pub fn mass_at(&self, n: usize) -> f64 {
        self.support.iter().filter(|(p, _)| p.weight() == n).map(|(_, v)| v).sum()
    }

    /// Empirical distribution of `samples`; overflow draws become truncated mass.
    pub fn empirical(samples: &[SampledOutcome]) -> Self {
        let mut support = BTreeMap::new();
        let mut overflow = 0usize;
        let mut cutoff = 0;
        for s in samples {
            match s {
                SampledOutcome::Fock(p) => {
                    cutoff = cutoff.max(p.weight());
                    *support.entry(p.clone()).or_insert(0.0) += 1.0;
                }
                SampledOutcome::Overflow => overflow += 1,
            }
        }
        let count = samples.len().max(1) as f64;
        support.values_mut().for_each(|v| *v /= count);
        Self { support, cutoff, truncated_mass: overflow as f64 / count, tail_bound: None }
    }
}

/// `½ Σ |P(p) − Q(p)|` over the union of supports, with the truncated masses
/// treated as one extra outcome.
pub fn tv_distance(a: &OutcomeDistribution, b: &OutcomeDistribution) -> f64 {
    let mut sum = (a.truncated_mass - b.truncated_mass).abs();
    for (p, &v) in &a.support {
        sum += (v - b.probability(p)).abs();
    }
    for (p, &v) in &b.support {
        if !a.support.contains_key(p) {
            sum += v.abs();
        }
    }
    0.5 * sum
}

/// Inverse-CDF sampling over the support in its sorted order, followed by the
/// overflow sentinel carrying the truncated mass.
pub fn sample(dist: &OutcomeDistribution, count: usize, seed: u64) -> Vec<SampledOutcome> {
    let outcomes: Vec<&FockOutcome> = dist.support.keys().collect();
    let mut cdf = Vec::with_capacity(outcomes.len());
    let mut acc = 0.0;
    for v in dist.support.values() {
        acc += v.max(0.0);
        cdf.push(acc);
    }
    let total = acc + dist.truncated_mass.max(0.0);
    let mut rng = seeded_rng(seed);
    (0..count)
        .map(|_| {
            let u = rng.random::<f64>() * total;
            let i = cdf.partition_point(|&c| c <= u);
            match outcomes.get(i) {
                Some(p) => SampledOutcome::Fock((*p).clone()),
                None => SampledOutcome::Overflow,
            }
        })
        .collect()
}
