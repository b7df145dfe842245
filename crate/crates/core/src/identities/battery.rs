//! Named, seeded identity checks run by `verify --all`.

use num_bigint::BigInt;
use num_complex::Complex64 as C64;
use num_rational::BigRational;
use rand::Rng;
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;

use super::mmmt::{dixon_matrix, verify_mmmt_two_reductions};
use super::*;
use crate::numerics::random::{haar_unitary, random_disk_matrix, stream_rng};

/// Every verifier the module exposes; each must be exercised by some entry.
pub const IDENTITY_OPERATIONS: &[&str] = &[
    "verify_macmahon",
    "verify_mmmt_two",
    "verify_mmmt_n",
    "verify_corollary_rank_one",
    "verify_generating_function",
    "verify_monomial_glynn",
    "verify_sum_formula",
    "verify_laplace",
    "verify_sum_of_permanents",
    "verify_even_matrix",
    "verify_tmss_overlap",
    "verify_sn_identity",
];

type Runner = fn(&mut ChaCha20Rng, f64) -> Result<IdentityReport, IdentityError>;

pub struct BatteryEntry {
    pub name: &'static str,
    pub covers: &'static str,
    run: Runner,
}

/// Random instances per randomized entry.
const INSTANCES: usize = 3;

pub static BATTERY: &[BatteryEntry] = &[
    BatteryEntry { name: "macmahon", covers: "verify_macmahon", run: macmahon },
    BatteryEntry { name: "macmahon-exact", covers: "verify_macmahon", run: macmahon_exact },
    BatteryEntry { name: "dixon", covers: "verify_macmahon", run: dixon },
    BatteryEntry { name: "mmmt-two", covers: "verify_mmmt_two", run: mmmt_two },
    BatteryEntry { name: "mmmt-two-reductions", covers: "verify_mmmt_two", run: mmmt_two_reductions },
    BatteryEntry { name: "mmmt-n", covers: "verify_mmmt_n", run: mmmt_n },
    BatteryEntry { name: "mmmt-n-reduction", covers: "verify_mmmt_n", run: mmmt_n_reduction },
    BatteryEntry { name: "corollary-rank-one", covers: "verify_corollary_rank_one", run: corollary },
    BatteryEntry { name: "generating-function", covers: "verify_generating_function", run: generating },
    BatteryEntry { name: "monomial-glynn", covers: "verify_monomial_glynn", run: monomial },
    BatteryEntry { name: "sum-formula", covers: "verify_sum_formula", run: sum_formula },
    BatteryEntry { name: "laplace", covers: "verify_laplace", run: laplace },
    BatteryEntry { name: "sum-of-permanents", covers: "verify_sum_of_permanents", run: sum_of_permanents },
    BatteryEntry { name: "even-matrix-single", covers: "verify_even_matrix", run: even_single },
    BatteryEntry { name: "even-matrix-full", covers: "verify_even_matrix", run: even_full },
    BatteryEntry { name: "tmss-overlap", covers: "verify_tmss_overlap", run: tmss },
    BatteryEntry { name: "sn-identity", covers: "verify_sn_identity", run: sn },
];

impl BatteryEntry {
    pub fn run(&self, seed: u64, tolerance: f64) -> Result<IdentityReport, IdentityError> {
        let index = BATTERY.iter().position(|e| e.name == self.name).unwrap_or(0);
        let mut rng = stream_rng(seed, index as u64);
        let mut report = (self.run)(&mut rng, tolerance)?;
        report.identity_name = self.name.to_string();
        Ok(report)
    }
}

pub fn run_identity(name: &str, seed: u64, tolerance: f64) -> Result<IdentityReport, IdentityError> {
    BATTERY
        .iter()
        .find(|e| e.name == name)
        .ok_or_else(|| {
            let known: Vec<_> = BATTERY.iter().map(|e| e.name).collect();
            IdentityError::InvalidInput(format!("unknown identity '{name}' (known: {})", known.join(", ")))
        })?
        .run(seed, tolerance)
}

/// Runs every entry, concurrently, returning reports in registry order.
pub fn run_battery(seed: u64, tolerance: f64) -> Result<Vec<IdentityReport>, IdentityError> {
    BATTERY.par_iter().map(|e| e.run(seed, tolerance)).collect()
}

fn repeat(
    name: &str,
    rng: &mut ChaCha20Rng,
    mut one: impl FnMut(&mut ChaCha20Rng) -> Result<IdentityReport, IdentityError>,
) -> Result<IdentityReport, IdentityError> {
    let parts = (0..INSTANCES)
        .map(|i| {
            let mut r = one(rng)?;
            r.identity_name = format!("{}#{i}", r.identity_name);
            Ok(r)
        })
        .collect::<Result<Vec<_>, IdentityError>>()?;
    Ok(IdentityReport::merge(name, parts))
}

fn random_rational<R: Rng>(rng: &mut R) -> BigRational {
    let num: i64 = rng.random_range(-9..=9);
    let den: i64 = rng.random_range(1..=9);
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

fn macmahon(rng: &mut ChaCha20Rng, tol: f64) -> Result<IdentityReport, IdentityError> {
    let mut parts = vec![verify_macmahon(&ComplexMatrix::zeros(3, 3), &DegreeCap::uniform(3, 2), tol)?];
    parts.push(repeat("random", rng, |rng| verify_macmahon(&random_disk_matrix(3, rng), &DegreeCap::uniform(3, 2), tol))?);
    Ok(IdentityReport::merge("macmahon", parts))
}

fn macmahon_exact(_: &mut ChaCha20Rng, _: f64) -> Result<IdentityReport, IdentityError> {
    verify_macmahon_exact(&dixon_matrix(), &DegreeCap::uniform(3, 4))
}

fn dixon(_: &mut ChaCha20Rng, _: f64) -> Result<IdentityReport, IdentityError> {
    let parts = (1..=3).map(verify_dixon).collect::<Result<Vec<_>, _>>()?;
    Ok(IdentityReport::merge("dixon", parts))
}

fn mmmt_two(rng: &mut ChaCha20Rng, tol: f64) -> Result<IdentityReport, IdentityError> {
    repeat("mmmt-two", rng, |rng| {
        let a = random_disk_matrix(2, rng);
        let b = random_disk_matrix(2, rng);
        verify_mmmt_two(&a, &b, &DegreeCap::uniform(4, 2), tol)
    })
}

fn mmmt_two_reductions(rng: &mut ChaCha20Rng, tol: f64) -> Result<IdentityReport, IdentityError> {
    repeat("mmmt-two-reductions", rng, |rng| {
        verify_mmmt_two_reductions(&random_disk_matrix(2, rng), &DegreeCap::uniform(4, 2), tol)
    })
}

fn mmmt_n(rng: &mut ChaCha20Rng, tol: f64) -> Result<IdentityReport, IdentityError> {
    repeat("mmmt-n", rng, |rng| {
        let mats: Vec<_> = (0..3).map(|_| random_disk_matrix(2, rng)).collect();
        let three = verify_mmmt_n(&mats, &DegreeCap::uniform(6, 1), tol)?;
        let two = verify_mmmt_n(&mats[..2], &DegreeCap::uniform(4, 2), tol)?;
        Ok(IdentityReport::merge("mmmt-n", vec![three, two]))
    })
}

fn mmmt_n_reduction(rng: &mut ChaCha20Rng, tol: f64) -> Result<IdentityReport, IdentityError> {
    repeat("mmmt-n-reduction", rng, |rng| {
        let a = random_disk_matrix(2, rng);
        let b = random_disk_matrix(2, rng);
        verify_mmmt_n_reduction(&a, &b, &DegreeCap::uniform(4, 2), tol)
    })
}

fn corollary(rng: &mut ChaCha20Rng, tol: f64) -> Result<IdentityReport, IdentityError> {
    let one = MultiIndex::from([1, 1]);
    let mut parts = vec![verify_corollary_rank_one(&ComplexMatrix::ones(2), &one, &one, tol)?];
    parts.push(repeat("random", rng, |rng| {
        let p = MultiIndex::from([2, 1, 0]);
        let q = MultiIndex::from([1, 1, 1]);
        verify_corollary_rank_one(&random_disk_matrix(3, rng), &p, &q, tol)
    })?);
    Ok(IdentityReport::merge("corollary-rank-one", parts))
}

fn generating(rng: &mut ChaCha20Rng, tol: f64) -> Result<IdentityReport, IdentityError> {
    repeat("generating-function", rng, |rng| {
        let a = random_disk_matrix(2, rng);
        let parts = [
            GeneratingFunction::Exp,
            GeneratingFunction::GeometricInverse,
            GeneratingFunction::PowerN(2),
            GeneratingFunction::LogInverse,
        ]
        .into_iter()
        .map(|f| verify_generating_function(&a, f, &DegreeCap::uniform(4, 2), tol))
        .collect::<Result<Vec<_>, _>>()?;
        Ok(IdentityReport::merge("generating-function", parts))
    })
}

fn monomial(rng: &mut ChaCha20Rng, tol: f64) -> Result<IdentityReport, IdentityError> {
    repeat("monomial-glynn", rng, |rng| {
        verify_monomial_glynn(&random_disk_matrix(3, rng), &MultiIndex::from([1, 2, 0]), &DegreeCap::uniform(3, 3), tol)
    })
}

fn ones_pattern() -> RepetitionPattern {
    RepetitionPattern::ones(3)
}

fn sum_formula(rng: &mut ChaCha20Rng, tol: f64) -> Result<IdentityReport, IdentityError> {
    repeat("sum-formula", rng, |rng| {
        let a = random_disk_matrix(3, rng);
        let b = random_disk_matrix(3, rng);
        let plain = verify_sum_formula(&a, &b, &ones_pattern(), tol)?;
        let repeated = verify_sum_formula(&a, &b, &RepetitionPattern::new(vec![2, 0, 1], vec![1, 1, 1]), tol)?;
        Ok(IdentityReport::merge("sum-formula", vec![plain, repeated]))
    })
}

fn laplace(rng: &mut ChaCha20Rng, tol: f64) -> Result<IdentityReport, IdentityError> {
    repeat("laplace", rng, |rng| {
        let a = random_disk_matrix(3, rng);
        let b = random_disk_matrix(2, rng);
        let three = verify_laplace(&a, &ones_pattern(), 1, tol)?;
        let two = verify_laplace(&b, &RepetitionPattern::new(vec![2, 2], vec![2, 2]), 2, tol)?;
        Ok(IdentityReport::merge("laplace", vec![three, two]))
    })
}

fn sum_of_permanents(rng: &mut ChaCha20Rng, tol: f64) -> Result<IdentityReport, IdentityError> {
    repeat("sum-of-permanents", rng, |rng| {
        let a = random_disk_matrix(3, rng);
        let b = random_disk_matrix(3, rng);
        let special = verify_sum_of_permanents(&a, &b, &ones_pattern(), tol)?;
        let a2 = random_disk_matrix(2, rng);
        let b2 = random_disk_matrix(2, rng);
        let repeated = verify_sum_of_permanents(&a2, &b2, &RepetitionPattern::new(vec![2, 1], vec![1, 2]), tol)?;
        Ok(IdentityReport::merge("sum-of-permanents", vec![special, repeated]))
    })
}

fn even_single(rng: &mut ChaCha20Rng, tol: f64) -> Result<IdentityReport, IdentityError> {
    repeat("even-matrix-single", rng, |rng| {
        verify_even_matrix(&random_disk_matrix(4, rng), EvenMode::SingleCoefficient, None, tol.max(1e-7))
    })
}

fn even_full(rng: &mut ChaCha20Rng, tol: f64) -> Result<IdentityReport, IdentityError> {
    repeat("even-matrix-full", rng, |rng| {
        verify_even_matrix(&random_disk_matrix(4, rng), EvenMode::FullSeries, Some(&DegreeCap::uniform(4, 2)), tol)
    })
}

fn tmss(rng: &mut ChaCha20Rng, tol: f64) -> Result<IdentityReport, IdentityError> {
    repeat("tmss-overlap", rng, |rng| {
        let u = haar_unitary(2, rng);
        let l = C64::from_polar(0.2, rng.random::<f64>() * std::f64::consts::TAU);
        let mu = C64::from_polar(0.2, rng.random::<f64>() * std::f64::consts::TAU);
        verify_tmss_overlap(&u, &[l], &[mu], 8, tol.max(1e-6))
    })
}

fn sn(rng: &mut ChaCha20Rng, _: f64) -> Result<IdentityReport, IdentityError> {
    let mut parts = vec![verify_sn_identity(&BigRational::from_integer(1.into()), &BigRational::from_integer(1.into()), 8)?];
    for n in [2, 5, 8] {
        let a = random_rational(rng);
        let b = random_rational(rng);
        parts.push(verify_sn_identity(&a, &b, n)?);
    }
    Ok(IdentityReport::merge("sn-identity", parts))
}
