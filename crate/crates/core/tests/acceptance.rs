//! Acceptance runner. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;

use permkit::bosonic::{
    bs_distribution, cat_distribution, photon_fraction, reject_to_fixed_n, rejection_sampling_pipeline, tv_distance,
    CatInputSpec,
};
use permkit::combinatorics::{binomial, enumerate_weight, repeat_matrix, MultiIndex, RepetitionPattern};
use permkit::estimators::{estimate_permanent, grid_expectation};
use permkit::identities::{
    dixon_closed_form, dixon_matrix, verify_corollary_rank_one, verify_dixon, verify_even_matrix,
    verify_generating_function, verify_macmahon, verify_macmahon_exact, verify_mmmt_n, verify_mmmt_n_reduction,
    verify_mmmt_two, verify_mmmt_two_reductions, verify_sn_identity, verify_sum_of_permanents, EvenMode,
    GeneratingFunction, IdentityReport,
};
use permkit::numerics::random::{haar_unitary, random_disk_matrix, seeded_rng};
use permkit::numerics::{ComplexMatrix, UnitaryMatrix};
use permkit::permanents::{permanent_naive, permanent_with, Algorithm};
use permkit::series::DegreeCap;
use permkit::C64;

const TOL: f64 = 1e-8;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    passed: bool,
    summary: String,
}

impl Outcome {
    fn new(passed: bool, summary: impl Into<String>) -> Self {
        Self { passed, summary: summary.into() }
    }
}

/// Collects identity reports and remembers the first failure.
#[derive(Default)]
struct Reports {
    count: usize,
    worst: f64,
    failure: Option<String>,
}

impl Reports {
    fn push(&mut self, report: Result<IdentityReport, impl std::fmt::Display>) {
        self.count += 1;
        match report {
            Ok(r) => {
                self.worst = self.worst.max(r.max_abs_error);
                if !r.passed && self.failure.is_none() {
                    self.failure = Some(format!("{} failed (error {:e}, at {:?})", r.identity_name, r.max_abs_error, r.worst_coefficient));
                }
            }
            Err(e) => {
                if self.failure.is_none() {
                    self.failure = Some(format!("error: {e}"));
                }
            }
        }
    }

    fn outcome(self, extra: &str) -> Outcome {
        match self.failure {
            Some(f) => Outcome::new(false, f),
            None => Outcome::new(true, format!("{} reports, worst error {:.2e}{extra}", self.count, self.worst)),
        }
    }
}

fn within(elapsed: Duration, limit_secs: u64) -> bool {
    elapsed.as_secs_f64() < limit_secs as f64
}

fn relative_error(value: C64, reference: C64) -> f64 {
    (value - reference).norm() / reference.norm()
}

fn oracle_equivalence() -> Outcome {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().expect("thread pool");
    let start = Instant::now();
    let outcome = pool.install(|| {
        let mut rng = seeded_rng(1);
        let mut worst = 0.0f64;
        let mut checks = 0usize;
        for m in 1..=6 {
            let ones = RepetitionPattern::ones(m);
            for _ in 0..100 {
                let a = random_disk_matrix(m, &mut rng);
                let b = random_disk_matrix(m, &mut rng);
                let reference = permanent_naive(&a).unwrap().value;
                for alg in Algorithm::ALL.into_iter().filter(|&x| x != Algorithm::Naive && x != Algorithm::CauchyBinet) {
                    let value = match permanent_with(alg, &a, Some(&ones), None) {
                        Ok(r) => r.value,
                        Err(e) => return Outcome::new(false, format!("{alg} at m = {m}: {e}")),
                    };
                    let err = relative_error(value, reference);
                    if err > TOL {
                        return Outcome::new(false, format!("{alg} at m = {m}: relative error {err:e}"));
                    }
                    worst = worst.max(err);
                    checks += 1;
                }
                let ab = a.matmul(&b).unwrap();
                let reference = permanent_naive(&ab).unwrap().value;
                let value = match permanent_with(Algorithm::CauchyBinet, &a, Some(&ones), Some(&b)) {
                    Ok(r) => r.value,
                    Err(e) => return Outcome::new(false, format!("cauchy-binet at m = {m}: {e}")),
                };
                let err = relative_error(value, reference);
                if err > TOL {
                    return Outcome::new(false, format!("cauchy-binet at m = {m}: relative error {err:e}"));
                }
                worst = worst.max(err);
                checks += 1;
            }
        }
        // repeated rows and columns through the pattern-aware algorithms
        for m in 1..=4 {
            for _ in 0..25 {
                let a = random_disk_matrix(m, &mut rng);
                let n = rng.random_range(1..=(9 - m).min(5));
                let ps: Vec<MultiIndex> = enumerate_weight(m, n).collect();
                let pat = RepetitionPattern::new(
                    ps[rng.random_range(0..ps.len())].clone(),
                    ps[rng.random_range(0..ps.len())].clone(),
                );
                let reference = permanent_naive(&repeat_matrix(&a, &pat)).unwrap().value;
                for alg in Algorithm::ALL.into_iter().filter(|&x| x != Algorithm::Naive) {
                    let value = match permanent_with(alg, &a, Some(&pat), None) {
                        Ok(r) => r.value,
                        Err(e) => return Outcome::new(false, format!("{alg} on {pat:?}: {e}")),
                    };
                    let err = relative_error(value, reference);
                    if err > TOL {
                        return Outcome::new(false, format!("{alg} on {pat:?}: relative error {err:e}"));
                    }
                    worst = worst.max(err);
                    checks += 1;
                }
            }
        }
        Outcome::new(true, format!("{checks} comparisons, worst relative error {worst:.2e}"))
    });
    let elapsed = start.elapsed();
    if outcome.passed && !within(elapsed, 60) {
        return Outcome::new(false, format!("took {elapsed:.1?}, limit 60 s"));
    }
    Outcome::new(outcome.passed, format!("{} in {elapsed:.1?} on one thread", outcome.summary))
}

fn macmahon() -> Outcome {
    let mut rng = seeded_rng(2);
    let mut reports = Reports::default();
    for _ in 0..20 {
        reports.push(verify_macmahon(&random_disk_matrix(3, &mut rng), &DegreeCap::uniform(3, 3), TOL));
    }
    for cap in 1..=8 {
        let report = verify_macmahon_exact(&dixon_matrix(), &DegreeCap::uniform(3, cap));
        if let Ok(r) = &report {
            if r.max_abs_error != 0.0 {
                return Outcome::new(false, format!("exact Dixon check at cap {cap} is off by {:e}", r.max_abs_error));
            }
        }
        reports.push(report);
    }
    reports.outcome(", Dixon caps 1..8 exact")
}

fn dixon() -> Outcome {
    let start = Instant::now();
    let mut reports = Reports::default();
    for n in 1..=4 {
        let report = verify_dixon(n);
        if let Ok(r) = &report {
            if r.tolerance != 0.0 || r.max_abs_error != 0.0 {
                return Outcome::new(false, format!("n = {n}: not exact (error {:e})", r.max_abs_error));
            }
        }
        reports.push(report);
    }
    // Independent check of the binomial sum against the closed form.
    for n in 1..=4usize {
        let sum: BigInt = (0..=2 * n)
            .map(|k| {
                let c = BigInt::from(binomial(2 * n, k));
                let t = &c * &c * &c;
                if k % 2 == 1 {
                    -t
                } else {
                    t
                }
            })
            .sum();
        if sum != dixon_closed_form(n) {
            return Outcome::new(false, format!("binomial sum disagrees with the closed form at n = {n}"));
        }
    }
    let elapsed = start.elapsed();
    if !within(elapsed, 30) {
        return Outcome::new(false, format!("took {elapsed:.1?}, limit 30 s"));
    }
    reports.outcome(&format!(", n = 1..4 exact, {elapsed:.1?}"))
}

fn master_theorems() -> Outcome {
    let start = Instant::now();
    let mut rng = seeded_rng(4);
    let mut reports = Reports::default();
    for _ in 0..5 {
        let a = random_disk_matrix(2, &mut rng);
        let b = random_disk_matrix(2, &mut rng);
        let c = random_disk_matrix(2, &mut rng);
        reports.push(verify_mmmt_two(&a, &b, &DegreeCap::uniform(4, 2), TOL));
        reports.push(verify_mmmt_n(&[a.clone(), b.clone()], &DegreeCap::uniform(4, 2), TOL));
        reports.push(verify_mmmt_n(&[a.clone(), b.clone(), c], &DegreeCap::uniform(6, 2), TOL));
        reports.push(verify_mmmt_two_reductions(&a, &DegreeCap::uniform(4, 2), TOL));
        reports.push(verify_mmmt_n_reduction(&a, &b, &DegreeCap::uniform(4, 2), TOL));
    }
    let elapsed = start.elapsed();
    if !within(elapsed, 120) {
        return Outcome::new(false, format!("took {elapsed:.1?}, limit 120 s"));
    }
    reports.outcome(&format!(", {elapsed:.1?}"))
}

fn generating_functions() -> Outcome {
    let mut rng = seeded_rng(5);
    let mut reports = Reports::default();
    for m in 2..=3 {
        let cap = DegreeCap::uniform(2 * m, 2);
        for _ in 0..3 {
            let a = random_disk_matrix(m, &mut rng);
            for f in [GeneratingFunction::Exp, GeneratingFunction::GeometricInverse, GeneratingFunction::LogInverse] {
                reports.push(verify_generating_function(&a, f, &cap, TOL));
            }
            for n in 1..=3 {
                reports.push(verify_generating_function(&a, GeneratingFunction::PowerN(n), &DegreeCap::uniform(2 * m, n), TOL));
                for p in enumerate_weight(m, n) {
                    for q in enumerate_weight(m, n) {
                        reports.push(verify_corollary_rank_one(&a, &p, &q, TOL));
                    }
                }
            }
        }
    }
    reports.outcome("")
}

fn sum_of_permanents() -> Outcome {
    let start = Instant::now();
    let mut rng = seeded_rng(6);
    let mut reports = Reports::default();
    let mut instance = 0usize;
    while instance < 50 {
        let m = 1 + instance % 3;
        let n = 1 + (instance / 3) % 4;
        let a = random_disk_matrix(m, &mut rng);
        let b = random_disk_matrix(m, &mut rng);
        let pat = if instance.is_multiple_of(5) {
            RepetitionPattern::ones(m)
        } else {
            let ps: Vec<MultiIndex> = enumerate_weight(m, n).collect();
            let p = ps[rng.random_range(0..ps.len())].clone();
            let q = ps[rng.random_range(0..ps.len())].clone();
            RepetitionPattern::new(p, q)
        };
        reports.push(verify_sum_of_permanents(&a, &b, &pat, TOL));
        instance += 1;
    }
    let elapsed = start.elapsed();
    if !within(elapsed, 60) {
        return Outcome::new(false, format!("took {elapsed:.1?}, limit 60 s"));
    }
    reports.outcome(&format!(" (10 with p = q = 1), {elapsed:.1?}"))
}

fn even_matrices() -> Outcome {
    let mut rng = seeded_rng(7);
    let mut reports = Reports::default();
    for dim in [4, 6] {
        for _ in 0..20 {
            reports.push(verify_even_matrix(&random_disk_matrix(dim, &mut rng), EvenMode::SingleCoefficient, None, 1e-7));
        }
    }
    for _ in 0..3 {
        let cap = DegreeCap::uniform(4, 2);
        reports.push(verify_even_matrix(&random_disk_matrix(4, &mut rng), EvenMode::FullSeries, Some(&cap), TOL));
    }
    reports.outcome("")
}

fn random_rational<R: Rng>(rng: &mut R) -> BigRational {
    let num: i64 = rng.random_range(-9..=9);
    let den: i64 = rng.random_range(1..=9);
    BigRational::new(num.into(), den.into())
}

fn sn_identity() -> Outcome {
    let mut rng = seeded_rng(8);
    let mut reports = Reports::default();
    for _ in 0..10 {
        let (a, b) = (random_rational(&mut rng), random_rational(&mut rng));
        for n in 0..=8 {
            reports.push(verify_sn_identity(&a, &b, n));
        }
    }
    for n in 0..=8 {
        reports.push(verify_sn_identity(&BigRational::one(), &BigRational::one(), n));
        let sum: BigInt = (0..=n).map(|k| BigInt::from(binomial(n, k).pow(2))).sum();
        if sum != BigInt::from(binomial(2 * n, n)) {
            return Outcome::new(false, format!("central binomial sum fails at n = {n}"));
        }
    }
    if reports.worst != 0.0 {
        return Outcome::new(false, format!("nonzero error {:e} in an exact check", reports.worst));
    }
    reports.outcome("")
}

fn estimators() -> Outcome {
    let mut rng = seeded_rng(9);
    let mut lines = Vec::new();
    for instance in 0..2 {
        let a = random_disk_matrix(3, &mut rng);
        let pat = if instance == 0 {
            RepetitionPattern::ones(3)
        } else {
            RepetitionPattern::new(MultiIndex::from([2, 0, 1]), MultiIndex::from([1, 1, 1]))
        };
        let reference = permanent_naive(&repeat_matrix(&a, &pat)).unwrap().value;
        let n = pat.rows.weight();
        for f in [GeneratingFunction::PowerN(n), GeneratingFunction::Exp] {
            let mut mean = C64::zero();
            let (mut var_re, mut var_im) = (0.0, 0.0);
            for seed in 0..30u64 {
                let r = match estimate_permanent(&a, &pat, f, 100_000, 1000 + seed) {
                    Ok(r) => r,
                    Err(e) => return Outcome::new(false, format!("{}: {e}", f.name())),
                };
                mean += r.estimate;
                var_re += r.stderr_re * r.stderr_re;
                var_im += r.stderr_im * r.stderr_im;
            }
            mean /= 30.0;
            let (se_re, se_im) = (var_re.sqrt() / 30.0, var_im.sqrt() / 30.0);
            let z_re = (mean.re - reference.re).abs() / se_re;
            let z_im = (mean.im - reference.im).abs() / se_im;
            if z_re > 5.0 || z_im > 5.0 {
                return Outcome::new(false, format!("{} instance {instance}: deviation {z_re:.2}/{z_im:.2} stderr", f.name()));
            }
            lines.push(format!("{} {:.2}/{:.2}σ", f.name(), z_re, z_im));
        }
    }

    let mut grid_worst = 0.0f64;
    for _ in 0..5 {
        let a = random_disk_matrix(2, &mut rng);
        for n in 0..=3 {
            for p in enumerate_weight(2, n) {
                for q in enumerate_weight(2, n) {
                    let pat = RepetitionPattern::new(p.clone(), q);
                    let reference = permanent_naive(&repeat_matrix(&a, &pat)).unwrap().value;
                    let value = match grid_expectation(&a, &pat) {
                        Ok(v) => v,
                        Err(e) => return Outcome::new(false, format!("grid expectation: {e}")),
                    };
                    grid_worst = grid_worst.max((value - reference).norm());
                }
            }
        }
    }
    if grid_worst > 1e-10 {
        return Outcome::new(false, format!("grid expectation off by {grid_worst:e}"));
    }
    Outcome::new(true, format!("{}; grid worst {grid_worst:.1e}", lines.join(", ")))
}

fn beamsplitter() -> UnitaryMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    UnitaryMatrix::new(ComplexMatrix::from_real_rows(&[[h, h], [h, -h]])).expect("unitary")
}

fn cat_sampling() -> Outcome {
    let start = Instant::now();
    let mut rng = seeded_rng(10);
    let (n, m, cutoff) = (2usize, 4usize, 8usize);
    let mut notes = Vec::new();
    for (i, alpha) in [0.2, 0.5, 1.0].into_iter().enumerate() {
        let u = haar_unitary(m, &mut rng);
        let spec = match CatInputSpec::new(C64::new(alpha, 0.0), n, m) {
            Ok(s) => s,
            Err(e) => return Outcome::new(false, format!("alpha {alpha}: {e}")),
        };
        let dist = match cat_distribution(&u, &spec, cutoff) {
            Ok(d) => d,
            Err(e) => return Outcome::new(false, format!("alpha {alpha}: {e}")),
        };
        let x = alpha * alpha;
        let expected_mass = x.powi(n as i32) / x.sinh().powi(n as i32);
        let mass_err = (dist.mass_at(n) - expected_mass).abs();
        if mass_err > 1e-10 {
            return Outcome::new(false, format!("alpha {alpha}: mass at |p| = n off by {mass_err:e}"));
        }

        let bs = bs_distribution(&u, n).expect("single-photon distribution");
        let tv = tv_distance(&reject_to_fixed_n(&dist, n).expect("conditioning"), &bs);
        if tv > 1e-12 {
            return Outcome::new(false, format!("alpha {alpha}: conditioned TV {tv:e}"));
        }

        let count = 100_000;
        let report = match rejection_sampling_pipeline(&u, &spec, cutoff, count, 77 + i as u64) {
            Ok(r) => r,
            Err(e) => return Outcome::new(false, format!("alpha {alpha}: {e}")),
        };
        let target = photon_fraction(spec.alpha, n).expect("photon fraction");
        let se = (target * (1.0 - target) / count as f64).sqrt();
        let z = (report.kept_fraction - target).abs() / se;
        if z > 3.0 {
            return Outcome::new(false, format!("alpha {alpha}: kept fraction {z:.2} stderr from {target}"));
        }
        notes.push(format!("α={alpha}: mass {mass_err:.0e}, TV {tv:.0e}, kept {z:.2}σ"));
    }

    let bs = beamsplitter();
    let hom_fock = bs_distribution(&bs, 2).expect("beamsplitter").probability(&MultiIndex::from([1, 1]));
    let cat_spec = CatInputSpec::new(C64::new(0.5, 0.0), 2, 2).expect("cat spec");
    let hom_cat = reject_to_fixed_n(&cat_distribution(&bs, &cat_spec, cutoff).expect("cat"), 2)
        .expect("conditioning")
        .probability(&MultiIndex::from([1, 1]));
    if hom_fock.abs() > 1e-12 || hom_cat.abs() > 1e-12 {
        return Outcome::new(false, format!("HOM coincidence {hom_fock:e} / {hom_cat:e}"));
    }
    let elapsed = start.elapsed();
    if !within(elapsed, 120) {
        return Outcome::new(false, format!("took {elapsed:.1?}, limit 120 s"));
    }
    Outcome::new(true, format!("{}; HOM {:.0e}; {elapsed:.1?}", notes.join("; "), hom_fock.abs().max(hom_cat.abs())))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("permanent algorithms against naive", oracle_equivalence),
        ("MacMahon master theorem", macmahon),
        ("Dixon's identity", dixon),
        ("two-matrix and chained master theorems", master_theorems),
        ("generating functions", generating_functions),
        ("sum of two permanents", sum_of_permanents),
        ("even-matrix identities", even_matrices),
        ("S_n squaring identity", sn_identity),
        ("phase-average estimators", estimators),
        ("cat-state sampling", cat_sampling),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let verdict = if outcome.passed { "PASS" } else { "FAIL" };
        println!("[{:>2}] {verdict} {name}: {} ({:.1?})", i + 1, outcome.summary, start.elapsed());
        if !outcome.passed {
            failed += 1;
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
