use std::fs;

use anyhow::{anyhow, bail, Context, Result};
use serde::Serialize;
use serde_json::json;

use permkit::bosonic::{
    amplitude_regime_check, bs_distribution, cat_distribution, reject_to_fixed_n, sample as draw, tv_distance,
    CatInputSpec, OutcomeDistribution, SampledOutcome,
};
use permkit::combinatorics::{MultiIndex, RepetitionPattern};
use permkit::estimators::{estimate_permanent, estimator_variance_scan};
use permkit::identities::{
    run_battery, run_identity, verify_even_matrix, verify_generating_function, verify_macmahon,
    verify_mmmt_two_reductions, EvenMode, GeneratingFunction, IdentityReport, BATTERY,
};
use permkit::numerics::{matrix_from_json, ComplexMatrix, UnitaryMatrix};
use permkit::permanents::{permanent_with, Algorithm};
use permkit::series::DegreeCap;
use permkit::C64;

use crate::{EstimateArgs, Outcome, PerArgs, ReportArgs, SampleArgs, VerifyArgs};

fn read_matrix(path: &str) -> Result<ComplexMatrix> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {path}"))?;
    matrix_from_json(&text).with_context(|| format!("invalid matrix in {path}"))
}

fn parse_list(text: &str) -> Result<Vec<usize>> {
    text.split(',')
        .map(|s| s.trim().parse::<usize>().with_context(|| format!("'{s}' is not a non-negative integer")))
        .collect()
}

/// `--rows/--cols` default to all ones.
fn parse_pattern(rows: Option<&str>, cols: Option<&str>, m: usize) -> Result<RepetitionPattern> {
    let side = |v: Option<&str>| -> Result<MultiIndex> {
        let parts = match v {
            Some(t) => parse_list(t)?,
            None => vec![1; m],
        };
        if parts.len() != m {
            bail!("repetition vector has {} entries, matrix has dimension {m}", parts.len());
        }
        Ok(MultiIndex::new(parts))
    };
    Ok(RepetitionPattern::new(side(rows)?, side(cols)?))
}

fn to_json<T: Serialize>(v: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

pub fn per(args: &PerArgs) -> Result<Outcome> {
    let a = read_matrix(&args.matrix)?;
    let m = a.dim()?;
    let algorithm: Algorithm = args.algo.parse().map_err(|e| anyhow!("{e}"))?;
    let pattern = match (&args.rows, &args.cols) {
        (None, None) => None,
        (r, c) => Some(parse_pattern(r.as_deref(), c.as_deref(), m)?),
    };
    let b = args.b.as_deref().map(read_matrix).transpose()?;
    let r = permanent_with(algorithm, &a, pattern.as_ref(), b.as_ref())?;
    let out = json!({
        "re": r.value.re,
        "im": r.value.im,
        "algorithm": r.algorithm,
        "term_count": r.term_count,
    });
    Ok(Outcome { stdout: to_json(&out)?, failed: false })
}

/// Identities that accept a user matrix.
fn verify_with_matrix(name: &str, a: &ComplexMatrix, cap: Option<&DegreeCap>, tol: f64) -> Result<IdentityReport> {
    let m = a.dim()?;
    let cap_or = |vars: usize| cap.cloned().unwrap_or_else(|| DegreeCap::uniform(vars, 2));
    let report = match name {
        "macmahon" => verify_macmahon(a, &cap_or(m), tol)?,
        "mmmt-two-reductions" => verify_mmmt_two_reductions(a, &cap_or(2 * m), tol)?,
        "generating-function" => {
            let parts = [
                GeneratingFunction::Exp,
                GeneratingFunction::GeometricInverse,
                GeneratingFunction::PowerN(2),
                GeneratingFunction::LogInverse,
            ]
            .into_iter()
            .map(|f| verify_generating_function(a, f, &cap_or(2 * m), tol))
            .collect::<Result<Vec<_>, _>>()?;
            IdentityReport::merge(name, parts)
        }
        "even-matrix-single" => verify_even_matrix(a, EvenMode::SingleCoefficient, None, tol)?,
        "even-matrix-full" => verify_even_matrix(a, EvenMode::FullSeries, cap, tol)?,
        other => bail!(
            "identity '{other}' does not take --matrix (supported: macmahon, mmmt-two-reductions, \
             generating-function, even-matrix-single, even-matrix-full)"
        ),
    };
    Ok(report)
}

pub fn verify(args: &VerifyArgs) -> Result<Outcome> {
    if args.tolerance.is_nan() || args.tolerance < 0.0 {
        bail!("tolerance must be non-negative");
    }
    if args.all {
        let reports = run_battery(args.seed, args.tolerance)?;
        let failed = reports.iter().any(|r| !r.passed);
        return Ok(Outcome { stdout: to_json(&reports)?, failed });
    }
    let name = args.identity.as_deref().expect("clap requires --identity without --all");
    let report = match &args.matrix {
        Some(path) => {
            let a = read_matrix(path)?;
            let cap = args.cap.as_deref().map(parse_list).transpose()?.map(DegreeCap::new);
            verify_with_matrix(name, &a, cap.as_ref(), args.tolerance)?
        }
        None => {
            if !BATTERY.iter().any(|e| e.name == name) {
                let known: Vec<_> = BATTERY.iter().map(|e| e.name).collect();
                bail!("unknown identity '{name}' (known: {})", known.join(", "));
            }
            run_identity(name, args.seed, args.tolerance)?
        }
    };
    let failed = !report.passed;
    Ok(Outcome { stdout: to_json(&report)?, failed })
}

fn parse_f(name: &str, n: usize) -> Result<GeneratingFunction> {
    Ok(match name.trim() {
        "exp" => GeneratingFunction::Exp,
        "pown" | "power" | "power-n" => GeneratingFunction::PowerN(n),
        "geom" | "geometric" | "geometric-inverse" => GeneratingFunction::GeometricInverse,
        "log" | "log-inverse" => GeneratingFunction::LogInverse,
        other => bail!("unknown function '{other}' (expected exp, pown, geom or log)"),
    })
}

pub fn estimate(args: &EstimateArgs) -> Result<Outcome> {
    let a = read_matrix(&args.matrix)?;
    let pat = parse_pattern(args.rows.as_deref(), args.cols.as_deref(), a.dim()?)?;
    let n = pat.rows.weight();
    let fs = args.f.split(',').map(|f| parse_f(f, n)).collect::<Result<Vec<_>>>()?;
    let stdout = if fs.len() == 1 {
        to_json(&estimate_permanent(&a, &pat, fs[0], args.samples, args.seed)?)?
    } else {
        to_json(&estimator_variance_scan(&a, &pat, &fs, args.samples, args.seed)?)?
    };
    Ok(Outcome { stdout, failed: false })
}

fn parse_alpha(text: &str) -> Result<C64> {
    let parts: Vec<f64> = text
        .split(',')
        .map(|s| s.trim().parse::<f64>().with_context(|| format!("'{s}' is not a number")))
        .collect::<Result<_>>()?;
    match parts.as_slice() {
        [re] => Ok(C64::new(*re, 0.0)),
        [re, im] => Ok(C64::new(*re, *im)),
        _ => bail!("--alpha takes re or re,im"),
    }
}

#[derive(Serialize)]
struct SampleSummary {
    count: usize,
    kept: usize,
    kept_fraction: f64,
    expected_fraction: f64,
    overflow: usize,
    tv_distance: f64,
    tv_threshold: f64,
    support_size: usize,
    truncated_mass: f64,
}

pub fn sample(args: &SampleArgs) -> Result<Outcome> {
    let u = UnitaryMatrix::new(read_matrix(&args.unitary)?).context("--unitary is not unitary")?;
    let dist: OutcomeDistribution = match args.input.as_str() {
        "fock" => bs_distribution(&u, args.n)?,
        "cat" => {
            let alpha = parse_alpha(args.alpha.as_deref().ok_or_else(|| anyhow!("--input cat needs --alpha"))?)?;
            let spec = CatInputSpec::new(alpha, args.n, u.dim())?;
            cat_distribution(&u, &spec, args.cutoff.unwrap_or(args.n + 6))?
        }
        other => bail!("unknown input '{other}' (expected fock or cat)"),
    };
    let draws = draw(&dist, args.count, args.seed);
    let (kept, reference) = match args.reject_to {
        Some(n) => {
            let kept: Vec<SampledOutcome> =
                draws.iter().filter(|s| matches!(s, SampledOutcome::Fock(p) if p.weight() == n)).cloned().collect();
            (kept, reject_to_fixed_n(&dist, n)?)
        }
        None => (draws.clone(), dist.clone()),
    };
    let expected_fraction = match args.reject_to {
        Some(n) => dist.mass_at(n),
        None => 1.0,
    };
    let tv = if kept.is_empty() { 1.0 } else { tv_distance(&OutcomeDistribution::empirical(&kept), &reference) };

    let mut stdout = String::new();
    for s in &kept {
        let line = match s {
            SampledOutcome::Fock(p) => json!({ "counts": p }),
            SampledOutcome::Overflow => json!({ "counts": "overflow" }),
        };
        stdout.push_str(&serde_json::to_string(&line)?);
        stdout.push('\n');
    }
    let summary = SampleSummary {
        count: args.count,
        kept: kept.len(),
        kept_fraction: kept.len() as f64 / args.count.max(1) as f64,
        expected_fraction,
        overflow: draws.iter().filter(|s| **s == SampledOutcome::Overflow).count(),
        tv_distance: tv,
        tv_threshold: 3.0 * (reference.support.len() as f64 / kept.len().max(1) as f64).sqrt(),
        support_size: reference.support.len(),
        truncated_mass: dist.truncated_mass,
    };
    stdout.push_str(&serde_json::to_string(&json!({ "summary": summary }))?);
    stdout.push('\n');
    Ok(Outcome { stdout, failed: false })
}

pub fn report(args: &ReportArgs) -> Result<Outcome> {
    let regime = (1..=args.n_max).map(|n| amplitude_regime_check(n, args.m, args.c)).collect::<Result<Vec<_>, _>>()?;
    let algorithms: Vec<_> = Algorithm::ALL.iter().map(|a| a.name()).collect();
    let identities: Vec<_> = BATTERY.iter().map(|e| json!({ "name": e.name, "covers": e.covers })).collect();
    let out = json!({
        "tool_version": env!("CARGO_PKG_VERSION"),
        "algorithms": algorithms,
        "identities": identities,
        "regime": regime,
    });
    Ok(Outcome { stdout: to_json(&out)?, failed: false })
}
