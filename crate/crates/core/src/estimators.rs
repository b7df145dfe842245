//! Random-phase permanent estimators. For phase vectors `x, y` uniform on
//! the torus, `x^{−p} y^{−q} f(x^T A y)` averages to
//! `f_n n! Per(A_{p,q})/(p!q!)`, so rescaling by `p!q!/(f_n n!)` gives an
//! unbiased estimate of the permanent.

use std::f64::consts::TAU;

use num_complex::Complex64 as C64;
use num_traits::{One, Zero};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::combinatorics::{factorial_f64, MultiIndex, RepetitionPattern};
use crate::identities::GeneratingFunction;
use crate::numerics::random::stream_rng;
use crate::numerics::{spectral_norm, ComplexMatrix};
use crate::permanents::TERM_BUDGET;

/// Sample streams per estimate. Fixed so results do not depend on the
/// thread count.
pub const STREAMS: u64 = 16;

/// Bound on `|r² x^T A y|` for functions with a finite radius of convergence.
const RADIUS_MARGIN: f64 = 0.5;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EstimatorError {
    #[error("pattern length {found} does not match matrix dimension {expected}")]
    PatternMismatch { expected: usize, found: usize },
    #[error("|p| = {p} and |q| = {q} must be equal")]
    WeightMismatch { p: usize, q: usize },
    #[error("f has a vanishing derivative of order {0} at 0")]
    ZeroDerivative(usize),
    #[error("at least two samples are needed for a standard error")]
    TooFewSamples,
    #[error("grid of {size} points exceeds the budget of {limit}")]
    TooLarge { size: u128, limit: u128 },
    #[error("matrix must be square and non-empty")]
    BadMatrix,
}

/// Unit-modulus vector `e^{iθ_k}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseVector {
    pub angles: Vec<f64>,
}

impl PhaseVector {
    /// Angles `2π·u` with `u` uniform in `[0, 1)`.
    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        Self { angles: (0..len).map(|_| TAU * rng.random::<f64>()).collect() }
    }

    pub fn entries(&self) -> Vec<C64> {
        self.angles.iter().map(|&t| C64::from_polar(1.0, t)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub estimate: C64,
    /// Real and imaginary standard errors combined in quadrature.
    pub stderr: f64,
    pub stderr_re: f64,
    pub stderr_im: f64,
    /// Sample variance of the integrand, `var(re) + var(im)`.
    pub variance: f64,
    pub samples: u64,
    pub seed: u64,
    pub f_choice: GeneratingFunction,
    /// Torus radius `r`; 1 for entire functions.
    pub radius: f64,
}

/// Running mean and sum of squared deviations of one real component.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
struct Welford {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Welford {
    fn push(&mut self, v: f64) {
        self.count += 1;
        let delta = v - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (v - self.mean);
    }

    fn merge(self, other: Welford) -> Welford {
        if self.count == 0 {
            return other;
        }
        if other.count == 0 {
            return self;
        }
        let count = self.count + other.count;
        let delta = other.mean - self.mean;
        let mean = self.mean + delta * other.count as f64 / count as f64;
        let m2 = self.m2 + other.m2 + delta * delta * (self.count as f64 * other.count as f64) / count as f64;
        Welford { count, mean, m2 }
    }

    fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }
}

/// Evaluates `f(w)`.
fn eval(f: GeneratingFunction, w: C64) -> C64 {
    match f {
        GeneratingFunction::Exp => w.exp(),
        GeneratingFunction::GeometricInverse => (C64::one() - w).inv(),
        GeneratingFunction::PowerN(k) => w.powu(k as u32),
        GeneratingFunction::LogInverse => -(C64::one() - w).ln(),
    }
}

fn is_entire(f: GeneratingFunction) -> bool {
    matches!(f, GeneratingFunction::Exp | GeneratingFunction::PowerN(_))
}

/// The fixed parts of the integrand for one `(A, p, q, f)`.
struct Integrand<'a> {
    a: &'a ComplexMatrix,
    p: &'a MultiIndex,
    q: &'a MultiIndex,
    f: GeneratingFunction,
    r2: f64,
    scale: f64,
}

impl<'a> Integrand<'a> {
    fn new(a: &'a ComplexMatrix, pat: &'a RepetitionPattern, f: GeneratingFunction) -> Result<Self, EstimatorError> {
        let m = a.rows();
        if m == 0 || !a.is_square() {
            return Err(EstimatorError::BadMatrix);
        }
        if pat.len() != m {
            return Err(EstimatorError::PatternMismatch { expected: m, found: pat.len() });
        }
        let (p, q) = (&pat.rows, &pat.cols);
        if p.weight() != q.weight() {
            return Err(EstimatorError::WeightMismatch { p: p.weight(), q: q.weight() });
        }
        let n = p.weight();
        let fn_ = f.coefficient(n);
        if fn_ == 0.0 {
            return Err(EstimatorError::ZeroDerivative(n));
        }
        // |x^T A y| ≤ m ‖A‖₂ on the torus
        let bound = m as f64 * spectral_norm(a);
        let r2 = if is_entire(f) || bound == 0.0 { 1.0 } else { (RADIUS_MARGIN / bound).min(1.0) };
        let scale = p.factorial_f64() * q.factorial_f64() / (fn_ * factorial_f64(n) * r2.powi(n as i32));
        Ok(Self { a, p, q, f, r2, scale })
    }

    fn at(&self, x: &[C64], y: &[C64]) -> C64 {
        let mut w = C64::zero();
        for (i, xi) in x.iter().enumerate() {
            let row: C64 = y.iter().enumerate().map(|(j, yj)| self.a[(i, j)] * yj).sum();
            w += xi * row;
        }
        // x^{-p} = conj(x)^p on the unit circle
        let mut mono = C64::one();
        for (i, (xi, yi)) in x.iter().zip(y).enumerate() {
            mono *= xi.conj().powu(self.p[i] as u32) * yi.conj().powu(self.q[i] as u32);
        }
        eval(self.f, w * self.r2) * mono * self.scale
    }
}

/// Monte Carlo estimate of `Per(A_{p,q})` from `samples` phase draws split
/// over [`STREAMS`] independent ChaCha20 streams.
pub fn estimate_permanent(
    a: &ComplexMatrix,
    pat: &RepetitionPattern,
    f: GeneratingFunction,
    samples: u64,
    seed: u64,
) -> Result<EstimateReport, EstimatorError> {
    if samples < 2 {
        return Err(EstimatorError::TooFewSamples);
    }
    let integrand = Integrand::new(a, pat, f)?;
    let m = a.rows();
    let (re, im) = (0..STREAMS)
        .into_par_iter()
        .map(|stream| {
            let share = samples / STREAMS + u64::from(stream < samples % STREAMS);
            let mut rng = stream_rng(seed, stream);
            let (mut re, mut im) = (Welford::default(), Welford::default());
            for _ in 0..share {
                let x = PhaseVector::random(m, &mut rng).entries();
                let y = PhaseVector::random(m, &mut rng).entries();
                let v = integrand.at(&x, &y);
                re.push(v.re);
                im.push(v.im);
            }
            (re, im)
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold((Welford::default(), Welford::default()), |(ar, ai), (br, bi)| (ar.merge(br), ai.merge(bi)));

    let n = samples as f64;
    let stderr_re = (re.variance() / n).sqrt();
    let stderr_im = (im.variance() / n).sqrt();
    Ok(EstimateReport {
        estimate: C64::new(re.mean, im.mean),
        stderr: stderr_re.hypot(stderr_im),
        stderr_re,
        stderr_im,
        variance: re.variance() + im.variance(),
        samples,
        seed,
        f_choice: f,
        radius: integrand.r2.sqrt(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VarianceRow {
    pub f_choice: GeneratingFunction,
    pub estimate: C64,
    pub variance: f64,
    pub stderr: f64,
}

/// One estimate per `f` with the same seed, for comparing integrand variances.
pub fn estimator_variance_scan(
    a: &ComplexMatrix,
    pat: &RepetitionPattern,
    f_list: &[GeneratingFunction],
    samples: u64,
    seed: u64,
) -> Result<Vec<VarianceRow>, EstimatorError> {
    f_list
        .iter()
        .map(|&f| {
            let r = estimate_permanent(a, pat, f, samples, seed)?;
            Ok(VarianceRow { f_choice: f, estimate: r.estimate, variance: r.variance, stderr: r.stderr })
        })
        .collect()
}

/// Exact average of the `z^n` integrand over the grid of `(n+1)`-th roots
/// of unity in each of the `2m` phases. The grid is fine enough that no
/// exponent other than `x^p y^q` survives, so this equals `Per(A_{p,q})`.
pub fn grid_expectation(a: &ComplexMatrix, pat: &RepetitionPattern) -> Result<C64, EstimatorError> {
    let n = pat.rows.weight();
    let integrand = Integrand::new(a, pat, GeneratingFunction::PowerN(n))?;
    let m = a.rows();
    let order = n + 1;
    let points = (order as u128).checked_pow(2 * m as u32).unwrap_or(u128::MAX);
    if points > TERM_BUDGET {
        return Err(EstimatorError::TooLarge { size: points, limit: TERM_BUDGET });
    }
    let roots: Vec<C64> = (0..order).map(|k| C64::from_polar(1.0, TAU * k as f64 / order as f64)).collect();
    let mut digits = vec![0usize; 2 * m];
    let mut total = C64::zero();
    for _ in 0..points {
        let x: Vec<C64> = digits[..m].iter().map(|&d| roots[d]).collect();
        let y: Vec<C64> = digits[m..].iter().map(|&d| roots[d]).collect();
        total += integrand.at(&x, &y);
        for d in digits.iter_mut() {
            *d += 1;
            if *d < order {
                break;
            }
            *d = 0;
        }
    }
    Ok(total / points as f64)
}
