use std::f64::consts::TAU;

use num_complex::Complex64 as C64;
use num_traits::{One, Zero};

use super::{
    check_budget, check_dim, check_pattern, chunked_sum, parity_sign, weight_mismatch, Algorithm, PermanentError,
    PermanentResult, GLYNN_KAN_MAX_DIM,
};
use crate::combinatorics::{factorial_f64, RepetitionPattern};
use crate::numerics::ComplexMatrix;

/// Glynn–Kan: `(4^m m!)^{−1} Σ_{x,y∈{±1}^m} (Π x)(Π y)(x^T A y)^m`.
///
/// The outer Gray code over `y` keeps `Ay` current; the inner Gray code over
/// `x` keeps `x·Ay` current, so each of the `4^m` terms costs one update and
/// one power.
pub fn permanent_glynn_kan(a: &ComplexMatrix) -> Result<PermanentResult, PermanentError> {
    if !a.is_square() {
        return Ok(PermanentResult::new(C64::zero(), Algorithm::GlynnKan, 0));
    }
    let m = a.rows();
    check_dim(Algorithm::GlynnKan, m, GLYNN_KAN_MAX_DIM)?;
    if m == 0 {
        return Ok(PermanentResult::new(C64::one(), Algorithm::GlynnKan, 1));
    }
    let side = 1u64 << m;
    let sum = chunked_sum(side, |start, end| {
        let mut acc = C64::zero();
        let mut gray = start ^ (start >> 1);
        let sign = |g: u64, j: usize| if g >> j & 1 == 1 { -1.0 } else { 1.0 };
        let mut ay: Vec<C64> = (0..m).map(|i| (0..m).map(|j| a[(i, j)] * sign(gray, j)).sum()).collect();
        for k in start..end {
            if k > start {
                let j = k.trailing_zeros() as usize;
                gray ^= 1 << j;
                let delta = if gray >> j & 1 == 1 { -2.0 } else { 2.0 };
                for (i, v) in ay.iter_mut().enumerate() {
                    *v += a[(i, j)] * delta;
                }
            }
            acc += inner_sign_sum(&ay, m as u32) * parity_sign(gray);
        }
        acc
    });
    let terms = side * side;
    let value = sum / (terms as f64 * factorial_f64(m));
    Ok(PermanentResult::new(value, Algorithm::GlynnKan, terms))
}

/// `Σ_{x∈{±1}^m} (Π x)(x·v)^power` by Gray code over `x`.
fn inner_sign_sum(v: &[C64], power: u32) -> C64 {
    let m = v.len();
    let mut dot: C64 = v.iter().sum();
    let mut gray = 0u64;
    let mut acc = dot.powu(power);
    for k in 1..1u64 << m {
        let j = k.trailing_zeros() as usize;
        gray ^= 1 << j;
        let delta = if gray >> j & 1 == 1 { -2.0 } else { 2.0 };
        dot += v[j] * delta;
        acc += dot.powu(power) * parity_sign(gray);
    }
    acc
}

/// Roots-of-unity Glynn–Kan for repeated rows and columns:
/// `Per(A_{p,q}) = p!q!/(|G_p||G_q| n!) Σ_{x∈G_p, y∈G_q} x^{−p} y^{−q} (x^T A y)^n`
/// where `G_p` takes `x_j` over the `(p_j+1)`-th roots of unity.
///
/// A surviving exponent `k` has `k_j ≡ p_j (mod p_j+1)`, hence `k_j ≥ p_j`,
/// and `|k| = |p|` then forces `k = p`. No uniform order is needed, and the
/// plain form costs `4^m` terms as in the sign version.
pub fn permanent_glynn_kan_repeated(
    a: &ComplexMatrix,
    pat: &RepetitionPattern,
) -> Result<PermanentResult, PermanentError> {
    check_pattern(a, pat)?;
    if !pat.square_compatible() {
        return Ok(weight_mismatch(Algorithm::GlynnKanRepeated, pat));
    }
    let n = pat.rows.weight();
    if n == 0 {
        return Ok(PermanentResult::new(C64::one(), Algorithm::GlynnKanRepeated, 1));
    }
    let grid_size = |e: &[usize]| e.iter().fold(1u128, |acc, &k| acc.saturating_mul(k as u128 + 1));
    let terms = grid_size(pat.rows.parts()).saturating_mul(grid_size(pat.cols.parts()));
    check_budget(Algorithm::GlynnKanRepeated, terms)?;

    let xs = torus_grid(pat.rows.parts());
    let ys = torus_grid(pat.cols.parts());
    let sum = chunked_sum(ys.len() as u64, |start, end| {
        let mut acc = C64::zero();
        for (y, wy) in &ys[start as usize..end as usize] {
            let ay = a.matvec(y).expect("grid vectors have length m");
            let mut inner = C64::zero();
            for (x, wx) in &xs {
                let dot: C64 = x.iter().zip(&ay).map(|(xi, v)| xi * v).sum();
                inner += dot.powu(n as u32) * wx;
            }
            acc += inner * wy;
        }
        acc
    });
    let scale = pat.rows.factorial_f64() * pat.cols.factorial_f64() / (terms as f64 * factorial_f64(n));
    Ok(PermanentResult::new(sum * scale, Algorithm::GlynnKanRepeated, terms as u64))
}

/// Points of `Π_j μ_{e_j+1}` with their weights `x^{−e}`.
fn torus_grid(e: &[usize]) -> Vec<(Vec<C64>, C64)> {
    let mut grid = vec![(Vec::with_capacity(e.len()), C64::one())];
    for &ej in e {
        let order = ej + 1;
        let mut next = Vec::with_capacity(grid.len() * order);
        for (point, weight) in &grid {
            for d in 0..order {
                let root = C64::from_polar(1.0, TAU * d as f64 / order as f64);
                let mut p = point.clone();
                p.push(root);
                next.push((p, weight * root.powu(ej as u32).conj()));
            }
        }
        grid = next;
    }
    grid
}
