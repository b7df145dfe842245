use num_complex::Complex64 as C64;
use num_traits::{One, Zero};

use super::{ComplexMatrix, NumericsError};

/// Deviation allowed by [`UnitaryMatrix::new`] in `‖U†U − I‖_max`.
pub const UNITARITY_TOLERANCE: f64 = 1e-10;

/// Slack on the contraction condition `‖B‖ ≤ 1` accepted by [`embed_contraction`].
pub const CONTRACTION_SLACK: f64 = 1e-12;

// Square roots of nearly singular blocks keep only about half the digits, so
// dilations of norm-one contractions are checked against this looser bound.
const DILATION_TOLERANCE: f64 = 1e-7;

const JACOBI_OFF_DIAGONAL_STOP: f64 = 1e-12;
const JACOBI_MAX_SWEEPS: usize = 100;
const POWER_ITERATION_MAX: usize = 20_000;

/// Determinant by LU factorization with partial pivoting.
pub fn determinant(a: &ComplexMatrix) -> Result<C64, NumericsError> {
    let n = a.dim()?;
    let mut lu: Vec<C64> = a.as_slice().to_vec();
    let mut det = C64::one();
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&r, &s| lu[r * n + col].norm().total_cmp(&lu[s * n + col].norm()))
            .expect("non-empty range");
        let pivot = lu[pivot_row * n + col];
        if pivot.is_zero() {
            return Ok(C64::zero());
        }
        if pivot_row != col {
            for j in 0..n {
                lu.swap(col * n + j, pivot_row * n + j);
            }
            det = -det;
        }
        det *= pivot;
        for r in col + 1..n {
            let factor = lu[r * n + col] / pivot;
            if factor.is_zero() {
                continue;
            }
            for j in col + 1..n {
                let v = lu[col * n + j];
                lu[r * n + j] -= factor * v;
            }
        }
    }
    Ok(det)
}

/// Largest singular value, by power iteration on `A†A`.
pub fn spectral_norm(a: &ComplexMatrix) -> f64 {
    if a.max_abs() == 0.0 || a.is_empty() {
        return 0.0;
    }
    let n = a.cols();
    let adj = a.adjoint();
    // Fixed, irregular start vector so results are reproducible and unlikely
    // to be orthogonal to the dominant singular vector.
    let mut v: Vec<C64> = (0..n)
        .map(|k| {
            let t = k as f64 + 1.0;
            C64::new(1.0 + 0.37 * t.sin(), 0.61 * (1.7 * t).cos())
        })
        .collect();
    normalize(&mut v);
    let mut rayleigh = 0.0;
    for _ in 0..POWER_ITERATION_MAX {
        let av = a.matvec(&v).expect("shape checked");
        let next_rayleigh: f64 = av.iter().map(|z| z.norm_sqr()).sum();
        let mut w = adj.matvec(&av).expect("shape checked");
        let norm = vec_norm(&w);
        if norm == 0.0 {
            return next_rayleigh.sqrt();
        }
        w.iter_mut().for_each(|z| *z /= norm);
        v = w;
        let converged = (next_rayleigh - rayleigh).abs() <= 1e-15 * next_rayleigh;
        rayleigh = next_rayleigh;
        if converged {
            break;
        }
    }
    rayleigh.sqrt()
}

fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn normalize(v: &mut [C64]) {
    let n = vec_norm(v);
    v.iter_mut().for_each(|z| *z /= n);
}

/// Eigendecomposition `H = V diag(λ) V†` of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub eigenvalues: Vec<f64>,
    /// Columns are the eigenvectors.
    pub eigenvectors: ComplexMatrix,
}

/// Cyclic complex Jacobi iteration. The input is assumed Hermitian; only the
/// upper triangle and the real part of the diagonal are trusted.
pub fn hermitian_eigen(h: &ComplexMatrix) -> Result<HermitianEigen, NumericsError> {
    let n = h.dim()?;
    let mut a = ComplexMatrix::from_fn(n, n, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Less => h[(i, j)],
        std::cmp::Ordering::Equal => C64::new(h[(i, i)].re, 0.0),
        std::cmp::Ordering::Greater => h[(j, i)].conj(),
    });
    let mut v = ComplexMatrix::identity(n);
    let scale = a.as_slice().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt().max(1.0);

    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= JACOBI_OFF_DIAGONAL_STOP * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let b = a[(p, q)];
                let modulus = b.norm();
                if modulus == 0.0 {
                    continue;
                }
                let phase = b / modulus;
                let theta = (a[(q, q)].re - a[(p, p)].re) / (2.0 * modulus);
                let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
                let t = sign / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // W = Diag(1, e^{-iφ}) · [[c, s], [-s, c]]
                let w_pp = C64::new(c, 0.0);
                let w_pq = C64::new(s, 0.0);
                let w_qp = -phase.conj() * s;
                let w_qq = phase.conj() * c;
                rotate_columns(&mut a, p, q, w_pp, w_pq, w_qp, w_qq);
                rotate_rows(&mut a, p, q, w_pp, w_pq, w_qp, w_qq);
                rotate_columns(&mut v, p, q, w_pp, w_pq, w_qp, w_qq);
                a[(p, q)] = C64::zero();
                a[(q, p)] = C64::zero();
                a[(p, p)].im = 0.0;
                a[(q, q)].im = 0.0;
            }
        }
    }
    let eigenvalues = (0..n).map(|i| a[(i, i)].re).collect();
    Ok(HermitianEigen { eigenvalues, eigenvectors: v })
}

// M ← M W, touching columns p and q only.
fn rotate_columns(m: &mut ComplexMatrix, p: usize, q: usize, w_pp: C64, w_pq: C64, w_qp: C64, w_qq: C64) {
    for k in 0..m.rows() {
        let mp = m[(k, p)];
        let mq = m[(k, q)];
        m[(k, p)] = mp * w_pp + mq * w_qp;
        m[(k, q)] = mp * w_pq + mq * w_qq;
    }
}

// M ← W† M, touching rows p and q only.
fn rotate_rows(m: &mut ComplexMatrix, p: usize, q: usize, w_pp: C64, w_pq: C64, w_qp: C64, w_qq: C64) {
    for k in 0..m.cols() {
        let mp = m[(p, k)];
        let mq = m[(q, k)];
        m[(p, k)] = w_pp.conj() * mp + w_qp.conj() * mq;
        m[(q, k)] = w_pq.conj() * mp + w_qq.conj() * mq;
    }
}

/// Principal square root of a positive semidefinite Hermitian matrix.
/// Slightly negative eigenvalues from rounding are clamped to zero.
pub fn hermitian_sqrt(h: &ComplexMatrix) -> Result<ComplexMatrix, NumericsError> {
    let eig = hermitian_eigen(h)?;
    let n = eig.eigenvalues.len();
    let roots: Vec<f64> = eig.eigenvalues.iter().map(|&l| l.max(0.0).sqrt()).collect();
    let v = &eig.eigenvectors;
    Ok(ComplexMatrix::from_fn(n, n, |i, j| {
        (0..n).map(|k| v[(i, k)] * roots[k] * v[(j, k)].conj()).sum()
    }))
}

/// Square matrix with `‖U†U − I‖_max ≤ 1e−10`, checked on construction.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryMatrix(ComplexMatrix);

impl UnitaryMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self, NumericsError> {
        let dim = m.dim()?;
        if dim == 0 {
            return Err(NumericsError::Empty);
        }
        let deviation = unitarity_deviation(&m);
        if deviation > UNITARITY_TOLERANCE {
            return Err(NumericsError::NotUnitary { deviation });
        }
        Ok(Self(m))
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_inner(self) -> ComplexMatrix {
        self.0
    }

    /// Balanced beamsplitter `[[1, 1], [1, −1]] / √2`.
    pub fn balanced_beamsplitter() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self(ComplexMatrix::from_real_rows(&[[h, h], [h, -h]]))
    }

    pub fn identity(dim: usize) -> Self {
        Self(ComplexMatrix::identity(dim))
    }
}

impl AsRef<ComplexMatrix> for UnitaryMatrix {
    fn as_ref(&self) -> &ComplexMatrix {
        &self.0
    }
}

/// `‖U†U − I‖_max`.
pub fn unitarity_deviation(u: &ComplexMatrix) -> f64 {
    let gram = u.adjoint().matmul(u).expect("adjoint is shape compatible");
    gram.max_abs_diff(&ComplexMatrix::identity(gram.rows()))
}

/// Unitary dilation of a contraction:
/// `[[B, (I − BB†)^½], [(I − B†B)^½, −B†]]`.
pub fn embed_contraction(b: &ComplexMatrix) -> Result<UnitaryMatrix, NumericsError> {
    let m = b.dim()?;
    if m == 0 {
        return Err(NumericsError::Empty);
    }
    let norm = spectral_norm(b);
    if norm > 1.0 + CONTRACTION_SLACK {
        return Err(NumericsError::NormExceedsOne { norm });
    }
    let id = ComplexMatrix::identity(m);
    let b_adj = b.adjoint();
    let top_right = hermitian_sqrt(&id.sub(&b.matmul(&b_adj)?)?)?;
    let bottom_left = hermitian_sqrt(&id.sub(&b_adj.matmul(b)?)?)?;
    let u = ComplexMatrix::from_fn(2 * m, 2 * m, |i, j| match (i < m, j < m) {
        (true, true) => b[(i, j)],
        (true, false) => top_right[(i, j - m)],
        (false, true) => bottom_left[(i - m, j)],
        (false, false) => -b_adj[(i - m, j - m)],
    });
    let deviation = unitarity_deviation(&u);
    if deviation > DILATION_TOLERANCE {
        return Err(NumericsError::NotUnitary { deviation });
    }
    Ok(UnitaryMatrix(u))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::random::{random_disk_matrix, seeded_rng};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    // Cofactor (Laplace) expansion along the first row.
    fn det_cofactor(a: &ComplexMatrix) -> C64 {
        let n = a.rows();
        if n == 0 {
            return C64::one();
        }
        if n == 1 {
            return a[(0, 0)];
        }
        let mut total = C64::zero();
        for j in 0..n {
            let minor = ComplexMatrix::from_fn(n - 1, n - 1, |r, s| a[(r + 1, if s < j { s } else { s + 1 })]);
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            total += a[(0, j)] * det_cofactor(&minor) * sign;
        }
        total
    }

    #[test]
    fn determinant_small_cases() {
        assert_eq!(determinant(&ComplexMatrix::identity(3)).unwrap(), C64::one());
        let swap = ComplexMatrix::from_real_rows(&[[0.0, 1.0], [1.0, 0.0]]);
        assert!((determinant(&swap).unwrap() + 1.0).norm() < 1e-15);
        let singular = ComplexMatrix::from_real_rows(&[[1.0, 2.0], [2.0, 4.0]]);
        assert!(determinant(&singular).unwrap().norm() < 1e-14);
    }

    #[test]
    fn determinant_matches_cofactor_expansion() {
        let mut rng = seeded_rng(11);
        for _ in 0..20 {
            let a = random_disk_matrix(5, &mut rng);
            let lu = determinant(&a).unwrap();
            let oracle = det_cofactor(&a);
            assert!((lu - oracle).norm() <= 1e-10 * oracle.norm().max(1e-300), "{lu} vs {oracle}");
        }
    }

    #[test]
    fn determinant_is_multiplicative() {
        let mut rng = seeded_rng(12);
        for m in 1..=6 {
            let a = random_disk_matrix(m, &mut rng);
            let b = random_disk_matrix(m, &mut rng);
            let lhs = determinant(&a.matmul(&b).unwrap()).unwrap();
            let rhs = determinant(&a).unwrap() * determinant(&b).unwrap();
            assert!((lhs - rhs).norm() <= 1e-8 * rhs.norm().max(1.0));
        }
    }

    #[test]
    fn sylvester_determinant_identity() {
        let mut rng = seeded_rng(13);
        for (r, s) in [(2, 3), (3, 1), (4, 2)] {
            let m = ComplexMatrix::from_fn(r, s, |_, _| random_disk_matrix(1, &mut rng)[(0, 0)]);
            let n = ComplexMatrix::from_fn(s, r, |_, _| random_disk_matrix(1, &mut rng)[(0, 0)]);
            let lhs = determinant(&ComplexMatrix::identity(r).add(&m.matmul(&n).unwrap()).unwrap()).unwrap();
            let rhs = determinant(&ComplexMatrix::identity(s).add(&n.matmul(&m).unwrap()).unwrap()).unwrap();
            assert!((lhs - rhs).norm() <= 1e-8 * rhs.norm().max(1.0));
        }
    }

    #[test]
    fn spectral_norm_simple_cases() {
        assert!((spectral_norm(&ComplexMatrix::identity(4)) - 1.0).abs() < 1e-12);
        let d = ComplexMatrix::diag_from_vector(&[c(3.0, 0.0), c(-1.0, 0.0)]);
        assert!((spectral_norm(&d) - 3.0).abs() < 1e-10);
        assert_eq!(spectral_norm(&ComplexMatrix::zeros(3, 3)), 0.0);
    }

    #[test]
    fn spectral_norm_matches_jacobi_eigenvalues() {
        let mut rng = seeded_rng(14);
        for _ in 0..10 {
            let a = random_disk_matrix(4, &mut rng);
            let gram = a.adjoint().matmul(&a).unwrap();
            let eig = hermitian_eigen(&gram).unwrap();
            let top = eig.eigenvalues.iter().cloned().fold(f64::MIN, f64::max).sqrt();
            let norm = spectral_norm(&a);
            assert!((norm - top).abs() <= 1e-7 * top, "{norm} vs {top}");
        }
    }

    #[test]
    fn jacobi_reconstructs_hermitian_matrix() {
        let mut rng = seeded_rng(15);
        let a = random_disk_matrix(5, &mut rng);
        let h = a.add(&a.adjoint()).unwrap();
        let eig = hermitian_eigen(&h).unwrap();
        let v = &eig.eigenvectors;
        assert!(unitarity_deviation(v) < 1e-12);
        let d = ComplexMatrix::diag_from_vector(&eig.eigenvalues.iter().map(|&l| c(l, 0.0)).collect::<Vec<_>>());
        let rebuilt = v.matmul(&d).unwrap().matmul(&v.adjoint()).unwrap();
        assert!(rebuilt.max_abs_diff(&h) < 1e-12);
    }

    #[test]
    fn hermitian_sqrt_squares_back() {
        let mut rng = seeded_rng(16);
        let a = random_disk_matrix(4, &mut rng);
        let psd = a.matmul(&a.adjoint()).unwrap();
        let root = hermitian_sqrt(&psd).unwrap();
        assert!(root.matmul(&root).unwrap().max_abs_diff(&psd) < 1e-12);
    }

    #[test]
    fn embed_zero_and_identity() {
        let u = embed_contraction(&ComplexMatrix::zeros(1, 1)).unwrap();
        assert_eq!(u.dim(), 2);
        assert!(u.matrix()[(0, 0)].norm() < 1e-15);

        let u = embed_contraction(&ComplexMatrix::identity(2)).unwrap();
        let m = u.matrix();
        assert!(m.block(0, 0, 2, 2).max_abs_diff(&ComplexMatrix::identity(2)) < 1e-12);
        assert!(m.block(0, 2, 2, 2).max_abs() < 1e-12);
        assert!(m.block(2, 0, 2, 2).max_abs() < 1e-12);
    }

    #[test]
    fn embed_random_contraction() {
        let mut rng = seeded_rng(17);
        for _ in 0..10 {
            let a = random_disk_matrix(3, &mut rng);
            let b = a.scale(c(1.0 / spectral_norm(&a), 0.0));
            let u = embed_contraction(&b).unwrap();
            assert!(unitarity_deviation(u.matrix()) <= 1e-8);
            assert!(u.matrix().block(0, 0, 3, 3).max_abs_diff(&b) <= 1e-12);
            let inner = b.scale(c(0.9, 0.0));
            let u = embed_contraction(&inner).unwrap();
            assert!(unitarity_deviation(u.matrix()) <= 1e-10);
        }
    }

    #[test]
    fn embed_rejects_large_norm() {
        let b = ComplexMatrix::identity(2).scale(c(1.01, 0.0));
        assert!(matches!(embed_contraction(&b), Err(NumericsError::NormExceedsOne { .. })));
    }

    #[test]
    fn unitary_check_rejects_non_unitary() {
        let m = ComplexMatrix::from_real_rows(&[[1.0, 1.0], [0.0, 1.0]]);
        assert!(matches!(UnitaryMatrix::new(m), Err(NumericsError::NotUnitary { .. })));
        assert!(UnitaryMatrix::new(UnitaryMatrix::balanced_beamsplitter().into_inner()).is_ok());
    }
}
