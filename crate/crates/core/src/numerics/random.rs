//! Seeded random matrices for tests, batteries and the CLI.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use super::{ComplexMatrix, UnitaryMatrix};

/// ChaCha20 stream for `seed`. All randomness in the crate goes through this.
pub fn seeded_rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// Independent stream `stream` derived from `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Uniform point in the closed unit disk.
pub fn random_disk_point<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let r = rng.random::<f64>().sqrt();
    let theta = std::f64::consts::TAU * rng.random::<f64>();
    C64::from_polar(r, theta)
}

/// Square matrix with i.i.d. entries uniform in the unit disk.
pub fn random_disk_matrix<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(dim, dim, |_, _| random_disk_point(rng))
}

/// Haar-distributed unitary: Gram–Schmidt on the columns of a complex
/// Gaussian matrix. Gram–Schmidt leaves a positive real `R` diagonal, which is
/// the phase correction that makes the `Q` factor Haar.
pub fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> UnitaryMatrix {
    loop {
        let mut cols: Vec<Vec<C64>> = (0..dim)
            .map(|_| {
                (0..dim)
                    .map(|_| {
                        let re: f64 = rng.sample(StandardNormal);
                        let im: f64 = rng.sample(StandardNormal);
                        C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
                    })
                    .collect()
            })
            .collect();
        let mut degenerate = false;
        for j in 0..dim {
            // two passes of modified Gram–Schmidt
            for _ in 0..2 {
                for k in 0..j {
                    let proj: C64 = cols[k].iter().zip(&cols[j]).map(|(a, b)| a.conj() * b).sum();
                    let (done, rest) = cols.split_at_mut(j);
                    for (x, y) in rest[0].iter_mut().zip(&done[k]) {
                        *x -= proj * y;
                    }
                }
            }
            let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm < 1e-8 {
                degenerate = true;
                break;
            }
            cols[j].iter_mut().for_each(|z| *z /= norm);
        }
        if degenerate {
            continue;
        }
        let m = ComplexMatrix::from_fn(dim, dim, |i, j| cols[j][i]);
        if let Ok(u) = UnitaryMatrix::new(m) {
            return u;
        }
    }
}
