//! Exact permanent algorithms, executable permanent identities, phase-average
//! permanent estimators and a small linear-optical sampler.

pub mod bosonic;
pub mod combinatorics;
pub mod estimators;
pub mod identities;
pub mod numerics;
pub mod permanents;
pub mod series;

pub use num_complex::Complex64 as C64;
