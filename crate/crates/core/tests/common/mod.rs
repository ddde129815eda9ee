//! Shared helpers for the integration suites: seeded randomness and random
//! unitary frames.

#![allow(dead_code)]

use bismut_core::{linalg, Cx};
use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

pub fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

pub fn random_complex(r: &mut impl Rng) -> Cx {
    Cx::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0))
}

pub fn random_vector(r: &mut impl Rng, n: usize) -> Vec<Cx> {
    (0..n).map(|_| random_complex(r)).collect()
}

/// Haar-ish random unitary: Gram-Schmidt on a random complex matrix,
/// retrying in the (measure-zero) degenerate case.
pub fn random_unitary(r: &mut impl Rng, n: usize) -> DMatrix<Cx> {
    loop {
        let m = DMatrix::from_fn(n, n, |_, _| random_complex(r));
        let u = linalg::orthonormalize(&m);
        let res = (&u * u.adjoint() - DMatrix::<Cx>::identity(n, n))
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max);
        if res < 1e-12 {
            return u;
        }
    }
}
