//! Seeded, deterministic sampling used by solvers and verification.
//!
//! All randomness is passed in explicitly; identical seeds must reproduce
//! identical artifacts byte for byte.

use crate::cplx::{self, Point, C};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

const HALTON_BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Van der Corput radical inverse in the given base.
fn radical_inverse(mut index: u64, base: u64) -> f64 {
    let mut inv = 1.0 / base as f64;
    let mut out = 0.0;
    while index > 0 {
        out += (index % base) as f64 * inv;
        index /= base;
        inv /= base as f64;
    }
    out
}

/// Halton point in [0,1)^dims; `offset` shifts the sequence (seeding).
pub fn halton(index: u64, dims: usize, offset: u64) -> Vec<f64> {
    assert!(dims <= HALTON_BASES.len(), "halton dimension too large");
    (0..dims)
        .map(|d| radical_inverse(index + offset + 1, HALTON_BASES[d]))
        .collect()
}

/// Quasi-random complex point in the centered box of the given radius
/// (each coordinate has |Re|, |Im| <= radius).
pub fn box_point(index: u64, nvars: usize, radius: f64, offset: u64) -> Point {
    let h = halton(index, 2 * nvars, offset);
    (0..nvars)
        .map(|i| {
            C::new(
                radius * (2.0 * h[2 * i] - 1.0),
                radius * (2.0 * h[2 * i + 1] - 1.0),
            )
        })
        .collect()
}

/// Standard normal via Box–Muller.
pub fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

pub fn gaussian_complex(rng: &mut ChaCha8Rng) -> C {
    C::new(gaussian(rng), gaussian(rng))
}

/// Uniform point of the complex n-ball of the given radius.
pub fn ball_point(rng: &mut ChaCha8Rng, n: usize, radius: f64) -> Point {
    let dir: Point = (0..n).map(|_| gaussian_complex(rng)).collect();
    let nrm = cplx::norm(&dir);
    let u: f64 = rng.gen_range(0.0..1.0f64);
    let r = radius * u.powf(1.0 / (2.0 * n as f64));
    dir.iter().map(|c| c * (r / nrm)).collect()
}

/// Haar-distributed unitary from a complex Ginibre draw and QR with the
/// standard phase fix.
pub fn random_unitary(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<C> {
    let g = DMatrix::from_fn(n, n, |_, _| gaussian_complex(rng));
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            cplx::ONE
        };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}
