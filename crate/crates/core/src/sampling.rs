//! Seeded random generators for the randomized verifiers.
//!
//! Every sampler takes an explicit `ChaCha8Rng` so a seed fully determines the
//! sample stream.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::moebius::{BlaschkeProduct, DiscAutomorphism};
use crate::numlin::{c, HermitianMatrix, C64};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform point of the disc of the given radius.
pub fn disc_point(rng: &mut ChaCha8Rng, radius: f64) -> C64 {
    let r = radius * rng.gen::<f64>().sqrt();
    C64::from_polar(r, rng.gen_range(0.0..std::f64::consts::TAU))
}

pub fn unimodular(rng: &mut ChaCha8Rng) -> C64 {
    C64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU))
}

/// `n` points of the disc of radius `radius`, pairwise Moebius-separated by
/// at least `min_sep`.
pub fn distinct_disc_points(rng: &mut ChaCha8Rng, n: usize, radius: f64, min_sep: f64) -> Vec<C64> {
    let mut out: Vec<C64> = Vec::with_capacity(n);
    while out.len() < n {
        let z = disc_point(rng, radius);
        if out.iter().all(|&p| crate::moebius::mdist(p, z) >= min_sep) {
            out.push(z);
        }
    }
    out
}

/// Complex Gaussian-free direction: coordinates uniform in the unit disc,
/// rejected when all are tiny.
pub fn direction(rng: &mut ChaCha8Rng, n: usize) -> Vec<C64> {
    loop {
        let v: Vec<C64> = (0..n).map(|_| disc_point(rng, 1.0)).collect();
        if v.iter().any(|z| z.norm() > 1e-3) {
            return v;
        }
    }
}

pub fn automorphism(rng: &mut ChaCha8Rng, max_center: f64) -> DiscAutomorphism {
    let center = disc_point(rng, max_center);
    let rotation = rng.gen_range(0.0..std::f64::consts::TAU);
    DiscAutomorphism::new(rotation, center).expect("interior center")
}

pub fn blaschke(rng: &mut ChaCha8Rng, degree: usize, zero_radius: f64) -> BlaschkeProduct {
    let zeros = (0..degree).map(|_| disc_point(rng, zero_radius)).collect();
    BlaschkeProduct::new(unimodular(rng), zeros).expect("valid Blaschke data")
}

/// Random positive definite Hermitian matrix `B B* + shift I` with
/// entries of `B` uniform in the unit disc.
pub fn pd_matrix(rng: &mut ChaCha8Rng, n: usize, shift: f64) -> HermitianMatrix {
    let b: Vec<C64> = (0..n * n).map(|_| disc_point(rng, 1.0)).collect();
    HermitianMatrix::from_fn(n, |i, j| {
        let mut acc = (0..n).fold(c(0.0, 0.0), |acc, k| acc + b[i * n + k] * b[j * n + k].conj());
        if i == j {
            acc += shift;
        }
        acc
    })
    .expect("finite entries")
}

/// Uniform on `[lo, hi)`.
pub fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    rng.gen_range(lo..hi)
}
