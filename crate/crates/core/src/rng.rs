//! Seeded random streams.
//!
//! Every stochastic routine takes a `(seed, stream)` pair so that
//! independent sub-computations (restarts, claims, verification passes)
//! draw from disjoint ChaCha streams and stay reproducible regardless of
//! scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub type Rng = ChaCha8Rng;

pub fn rng(seed: u64, stream: u64) -> Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// Fixed stream identifiers, so call sites never collide by accident.
pub mod streams {
    pub const SPHERE: u64 = 1;
    pub const RADIUS: u64 = 2;
    pub const OPNORM: u64 = 3;
    pub const LIE: u64 = 4;
    pub const LIE_VERIFY: u64 = 5;
    pub const QUOTIENT: u64 = 6;
    pub const INDEX: u64 = 7;
    pub const INDEX_FINAL: u64 = 8;
    pub const PERTURB: u64 = 9;
    pub const SUITE: u64 = 10;
    pub const RESTART_BASE: u64 = 1 << 20;
}

pub fn gaussian_vec(rng: &mut Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| StandardNormal.sample(rng)).collect()
}

pub fn gaussian(rng: &mut Rng) -> f64 {
    StandardNormal.sample(rng)
}
