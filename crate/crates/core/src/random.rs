//! Seeded random inputs for tests and experiments.

use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
pub use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::group::{GFunction, Group};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Independent complex Gaussian values.
pub fn function<R: Rng + ?Sized>(group: &Arc<Group>, rng: &mut R) -> GFunction {
    GFunction::from_fn(group, |_| complex_normal(rng))
}

pub fn real_function<R: Rng + ?Sized>(group: &Arc<Group>, rng: &mut R) -> GFunction {
    GFunction::from_fn(group, |_| Complex64::new(rng.sample(StandardNormal), 0.0))
}

/// Random function with `‖f‖₂ = 1`.
pub fn unit_vector<R: Rng + ?Sized>(group: &Arc<Group>, rng: &mut R) -> GFunction {
    let f = function(group, rng);
    let n = f.norm2();
    f.scale_real(1.0 / n)
}

/// `c ∗ c̃` for random `c`, normalized to `p(e) = 1`.
pub fn positive_definite<R: Rng + ?Sized>(group: &Arc<Group>, rng: &mut R) -> GFunction {
    let c = function(group, rng);
    let p = c.convolve(&c.tilde()).expect("same group");
    let scale = p[group.identity()].re;
    p.scale_real(1.0 / scale)
}

/// Uniformly chosen subset of the given size (sorted).
pub fn subset<R: Rng + ?Sized>(order: usize, size: usize, rng: &mut R) -> Vec<usize> {
    let mut picked = rand::seq::index::sample(rng, order, size.min(order)).into_vec();
    picked.sort_unstable();
    picked
}
