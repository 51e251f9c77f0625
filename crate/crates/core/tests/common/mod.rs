//! Shared random-instance generators for the integration tests.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use twr_secrecy::ChannelGains;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Log-uniform draw on `[lo, hi]`.
pub fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (rng.random_range(lo.ln()..=hi.ln())).exp()
}

/// Source-relay gains in `[0.05, 2]` and `n` jammer gains in `[0.05, 20]`.
pub fn random_gains(rng: &mut ChaCha8Rng, n: usize) -> ChannelGains {
    let g1 = log_uniform(rng, 0.05, 2.0);
    let g2 = log_uniform(rng, 0.05, 2.0);
    let gj = (0..n).map(|_| log_uniform(rng, 0.05, 20.0)).collect();
    ChannelGains::new(g1, g2, gj).unwrap()
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}
