#![allow(dead_code)]

use std::f64::consts::TAU;

use cwlap_core::width_body::{epsilon_max, DeformationCoeffs};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random phases on the listed odd harmonics with moduli near 0.1/n,
/// redrawn until the convexity bound exceeds `min_eps_max`.
pub fn random_coeffs(rng: &mut ChaCha8Rng, a_idx: &[u32], b_idx: &[u32], min_eps_max: f64) -> DeformationCoeffs {
    loop {
        let mut c = DeformationCoeffs::new();
        for &n in a_idx {
            let r = rng.gen_range(0.5..1.5) * 0.1 / n as f64;
            c.set_a(n, Complex64::from_polar(r, rng.gen_range(0.0..TAU))).unwrap();
        }
        for &n in b_idx {
            let r = rng.gen_range(0.0..1.0) * 0.1 / n as f64;
            c.set_b(n, Complex64::from_polar(r, rng.gen_range(0.0..TAU))).unwrap();
        }
        if epsilon_max(&c) > min_eps_max {
            return c;
        }
    }
}
