//! Shared test oracles, independent of the library implementations.

#![allow(dead_code)]

pub mod quadrature;

use rand::Rng;

/// Deterministic RNG for reproducible sampling in tests.
pub fn rng(seed: u64) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    rand_chacha::ChaCha8Rng::seed_from_u64(seed)
}

/// Random point of the open simplex {a + b + c = pi, all > min_angle}.
pub fn random_tet_angles<R: Rng>(rng: &mut R, min_angle: f64) -> [f64; 3] {
    loop {
        // Uniform on the simplex via sorted uniforms.
        let mut u = [rng.gen::<f64>(), rng.gen::<f64>()];
        u.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let parts = [u[0], u[1] - u[0], 1.0 - u[1]];
        let a = [
            parts[0] * std::f64::consts::PI,
            parts[1] * std::f64::consts::PI,
            parts[2] * std::f64::consts::PI,
        ];
        if a.iter().all(|&x| x > min_angle) {
            return a;
        }
    }
}
