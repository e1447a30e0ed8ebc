#![allow(dead_code)]

use moment_flows::{AtomicMeasure, GaussianComponent, GaussianMixture, MomentSequence};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `k` atoms in `[-2, 2]ⁿ` with weights in `[0.2, 1.2]`.
pub fn random_atomic(r: &mut ChaCha8Rng, n: usize, k: usize) -> AtomicMeasure {
    let atoms = (0..k)
        .map(|_| moment_flows::Atom {
            point: (0..n).map(|_| r.random_range(-2.0..2.0)).collect(),
            weight: r.random_range(0.2..1.0),
        })
        .collect();
    AtomicMeasure::new(n, atoms).unwrap()
}

/// Moments of a random atomic measure, so every entry has its natural scale.
pub fn random_sequence(r: &mut ChaCha8Rng, n: usize, d: u32) -> MomentSequence {
    let k = r.random_range(1..=4);
    moment_flows::oracle::oracle_moments_atomic(&random_atomic(r, n, k), d)
}

pub fn random_mixture(r: &mut ChaCha8Rng, n: usize, k: usize, nu: f64) -> GaussianMixture {
    let comps = (0..k)
        .map(|_| GaussianComponent {
            center: (0..n).map(|_| r.random_range(-2.0..2.0)).collect(),
            weight: r.random_range(0.2..1.0),
            time: r.random_range(0.0..1.0),
        })
        .collect();
    GaussianMixture::new(n, nu, comps).unwrap()
}

/// `k` atoms in `[-2, 2]` at least `sep` apart, weights in `[0.2, 1.2]`.
pub fn separated_atoms(r: &mut ChaCha8Rng, k: usize, sep: f64) -> Vec<(f64, f64)> {
    loop {
        let mut xs: Vec<f64> = (0..k).map(|_| r.random_range(-2.0..2.0)).collect();
        xs.sort_by(f64::total_cmp);
        if xs.windows(2).all(|w| w[1] - w[0] >= sep) {
            return xs
                .into_iter()
                .map(|x| (x, r.random_range(0.2..1.0)))
                .collect();
        }
    }
}

pub fn close(x: f64, y: f64, tol: f64) -> bool {
    (x - y).abs() <= tol * (1.0 + x.abs().max(y.abs()))
}
