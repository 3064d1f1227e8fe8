#![allow(dead_code)]

use qlab::qlin::{kron, ComplexMatrix};
use qlab::random;
use qlab::DensityOperator;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Convex mixture of random product states, separable by construction.
pub fn separable_two_qubit(rng: &mut ChaCha8Rng, terms: usize) -> DensityOperator {
    let mut m = ComplexMatrix::zeros(4, 4);
    let weights: Vec<f64> = (0..terms).map(|_| rand::Rng::random::<f64>(rng) + 1e-3).collect();
    let total: f64 = weights.iter().sum();
    for w in weights {
        let a = random::density_any_rank(2, rng);
        let b = random::density_any_rank(2, rng);
        m = &m + &kron(a.matrix(), b.matrix()).unwrap().scale_real(w / total);
    }
    DensityOperator::new(m).unwrap()
}
