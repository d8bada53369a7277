//! Fixtures shared by the construction benchmarks.

use std::f64::consts::PI;

use normforge_core::{Functional, NormSpec, VertexConfig};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Norm on `R^2` whose dual ball is a regular `2k`-gon.
pub fn polygon(k: usize) -> NormSpec {
    let boundary = (0..k)
        .map(|i| {
            let t = PI * i as f64 / k as f64;
            Functional::from_dense(&[t.cos(), t.sin()]).unwrap()
        })
        .collect();
    NormSpec::new(format!("polygon{k}"), 2, boundary).unwrap()
}

/// Coordinate functionals plus `extra` random dyadic generators, pruned.
pub fn random_spec(seed: u64, dim: usize, extra: usize) -> NormSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut gens: Vec<Functional> = (0..dim).map(|i| Functional::coordinate(dim, i).unwrap()).collect();
    while gens.len() < dim + extra {
        let c: Vec<f64> = (0..dim).map(|_| rng.random_range(-8i32..=8) as f64 / 8.0).collect();
        if c.iter().any(|&v| v != 0.0) {
            gens.push(Functional::from_dense(&c).unwrap());
        }
    }
    NormSpec::from_generators("random", dim, &gens, VertexConfig::default())
        .unwrap()
        .0
}

/// Random functional with `support` nonzero dyadic coefficients in `[-8, 8]`.
pub fn dyadic_functional(seed: u64, dim: usize, support: usize) -> Functional {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut entries: Vec<(usize, f64)> = sample(&mut rng, dim, support)
        .into_iter()
        .map(|i| {
            let k = rng.random_range(1..=64) as f64 / 8.0;
            (i, if rng.random_bool(0.5) { k } else { -k })
        })
        .collect();
    entries.sort_by_key(|e| e.0);
    Functional::new(dim, entries).unwrap()
}
