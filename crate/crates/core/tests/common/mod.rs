#![allow(dead_code)]

use penrose_strichartz::harmonics::{CoeffField, DataPair};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_field(d: usize, lmax: usize, seed: u64) -> CoeffField<f64> {
    let mut r = rng(seed);
    CoeffField::from_fn(d, lmax, |l, _| r.gen_range(-1.0..1.0) / (1.0 + l as f64).powi(2))
}

pub fn random_pair(d: usize, lmax: usize, seed: u64) -> DataPair<f64> {
    DataPair::new(random_field(d, lmax, seed), random_field(d, lmax, seed ^ 0x9e37_79b9)).unwrap()
}

pub fn random_unit_point(dim: usize, r: &mut ChaCha8Rng) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..=dim).map(|_| r.gen_range(-1.0..1.0)).collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 0.1 && n < 1.0 {
            return v.iter().map(|x| x / n).collect();
        }
    }
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}
