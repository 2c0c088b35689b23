//! Seeded random coefficient data with controlled smoothness.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{param, Result};
use crate::harmonics::{CoeffField, DataPair};
use crate::quadform::{project_ortho, OrthoMode};
use crate::scalar::Real;

/// Default decay exponent s in |F̂(ℓ)| ~ (1+ℓ)^{−s}.
pub const DEFAULT_DECAY: f64 = 3.0;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Coefficients uniform in [−1, 1] scaled by (1+ℓ)^{−s}.
pub fn random_field<T: Real, R: Rng>(d: usize, lmax: usize, s: f64, rng: &mut R) -> CoeffField<T> {
    CoeffField::from_fn(d, lmax, |l, _| T::lit(rng.gen_range(-1.0..1.0) * (1.0 + l as f64).powf(-s)))
}

pub fn random_pair<T: Real>(d: usize, lmax: usize, s: f64, seed: u64) -> Result<DataPair<T>> {
    if d < 2 {
        return param(format!("need d ≥ 2, got {d}"));
    }
    if !s.is_finite() {
        return param("decay exponent must be finite");
    }
    let mut r = rng(seed);
    let f0 = random_field(d, lmax, s, &mut r);
    let f1 = random_field(d, lmax, s, &mut r);
    DataPair::new(f0, f1)
}

/// Random data with the tangent directions removed (d = 3 or 5).
pub fn random_orthogonal<T: Real>(d: usize, lmax: usize, s: f64, seed: u64) -> Result<DataPair<T>> {
    if lmax < 2 {
        return param("orthogonal data need lmax ≥ 2");
    }
    project_ortho(&random_pair(d, lmax, s, seed)?, OrthoMode::for_dim(d)?)
}
