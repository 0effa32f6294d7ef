//! Seeded random instances for inequality batches.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::{CMatrix, FockState};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Normalized state with Gaussian amplitudes over all sectors.
pub fn state(rng: &mut impl Rng, modes: usize) -> FockState {
    let amps = (0..1usize << modes).map(|_| gaussian(rng)).collect();
    FockState::from_amplitudes(modes, amps)
        .unwrap()
        .normalized()
}

/// Normalized state supported on sectors with at most `max_n` particles.
pub fn low_sector_state(rng: &mut impl Rng, modes: usize, max_n: usize) -> FockState {
    let amps = (0..1usize << modes)
        .map(|mask| {
            if (mask as u32).count_ones() as usize <= max_n {
                gaussian(rng)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    FockState::from_amplitudes(modes, amps)
        .unwrap()
        .normalized()
}

/// Gaussian matrix; with `rank < m` a product of thin factors.
pub fn operator(rng: &mut impl Rng, m: usize, rank: usize) -> CMatrix {
    let a = CMatrix::from_fn(m, rank, |_, _| gaussian(rng));
    let b = CMatrix::from_fn(rank, m, |_, _| gaussian(rng));
    let scale: f64 = rng.random_range(0.1..3.0);
    (a * b) * Complex64::new(scale / m as f64, 0.0)
}

/// Orthonormal family of `n` columns via QR of a Gaussian matrix.
pub fn family(rng: &mut impl Rng, m: usize, n: usize) -> CMatrix {
    let a = CMatrix::from_fn(m, n, |_, _| gaussian(rng));
    a.qr().q().columns(0, n).into_owned()
}
