//! Seeded random draws.
//!
//! Every random quantity in the crate comes from a ChaCha8 stream
//! (`rand_chacha::ChaCha8Rng::seed_from_u64(seed)`), so a seed fully
//! determines estimates, norming trials and random sources.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::vectorspace::{Space, SpaceVector};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_coeffs<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()
}

/// Gaussian coefficients; almost surely nonzero.
pub fn gaussian<R: Rng + ?Sized>(space: &Space, rng: &mut R) -> SpaceVector {
    space
        .vector(gaussian_coeffs(rng, space.dim()))
        .expect("gaussian draws are finite")
}

/// Uniformly distributed direction (w.r.t. the Gaussian law) on the unit sphere.
pub fn unit_sphere<R: Rng + ?Sized>(space: &Space, rng: &mut R) -> SpaceVector {
    loop {
        let g = gaussian(space, rng);
        if let Ok(u) = g.normalized() {
            return u;
        }
    }
}

/// Point in the closed unit ball, radius drawn as `U^{1/n}`.
pub fn unit_ball<R: Rng + ?Sized>(space: &Space, rng: &mut R) -> SpaceVector {
    let dir = unit_sphere(space, rng);
    let r: f64 = rng.random::<f64>().powf(1.0 / space.dim() as f64);
    dir.scale(r)
}
