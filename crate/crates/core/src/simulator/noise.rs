//! Gaussian noise keyed by `(seed, trial, dimension)`.
//!
//! Each trial reads its own ChaCha stream (stream id = trial index) from
//! word position zero, so the noise of a trial does not depend on which
//! worker runs it or in what order.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TWO_PI: f64 = std::f64::consts::TAU;
const INV_2_53: f64 = 1.0 / (1u64 << 53) as f64;

#[derive(Clone)]
pub struct NoiseSource {
    base: ChaCha8Rng,
}

impl NoiseSource {
    pub fn new(seed: u64) -> Self {
        NoiseSource {
            base: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Fills `out` with i.i.d. `N(0, sigma²)` samples for trial `trial`,
    /// using Box–Muller on consecutive pairs of dimensions.
    pub fn fill(&self, trial: u64, sigma: f64, out: &mut [f64]) {
        let mut rng = self.base.clone();
        rng.set_stream(trial);
        rng.set_word_pos(0);
        for pair in out.chunks_mut(2) {
            // u1 in (0, 1] keeps the logarithm finite
            let u1 = ((rng.next_u64() >> 11) + 1) as f64 * INV_2_53;
            let u2 = (rng.next_u64() >> 11) as f64 * INV_2_53;
            let r = sigma * (-2.0 * u1.ln()).sqrt();
            let (s, c) = (TWO_PI * u2).sin_cos();
            pair[0] = r * c;
            if let Some(second) = pair.get_mut(1) {
                *second = r * s;
            }
        }
    }
}
