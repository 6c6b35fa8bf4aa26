//! Fixtures shared by the benchmarks.

use e8p_core::weyl::{random_state, sample_rng, SurfaceState};
use e8p_core::Real;

/// A reproducible generic state, away from the singular locus.
pub fn fixture<R: Real>(seed: u64) -> SurfaceState<R> {
    random_state(&mut sample_rng(seed, 0), 1e-12)
}
