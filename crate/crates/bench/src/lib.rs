//! Shared fixtures for the benchmark targets.

use googol_core::instance::{structured_instance, Instance};
use googol_core::montecarlo::synthetic_large_k_instance;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A structured instance exercising the largest enumerable size.
pub fn enumeration_instance() -> Instance {
    structured_instance(5, 4, 2).expect("valid structure")
}

/// A wide instance for the continuous-window scan.
pub fn wide_instance() -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    synthetic_large_k_instance(20, 25, &mut rng).expect("valid target")
}
