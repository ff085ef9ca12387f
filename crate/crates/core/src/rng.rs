//! Seeded randomness.
//!
//! Every random draw in the crate goes through [`CodeRng`], which is ChaCha8
//! from `rand_chacha`: a fixed, documented stream cipher whose output does not
//! depend on platform or word size. Monte Carlo trials get their own stream
//! keyed by `(seed, trial)`, so results do not depend on how trials are
//! scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type CodeRng = ChaCha8Rng;

pub fn from_seed(seed: u64) -> CodeRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream for trial `trial` of an experiment seeded with `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> CodeRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // stream 0 is the plain `from_seed` stream; keep trials off it
    rng.set_stream(trial.wrapping_add(1));
    rng
}

/// Fresh stream for a named sub-task (sampling the code, drawing the message,
/// ...), so adding draws to one stage never shifts another.
pub fn labelled_rng(seed: u64, label: &str) -> CodeRng {
    // FNV-1a; only needs to be stable, not strong
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ h);
    rng.set_stream(u64::MAX);
    rng
}
