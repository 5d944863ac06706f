//! Deterministic random substreams.
//!
//! Every random quantity in the crate is drawn from a ChaCha8 stream that is
//! a pure function of `(master_seed, domain, index)`:
//!
//! 1. `state = master_seed ^ domain.tag()`
//! 2. four successive SplitMix64 outputs from `state` (the state is advanced
//!    by `0x9E3779B97F4A7C15` before each output) form the 256-bit key, each
//!    word written little-endian in order;
//! 3. the ChaCha stream id is set to `index`, the word position starts at 0.
//!
//! Replication `r` of a Monte Carlo run always reads stream `r`, so results
//! do not depend on which worker evaluates it or in what order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Independent purposes that draw randomness.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Domain {
    /// Per-replication threshold vectors.
    Thresholds,
    /// Household sampling for village outcomes.
    Sampling,
    /// Interview-based targeting strategies.
    Strategy,
    /// Random benchmark pairs.
    RandomPairs,
    /// Synthetic village generator.
    Generator,
    /// Re-keying of the master seed for out-of-sample evaluation draws.
    Evaluation,
}

impl Domain {
    pub const fn tag(self) -> u64 {
        match self {
            Domain::Thresholds => 0x5448_5245_5348_4f4c,
            Domain::Sampling => 0x5341_4d50_4c49_4e47,
            Domain::Strategy => 0x5354_5241_5445_4759,
            Domain::RandomPairs => 0x5241_4e44_5041_4952,
            Domain::Generator => 0x4745_4e45_5241_5445,
            Domain::Evaluation => 0x4556_414c_5541_5445,
        }
    }
}

#[inline]
pub fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Returns the generator for substream `index` of `domain` under `master_seed`.
pub fn substream(master_seed: u64, domain: Domain, index: u64) -> ChaCha8Rng {
    let mut state = master_seed ^ domain.tag();
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(index);
    rng
}

/// Folds several integers into one substream index.
pub fn mix_index(parts: &[u64]) -> u64 {
    let mut state = 0x243F_6A88_85A3_08D3u64;
    for &p in parts {
        state ^= p;
        state = splitmix64(&mut state);
    }
    state
}

/// Derives a new master seed, e.g. to keep evaluation draws disjoint from the
/// draws an optimizer was fitted on.
pub fn derive_seed(master_seed: u64, domain: Domain) -> u64 {
    let mut state = master_seed ^ domain.tag();
    splitmix64(&mut state)
}
