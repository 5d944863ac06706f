//! Fixtures shared by the benchmarks.

use seedpair_core::network::{synth_village, SynthParams};
use seedpair_core::VillageNetwork;

/// A median-sized synthetic village (58 households, about 120 people).
pub fn median_village(seed: u64) -> VillageNetwork {
    synth_village("bench", &SynthParams::default(), seed).expect("default parameters are valid")
}
