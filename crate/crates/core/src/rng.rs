//! Named, reproducible random streams.
//!
//! Every random draw in the crate comes from a ChaCha8 generator keyed by a
//! 64-bit seed and a stream id. The stream id packs a [`Purpose`] tag in the
//! high 16 bits and an index (trial id, participant number, ...) in the low
//! 48 bits, so streams for different purposes never overlap.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// What a stream is used for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Purpose {
    /// Base angles and trial permutation of one exercise; index is the
    /// condition ordinal.
    Schedule,
    /// One simulated trial; index is the trial id.
    Trial,
    /// Scripted gaze of one simulated trial; index is the trial id.
    Gaze,
    /// Convergence-point estimation draws.
    Estimation,
    /// Per-participant seeds of a synthetic corpus.
    Corpus,
}

impl Purpose {
    fn tag(self) -> u64 {
        match self {
            Purpose::Schedule => 1,
            Purpose::Trial => 2,
            Purpose::Gaze => 3,
            Purpose::Estimation => 4,
            Purpose::Corpus => 5,
        }
    }
}

const INDEX_BITS: u32 = 48;

/// Opens the stream `(seed, purpose, index)`.
pub fn stream(seed: u64, purpose: Purpose, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((purpose.tag() << INDEX_BITS) | (index & ((1 << INDEX_BITS) - 1)));
    rng
}

/// SplitMix64 finalizer, used to derive child seeds from a parent seed.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
