use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{domain, Result};

/// Generator behind every random draw of the simulation.
pub type SimRng = ChaCha8Rng;

/// Identifier recorded in run metadata.
pub const PRNG_ID: &str = "ChaCha8Rng (rand_chacha 0.3): key = seed_from_u64(master_seed), \
     stream = sample_index << 16 | attempt << 8 | stage";

/// Bits of the stream id left for the sample index.
const INDEX_BITS: u32 = 48;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum Stage {
    /// Ground truth `A` of one sample.
    Truth = 0,
    /// Channel pattern `B` given the truth.
    Pattern = 1,
    /// Measurement noise turning `B` into `C`.
    Noise = 2,
    /// Truths held fixed over a whole run, indexed by run.
    FixedTruth = 3,
}

/// Stage tag for [`seed_stream`].
pub fn stage_tag(stage: Stage, attempt: u8) -> u16 {
    (attempt as u16) << 8 | stage as u16
}

/// Independent substream for one `(sample_index, stage_tag)` under
/// `master_seed`.
///
/// Every stream shares the key derived from the master seed and gets its own
/// 64-bit ChaCha stream id, so distinct inputs never share a keystream.
pub fn seed_stream(master_seed: u64, sample_index: u64, stage_tag: u16) -> Result<SimRng> {
    if sample_index >> INDEX_BITS != 0 {
        return domain(format!("sample index {sample_index} needs more than {INDEX_BITS} bits"));
    }
    let mut rng = SimRng::seed_from_u64(master_seed);
    rng.set_stream(sample_index << 16 | stage_tag as u64);
    Ok(rng)
}
