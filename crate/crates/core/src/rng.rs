//! Counter-based random streams.
//!
//! A [`SeedSpec`] names a stream; every batch is cut into fixed-size chunks and
//! chunk `c` reads the ChaCha8 keystream of `(seed, stream)` starting at word
//! offset `c << 40`. Output therefore depends only on `(seed, stream, n)`,
//! never on how chunks are scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::par;

/// The generator every sampler draws from.
pub type StreamRng = ChaCha8Rng;

/// Draws per chunk.
pub const CHUNK: usize = 4096;

const CHUNK_WORDS_SHIFT: u32 = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeedSpec {
    pub seed: u64,
    pub stream: u64,
}

impl SeedSpec {
    pub fn new(seed: u64, stream: u64) -> Self {
        SeedSpec { seed, stream }
    }

    /// Generator positioned at the start of chunk `chunk`.
    pub fn rng(&self, chunk: u64) -> StreamRng {
        let mut key = [0u8; 32];
        let mut state = self.seed;
        for block in key.chunks_exact_mut(8) {
            block.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
        }
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(self.stream);
        rng.set_word_pos((chunk as u128) << CHUNK_WORDS_SHIFT);
        rng
    }

    /// Independent sub-stream for job `index` of a larger computation.
    pub fn child(&self, index: u64) -> SeedSpec {
        let mut state = self.stream ^ index.wrapping_add(1).wrapping_mul(0xD1B5_4A32_D192_ED03);
        SeedSpec {
            seed: self.seed,
            stream: splitmix64(&mut state),
        }
    }
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Generates `n` values, chunk by chunk, in index order.
pub fn generate<T, F>(n: usize, seed: SeedSpec, draw: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut StreamRng) -> T + Sync + Send,
{
    let chunks = n.div_ceil(CHUNK);
    let parts = par::map_indexed(chunks, |c| {
        let mut rng = seed.rng(c as u64);
        let len = CHUNK.min(n - c * CHUNK);
        (0..len).map(|_| draw(&mut rng)).collect::<Vec<T>>()
    });
    parts.into_iter().flatten().collect()
}

/// Runs `job(rng, count)` once per chunk and returns the per-chunk results in order.
pub fn map_chunks<T, F>(n: usize, seed: SeedSpec, job: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut StreamRng, usize) -> T + Sync + Send,
{
    let chunks = n.div_ceil(CHUNK);
    par::map_indexed(chunks, |c| {
        let mut rng = seed.rng(c as u64);
        job(&mut rng, CHUNK.min(n - c * CHUNK))
    })
}
