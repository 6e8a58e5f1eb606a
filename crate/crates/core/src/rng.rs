//! Counter-based random streams.
//!
//! A stream is identified by `(seed, substream, index)`. The seed and the
//! substream label are hashed into a ChaCha8 key; the index selects the
//! ChaCha stream (nonce). Two streams with different coordinates never share
//! keystream, and any stream can be materialised independently of the others,
//! which is what makes per-trial parallelism reproducible.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Named substreams. Keeping geometry, fading and interference apart means
/// that switching interference on or off leaves the fading draws untouched.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Substream {
    Geometry,
    Fading,
    Interference,
    MeanSinr,
    Lemma,
    Test(u64),
}

impl Substream {
    fn label(self) -> u64 {
        match self {
            Substream::Geometry => 0x6765_6f6d_6574_7279,
            Substream::Fading => 0x6661_6469_6e67_0000,
            Substream::Interference => 0x696e_7465_7266_6572,
            Substream::MeanSinr => 0x6d65_616e_7369_6e72,
            Substream::Lemma => 0x6c65_6d6d_6131_0000,
            Substream::Test(n) => 0x7465_7374_0000_0000 ^ n,
        }
    }
}

/// Root of all streams for one experiment.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StreamKey {
    seed: u64,
}

impl StreamKey {
    pub fn new(seed: u64) -> Self {
        StreamKey { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Generator for `index` (typically the trial number) within `sub`.
    pub fn stream(&self, sub: Substream, index: u64) -> ChaCha8Rng {
        let mut key = [0u8; 32];
        let mut state = self.seed ^ mix64(sub.label());
        for chunk in key.chunks_exact_mut(8) {
            state = splitmix64(&mut state);
            chunk.copy_from_slice(&state.to_le_bytes());
        }
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(index);
        rng
    }
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    mix64(*state)
}

fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
