//! Counter-based random streams.
//!
//! Every path owns its own ChaCha8 stream, keyed by `(seed, stream_id, lane)`
//! and selected by the path index, so a path's randomness never depends on
//! which worker simulates it or in what order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Independent sub-streams used by one path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Lane {
    /// Waiting times and jump proposals.
    Jumps = 0,
    /// Acceptance uniforms for thinning.
    Thinning = 1,
    /// Gaussian increments replacing the dropped small jumps.
    Diffusion = 2,
}

fn splitmix(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn path_rng(seed: u64, stream_id: u64, lane: Lane, path: u64) -> ChaCha8Rng {
    let mut state = seed;
    let mut key = [0u8; 32];
    let mix = [
        splitmix(&mut state),
        splitmix(&mut state) ^ stream_id.wrapping_mul(0xD6E8_FEB8_6659_FD93),
        splitmix(&mut state) ^ (lane as u64 + 1).wrapping_mul(0xA076_1D64_78BD_642F),
        splitmix(&mut state),
    ];
    for (chunk, word) in key.chunks_exact_mut(8).zip(mix) {
        chunk.copy_from_slice(&word.to_le_bytes());
    }
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(path);
    rng
}
