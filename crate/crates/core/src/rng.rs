//! Seed handling.
//!
//! Every random stream in the crate is a ChaCha8 generator keyed by a 64-bit
//! seed and selected by a stream number. A computation that fans out over
//! trials or samples uses the item index as the stream, so results do not
//! depend on how work is scheduled across threads. Independent purposes
//! inside one computation get distinct seeds through [`derive_seed`].

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Generator for `stream` under `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for the sub-computation named `label` under `seed`.
pub fn derive_seed(seed: u64, label: &str) -> u64 {
    // FNV-1a over the label, then mixed with the parent seed.
    let tag = label
        .bytes()
        .fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x100_0000_01b3));
    splitmix64(seed ^ splitmix64(tag))
}
