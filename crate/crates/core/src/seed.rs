//! Named random sub-streams derived from one master seed.
//!
//! Each consumer (splits, training, bootstrap replicates) asks for its own
//! stream by name and index, so adding draws in one stage never shifts the
//! numbers another stage sees, and replicate `i` gets the same generator
//! whether replicates run sequentially or on a thread pool.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const SPLIT: &str = "split";
pub const TRAIN: &str = "train";
pub const BOOTSTRAP: &str = "bootstrap";
pub const ALIGN: &str = "align";

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn fnv1a(name: &str) -> u64 {
    name.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

/// Seed value for stream `(name, index)` under `master`.
pub fn derive(master: u64, name: &str, index: u64) -> u64 {
    let a = splitmix64(master);
    let b = splitmix64(a ^ fnv1a(name));
    splitmix64(b ^ splitmix64(index.wrapping_add(0x5851_f42d_4c95_7f2d)))
}

pub fn substream(master: u64, name: &str, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive(master, name, index))
}
