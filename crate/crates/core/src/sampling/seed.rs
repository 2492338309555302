use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// A reproducible random stream.
///
/// Child streams are derived from a parent by mixing a text label and an
/// index into the parent's state: the label is hashed with 64-bit FNV-1a,
/// and each input is folded in with one SplitMix64 finalization step. The
/// derivation depends only on its inputs, so replicates can be run in any
/// order or in parallel.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Seed(u64);

impl Seed {
    pub fn new(master_seed: u64) -> Self {
        Seed(master_seed)
    }

    pub fn value(self) -> u64 {
        self.0
    }

    /// The child stream `(label, index)` of this seed.
    pub fn derive(self, label: &str, index: u64) -> Seed {
        let with_label = splitmix64(self.0 ^ fnv1a(label.as_bytes()));
        Seed(splitmix64(with_label ^ splitmix64(index.wrapping_add(0x5851_f42d_4c95_7f2d))))
    }

    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
