#![allow(dead_code)]

use std::path::PathBuf;

use oblivgm::rss::{share, BitVector, SharedBitVector};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

pub fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

pub fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

pub fn social_graph() -> String {
    std::fs::read_to_string(data("social.graph")).unwrap()
}

pub fn social_query() -> String {
    std::fs::read_to_string(data("social.query")).unwrap()
}

/// Shares each vector and groups the views by party.
pub fn deal(plain: &[BitVector], seed: u64) -> [Vec<SharedBitVector>; 3] {
    let mut r = rng(seed);
    let mut out: [Vec<SharedBitVector>; 3] = Default::default();
    for v in plain {
        for (p, s) in share(v, &mut r).unwrap().into_iter().enumerate() {
            out[p].push(s);
        }
    }
    out
}

pub fn column<T: Clone>(views: &[Vec<T>; 3], i: usize) -> [T; 3] {
    [0, 1, 2].map(|p| views[p][i].clone())
}
