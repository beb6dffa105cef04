//! AES-128 keyed pseudorandom function used for zero-sharings, shuffle masks
//! and seed derivation.

use aes::cipher::{BlockEncrypt, KeyInit};
use aes::Aes128;

use crate::rss::BitVector;

pub type Key128 = [u8; 16];

/// `F(k, label, index)` expanded to an arbitrary number of bits. Each 128-bit
/// output block encrypts `index ‖ label ‖ lane` under `k`.
#[derive(Clone)]
pub struct Prf {
    cipher: Aes128,
}

impl Prf {
    pub fn new(key: &Key128) -> Self {
        Self {
            cipher: Aes128::new(key.into()),
        }
    }

    fn block(&self, label: u32, index: u64, lane: u32) -> [u8; 16] {
        let mut block = [0u8; 16];
        block[..8].copy_from_slice(&index.to_le_bytes());
        block[8..12].copy_from_slice(&label.to_le_bytes());
        block[12..].copy_from_slice(&lane.to_le_bytes());
        let mut b = block.into();
        self.cipher.encrypt_block(&mut b);
        b.into()
    }

    pub fn expand(&self, label: u32, index: u64, bits: usize) -> BitVector {
        let n_words = bits.div_ceil(32);
        let mut words = Vec::with_capacity(n_words);
        let mut lane = 0u32;
        while words.len() < n_words {
            let block = self.block(label, index, lane);
            for chunk in block.chunks_exact(4) {
                if words.len() == n_words {
                    break;
                }
                words.push(u32::from_le_bytes(chunk.try_into().unwrap()));
            }
            lane += 1;
        }
        BitVector::from_words_masked(words, bits)
    }

    /// A fresh 128-bit key derived from this one.
    pub fn derive_key(&self, label: u32, index: u64) -> Key128 {
        self.block(label, index, u32::MAX)
    }

    /// A 256-bit seed for a stream generator.
    pub fn derive_seed(&self, label: u32, index: u64) -> [u8; 32] {
        let mut out = [0u8; 32];
        out[..16].copy_from_slice(&self.block(label, index, u32::MAX - 1));
        out[16..].copy_from_slice(&self.block(label, index, u32::MAX - 2));
        out
    }
}
