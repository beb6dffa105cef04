//! Length-doubling PRG for the GGM evaluation trees, built from fixed-key
//! AES-128 in Matyas–Meyer–Oseas mode: `G_j(s) = AES_K(s ⊕ j) ⊕ s ⊕ j`.

use std::sync::OnceLock;

use aes::cipher::{BlockEncrypt, KeyInit};
use aes::Aes128;

const FIXED_KEY: [u8; 16] = *b"oblivgm-fss-prg!";

fn cipher() -> &'static Aes128 {
    static CIPHER: OnceLock<Aes128> = OnceLock::new();
    CIPHER.get_or_init(|| Aes128::new(&FIXED_KEY.into()))
}

pub(crate) type Seed = u128;

/// One side of an expanded node.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Child {
    pub seed: Seed,
    pub control: bool,
    pub value: bool,
}

fn mmo<const N: usize>(seed: Seed, tweaks: [u128; N]) -> [u128; N] {
    let mut blocks = tweaks.map(|t| (seed ^ t).to_le_bytes().into());
    cipher().encrypt_blocks(&mut blocks);
    let mut out = [0u128; N];
    for (i, b) in blocks.iter().enumerate() {
        let arr: [u8; 16] = (*b).into();
        out[i] = u128::from_le_bytes(arr) ^ seed ^ tweaks[i];
    }
    out
}

fn split(block: u128) -> (Seed, bool) {
    (block & !1, block & 1 == 1)
}

/// Left and right children with control bits. Value bits are left unset.
pub(crate) fn expand(seed: Seed) -> [Child; 2] {
    let [l, r] = mmo(seed, [0, 1]);
    let (ls, lt) = split(l);
    let (rs, rt) = split(r);
    [
        Child { seed: ls, control: lt, value: false },
        Child { seed: rs, control: rt, value: false },
    ]
}

/// Children plus one pseudorandom value bit per side, for comparison keys.
pub(crate) fn expand_with_values(seed: Seed) -> [Child; 2] {
    let [l, r, v] = mmo(seed, [0, 1, 2]);
    let (ls, lt) = split(l);
    let (rs, rt) = split(r);
    [
        Child { seed: ls, control: lt, value: v & 1 == 1 },
        Child { seed: rs, control: rt, value: v & 2 == 2 },
    ]
}

/// Output bit derived from a leaf seed.
pub(crate) fn leaf_bit(seed: Seed) -> bool {
    mmo(seed, [3])[0] & 1 == 1
}
