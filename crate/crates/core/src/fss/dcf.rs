//! Distributed comparison function keys with output group Z₂ and β = 1.

use rand::Rng;

use super::prg;
use super::tree::{self, Level, TreeKey};
use crate::codec::{Reader, Writer};
use crate::error::Result;
use crate::rss::BitVector;

/// One half of a comparison pair. Evaluations of the two halves XOR to
/// `[x < α] ⊕ c`, where `c` is a constant fixed at generation time.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DcfKey(pub(crate) TreeKey);

/// Keys for `[x < α]`.
pub fn dcf_gen<R: Rng + ?Sized>(alpha: u64, domain_bits: u8, rng: &mut R) -> Result<(DcfKey, DcfKey)> {
    dcf_gen_offset(alpha, domain_bits, false, rng)
}

/// Keys for `[x < α] ⊕ complement`. The constant is split into random shares
/// so neither half reveals it.
pub fn dcf_gen_offset<R: Rng + ?Sized>(
    alpha: u64,
    domain_bits: u8,
    complement: bool,
    rng: &mut R,
) -> Result<(DcfKey, DcfKey)> {
    tree::check_domain(domain_bits)?;
    tree::check_point(alpha, domain_bits)?;
    let roots = [rng.gen::<u128>(), rng.gen::<u128>()];
    let mut acc = false;
    let ([mut k0, mut k1], [s0, s1]) = tree::generate(domain_bits, alpha, roots, true, |bit, kids| {
        let (keep, lose) = (bit as usize, !bit as usize);
        // leaving the path to the left while α has a 1 here means x < α
        let value = kids[0][lose].value ^ kids[1][lose].value ^ acc ^ bit;
        acc ^= kids[0][keep].value ^ kids[1][keep].value ^ value;
        Level {
            seed: kids[0][lose].seed ^ kids[1][lose].seed,
            t_left: kids[0][0].control ^ kids[1][0].control ^ bit ^ true,
            t_right: kids[0][1].control ^ kids[1][1].control ^ bit,
            value,
        }
    });
    let last = prg::leaf_bit(s0) ^ prg::leaf_bit(s1) ^ acc;
    let offset: bool = rng.gen();
    k0.last = last;
    k1.last = last;
    k0.offset = offset;
    k1.offset = offset ^ complement;
    Ok((DcfKey(k0), DcfKey(k1)))
}

impl DcfKey {
    pub fn domain_bits(&self) -> u8 {
        self.0.domain_bits
    }

    pub fn eval(&self, x: u64) -> Result<bool> {
        self.0.eval(x, true)
    }

    pub fn full_domain_eval(&self, n: usize) -> Result<BitVector> {
        self.0.full_eval(n, true)
    }

    pub fn write(&self, w: &mut Writer) {
        self.0.write(w)
    }

    pub fn read(r: &mut Reader<'_>) -> Result<Self> {
        TreeKey::read(r).map(DcfKey)
    }
}
