//! Interval containment built from two comparison keys:
//! `[lo ≤ x < hi] = [x < hi] ⊕ [x < lo]` over Z₂.

use rand::Rng;

use super::dcf::{dcf_gen_offset, DcfKey};
use super::tree;
use crate::codec::{Reader, Writer};
use crate::error::{Error, Result};
use crate::rss::BitVector;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntervalKey {
    pub(crate) lower: DcfKey,
    pub(crate) upper: DcfKey,
}

/// Keys for the prefix indicator `[x < t] ⊕ complement` with `t` allowed to
/// equal the domain size. The edge threshold is expressed as the complement
/// of the empty prefix `[x < 0]`.
pub(crate) fn prefix_keys<R: Rng + ?Sized>(
    t: u64,
    domain_bits: u8,
    complement: bool,
    rng: &mut R,
) -> Result<(DcfKey, DcfKey)> {
    tree::check_domain(domain_bits)?;
    if t == 1u64 << domain_bits {
        dcf_gen_offset(0, domain_bits, !complement, rng)
    } else {
        dcf_gen_offset(t, domain_bits, complement, rng)
    }
}

/// Keys for `a ≤ x ≤ a′` with either end optionally open.
pub fn ic_gen<R: Rng + ?Sized>(
    a: u64,
    a_prime: u64,
    domain_bits: u8,
    closed: (bool, bool),
    rng: &mut R,
) -> Result<(IntervalKey, IntervalKey)> {
    tree::check_domain(domain_bits)?;
    tree::check_point(a, domain_bits)?;
    tree::check_point(a_prime, domain_bits)?;
    if a > a_prime {
        return Err(Error::InvalidInterval { lower: a, upper: a_prime });
    }
    let hi = a_prime + closed.1 as u64;
    let lo = (a + !closed.0 as u64).min(hi);
    let (l0, l1) = prefix_keys(lo, domain_bits, false, rng)?;
    let (u0, u1) = prefix_keys(hi, domain_bits, false, rng)?;
    Ok((
        IntervalKey { lower: l0, upper: u0 },
        IntervalKey { lower: l1, upper: u1 },
    ))
}

impl IntervalKey {
    pub fn domain_bits(&self) -> u8 {
        self.lower.domain_bits()
    }

    pub fn eval(&self, x: u64) -> Result<bool> {
        Ok(self.lower.eval(x)? ^ self.upper.eval(x)?)
    }

    pub fn full_domain_eval(&self, n: usize) -> Result<BitVector> {
        self.lower.full_domain_eval(n)?.xor(&self.upper.full_domain_eval(n)?)
    }

    /// The two prefix evaluations, kept apart.
    pub fn component_evals(&self, n: usize) -> Result<[BitVector; 2]> {
        Ok([self.lower.full_domain_eval(n)?, self.upper.full_domain_eval(n)?])
    }

    pub fn write(&self, w: &mut Writer) {
        self.lower.write(w);
        self.upper.write(w);
    }

    pub fn read(r: &mut Reader<'_>) -> Result<Self> {
        let lower = DcfKey::read(r)?;
        let upper = DcfKey::read(r)?;
        if lower.domain_bits() != upper.domain_bits() {
            return Err(Error::codec("interval halves disagree on domain"));
        }
        Ok(IntervalKey { lower, upper })
    }
}
