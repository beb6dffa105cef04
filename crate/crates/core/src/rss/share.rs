use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::BitVector;
use crate::codec::{Reader, Writer};
use crate::error::{Error, Result};

/// One of the three computing parties. Stored zero-based, displayed one-based.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PartyId(u8);

impl PartyId {
    pub const ALL: [PartyId; 3] = [PartyId(0), PartyId(1), PartyId(2)];

    /// `number` is one-based: 1, 2 or 3.
    pub fn new(number: u8) -> Result<Self> {
        match number {
            1..=3 => Ok(PartyId(number - 1)),
            other => Err(Error::InvalidParty(other)),
        }
    }

    pub fn number(self) -> u8 {
        self.0 + 1
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn next(self) -> Self {
        PartyId((self.0 + 1) % 3)
    }

    pub fn prev(self) -> Self {
        PartyId((self.0 + 2) % 3)
    }
}

impl fmt::Debug for PartyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "P{}", self.number())
    }
}

impl fmt::Display for PartyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

/// Party `i`'s view `(⟨x⟩_i, ⟨x⟩_{i+1})` of a replicated XOR sharing.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SharedBitVector {
    party: PartyId,
    own: BitVector,
    next: BitVector,
}

impl SharedBitVector {
    pub fn new(party: PartyId, own: BitVector, next: BitVector) -> Result<Self> {
        if own.len() != next.len() {
            return Err(Error::LengthMismatch {
                expected: own.len(),
                actual: next.len(),
            });
        }
        Ok(Self { party, own, next })
    }

    /// The trivial sharing of the all-zero vector (every share zero).
    pub fn zeros(party: PartyId, len: usize) -> Self {
        Self {
            party,
            own: BitVector::zeros(len),
            next: BitVector::zeros(len),
        }
    }

    pub fn party(&self) -> PartyId {
        self.party
    }

    pub fn len(&self) -> usize {
        self.own.len()
    }

    pub fn is_empty(&self) -> bool {
        self.own.is_empty()
    }

    /// `⟨x⟩_i` for the holding party `i`.
    pub fn own(&self) -> &BitVector {
        &self.own
    }

    /// `⟨x⟩_{i+1}` for the holding party `i`.
    pub fn next(&self) -> &BitVector {
        &self.next
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.party != other.party {
            return Err(Error::PartyMismatch {
                expected: self.party.number(),
                actual: other.party.number(),
            });
        }
        if self.len() != other.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                actual: other.len(),
            });
        }
        Ok(())
    }

    /// Local XOR of two sharings; no communication.
    pub fn xor(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(Self {
            party: self.party,
            own: self.own.xor(&other.own)?,
            next: self.next.xor(&other.next)?,
        })
    }

    pub fn xor_assign(&mut self, other: &Self) -> Result<()> {
        self.check_compatible(other)?;
        self.own.xor_assign(&other.own)?;
        self.next.xor_assign(&other.next)
    }

    /// XORs a public constant into the shared value by folding it into `⟨x⟩_1`.
    pub fn xor_public(&self, constant: &BitVector) -> Result<Self> {
        let mut out = self.clone();
        match self.party.number() {
            1 => out.own.xor_assign(constant)?,
            3 => out.next.xor_assign(constant)?,
            _ => {
                if constant.len() != self.len() {
                    return Err(Error::LengthMismatch {
                        expected: self.len(),
                        actual: constant.len(),
                    });
                }
            }
        }
        Ok(out)
    }

    /// This party's additive share of `self ∧ other`:
    /// `x_i·y_i ⊕ x_i·y_{i+1} ⊕ x_{i+1}·y_i`.
    pub fn and_local(&self, other: &Self) -> Result<BitVector> {
        self.check_compatible(other)?;
        let words = self
            .own
            .words()
            .iter()
            .zip(self.next.words())
            .zip(other.own.words().iter().zip(other.next.words()))
            .map(|((xa, xb), (ya, yb))| (xa & ya) ^ (xa & yb) ^ (xb & ya))
            .collect();
        Ok(BitVector::from_words_masked(words, self.len()))
    }

    /// Shares of the single bit `⊕_j x[j]`, computed locally.
    pub fn parity(&self) -> Self {
        Self {
            party: self.party,
            own: BitVector::from_bits(&[self.own.parity()]),
            next: BitVector::from_bits(&[self.next.parity()]),
        }
    }

    pub fn bit(&self, i: usize) -> (bool, bool) {
        (self.own.get(i), self.next.get(i))
    }

    pub fn slice(&self, start: usize, len: usize) -> Self {
        Self {
            party: self.party,
            own: self.own.slice(start, len),
            next: self.next.slice(start, len),
        }
    }

    pub fn append(&mut self, other: &Self) -> Result<()> {
        if self.party != other.party {
            return Err(Error::PartyMismatch {
                expected: self.party.number(),
                actual: other.party.number(),
            });
        }
        self.own.append(&other.own);
        self.next.append(&other.next);
        Ok(())
    }

    pub fn concat<'a>(party: PartyId, parts: impl IntoIterator<Item = &'a SharedBitVector>) -> Result<Self> {
        let mut out = Self::zeros(party, 0);
        for p in parts {
            out.append(p)?;
        }
        Ok(out)
    }

    pub fn split(&self, lens: &[usize]) -> Result<Vec<Self>> {
        let own = self.own.split(lens)?;
        let next = self.next.split(lens)?;
        Ok(own
            .into_iter()
            .zip(next)
            .map(|(own, next)| Self {
                party: self.party,
                own,
                next,
            })
            .collect())
    }

    /// Share record: `"OGMS"`, version u16, party u8, logical_len u64, then
    /// the packed little-endian words of `⟨x⟩_i` followed by those of `⟨x⟩_{i+1}`.
    pub fn write_record(&self, w: &mut Writer) {
        w.bytes(SHARE_MAGIC)
            .u16(SHARE_VERSION)
            .u8(self.party.number())
            .u64(self.len() as u64);
        for word in self.own.words().iter().chain(self.next.words()) {
            w.u32(*word);
        }
    }

    pub fn read_record(r: &mut Reader<'_>) -> Result<Self> {
        r.expect_magic(SHARE_MAGIC)?;
        let version = r.u16()?;
        if version != SHARE_VERSION {
            return Err(Error::codec(format!("unsupported share version {version}")));
        }
        let party = PartyId::new(r.u8()?)?;
        let len = usize::try_from(r.u64()?).map_err(|_| Error::codec("share length overflow"))?;
        let n_words = len.div_ceil(32);
        let read_words = |r: &mut Reader<'_>| -> Result<BitVector> {
            let words = (0..n_words).map(|_| r.u32()).collect::<Result<Vec<_>>>()?;
            BitVector::from_words(words, len)
        };
        let own = read_words(r)?;
        let next = read_words(r)?;
        Ok(Self { party, own, next })
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new();
        self.write_record(&mut w);
        w.finish()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(bytes);
        let s = Self::read_record(&mut r)?;
        r.finish()?;
        Ok(s)
    }
}

const SHARE_MAGIC: &[u8; 4] = b"OGMS";
const SHARE_VERSION: u16 = 1;

/// Splits `plaintext` into three XOR shares and hands party `i` the pair
/// `(⟨x⟩_i, ⟨x⟩_{i+1})`.
pub fn share<R: Rng + ?Sized>(plaintext: &BitVector, rng: &mut R) -> Result<[SharedBitVector; 3]> {
    if plaintext.is_empty() {
        return Err(Error::EmptyInput("cannot share a zero-length vector"));
    }
    Ok(share_unchecked(plaintext, rng))
}

/// As [`share`], but also accepts zero-length input (used for empty tables).
fn share_unchecked<R: Rng + ?Sized>(plaintext: &BitVector, rng: &mut R) -> [SharedBitVector; 3] {
    let len = plaintext.len();
    let s1 = BitVector::random(len, rng);
    let s2 = BitVector::random(len, rng);
    let mut s3 = plaintext.clone();
    s3.xor_words(s1.words());
    s3.xor_words(s2.words());
    let s = [s1, s2, s3];
    PartyId::ALL.map(|p| SharedBitVector {
        party: p,
        own: s[p.index()].clone(),
        next: s[p.next().index()].clone(),
    })
}

/// Recombines the views of two or three distinct parties.
pub fn reconstruct(views: &[SharedBitVector]) -> Result<BitVector> {
    let Some(first) = views.first() else {
        return Err(Error::EmptyInput("no shares supplied"));
    };
    let len = first.len();
    let mut slots: [Option<&BitVector>; 3] = [None, None, None];
    let mut seen = [false; 3];
    for v in views {
        if v.len() != len {
            return Err(Error::LengthMismatch {
                expected: len,
                actual: v.len(),
            });
        }
        let p = v.party;
        if std::mem::replace(&mut seen[p.index()], true) {
            return Err(Error::DuplicateParty(p.number()));
        }
        for (idx, share) in [(p, &v.own), (p.next(), &v.next)] {
            match slots[idx.index()] {
                None => slots[idx.index()] = Some(share),
                Some(existing) if existing != share => {
                    return Err(Error::InconsistentReplica(idx.number()))
                }
                Some(_) => {}
            }
        }
    }
    let mut out = BitVector::zeros(len);
    for (i, slot) in slots.iter().enumerate() {
        let share = slot.ok_or(Error::MissingShareIndex(i as u8 + 1))?;
        out.xor_words(share.words());
    }
    Ok(out)
}
