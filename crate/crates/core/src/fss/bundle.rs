//! Private predicates and the three-pair key bundles handed to the servers.

use std::fmt;

use rand::Rng;

use super::dcf::DcfKey;
use super::dpf::{dpf_gen, DpfKey};
use super::interval::{ic_gen, prefix_keys, IntervalKey};
use crate::codec::{Reader, Writer};
use crate::error::{Error, Result};
use crate::rss::{BitVector, PartyId};

/// Public shape of a predicate. The operands stay private.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PredicateKind {
    Equal,
    Less,
    LessEq,
    Greater,
    GreaterEq,
    Interval { lower_closed: bool, upper_closed: bool },
}

impl PredicateKind {
    pub fn tag(self) -> u8 {
        match self {
            PredicateKind::Equal => 1,
            PredicateKind::Less => 2,
            PredicateKind::LessEq => 3,
            PredicateKind::Greater => 4,
            PredicateKind::GreaterEq => 5,
            PredicateKind::Interval { lower_closed, upper_closed } => {
                6 | (lower_closed as u8) << 4 | (upper_closed as u8) << 5
            }
        }
    }

    pub fn from_tag(tag: u8) -> Result<Self> {
        Ok(match tag {
            1 => PredicateKind::Equal,
            2 => PredicateKind::Less,
            3 => PredicateKind::LessEq,
            4 => PredicateKind::Greater,
            5 => PredicateKind::GreaterEq,
            t if t & 0x0f == 6 && t >> 6 == 0 => PredicateKind::Interval {
                lower_closed: t & 0x10 != 0,
                upper_closed: t & 0x20 != 0,
            },
            t => return Err(Error::codec(format!("unknown predicate tag {t:#04x}"))),
        })
    }

    pub fn is_interval(self) -> bool {
        matches!(self, PredicateKind::Interval { .. })
    }

    /// Number of independently evaluated key components.
    pub fn components(self) -> usize {
        if self.is_interval() {
            2
        } else {
            1
        }
    }
}

impl fmt::Display for PredicateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PredicateKind::Equal => f.write_str("="),
            PredicateKind::Less => f.write_str("<"),
            PredicateKind::LessEq => f.write_str("<="),
            PredicateKind::Greater => f.write_str(">"),
            PredicateKind::GreaterEq => f.write_str(">="),
            PredicateKind::Interval { lower_closed, upper_closed } => write!(
                f,
                "in{}{}",
                if *lower_closed { '[' } else { '(' },
                if *upper_closed { ']' } else { ')' }
            ),
        }
    }
}

/// A plaintext predicate over dictionary indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Predicate {
    Equal(u64),
    Less(u64),
    LessEq(u64),
    Greater(u64),
    GreaterEq(u64),
    Interval {
        lower: u64,
        upper: u64,
        lower_closed: bool,
        upper_closed: bool,
    },
}

impl Predicate {
    pub fn closed(lower: u64, upper: u64) -> Self {
        Predicate::Interval { lower, upper, lower_closed: true, upper_closed: true }
    }

    pub fn kind(&self) -> PredicateKind {
        match *self {
            Predicate::Equal(_) => PredicateKind::Equal,
            Predicate::Less(_) => PredicateKind::Less,
            Predicate::LessEq(_) => PredicateKind::LessEq,
            Predicate::Greater(_) => PredicateKind::Greater,
            Predicate::GreaterEq(_) => PredicateKind::GreaterEq,
            Predicate::Interval { lower_closed, upper_closed, .. } => {
                PredicateKind::Interval { lower_closed, upper_closed }
            }
        }
    }

    pub fn matches(&self, x: u64) -> bool {
        match *self {
            Predicate::Equal(a) => x == a,
            Predicate::Less(a) => x < a,
            Predicate::LessEq(a) => x <= a,
            Predicate::Greater(a) => x > a,
            Predicate::GreaterEq(a) => x >= a,
            Predicate::Interval { lower, upper, lower_closed, upper_closed } => {
                (if lower_closed { x >= lower } else { x > lower })
                    && (if upper_closed { x <= upper } else { x < upper })
            }
        }
    }

    /// Plaintext indicator over `0..n`.
    pub fn indicator(&self, n: usize) -> BitVector {
        let mut v = BitVector::zeros(n);
        for x in 0..n {
            if self.matches(x as u64) {
                v.set(x, true);
            }
        }
        v
    }

    /// Operands must lie in `0..n`, and interval bounds must be ordered.
    pub fn validate(&self, n: u64) -> Result<()> {
        let check = |v: u64| {
            if v >= n {
                Err(Error::OutOfDomain { value: v, domain: n })
            } else {
                Ok(())
            }
        };
        match *self {
            Predicate::Equal(a)
            | Predicate::Less(a)
            | Predicate::LessEq(a)
            | Predicate::Greater(a)
            | Predicate::GreaterEq(a) => check(a),
            Predicate::Interval { lower, upper, .. } => {
                check(lower)?;
                check(upper)?;
                if lower > upper {
                    return Err(Error::InvalidInterval { lower, upper });
                }
                Ok(())
            }
        }
    }

    /// One key pair whose evaluations XOR to this predicate's indicator.
    pub fn gen_pair<R: Rng + ?Sized>(&self, domain_bits: u8, rng: &mut R) -> Result<[PredicateKey; 2]> {
        self.validate(1u64 << domain_bits.min(63))?;
        let kind = self.kind();
        let compare = |(a, b): (DcfKey, DcfKey)| [KeyMaterial::Compare(a), KeyMaterial::Compare(b)];
        let material = match *self {
            Predicate::Equal(a) => {
                let (k0, k1) = dpf_gen(a, domain_bits, rng)?;
                [KeyMaterial::Point(k0), KeyMaterial::Point(k1)]
            }
            Predicate::Less(a) => compare(prefix_keys(a, domain_bits, false, rng)?),
            Predicate::LessEq(a) => compare(prefix_keys(a + 1, domain_bits, false, rng)?),
            Predicate::Greater(a) => compare(prefix_keys(a + 1, domain_bits, true, rng)?),
            Predicate::GreaterEq(a) => compare(prefix_keys(a, domain_bits, true, rng)?),
            Predicate::Interval { lower, upper, lower_closed, upper_closed } => {
                let (k0, k1) = ic_gen(lower, upper, domain_bits, (lower_closed, upper_closed), rng)?;
                [KeyMaterial::Interval(k0), KeyMaterial::Interval(k1)]
            }
        };
        Ok(material.map(|material| PredicateKey { kind, material }))
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Predicate::Equal(a)
            | Predicate::Less(a)
            | Predicate::LessEq(a)
            | Predicate::Greater(a)
            | Predicate::GreaterEq(a) => write!(f, "{} {a}", self.kind()),
            Predicate::Interval { lower, upper, .. } => write!(f, "{} {lower} {upper}", self.kind()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum KeyMaterial {
    Point(DpfKey),
    Compare(DcfKey),
    Interval(IntervalKey),
}

/// One FSS key for one predicate, tagged with the public predicate kind.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PredicateKey {
    kind: PredicateKind,
    material: KeyMaterial,
}

impl PredicateKey {
    pub fn kind(&self) -> PredicateKind {
        self.kind
    }

    pub fn domain_bits(&self) -> u8 {
        match &self.material {
            KeyMaterial::Point(k) => k.domain_bits(),
            KeyMaterial::Compare(k) => k.domain_bits(),
            KeyMaterial::Interval(k) => k.domain_bits(),
        }
    }

    pub fn eval(&self, x: u64) -> Result<bool> {
        match &self.material {
            KeyMaterial::Point(k) => k.eval(x),
            KeyMaterial::Compare(k) => k.eval(x),
            KeyMaterial::Interval(k) => k.eval(x),
        }
    }

    /// Evaluations at `0..n`, one vector per key component. Interval keys
    /// return their two prefix halves separately.
    pub fn component_evals(&self, n: usize) -> Result<Vec<BitVector>> {
        Ok(match &self.material {
            KeyMaterial::Point(k) => vec![k.full_domain_eval(n)?],
            KeyMaterial::Compare(k) => vec![k.full_domain_eval(n)?],
            KeyMaterial::Interval(k) => k.component_evals(n)?.to_vec(),
        })
    }

    pub fn full_domain_eval(&self, n: usize) -> Result<BitVector> {
        match &self.material {
            KeyMaterial::Point(k) => k.full_domain_eval(n),
            KeyMaterial::Compare(k) => k.full_domain_eval(n),
            KeyMaterial::Interval(k) => k.full_domain_eval(n),
        }
    }

    pub fn write(&self, w: &mut Writer) {
        w.u8(self.kind.tag());
        match &self.material {
            KeyMaterial::Point(k) => k.write(w),
            KeyMaterial::Compare(k) => k.write(w),
            KeyMaterial::Interval(k) => k.write(w),
        }
    }

    pub fn read(r: &mut Reader<'_>) -> Result<Self> {
        let kind = PredicateKind::from_tag(r.u8()?)?;
        let material = match kind {
            PredicateKind::Equal => KeyMaterial::Point(DpfKey::read(r)?),
            PredicateKind::Interval { .. } => KeyMaterial::Interval(IntervalKey::read(r)?),
            _ => KeyMaterial::Compare(DcfKey::read(r)?),
        };
        Ok(PredicateKey { kind, material })
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new();
        self.write(&mut w);
        w.finish()
    }
}

/// Three independently generated key pairs for one predicate. Pair `j` is
/// evaluated against replicated share `j`; each server receives one half of
/// two different pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FssKeyBundle {
    pub pairs: [[PredicateKey; 2]; 3],
}

impl FssKeyBundle {
    pub fn generate<R: Rng + ?Sized>(predicate: &Predicate, domain_bits: u8, rng: &mut R) -> Result<Self> {
        Ok(FssKeyBundle {
            pairs: [
                predicate.gen_pair(domain_bits, rng)?,
                predicate.gen_pair(domain_bits, rng)?,
                predicate.gen_pair(domain_bits, rng)?,
            ],
        })
    }

    pub fn kind(&self) -> PredicateKind {
        self.pairs[0][0].kind()
    }

    /// The two keys held by `party`: the first applies to its own share, the
    /// second to the next party's share. Party 1 gets `(k₁¹, k₁²)`, party 2
    /// `(k₂², k₁³)`, party 3 `(k₂³, k₂¹)`.
    pub fn party_keys(&self, party: PartyId) -> [PredicateKey; 2] {
        let j = party.index();
        let first = &self.pairs[j][usize::from(j != 0)];
        let second = &self.pairs[(j + 1) % 3][usize::from(j == 2)];
        [first.clone(), second.clone()]
    }

    /// Reassembles a bundle from the three parties' key pairs.
    pub fn from_party_keys(keys: [[PredicateKey; 2]; 3]) -> Self {
        let [[a1, a2], [b2, b3], [c3, c1]] = keys;
        FssKeyBundle { pairs: [[a1, c1], [a2, b2], [b3, c3]] }
    }

    pub fn write(&self, w: &mut Writer) {
        for pair in &self.pairs {
            let mut inner = Writer::new();
            pair[0].write(&mut inner);
            pair[1].write(&mut inner);
            w.blob(&inner.finish());
        }
    }

    pub fn read(r: &mut Reader<'_>) -> Result<Self> {
        let mut read_pair = || -> Result<[PredicateKey; 2]> {
            let mut inner = Reader::new(r.blob()?);
            let pair = [PredicateKey::read(&mut inner)?, PredicateKey::read(&mut inner)?];
            inner.finish()?;
            Ok(pair)
        };
        let pairs = [read_pair()?, read_pair()?, read_pair()?];
        let kind = pairs[0][0].kind();
        let bits = pairs[0][0].domain_bits();
        if pairs.iter().flatten().any(|k| k.kind() != kind || k.domain_bits() != bits) {
            return Err(Error::codec("bundle keys disagree on kind or domain"));
        }
        Ok(FssKeyBundle { pairs })
    }
}
