use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};

const WORD: usize = 32;

/// A bit string packed into 32-bit words, least significant bit first.
///
/// Bits at positions `>= len` are always zero; every constructor and mutator
/// re-establishes that.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitVector {
    words: Vec<u32>,
    len: usize,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        Self {
            words: vec![0; len.div_ceil(WORD)],
            len,
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut v = Self {
            words: vec![u32::MAX; len.div_ceil(WORD)],
            len,
        };
        v.mask_tail();
        v
    }

    pub fn one_hot(len: usize, index: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(index, true);
        v
    }

    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        let words = (0..len.div_ceil(WORD)).map(|_| rng.gen()).collect();
        Self::from_words_masked(words, len)
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.words[i / WORD] |= 1 << (i % WORD);
            }
        }
        v
    }

    /// Builds a vector from exactly `ceil(len / 32)` words, rejecting set tail bits.
    pub fn from_words(words: Vec<u32>, len: usize) -> Result<Self> {
        if words.len() != len.div_ceil(WORD) {
            return Err(Error::codec(format!(
                "{} words cannot hold exactly {len} bits",
                words.len()
            )));
        }
        let v = Self::from_words_masked(words.clone(), len);
        if v.words != words {
            return Err(Error::codec("bits set beyond logical length"));
        }
        Ok(v)
    }

    pub(crate) fn from_words_masked(mut words: Vec<u32>, len: usize) -> Self {
        words.resize(len.div_ceil(WORD), 0);
        let mut v = Self { words, len };
        v.mask_tail();
        v
    }

    fn mask_tail(&mut self) {
        let rem = self.len % WORD;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u32 << rem) - 1;
            }
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u32] {
        &self.words
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, bit: bool) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        let mask = 1u32 << (i % WORD);
        if bit {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn parity(&self) -> bool {
        self.words.iter().fold(0u32, |acc, w| acc ^ w).count_ones() & 1 == 1
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(|i| self.get(i))
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let tz = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * WORD + tz)
            })
        })
    }

    fn check_len(&self, other: &Self) -> Result<()> {
        if self.len != other.len {
            return Err(Error::LengthMismatch {
                expected: self.len,
                actual: other.len,
            });
        }
        Ok(())
    }

    pub fn xor(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        out.xor_assign(other)?;
        Ok(out)
    }

    pub fn xor_assign(&mut self, other: &Self) -> Result<()> {
        self.check_len(other)?;
        self.xor_words(&other.words);
        Ok(())
    }

    pub fn and(&self, other: &Self) -> Result<Self> {
        self.check_len(other)?;
        let words = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| a & b)
            .collect();
        Ok(Self {
            words,
            len: self.len,
        })
    }

    pub fn not(&self) -> Self {
        let mut out = Self {
            words: self.words.iter().map(|w| !w).collect(),
            len: self.len,
        };
        out.mask_tail();
        out
    }

    /// Parity of `self & other` without materializing the conjunction.
    pub fn and_parity(&self, other: &Self) -> bool {
        debug_assert_eq!(self.len, other.len);
        self.words
            .iter()
            .zip(&other.words)
            .fold(0u32, |acc, (a, b)| acc ^ (a & b))
            .count_ones()
            & 1
            == 1
    }

    pub(crate) fn xor_words(&mut self, words: &[u32]) {
        debug_assert_eq!(self.words.len(), words.len());
        for (a, b) in self.words.iter_mut().zip(words) {
            *a ^= b;
        }
    }

    /// Appends `other` bit-wise at the end of `self`.
    pub fn append(&mut self, other: &BitVector) {
        let shift = self.len % WORD;
        let new_len = self.len + other.len;
        if shift == 0 {
            self.words.extend_from_slice(&other.words);
        } else {
            for &w in &other.words {
                *self.words.last_mut().unwrap() |= w << shift;
                self.words.push(w >> (WORD - shift));
            }
            self.words.truncate(new_len.div_ceil(WORD));
        }
        self.len = new_len;
        self.mask_tail();
    }

    pub fn concat<'a>(parts: impl IntoIterator<Item = &'a BitVector>) -> BitVector {
        let mut out = BitVector::zeros(0);
        for p in parts {
            out.append(p);
        }
        out
    }

    /// The `len` bits starting at `start`.
    pub fn slice(&self, start: usize, len: usize) -> BitVector {
        assert!(start + len <= self.len, "slice out of range");
        let shift = start % WORD;
        let first = start / WORD;
        let n_words = len.div_ceil(WORD);
        let mut words = Vec::with_capacity(n_words);
        for i in 0..n_words {
            let lo = self.words.get(first + i).copied().unwrap_or(0);
            let w = if shift == 0 {
                lo
            } else {
                let hi = self.words.get(first + i + 1).copied().unwrap_or(0);
                (lo >> shift) | (hi << (WORD - shift))
            };
            words.push(w);
        }
        BitVector::from_words_masked(words, len)
    }

    /// Splits into consecutive pieces of the given lengths.
    pub fn split(&self, lens: &[usize]) -> Result<Vec<BitVector>> {
        let total: usize = lens.iter().sum();
        if total != self.len {
            return Err(Error::LengthMismatch {
                expected: total,
                actual: self.len,
            });
        }
        let mut start = 0;
        Ok(lens
            .iter()
            .map(|&l| {
                let piece = self.slice(start, l);
                start += l;
                piece
            })
            .collect())
    }

    /// Packed little-endian bytes, `ceil(len / 8)` of them.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out: Vec<u8> = self.words.iter().flat_map(|w| w.to_le_bytes()).collect();
        out.truncate(self.len.div_ceil(8));
        out
    }

    pub fn from_bytes(bytes: &[u8], len: usize) -> Result<Self> {
        if bytes.len() != len.div_ceil(8) {
            return Err(Error::codec(format!(
                "{} bytes cannot hold exactly {len} bits",
                bytes.len()
            )));
        }
        let words = bytes
            .chunks(4)
            .map(|c| {
                let mut w = [0u8; 4];
                w[..c.len()].copy_from_slice(c);
                u32::from_le_bytes(w)
            })
            .collect();
        Self::from_words(words, len)
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector[{}](", self.len)?;
        for b in self.iter().take(256) {
            f.write_str(if b { "1" } else { "0" })?;
        }
        if self.len > 256 {
            f.write_str("…")?;
        }
        f.write_str(")")
    }
}

/// Bits as `0`/`1`, index 0 first.
impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.iter().try_for_each(|b| f.write_str(if b { "1" } else { "0" }))
    }
}
