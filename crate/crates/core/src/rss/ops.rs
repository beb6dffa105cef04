//! Communicating RSS operations: re-sharing, AND and opening.

use super::{BitVector, SharedBitVector};
use crate::error::{Error, Result};
use crate::net::{op, Party};

/// Turns additive (3-out-of-3) shares into replicated shares with one message
/// to the next party.
///
/// Party `i` blinds its additive share with a fresh zero-sharing, giving
/// `c_i`, sends `c_i` to party `i+1` and receives `c_{i-1}`. Relabeling the new
/// shares as `⟨z⟩_k = c_{k-1}` makes the held pair `(c_{i-1}, c_i)` match the
/// `(⟨z⟩_i, ⟨z⟩_{i+1})` convention. All parts travel in a single frame.
pub fn reshare(party: &mut Party, parts: &[BitVector]) -> Result<Vec<SharedBitVector>> {
    let lens: Vec<usize> = parts.iter().map(BitVector::len).collect();
    let total: usize = lens.iter().sum();
    let me = party.id();
    if total == 0 {
        return Ok(lens.iter().map(|&l| SharedBitVector::zeros(me, l)).collect());
    }
    let mut blinded = BitVector::concat(parts);
    blinded.xor_assign(&party.zero_share(total)?)?;

    party.begin_round();
    party.send_round(me.next(), op::RESHARE, blinded.to_bytes(), total)?;
    let payload = party.recv_round(me.prev(), op::RESHARE)?;
    let received = decode_bits(&payload, total)?;

    SharedBitVector::new(me, received, blinded)?.split(&lens)
}

/// `⟦a ∧ b⟧` for equal-length sharings.
pub fn and_gate(party: &mut Party, a: &SharedBitVector, b: &SharedBitVector) -> Result<SharedBitVector> {
    let mut out = and_many(party, &[(a, b)])?;
    Ok(out.pop().expect("one output per input pair"))
}

/// Several independent ANDs in one communication round.
pub fn and_many(
    party: &mut Party,
    pairs: &[(&SharedBitVector, &SharedBitVector)],
) -> Result<Vec<SharedBitVector>> {
    let me = party.id();
    let locals = pairs
        .iter()
        .map(|(a, b)| {
            if a.party() != me {
                return Err(Error::PartyMismatch {
                    expected: me.number(),
                    actual: a.party().number(),
                });
            }
            a.and_local(b)
        })
        .collect::<Result<Vec<_>>>()?;
    reshare(party, &locals)
}

/// Additive share of `⊕_c sel[c] ∧ row_c`, where `sel` is a shared bit vector
/// and each row is a shared vector (or `None` for an implicit all-zero row).
pub fn select_sum_local<'a>(
    sel: &SharedBitVector,
    rows: impl IntoIterator<Item = Option<&'a SharedBitVector>>,
    width: usize,
) -> Result<BitVector> {
    let mut acc = BitVector::zeros(width);
    let mut count = 0;
    for (c, row) in rows.into_iter().enumerate() {
        count += 1;
        let Some(row) = row else { continue };
        if row.len() != width {
            return Err(Error::LengthMismatch {
                expected: width,
                actual: row.len(),
            });
        }
        if c >= sel.len() {
            continue;
        }
        // x_i·(y_i ⊕ y_{i+1}) ⊕ x_{i+1}·y_i
        let (own, next) = sel.bit(c);
        if own {
            acc.xor_words(row.own().words());
            acc.xor_words(row.next().words());
        }
        if next {
            acc.xor_words(row.own().words());
        }
    }
    if count != sel.len() {
        return Err(Error::LengthMismatch {
            expected: sel.len(),
            actual: count,
        });
    }
    Ok(acc)
}

/// Reveals `x` to every party. Each party sends `⟨x⟩_i` to the next one.
pub fn open(party: &mut Party, x: &SharedBitVector) -> Result<BitVector> {
    let mut out = open_many(party, &[x])?;
    Ok(out.pop().expect("one output per input"))
}

pub fn open_many(party: &mut Party, xs: &[&SharedBitVector]) -> Result<Vec<BitVector>> {
    let me = party.id();
    let lens: Vec<usize> = xs.iter().map(|x| x.len()).collect();
    let total: usize = lens.iter().sum();
    if total == 0 {
        return Ok(lens.iter().map(|&l| BitVector::zeros(l)).collect());
    }
    let own = BitVector::concat(xs.iter().map(|x| x.own()));
    let next = BitVector::concat(xs.iter().map(|x| x.next()));

    party.begin_round();
    party.send_round(me.next(), op::OPEN, own.to_bytes(), total)?;
    let payload = party.recv_round(me.prev(), op::OPEN)?;
    let mut value = decode_bits(&payload, total)?;
    value.xor_assign(&own)?;
    value.xor_assign(&next)?;
    party.record_opened(total);
    party.log_opened_value(&value);
    value.split(&lens)
}

pub(crate) fn decode_bits(payload: &[u8], bits: usize) -> Result<BitVector> {
    if payload.len() != bits.div_ceil(8) {
        return Err(Error::LengthMismatch {
            expected: bits,
            actual: payload.len() * 8,
        });
    }
    BitVector::from_bytes(payload, bits)
}
