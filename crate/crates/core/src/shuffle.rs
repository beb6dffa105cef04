//! Three-party shuffle of secret-shared tables.
//!
//! Each pair of parties shares a seed and derives from it a permutation plus
//! blinding tables. The realized permutation is `π₂₃ ∘ π₃₁ ∘ π₁₂`; every
//! party misses one of the three seeds and so cannot recover it.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::error::{Error, Result};
use crate::net::{op, Party, ShuffleSeeds};
use crate::prf::{Key128, Prf};
use crate::rss::{decode_bits, BitVector, SharedBitVector};

const PERM: u32 = 0x5045_524d;
const MASK_T: u32 = 0x4d41_534b;
const MASK_R: u32 = 0x5245_5348;

/// Rows of equal width, each a shared bit vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatchTable {
    pub rows: Vec<SharedBitVector>,
    pub width: usize,
}

impl MatchTable {
    pub fn new(rows: Vec<SharedBitVector>, width: usize) -> Result<Self> {
        if let Some(r) = rows.iter().find(|r| r.len() != width) {
            return Err(Error::LengthMismatch { expected: width, actual: r.len() });
        }
        if rows.windows(2).any(|w| w[0].party() != w[1].party()) {
            return Err(Error::Invalid("table rows belong to different parties".into()));
        }
        Ok(MatchTable { rows, width })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    fn bits(&self) -> usize {
        self.rows.len() * self.width
    }
}

/// Randomness one pairwise seed yields for one table of one invocation.
struct Stream(Prf);

impl Stream {
    fn new(seed: &Key128) -> Self {
        Stream(Prf::new(seed))
    }

    fn index(invocation: u64, table: usize) -> u64 {
        invocation << 24 | table as u64
    }

    fn permutation(&self, invocation: u64, table: usize, n: usize) -> Vec<usize> {
        let seed = self.0.derive_seed(PERM, Self::index(invocation, table));
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut ChaCha20Rng::from_seed(seed));
        perm
    }

    fn mask(&self, label: u32, invocation: u64, table: usize, n: usize, width: usize) -> Vec<BitVector> {
        let flat = self.0.expand(label, Self::index(invocation, table), n * width);
        (0..n).map(|i| flat.slice(i * width, width)).collect()
    }
}

/// Moves row `i` to position `perm[i]`.
fn permute(rows: Vec<BitVector>, perm: &[usize]) -> Vec<BitVector> {
    let mut out = vec![BitVector::zeros(0); rows.len()];
    for (row, &to) in rows.into_iter().zip(perm) {
        out[to] = row;
    }
    out
}

fn xor_rows(a: &[BitVector], b: &[BitVector]) -> Vec<BitVector> {
    a.iter().zip(b).map(|(x, y)| x.xor(y).expect("equal row widths")).collect()
}

fn flatten(tables: &[Vec<BitVector>]) -> (BitVector, usize) {
    let flat = BitVector::concat(tables.iter().flatten());
    let bits = flat.len();
    (flat, bits)
}

fn unflatten(flat: &BitVector, dims: &[(usize, usize)]) -> Vec<Vec<BitVector>> {
    let mut at = 0;
    dims.iter()
        .map(|&(n, w)| {
            (0..n)
                .map(|_| {
                    let r = flat.slice(at, w);
                    at += w;
                    r
                })
                .collect()
        })
        .collect()
}

/// The composed permutation a shuffle applies to table `table` of shuffle
/// invocation `invocation`, computed in the clear from all three seeds.
pub fn composed_permutation(
    s12: &Key128,
    s23: &Key128,
    s31: &Key128,
    invocation: u64,
    table: usize,
    n: usize,
) -> Vec<usize> {
    let p12 = Stream::new(s12).permutation(invocation, table, n);
    let p31 = Stream::new(s31).permutation(invocation, table, n);
    let p23 = Stream::new(s23).permutation(invocation, table, n);
    (0..n).map(|i| p23[p31[p12[i]]]).collect()
}

pub fn sec_shuffle(party: &mut Party, table: MatchTable) -> Result<MatchTable> {
    let mut out = sec_shuffle_many(party, vec![table])?;
    Ok(out.pop().expect("one table in, one out"))
}

/// Shuffles several tables, each under its own permutation, in the same
/// three rounds. Table dimensions are public and must agree across parties.
pub fn sec_shuffle_many(party: &mut Party, tables: Vec<MatchTable>) -> Result<Vec<MatchTable>> {
    let me = party.id();
    if let Some(t) = tables.iter().flat_map(|t| &t.rows).find(|r| r.party() != me) {
        return Err(Error::PartyMismatch { expected: me.number(), actual: t.party().number() });
    }
    let dims: Vec<(usize, usize)> = tables.iter().map(|t| (t.len(), t.width)).collect();
    let total: usize = tables.iter().map(MatchTable::bits).sum();
    if total == 0 {
        return Ok(tables);
    }
    let j = party.next_shuffle_invocation();
    let seeds = party.shuffle_seeds().clone();
    let (next, prev) = (Stream::new(&seeds.with_next), Stream::new(&seeds.with_prev));
    let own: Vec<Vec<BitVector>> = tables.iter().map(|t| t.rows.iter().map(|r| r.own().clone()).collect()).collect();
    let nxt: Vec<Vec<BitVector>> = tables.iter().map(|t| t.rows.iter().map(|r| r.next().clone()).collect()).collect();

    let (a, b): (Vec<Vec<BitVector>>, Vec<Vec<BitVector>>) = match me.index() {
        0 => {
            // P1 holds s12 (next) and s31 (prev)
            let (s12, s31) = (&next, &prev);
            let x1: Vec<Vec<BitVector>> = dims
                .iter()
                .enumerate()
                .map(|(t, &(n, w))| {
                    let d12 = xor_rows(&own[t], &nxt[t]);
                    let v = permute(xor_rows(&d12, &s12.mask(MASK_T, j, t, n, w)), &s12.permutation(j, t, n));
                    permute(xor_rows(&v, &s31.mask(MASK_T, j, t, n, w)), &s31.permutation(j, t, n))
                })
                .collect();
            party.begin_round();
            party.send_round(me.next(), op::SHUFFLE, flatten(&x1).0.to_bytes(), total)?;
            party.begin_round();
            party.begin_round();
            let r1 = masks(s31, MASK_R, j, &dims);
            let r2 = masks(s12, MASK_R, j, &dims);
            (r1, r2)
        }
        1 => {
            // P2 holds s23 (next) and s12 (prev)
            let (s23, s12) = (&next, &prev);
            let y1: Vec<Vec<BitVector>> = dims
                .iter()
                .enumerate()
                .map(|(t, &(n, w))| permute(xor_rows(&nxt[t], &s12.mask(MASK_T, j, t, n, w)), &s12.permutation(j, t, n)))
                .collect();
            party.begin_round();
            party.send_round(me.next(), op::SHUFFLE, flatten(&y1).0.to_bytes(), total)?;
            let x1 = unflatten(&decode_bits(&party.recv_round(me.prev(), op::SHUFFLE)?, total)?, &dims);
            let r2 = masks(s12, MASK_R, j, &dims);
            let c1: Vec<Vec<BitVector>> = dims
                .iter()
                .enumerate()
                .map(|(t, &(n, w))| {
                    let v = permute(xor_rows(&x1[t], &s23.mask(MASK_T, j, t, n, w)), &s23.permutation(j, t, n));
                    xor_rows(&v, &r2[t])
                })
                .collect();
            party.begin_round();
            party.send_round(me.next(), op::SHUFFLE, flatten(&c1).0.to_bytes(), total)?;
            party.begin_round();
            let r3 = unflatten(&decode_bits(&party.recv_round(me.next(), op::SHUFFLE)?, total)?, &dims);
            (r2, r3)
        }
        _ => {
            // P3 holds s31 (next) and s23 (prev)
            let (s31, s23) = (&next, &prev);
            party.begin_round();
            let y1 = unflatten(&decode_bits(&party.recv_round(me.prev(), op::SHUFFLE)?, total)?, &dims);
            party.begin_round();
            let c1 = unflatten(&decode_bits(&party.recv_round(me.prev(), op::SHUFFLE)?, total)?, &dims);
            let r1 = masks(s31, MASK_R, j, &dims);
            let r3: Vec<Vec<BitVector>> = dims
                .iter()
                .enumerate()
                .map(|(t, &(n, w))| {
                    let v = permute(xor_rows(&y1[t], &s31.mask(MASK_T, j, t, n, w)), &s31.permutation(j, t, n));
                    let v = permute(xor_rows(&v, &s23.mask(MASK_T, j, t, n, w)), &s23.permutation(j, t, n));
                    xor_rows(&xor_rows(&v, &r1[t]), &c1[t])
                })
                .collect();
            party.begin_round();
            party.send_round(me.prev(), op::SHUFFLE, flatten(&r3).0.to_bytes(), total)?;
            (r3, r1)
        }
    };

    a.into_iter()
        .zip(b)
        .zip(dims)
        .map(|((own, next), (_, width))| {
            let rows = own
                .into_iter()
                .zip(next)
                .map(|(o, n)| SharedBitVector::new(me, o, n))
                .collect::<Result<_>>()?;
            MatchTable::new(rows, width)
        })
        .collect()
}

fn masks(s: &Stream, label: u32, j: u64, dims: &[(usize, usize)]) -> Vec<Vec<BitVector>> {
    dims.iter().enumerate().map(|(t, &(n, w))| s.mask(label, j, t, n, w)).collect()
}

/// Seeds `(s12, s23, s31)` recovered from the three parties' holdings.
pub fn pairwise_seeds(held: [&ShuffleSeeds; 3]) -> (Key128, Key128, Key128) {
    (held[0].with_next, held[1].with_next, held[2].with_next)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::{run_local_trio, PartyConfig};
    use crate::rss::{reconstruct, share, PartyId};

    fn run(rows: &[BitVector], master: u64) -> (Vec<BitVector>, (Key128, Key128, Key128), [u64; 3]) {
        let width = rows[0].len();
        let mut rng = ChaCha20Rng::seed_from_u64(master ^ 0xabc);
        let mut per_party: [Vec<SharedBitVector>; 3] = Default::default();
        for r in rows {
            for (p, s) in share(r, &mut rng).unwrap().into_iter().enumerate() {
                per_party[p].push(s);
            }
        }
        let out = run_local_trio(PartyConfig::trio(1, master), per_party, |party, rows| {
            let t = sec_shuffle(party, MatchTable::new(rows, width)?)?;
            Ok((t, party.shuffle_seeds().clone(), party.transcript_digest()))
        })
        .unwrap();
        let seeds = pairwise_seeds([&out[0].1, &out[1].1, &out[2].1]);
        let plain = (0..rows.len())
            .map(|i| reconstruct(&[out[0].0.rows[i].clone(), out[1].0.rows[i].clone(), out[2].0.rows[i].clone()]).unwrap())
            .collect();
        (plain, seeds, [out[0].2, out[1].2, out[2].2])
    }

    fn rows(n: usize) -> Vec<BitVector> {
        (0..n).map(|i| BitVector::from_words(vec![(i as u32).wrapping_mul(2654435761) | 1], 32).unwrap()).collect()
    }

    #[test]
    fn single_row_is_unchanged() {
        let input = rows(1);
        assert_eq!(run(&input, 1).0, input);
    }

    #[test]
    fn matches_the_seeded_reference() {
        let input = rows(8);
        let (out, (s12, s23, s31), _) = run(&input, 2);
        let perm = composed_permutation(&s12, &s23, &s31, 0, 0, 8);
        for (i, r) in input.iter().enumerate() {
            assert_eq!(&out[perm[i]], r);
        }
    }

    #[test]
    fn different_seeds_give_different_orders() {
        let input = rows(8);
        assert_ne!(run(&input, 3).0, run(&input, 4).0);
    }

    #[test]
    fn deterministic_transcripts() {
        let input = rows(5);
        assert_eq!(run(&input, 5).2, run(&input, 5).2);
    }

    #[test]
    fn batched_tables_shuffle_independently() {
        let mut rng = ChaCha20Rng::seed_from_u64(9);
        let a: Vec<BitVector> = (0..6).map(|_| BitVector::random(13, &mut rng)).collect();
        let b: Vec<BitVector> = (0..3).map(|_| BitVector::random(70, &mut rng)).collect();
        let mut inputs: [Vec<MatchTable>; 3] = Default::default();
        for (t, w) in [(&a, 13), (&b, 70)] {
            let mut per: [Vec<SharedBitVector>; 3] = Default::default();
            for r in t.iter() {
                for (p, s) in share(r, &mut rng).unwrap().into_iter().enumerate() {
                    per[p].push(s);
                }
            }
            for (p, rows) in per.into_iter().enumerate() {
                inputs[p].push(MatchTable::new(rows, w).unwrap());
            }
        }
        let empty: [MatchTable; 3] = PartyId::ALL.map(|_| MatchTable::new(vec![], 4).unwrap());
        let out = run_local_trio(PartyConfig::trio(2, 10), inputs, |party, mut tables| {
            tables.insert(1, empty[party.id().index()].clone());
            let rounds = party.round();
            let res = sec_shuffle_many(party, tables)?;
            assert_eq!(party.round() - rounds, 3);
            Ok(res)
        })
        .unwrap();
        for (t, plain) in [(0usize, &a), (2, &b)] {
            let mut got: Vec<Vec<u32>> = (0..plain.len())
                .map(|i| reconstruct(&[out[0][t].rows[i].clone(), out[1][t].rows[i].clone()]).unwrap().words().to_vec())
                .collect();
            let mut want: Vec<Vec<u32>> = plain.iter().map(|r| r.words().to_vec()).collect();
            got.sort();
            want.sort();
            assert_eq!(got, want);
        }
        assert!(out[0][1].is_empty());
    }
}
