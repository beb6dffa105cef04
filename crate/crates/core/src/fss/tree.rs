//! Key layout and evaluation shared by point and comparison keys.
//!
//! Both are GGM trees walked from the most significant input bit. A comparison
//! key additionally accumulates one value bit per level; a point key carries
//! zero value corrections and ignores them.

use super::prg::{self, Child, Seed};
use crate::codec::{Reader, Writer};
use crate::error::{Error, Result};
use crate::rss::BitVector;

/// Largest supported tree depth.
pub const MAX_DOMAIN_BITS: u8 = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Level {
    pub seed: Seed,
    pub t_left: bool,
    pub t_right: bool,
    pub value: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct TreeKey {
    pub domain_bits: u8,
    /// Which half of the pair this is; also the root control bit.
    pub party: bool,
    pub root: Seed,
    pub levels: Vec<Level>,
    pub last: bool,
    /// This key's share of a constant XORed into every output.
    pub offset: bool,
}

pub(crate) fn check_domain(domain_bits: u8) -> Result<()> {
    if domain_bits == 0 || domain_bits > MAX_DOMAIN_BITS {
        return Err(Error::Invalid(format!(
            "domain bits must be in 1..={MAX_DOMAIN_BITS}, got {domain_bits}"
        )));
    }
    Ok(())
}

pub(crate) fn check_point(x: u64, domain_bits: u8) -> Result<()> {
    let n = 1u64 << domain_bits;
    if x >= n {
        return Err(Error::OutOfDomain { value: x, domain: n });
    }
    Ok(())
}

#[derive(Clone, Copy)]
struct Node {
    seed: Seed,
    t: bool,
    v: bool,
}

impl TreeKey {
    pub fn domain_size(&self) -> u64 {
        1u64 << self.domain_bits
    }

    fn expand(&self, seed: Seed, values: bool) -> [Child; 2] {
        if values {
            prg::expand_with_values(seed)
        } else {
            prg::expand(seed)
        }
    }

    fn step(&self, node: Node, level: &Level, dir: usize, values: bool) -> Node {
        let c = self.expand(node.seed, values)[dir];
        let (tcw, v) = if dir == 0 { (level.t_left, c.value) } else { (level.t_right, c.value) };
        if node.t {
            Node {
                seed: c.seed ^ level.seed,
                t: c.control ^ tcw,
                v: node.v ^ v ^ level.value,
            }
        } else {
            Node { seed: c.seed, t: c.control, v: node.v ^ v }
        }
    }

    fn finish(&self, node: Node) -> bool {
        node.v ^ prg::leaf_bit(node.seed) ^ (node.t & self.last) ^ self.offset
    }

    fn root(&self) -> Node {
        Node { seed: self.root, t: self.party, v: false }
    }

    pub fn eval(&self, x: u64, values: bool) -> Result<bool> {
        check_point(x, self.domain_bits)?;
        let mut node = self.root();
        for (i, level) in self.levels.iter().enumerate() {
            let dir = (x >> (self.domain_bits as usize - 1 - i)) & 1;
            node = self.step(node, level, dir as usize, values);
        }
        Ok(self.finish(node))
    }

    /// Evaluates the first `n` points with one depth-first traversal.
    pub fn full_eval(&self, n: usize, values: bool) -> Result<BitVector> {
        if n as u64 > self.domain_size() {
            return Err(Error::OutOfDomain {
                value: n as u64,
                domain: self.domain_size(),
            });
        }
        let mut out = BitVector::zeros(n);
        if n > 0 {
            self.walk(self.root(), 0, 0, n, values, &mut out);
        }
        Ok(out)
    }

    fn walk(&self, node: Node, depth: usize, prefix: usize, n: usize, values: bool, out: &mut BitVector) {
        if depth == self.levels.len() {
            out.set(prefix, self.finish(node));
            return;
        }
        let remaining = self.levels.len() - depth - 1;
        let level = &self.levels[depth];
        let children = self.expand(node.seed, values);
        for (dir, c) in children.iter().enumerate() {
            let start = (prefix << 1 | dir) << remaining;
            if start >= n {
                break;
            }
            let tcw = if dir == 0 { level.t_left } else { level.t_right };
            let child = if node.t {
                Node { seed: c.seed ^ level.seed, t: c.control ^ tcw, v: node.v ^ c.value ^ level.value }
            } else {
                Node { seed: c.seed, t: c.control, v: node.v ^ c.value }
            };
            self.walk(child, depth + 1, prefix << 1 | dir, n, values, out);
        }
    }

    pub fn write(&self, w: &mut Writer) {
        w.u8(self.domain_bits);
        w.u128(self.root);
        for l in &self.levels {
            w.u128(l.seed);
            w.u8(l.t_left as u8 | (l.t_right as u8) << 1 | (l.value as u8) << 2);
        }
        w.u8(self.last as u8 | (self.party as u8) << 1 | (self.offset as u8) << 2);
    }

    pub fn read(r: &mut Reader<'_>) -> Result<Self> {
        let domain_bits = r.u8()?;
        check_domain(domain_bits).map_err(|e| Error::codec(e.to_string()))?;
        let root = r.u128()?;
        let mut levels = Vec::with_capacity(domain_bits as usize);
        for _ in 0..domain_bits {
            let seed = r.u128()?;
            let flags = r.u8()?;
            if flags > 7 {
                return Err(Error::codec("bad level flags"));
            }
            levels.push(Level {
                seed,
                t_left: flags & 1 == 1,
                t_right: flags & 2 == 2,
                value: flags & 4 == 4,
            });
        }
        let flags = r.u8()?;
        if flags > 7 {
            return Err(Error::codec("bad key trailer"));
        }
        Ok(TreeKey {
            domain_bits,
            party: flags & 2 == 2,
            root,
            levels,
            last: flags & 1 == 1,
            offset: flags & 4 == 4,
        })
    }

    /// Serialized length in bytes.
    #[cfg(test)]
    pub fn encoded_len(domain_bits: u8) -> usize {
        1 + 16 + 17 * domain_bits as usize + 1
    }
}

/// Walks both halves of a pair down the path of `alpha`, calling `level_cw` to
/// build each level's correction. Returns the keys with the final correction
/// unset, plus the two leaf seeds reached at `alpha`.
pub(crate) fn generate<F>(
    domain_bits: u8,
    alpha: u64,
    roots: [Seed; 2],
    values: bool,
    mut level_cw: F,
) -> ([TreeKey; 2], [Seed; 2])
where
    F: FnMut(bool, [[Child; 2]; 2]) -> Level,
{
    let mut seeds = roots;
    let mut ts = [false, true];
    let mut levels = Vec::with_capacity(domain_bits as usize);
    for i in 0..domain_bits as usize {
        let bit = (alpha >> (domain_bits as usize - 1 - i)) & 1 == 1;
        let kids = seeds.map(|s| {
            if values {
                prg::expand_with_values(s)
            } else {
                prg::expand(s)
            }
        });
        let level = level_cw(bit, kids);
        let keep = bit as usize;
        let tcw = if bit { level.t_right } else { level.t_left };
        for b in 0..2 {
            let c = kids[b][keep];
            if ts[b] {
                seeds[b] = c.seed ^ level.seed;
                ts[b] = c.control ^ tcw;
            } else {
                seeds[b] = c.seed;
                ts[b] = c.control;
            }
        }
        levels.push(level);
    }
    let keys = [false, true].map(|party| TreeKey {
        domain_bits,
        party,
        root: roots[party as usize],
        levels: levels.clone(),
        last: false,
        offset: false,
    });
    (keys, seeds)
}
