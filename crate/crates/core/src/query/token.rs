use std::fs;
use std::path::Path;

use rand::{CryptoRng, Rng};

use super::model::{Combiner, QueryGraph};
use crate::codec::{Reader, Writer};
use crate::error::{Error, Result};
use crate::fss::{FssKeyBundle, PredicateKey, PredicateKind};
use crate::graph::Schema;
use crate::rss::PartyId;

const TOKEN_MAGIC: &[u8; 4] = b"OGMT";
const TOKEN_VERSION: u16 = 1;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TokenPredicate {
    pub attr: String,
    /// Applied to this party's own share, then to the next party's share.
    pub keys: [PredicateKey; 2],
}

impl TokenPredicate {
    pub fn kind(&self) -> PredicateKind {
        self.keys[0].kind()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TokenVertex {
    pub name: String,
    pub vtype: String,
    pub combiner: Combiner,
    pub parent: Option<usize>,
    pub predicates: Vec<TokenPredicate>,
}

/// Name, type, combiner, parent and `(attribute, kind)` per predicate.
pub type ShapeVertex = (String, String, Combiner, Option<usize>, Vec<(String, PredicateKind)>);

/// What every server may see of a query: its shape and predicate kinds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TokenShape {
    pub start: usize,
    pub vertices: Vec<ShapeVertex>,
}

/// One server's view of a query.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartyToken {
    pub party: PartyId,
    pub start: usize,
    pub vertices: Vec<TokenVertex>,
}

/// Generates one key bundle per predicate and splits each across the three
/// servers.
pub fn gen_token<R: Rng + CryptoRng + ?Sized>(
    query: &QueryGraph,
    schema: &Schema,
    rng: &mut R,
) -> Result<[PartyToken; 3]> {
    let resolved = query.resolve(schema)?;
    let mut tokens = PartyId::ALL.map(|party| PartyToken { party, start: query.start, vertices: Vec::new() });
    for (i, v) in query.vertices.iter().enumerate() {
        let ts = schema.vtype(&v.vtype)?;
        let mut per_party: [Vec<TokenPredicate>; 3] = Default::default();
        for (attr, predicate) in &resolved[i] {
            let bits = ts.attributes[*attr].domain_bits();
            let bundle = FssKeyBundle::generate(predicate, bits, rng)?;
            for (p, party) in PartyId::ALL.into_iter().enumerate() {
                per_party[p].push(TokenPredicate {
                    attr: ts.attributes[*attr].name.clone(),
                    keys: bundle.party_keys(party),
                });
            }
        }
        for (token, predicates) in tokens.iter_mut().zip(per_party) {
            token.vertices.push(TokenVertex {
                name: v.name.clone(),
                vtype: v.vtype.clone(),
                combiner: v.combiner,
                parent: query.parent(i),
                predicates,
            });
        }
    }
    Ok(tokens)
}

impl PartyToken {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn children(&self, v: usize) -> Vec<usize> {
        (0..self.vertices.len()).filter(|&c| self.vertices[c].parent == Some(v)).collect()
    }

    pub fn bfs_order(&self) -> Vec<usize> {
        let mut order = vec![self.start];
        let mut i = 0;
        while i < order.len() {
            order.extend(self.children(order[i]));
            i += 1;
        }
        order
    }

    pub fn shape(&self) -> TokenShape {
        TokenShape {
            start: self.start,
            vertices: self
                .vertices
                .iter()
                .map(|v| {
                    (
                        v.name.clone(),
                        v.vtype.clone(),
                        v.combiner,
                        v.parent,
                        v.predicates.iter().map(|p| (p.attr.clone(), p.kind())).collect(),
                    )
                })
                .collect(),
        }
    }

    fn check(&self) -> Result<()> {
        let n = self.vertices.len();
        if n == 0 || self.start >= n || self.vertices[self.start].parent.is_some() {
            return Err(Error::codec("token has no valid root"));
        }
        for (i, v) in self.vertices.iter().enumerate() {
            if i != self.start && !matches!(v.parent, Some(p) if p < n && p != i) {
                return Err(Error::codec(format!("token vertex {} has a bad parent", v.name)));
            }
            if v.predicates.is_empty() {
                return Err(Error::codec(format!("token vertex {} has no predicates", v.name)));
            }
        }
        if self.bfs_order().len() != n {
            return Err(Error::codec("token structure is not a tree"));
        }
        Ok(())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new();
        w.bytes(TOKEN_MAGIC).u16(TOKEN_VERSION).u8(self.party.number());
        w.u32(self.vertices.len() as u32).u32(self.start as u32);
        for v in &self.vertices {
            w.str(&v.name).str(&v.vtype);
            w.u8(match v.combiner {
                Combiner::All => 0,
                Combiner::Any => 1,
            });
            w.u32(v.parent.map_or(0, |p| p as u32 + 1));
            w.u32(v.predicates.len() as u32);
            for p in &v.predicates {
                w.str(&p.attr);
                p.keys[0].write(&mut w);
                p.keys[1].write(&mut w);
            }
        }
        w.finish()
    }

    /// Parses a token file. `expected` rejects a token issued to another
    /// party.
    pub fn from_bytes(bytes: &[u8], expected: Option<PartyId>) -> Result<Self> {
        let mut r = Reader::new(bytes);
        r.expect_magic(TOKEN_MAGIC)?;
        let version = r.u16()?;
        if version != TOKEN_VERSION {
            return Err(Error::codec(format!("unsupported token version {version}")));
        }
        let party = PartyId::new(r.u8()?)?;
        if let Some(e) = expected {
            if e != party {
                return Err(Error::PartyMismatch { expected: e.number(), actual: party.number() });
            }
        }
        let n = r.u32()? as usize;
        let start = r.u32()? as usize;
        if n > r.remaining() {
            return Err(Error::codec("vertex count exceeds file size"));
        }
        let mut vertices = Vec::with_capacity(n);
        for _ in 0..n {
            let name = r.str()?;
            let vtype = r.str()?;
            let combiner = match r.u8()? {
                0 => Combiner::All,
                1 => Combiner::Any,
                c => return Err(Error::codec(format!("bad combiner {c}"))),
            };
            let parent = r.u32()?.checked_sub(1).map(|p| p as usize);
            let np = r.u32()? as usize;
            if np > r.remaining() {
                return Err(Error::codec("predicate count exceeds file size"));
            }
            let mut predicates = Vec::with_capacity(np);
            for _ in 0..np {
                let attr = r.str()?;
                let keys = [PredicateKey::read(&mut r)?, PredicateKey::read(&mut r)?];
                if keys[0].kind() != keys[1].kind() || keys[0].domain_bits() != keys[1].domain_bits() {
                    return Err(Error::codec("token key halves disagree"));
                }
                predicates.push(TokenPredicate { attr, keys });
            }
            vertices.push(TokenVertex { name, vtype, combiner, parent, predicates });
        }
        r.finish()?;
        let token = PartyToken { party, start, vertices };
        token.check()?;
        Ok(token)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_bytes())?;
        Ok(())
    }

    pub fn load(path: &Path, expected: Option<PartyId>) -> Result<Self> {
        Self::from_bytes(&fs::read(path)?, expected)
    }
}
