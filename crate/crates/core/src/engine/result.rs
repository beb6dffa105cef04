use std::fmt;
use std::fs;
use std::path::Path;

use super::matching::{HopReport, PhaseStats};
use crate::codec::{Reader, Writer};
use crate::error::{Error, Result};
use crate::graph::{decode_one_hot, Sidecar};
use crate::rss::{reconstruct, PartyId, SharedBitVector};

const RESULT_MAGIC: &[u8; 4] = b"OGMR";
const RESULT_VERSION: u16 = 1;

/// Matches of one query vertex. Row `s` is `id ‖ attrs` and hangs off slot
/// `parents[s]` of the parent vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlotSet {
    pub name: String,
    pub vtype: String,
    pub attr_names: Vec<String>,
    pub id_width: usize,
    pub attr_widths: Vec<usize>,
    pub parents: Vec<Option<usize>>,
    pub rows: Vec<SharedBitVector>,
}

/// One server's share of a query answer.
#[derive(Clone, Debug)]
pub struct MatchResultSet {
    pub party: PartyId,
    pub start: usize,
    pub parents: Vec<Option<usize>>,
    pub vertices: Vec<SlotSet>,
    /// Each entry picks one slot per query vertex.
    pub subgraphs: Vec<Vec<usize>>,
    /// Not serialized.
    pub hops: Vec<HopReport>,
    /// Not serialized.
    pub phases: PhaseStats,
}

impl MatchResultSet {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new();
        w.bytes(RESULT_MAGIC).u16(RESULT_VERSION).u8(self.party.number());
        w.u32(self.vertices.len() as u32).u32(self.start as u32);
        for (v, parent) in self.vertices.iter().zip(&self.parents) {
            w.str(&v.name).str(&v.vtype).u32(parent.map_or(0, |p| p as u32 + 1));
            w.u32(v.id_width as u32).u32(v.attr_names.len() as u32);
            for (a, width) in v.attr_names.iter().zip(&v.attr_widths) {
                w.str(a).u32(*width as u32);
            }
            w.u32(v.rows.len() as u32);
            for (r, p) in v.rows.iter().zip(&v.parents) {
                w.u32(p.map_or(0, |p| p as u32 + 1));
                r.write_record(&mut w);
            }
        }
        w.u32(self.subgraphs.len() as u32);
        for g in &self.subgraphs {
            for &s in g {
                w.u32(s as u32);
            }
        }
        w.finish()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(bytes);
        r.expect_magic(RESULT_MAGIC)?;
        let version = r.u16()?;
        if version != RESULT_VERSION {
            return Err(Error::codec(format!("unsupported result version {version}")));
        }
        let party = PartyId::new(r.u8()?)?;
        let n = r.u32()? as usize;
        let start = r.u32()? as usize;
        if n > r.remaining() || (n > 0 && start >= n) {
            return Err(Error::codec("bad vertex count"));
        }
        let mut parents = Vec::with_capacity(n);
        let mut vertices = Vec::with_capacity(n);
        for _ in 0..n {
            let name = r.str()?;
            let vtype = r.str()?;
            parents.push(r.u32()?.checked_sub(1).map(|p| p as usize));
            let id_width = r.u32()? as usize;
            let na = r.u32()? as usize;
            if na > r.remaining() {
                return Err(Error::codec("attribute count exceeds file size"));
            }
            let mut attr_names = Vec::with_capacity(na);
            let mut attr_widths = Vec::with_capacity(na);
            for _ in 0..na {
                attr_names.push(r.str()?);
                attr_widths.push(r.u32()? as usize);
            }
            let width = id_width + attr_widths.iter().sum::<usize>();
            let nr = r.u32()? as usize;
            if nr > r.remaining() {
                return Err(Error::codec("row count exceeds file size"));
            }
            let mut slot_parents = Vec::with_capacity(nr);
            let mut rows = Vec::with_capacity(nr);
            for _ in 0..nr {
                slot_parents.push(r.u32()?.checked_sub(1).map(|p| p as usize));
                let row = SharedBitVector::read_record(&mut r)?;
                if row.party() != party || row.len() != width {
                    return Err(Error::codec("result row does not fit its header"));
                }
                rows.push(row);
            }
            vertices.push(SlotSet { name, vtype, attr_names, id_width, attr_widths, parents: slot_parents, rows });
        }
        let ng = r.u32()? as usize;
        if ng.saturating_mul(n).saturating_mul(4) > r.remaining() {
            return Err(Error::codec("subgraph count exceeds file size"));
        }
        let mut subgraphs = Vec::with_capacity(ng);
        for _ in 0..ng {
            let g = (0..n).map(|_| Ok(r.u32()? as usize)).collect::<Result<Vec<_>>>()?;
            if g.iter().zip(&vertices).any(|(&s, v)| s >= v.rows.len()) {
                return Err(Error::codec("subgraph slot out of range"));
            }
            subgraphs.push(g);
        }
        r.finish()?;
        Ok(MatchResultSet { party, start, parents, vertices, subgraphs, hops: Vec::new(), phases: PhaseStats::default() })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_bytes())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_bytes(&fs::read(path)?)
    }

    fn public_view(&self) -> impl PartialEq + '_ {
        (
            self.start,
            &self.parents,
            &self.subgraphs,
            self.vertices
                .iter()
                .map(|v| (&v.name, &v.vtype, &v.attr_names, v.id_width, &v.attr_widths, &v.parents))
                .collect::<Vec<_>>(),
        )
    }
}

/// A matched graph vertex as the querier sees it.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct OpenedVertex {
    pub query_vertex: String,
    pub ext_id: String,
    pub attrs: Vec<(String, Option<String>)>,
}

/// One answer subgraph, in query vertex order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct OpenedSubgraph {
    pub vertices: Vec<OpenedVertex>,
}

impl OpenedSubgraph {
    pub fn ext_ids(&self) -> Vec<String> {
        self.vertices.iter().map(|v| v.ext_id.clone()).collect()
    }
}

impl fmt::Display for OpenedSubgraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.vertices.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{}={}", v.query_vertex, v.ext_id)?;
        }
        Ok(())
    }
}

/// Reconstructs answers from at least two result shares. Subgraphs with an
/// all-zero (dummy) ID anywhere are dropped. Output is sorted.
pub fn open_results(shares: &[MatchResultSet], sidecar: &Sidecar) -> Result<Vec<OpenedSubgraph>> {
    let first = shares.first().ok_or(Error::EmptyInput("no result shares"))?;
    if shares.len() < 2 {
        return Err(Error::Invalid("opening needs result shares from at least two parties".into()));
    }
    if shares.iter().any(|s| s.public_view() != first.public_view()) {
        return Err(Error::Invalid("result shares describe different answers".into()));
    }
    // Decode every slot once.
    let mut decoded: Vec<Vec<Option<OpenedVertex>>> = Vec::with_capacity(first.vertices.len());
    for (v, set) in first.vertices.iter().enumerate() {
        let t = sidecar.schema.type_index(&set.vtype)?;
        let ts = &sidecar.schema.types[t];
        if ts.population != set.id_width {
            return Err(Error::Schema(format!("ID width of {} differs from the sidecar", set.vtype)));
        }
        let mut out = Vec::with_capacity(set.rows.len());
        for s in 0..set.rows.len() {
            let views: Vec<_> = shares.iter().map(|sh| sh.vertices[v].rows[s].clone()).collect();
            let plain = reconstruct(&views)?;
            let Some(id) = decode_one_hot(&plain.slice(0, set.id_width))? else {
                out.push(None);
                continue;
            };
            let mut offset = set.id_width;
            let mut attrs = Vec::with_capacity(set.attr_names.len());
            for (name, &width) in set.attr_names.iter().zip(&set.attr_widths) {
                let value = ts.attr(name)?.decode(&plain.slice(offset, width))?;
                attrs.push((name.clone(), value.map(str::to_owned)));
                offset += width;
            }
            out.push(Some(OpenedVertex { query_vertex: set.name.clone(), ext_id: sidecar.ext_id(t, id).to_owned(), attrs }));
        }
        decoded.push(out);
    }
    let mut answers: Vec<OpenedSubgraph> = first
        .subgraphs
        .iter()
        .filter_map(|g| {
            let vertices = g.iter().enumerate().map(|(v, &s)| decoded[v][s].clone()).collect::<Option<Vec<_>>>()?;
            Some(OpenedSubgraph { vertices })
        })
        .collect();
    answers.sort();
    answers.dedup();
    Ok(answers)
}
