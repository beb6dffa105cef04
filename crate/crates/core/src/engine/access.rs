use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::graph::EncryptedGraphShare;
use crate::net::Party;
use crate::rss::{open_many, reshare, select_sum_local, SharedBitVector};
use crate::shuffle::{sec_shuffle_many, MatchTable};

/// Per-party row layouts that depend only on the stored graph, built once
/// per query.
#[derive(Default)]
pub struct AccessCache {
    postings: HashMap<(usize, usize), Vec<SharedBitVector>>,
    attrs: HashMap<(usize, Vec<usize>), Vec<SharedBitVector>>,
}

impl AccessCache {
    /// Row `c` is vertex `c`'s padded list toward `nt`, zero-extended to the
    /// longest list of its type.
    fn posting_rows(&mut self, graph: &EncryptedGraphShare, t: usize, nt: usize) -> Result<&[SharedBitVector]> {
        if !self.postings.contains_key(&(t, nt)) {
            let me = graph.party;
            let l_max = graph.schema.types[t].max_posting_len(nt);
            let x = graph.schema.types[nt].population;
            let rows = graph.vertices[t]
                .iter()
                .map(|v| {
                    let mut row = SharedBitVector::concat(me, v.postings[nt].iter())?;
                    row.append(&SharedBitVector::zeros(me, l_max * x - row.len()))?;
                    Ok(row)
                })
                .collect::<Result<Vec<_>>>()?;
            self.postings.insert((t, nt), rows);
        }
        Ok(&self.postings[&(t, nt)])
    }

    /// Row `x` is vertex `x`'s attributes `attrs`, concatenated.
    pub(crate) fn attr_rows(&mut self, graph: &EncryptedGraphShare, t: usize, attrs: &[usize]) -> Result<&[SharedBitVector]> {
        let key = (t, attrs.to_vec());
        if !self.attrs.contains_key(&key) {
            let me = graph.party;
            let rows = graph.vertices[t]
                .iter()
                .map(|v| SharedBitVector::concat(me, attrs.iter().map(|&a| &v.attrs[a])))
                .collect::<Result<Vec<_>>>()?;
            self.attrs.insert(key.clone(), rows);
        }
        Ok(&self.attrs[&key])
    }
}

/// For each matched vertex of type `t` (given by its shared one-hot ID),
/// returns its real neighbors of type `nt` as rows `id ‖ attrs`, in shuffled
/// order. Dummy list entries are dropped after a shuffle, so only the count
/// of real neighbors is revealed.
pub fn sec_access(
    party: &mut Party,
    graph: &EncryptedGraphShare,
    cache: &mut AccessCache,
    t: usize,
    ids: &[SharedBitVector],
    nt: usize,
    attrs: &[usize],
) -> Result<Vec<Vec<SharedBitVector>>> {
    let types = &graph.schema.types;
    if t >= types.len() || nt >= types.len() {
        return Err(Error::Schema(format!("vertex type {} out of range", t.max(nt))));
    }
    if let Some(&a) = attrs.iter().find(|&&a| a >= types[nt].attributes.len()) {
        return Err(Error::Schema(format!("attribute {a} out of range for type {}", types[nt].name)));
    }
    let pop = types[t].population;
    if let Some(id) = ids.iter().find(|id| id.len() != pop) {
        return Err(Error::LengthMismatch { expected: pop, actual: id.len() });
    }
    let l_max = types[t].max_posting_len(nt);
    let x = types[nt].population;
    if ids.is_empty() || l_max == 0 || x == 0 {
        return Ok(vec![Vec::new(); ids.len()]);
    }
    let me = party.id();

    // Posting lists of every matched vertex, selected in one round.
    let rows = cache.posting_rows(graph, t, nt)?;
    let parts = ids
        .iter()
        .map(|id| select_sum_local(id, rows.iter().map(Some), l_max * x))
        .collect::<Result<Vec<_>>>()?;
    let lists = reshare(party, &parts)?;

    let tables = lists
        .iter()
        .map(|l| MatchTable::new(l.split(&vec![x; l_max])?, x))
        .collect::<Result<Vec<_>>>()?;
    let shuffled = sec_shuffle_many(party, tables)?;

    // A real entry has exactly one bit set, a dummy none.
    let flags = shuffled
        .iter()
        .map(|t| {
            let mut f = SharedBitVector::zeros(me, 0);
            for r in &t.rows {
                f.append(&r.parity())?;
            }
            Ok(f)
        })
        .collect::<Result<Vec<_>>>()?;
    let opened = open_many(party, &flags.iter().collect::<Vec<_>>())?;
    let kept: Vec<Vec<SharedBitVector>> = shuffled
        .into_iter()
        .zip(&opened)
        .map(|(t, bits)| t.rows.into_iter().zip(bits.iter()).filter(|(_, y)| *y).map(|(r, _)| r).collect())
        .collect();

    let attr_rows = cache.attr_rows(graph, nt, attrs)?;
    let width = attr_rows.first().map_or(0, SharedBitVector::len);
    let parts = kept
        .iter()
        .flatten()
        .map(|id| select_sum_local(id, attr_rows.iter().map(Some), width))
        .collect::<Result<Vec<_>>>()?;
    let mut fetched = reshare(party, &parts)?.into_iter();
    kept.into_iter()
        .map(|ns| {
            ns.into_iter()
                .map(|id| SharedBitVector::concat(me, [&id, &fetched.next().expect("one fetch per neighbor")]))
                .collect()
        })
        .collect()
}
