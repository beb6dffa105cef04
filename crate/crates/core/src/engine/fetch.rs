use std::ops::Range;

use crate::error::{Error, Result};
use crate::net::Party;
use crate::rss::{open_many, reshare, select_sum_local, SharedBitVector};
use crate::shuffle::{sec_shuffle_many, MatchTable};

fn check(x: &SharedBitVector, rows: &[SharedBitVector], groups: &[Range<usize>]) -> Result<usize> {
    if x.len() != rows.len() {
        return Err(Error::LengthMismatch { expected: rows.len(), actual: x.len() });
    }
    if groups.iter().any(|g| g.end > rows.len() || g.start > g.end) {
        return Err(Error::Invalid("fetch group out of range".into()));
    }
    let width = rows.first().map_or(0, SharedBitVector::len);
    if let Some(r) = rows.iter().find(|r| r.len() != width) {
        return Err(Error::LengthMismatch { expected: width, actual: r.len() });
    }
    Ok(width)
}

/// Unique-match fetch: per group, `⊕_c row_c ⊗ x_c`. Reconstructs to the
/// single matching row, or to all zeros when nothing matched. One round for
/// all groups; nothing is opened.
pub fn sec_fetch_unique(
    party: &mut Party,
    x: &SharedBitVector,
    rows: &[SharedBitVector],
    groups: &[Range<usize>],
) -> Result<Vec<SharedBitVector>> {
    let width = check(x, rows, groups)?;
    let parts = groups
        .iter()
        .map(|g| select_sum_local(&x.slice(g.start, g.len()), rows[g.clone()].iter().map(Some), width))
        .collect::<Result<Vec<_>>>()?;
    reshare(party, &parts)
}

/// Multi-match fetch: per group, shuffle the rows `x_c ‖ row_c`, open the
/// shuffled flags and keep the rows whose flag is 1, in shuffled order.
pub fn sec_fetch_multi(
    party: &mut Party,
    x: &SharedBitVector,
    rows: &[SharedBitVector],
    groups: &[Range<usize>],
) -> Result<Vec<Vec<SharedBitVector>>> {
    let width = check(x, rows, groups)?;
    let me = party.id();
    let tables = groups
        .iter()
        .map(|g| {
            let table_rows = g
                .clone()
                .map(|c| SharedBitVector::concat(me, [&x.slice(c, 1), &rows[c]]))
                .collect::<Result<Vec<_>>>()?;
            MatchTable::new(table_rows, width + 1)
        })
        .collect::<Result<Vec<_>>>()?;
    let shuffled = sec_shuffle_many(party, tables)?;
    let flags = shuffled
        .iter()
        .map(|t| SharedBitVector::concat(me, t.rows.iter().map(|r| r.slice(0, 1)).collect::<Vec<_>>().iter()))
        .collect::<Result<Vec<_>>>()?;
    let opened = open_many(party, &flags.iter().collect::<Vec<_>>())?;
    Ok(shuffled
        .into_iter()
        .zip(opened)
        .map(|(t, bits)| {
            t.rows
                .into_iter()
                .zip(bits.iter())
                .filter(|(_, keep)| *keep)
                .map(|(r, _)| r.slice(1, width))
                .collect()
        })
        .collect())
}
