use crate::error::{Error, Result};

/// Outcome of k-automorphism padding for one vertex type.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Padding {
    /// Member indices of each group.
    pub groups: Vec<Vec<usize>>,
    /// Padded length per vertex and neighbor type.
    pub lengths: Vec<Vec<usize>>,
    /// Dummy entries added in total.
    pub dummies: usize,
}

/// Groups vertices of one type so that every group has at least `k` members
/// whose posting lists, per neighbor type, are padded to a common length.
///
/// `lengths[v][t]` is the true length of vertex `v`'s list for neighbor type
/// `t`. Vertices are sorted by total length and cut into consecutive runs of
/// `k`; a short tail joins the last full run.
pub fn pad_k_groups(lengths: &[Vec<usize>], k: usize) -> Result<Padding> {
    if k < 2 {
        return Err(Error::Invalid(format!("k must be at least 2, got {k}")));
    }
    let n = lengths.len();
    if n == 0 {
        return Ok(Padding { groups: vec![], lengths: vec![], dummies: 0 });
    }
    if n < k {
        return Err(Error::Invalid(format!("k = {k} exceeds a type population of {n}")));
    }
    let width = lengths[0].len();
    if lengths.iter().any(|l| l.len() != width) {
        return Err(Error::Invalid("ragged posting-length table".into()));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| (lengths[v].iter().sum::<usize>(), v));
    let full = n / k;
    let mut groups: Vec<Vec<usize>> = order.chunks(k).map(<[usize]>::to_vec).collect();
    if groups.len() > full {
        let tail = groups.pop().expect("tail group");
        groups[full - 1].extend(tail);
    }

    let mut padded = vec![vec![0; width]; n];
    let mut dummies = 0;
    for g in &groups {
        for t in 0..width {
            let max = g.iter().map(|&v| lengths[v][t]).max().unwrap_or(0);
            for &v in g {
                padded[v][t] = max;
                dummies += max - lengths[v][t];
            }
        }
    }
    Ok(Padding { groups, lengths: padded, dummies })
}
