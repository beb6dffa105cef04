use crate::error::{Error, Result};
use crate::fss::PredicateKey;
use crate::net::Party;
use crate::query::Combiner;
use crate::rss::{and_gate, reshare, BitVector, SharedBitVector};

/// How `ANY` combines predicate bits.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum AnyMode {
    /// `x ∨ y`, computed as `x ⊕ y ⊕ (x ∧ y)`.
    #[default]
    Or,
    /// `x ⊕ y`. Equals OR only when at most one predicate holds.
    Xor,
}

/// Additive shares of the predicate bit for every candidate, one vector per
/// key component. `attrs` are the candidates' shared one-hot values.
pub fn eval_local(keys: &[PredicateKey; 2], attrs: &[SharedBitVector]) -> Result<Vec<BitVector>> {
    let n = match attrs.first() {
        Some(a) => a.len(),
        None => return Ok(vec![BitVector::zeros(0); keys[0].kind().components()]),
    };
    if let Some(a) = attrs.iter().find(|a| a.len() != n) {
        return Err(Error::LengthMismatch { expected: n, actual: a.len() });
    }
    let domain = 1usize << keys[0].domain_bits();
    if n > domain || keys[1].domain_bits() != keys[0].domain_bits() {
        return Err(Error::LengthMismatch { expected: domain, actual: n });
    }
    let first = keys[0].component_evals(n)?;
    let second = keys[1].component_evals(n)?;
    Ok(first
        .iter()
        .zip(&second)
        .map(|(e1, e2)| {
            let bits: Vec<bool> = attrs
                .iter()
                .map(|d| e1.and_parity(d.own()) ^ e2.and_parity(d.next()))
                .collect();
            BitVector::from_bits(&bits)
        })
        .collect())
}

/// Shared predicate bits for all candidates. Each key component is
/// re-shared in its own round, so an interval costs twice an equality test.
pub fn sec_eval(party: &mut Party, keys: &[PredicateKey; 2], attrs: &[SharedBitVector]) -> Result<SharedBitVector> {
    let me = party.id();
    let mut out = SharedBitVector::zeros(me, attrs.len());
    for part in eval_local(keys, attrs)? {
        let shared = reshare(party, std::slice::from_ref(&part))?;
        out.xor_assign(&shared[0])?;
    }
    Ok(out)
}

/// Folds several predicate bit vectors into one.
pub fn combine_predicates(
    party: &mut Party,
    bits: &[SharedBitVector],
    combiner: Combiner,
    any_mode: AnyMode,
) -> Result<SharedBitVector> {
    let (first, rest) = bits.split_first().ok_or(Error::EmptyInput("no predicate bits to combine"))?;
    let mut acc = first.clone();
    for b in rest {
        acc = match (combiner, any_mode) {
            (Combiner::All, _) => and_gate(party, &acc, b)?,
            (Combiner::Any, AnyMode::Xor) => acc.xor(b)?,
            (Combiner::Any, AnyMode::Or) => {
                let both = and_gate(party, &acc, b)?;
                acc.xor(b)?.xor(&both)?
            }
        };
    }
    Ok(acc)
}
