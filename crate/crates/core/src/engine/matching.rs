use std::ops::Range;
use std::time::{Duration, Instant};

use super::access::{sec_access, AccessCache};
use super::eval::{combine_predicates, sec_eval, AnyMode};
use super::fetch::{sec_fetch_multi, sec_fetch_unique};
use super::result::{MatchResultSet, SlotSet};
use crate::error::{Error, Result};
use crate::fss::PredicateKind;
use crate::graph::EncryptedGraphShare;
use crate::net::{CommStats, Party};
use crate::query::{Combiner, PartyToken};
use crate::rss::SharedBitVector;

#[derive(Clone, Copy, Debug, Default)]
pub struct EngineConfig {
    pub any_mode: AnyMode,
}

/// How a query vertex's matches were pulled out of its candidates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FetchCase {
    /// At most one match per parent slot: selected without opening anything.
    Unique,
    /// Shuffled, flags opened.
    Multi,
}

#[derive(Clone, Debug)]
pub struct HopReport {
    pub vertex: String,
    pub candidates: usize,
    pub matched: usize,
    pub case: FetchCase,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PhaseCost {
    pub comm: CommStats,
    pub time: Duration,
}

/// Cost split across the three stages of every hop.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PhaseStats {
    pub eval: PhaseCost,
    pub fetch: PhaseCost,
    pub access: PhaseCost,
}

struct Meter {
    start: Instant,
    before: CommStats,
}

impl Meter {
    fn start(party: &Party) -> Self {
        Meter { start: Instant::now(), before: party.stats() }
    }

    fn stop(self, party: &Party, into: &mut PhaseCost) {
        let d = party.stats().since(&self.before);
        into.time += self.start.elapsed();
        into.comm.rounds += d.rounds;
        into.comm.frames_sent += d.frames_sent;
        into.comm.bytes_sent += d.bytes_sent;
        into.comm.bytes_received += d.bytes_received;
        into.comm.payload_bits_sent += d.payload_bits_sent;
        into.comm.opened_bits += d.opened_bits;
    }
}

/// Rows `id ‖ attrs` grouped by the parent slot they hang off.
struct Candidates {
    rows: Vec<SharedBitVector>,
    groups: Vec<(Option<usize>, Range<usize>)>,
}

/// Public per-vertex plan derived from the token and schema.
struct Plan {
    vtype: usize,
    id_width: usize,
    /// Distinct attribute indices, in first-use order.
    attrs: Vec<usize>,
    attr_widths: Vec<usize>,
    /// For each predicate, the position of its attribute in `attrs`.
    pred_slots: Vec<usize>,
    unique: bool,
}

fn plan(token: &PartyToken, graph: &EncryptedGraphShare) -> Result<Vec<Plan>> {
    token
        .vertices
        .iter()
        .map(|v| {
            let vtype = graph.schema.type_index(&v.vtype)?;
            let ts = &graph.schema.types[vtype];
            let mut attrs = Vec::new();
            let mut pred_slots = Vec::new();
            let mut unique = false;
            for p in &v.predicates {
                let a = ts.attr_index(&p.attr)?;
                let schema = &ts.attributes[a];
                if p.keys[0].domain_bits() != schema.domain_bits() {
                    return Err(Error::Query(format!(
                        "key for {}.{} has {} domain bits, schema says {}",
                        v.name,
                        p.attr,
                        p.keys[0].domain_bits(),
                        schema.domain_bits()
                    )));
                }
                unique |= schema.unique && p.kind() == PredicateKind::Equal;
                let slot = attrs.iter().position(|&x| x == a).unwrap_or_else(|| {
                    attrs.push(a);
                    attrs.len() - 1
                });
                pred_slots.push(slot);
            }
            let attr_widths = attrs.iter().map(|&a| ts.attributes[a].domain()).collect();
            Ok(Plan {
                vtype,
                id_width: ts.population,
                attrs,
                attr_widths,
                pred_slots,
                unique: unique && v.combiner == Combiner::All,
            })
        })
        .collect()
}

/// Runs a whole query tree. All parties must call this with matching tokens
/// and graph shares; every branch taken depends only on public sizes and
/// opened flags, so the three stay in lockstep.
pub fn sec_match(
    party: &mut Party,
    token: &PartyToken,
    graph: &EncryptedGraphShare,
    config: &EngineConfig,
) -> Result<MatchResultSet> {
    sec_match_with_progress(party, token, graph, config, |_| {})
}

/// Like [`sec_match`], calling `progress` after every hop.
pub fn sec_match_with_progress(
    party: &mut Party,
    token: &PartyToken,
    graph: &EncryptedGraphShare,
    config: &EngineConfig,
    mut progress: impl FnMut(&HopReport),
) -> Result<MatchResultSet> {
    if token.party != party.id() || graph.party != party.id() {
        return Err(Error::PartyMismatch {
            expected: party.id().number(),
            actual: if token.party != party.id() { token.party.number() } else { graph.party.number() },
        });
    }
    let me = party.id();
    let plans = plan(token, graph)?;
    let mut cache = AccessCache::default();
    let mut phases = PhaseStats::default();
    let mut hops = Vec::new();
    let n = token.vertices.len();
    let mut candidates: Vec<Option<Candidates>> = (0..n).map(|_| None).collect();
    let mut slots: Vec<SlotSet> = token
        .vertices
        .iter()
        .zip(&plans)
        .map(|(v, p)| SlotSet {
            name: v.name.clone(),
            vtype: v.vtype.clone(),
            attr_names: p.attrs.iter().map(|&a| graph.schema.types[p.vtype].attributes[a].name.clone()).collect(),
            id_width: p.id_width,
            attr_widths: p.attr_widths.clone(),
            parents: Vec::new(),
            rows: Vec::new(),
        })
        .collect();

    let root = &plans[token.start];
    let attr_rows = cache.attr_rows(graph, root.vtype, &root.attrs)?;
    let rows = graph.vertices[root.vtype]
        .iter()
        .zip(attr_rows)
        .map(|(v, a)| SharedBitVector::concat(me, [&v.id, a]))
        .collect::<Result<Vec<_>>>()?;
    candidates[token.start] = Some(Candidates { groups: vec![(None, 0..rows.len())], rows });

    for v in token.bfs_order() {
        let vertex = &token.vertices[v];
        let p = &plans[v];
        let cand = candidates[v].take().expect("parent visited first");
        let c = cand.rows.len();

        let m = Meter::start(party);
        let mut bits = Vec::with_capacity(vertex.predicates.len());
        for (pred, &slot) in vertex.predicates.iter().zip(&p.pred_slots) {
            let offset = p.id_width + p.attr_widths[..slot].iter().sum::<usize>();
            let attrs: Vec<_> = cand.rows.iter().map(|r| r.slice(offset, p.attr_widths[slot])).collect();
            bits.push(sec_eval(party, &pred.keys, &attrs)?);
        }
        let x = combine_predicates(party, &bits, vertex.combiner, config.any_mode)?;
        m.stop(party, &mut phases.eval);

        let m = Meter::start(party);
        let ranges: Vec<_> = cand.groups.iter().map(|(_, r)| r.clone()).collect();
        let (case, matched) = if p.unique {
            let rows = sec_fetch_unique(party, &x, &cand.rows, &ranges)?;
            (FetchCase::Unique, rows.into_iter().map(|r| vec![r]).collect())
        } else {
            (FetchCase::Multi, sec_fetch_multi(party, &x, &cand.rows, &ranges)?)
        };
        m.stop(party, &mut phases.fetch);
        let set = &mut slots[v];
        for ((parent, _), rows) in cand.groups.iter().zip(matched) {
            for r in rows {
                set.parents.push(*parent);
                set.rows.push(r);
            }
        }
        let report = HopReport { vertex: vertex.name.clone(), candidates: c, matched: set.rows.len(), case };
        progress(&report);
        hops.push(report);

        let ids: Vec<_> = slots[v].rows.iter().map(|r| r.slice(0, p.id_width)).collect();
        for child in token.children(v) {
            let cp = &plans[child];
            let m = Meter::start(party);
            let found = sec_access(party, graph, &mut cache, p.vtype, &ids, cp.vtype, &cp.attrs)?;
            m.stop(party, &mut phases.access);
            let mut rows = Vec::new();
            let mut groups = Vec::new();
            for (slot, ns) in found.into_iter().enumerate() {
                if ns.is_empty() {
                    continue;
                }
                let start = rows.len();
                rows.extend(ns);
                groups.push((Some(slot), start..rows.len()));
            }
            candidates[child] = Some(Candidates { rows, groups });
        }
    }

    let subgraphs = assemble(token, &slots);
    Ok(MatchResultSet { party: me, start: token.start, parents: token.vertices.iter().map(|v| v.parent).collect(), vertices: slots, subgraphs, hops, phases })
}

/// Every complete assignment of one slot per query vertex that respects
/// provenance. Result rows are indexed by query vertex.
fn assemble(token: &PartyToken, slots: &[SlotSet]) -> Vec<Vec<usize>> {
    let n = token.vertices.len();
    let children: Vec<Vec<usize>> = (0..n).map(|v| token.children(v)).collect();

    fn grow(
        v: usize,
        slot: usize,
        children: &[Vec<usize>],
        slots: &[SlotSet],
        partial: Vec<Vec<usize>>,
    ) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = partial
            .into_iter()
            .map(|mut a| {
                a[v] = slot;
                a
            })
            .collect();
        for &c in &children[v] {
            let mut next = Vec::new();
            for (s, parent) in slots[c].parents.iter().enumerate() {
                if *parent == Some(slot) {
                    next.extend(grow(c, s, children, slots, out.clone()));
                }
            }
            out = next;
            if out.is_empty() {
                break;
            }
        }
        out
    }

    let mut all = Vec::new();
    for s in 0..slots[token.start].rows.len() {
        all.extend(grow(token.start, s, &children, slots, vec![vec![usize::MAX; n]]));
    }
    all
}

/// Runs all three parties in-process over the given shares and tokens.
pub fn sec_match_local(
    shares: &[EncryptedGraphShare; 3],
    tokens: &[PartyToken; 3],
    config: &EngineConfig,
    session: u32,
    seed: u64,
) -> Result<[MatchResultSet; 3]> {
    let inputs = [0, 1, 2].map(|i| (&shares[i], &tokens[i]));
    crate::net::run_local_trio(crate::net::PartyConfig::trio(session, seed), inputs, |party, (g, t)| {
        sec_match(party, t, g, config)
    })
}
