//! Plaintext reference matcher.
//!
//! Enumerates exactly what the secure engine computes: root candidates are
//! all vertices of the root type, children are typed neighbors of the
//! parent's match, sibling slots may reuse a graph vertex, and incomplete
//! branches are dropped.

use std::collections::BTreeSet;

use crate::engine::AnyMode;
use crate::error::{Error, Result};
use crate::fss::Predicate;
use crate::graph::{AttributedGraph, Schema};
use crate::query::{Combiner, QueryGraph};

/// External IDs indexed by query vertex.
pub type PlainMatch = Vec<String>;

struct Ctx<'a> {
    graph: &'a AttributedGraph,
    query: &'a QueryGraph,
    schema: Schema,
    resolved: Vec<Vec<(usize, Predicate)>>,
    children: Vec<Vec<usize>>,
    any_mode: AnyMode,
}

impl Ctx<'_> {
    fn satisfies(&self, q: usize, g: usize) -> Result<bool> {
        let target = &self.query.vertices[q];
        let vertex = self.graph.vertex(g);
        if vertex.vtype != target.vtype {
            return Ok(false);
        }
        let ts = self.schema.vtype(&target.vtype)?;
        let mut bits = self.resolved[q].iter().map(|(a, p)| {
            let attr = &ts.attributes[*a];
            vertex
                .attrs
                .get(&attr.name)
                .and_then(|v| attr.index_of(v).ok())
                .is_some_and(|x| p.matches(x as u64))
        });
        Ok(match (target.combiner, self.any_mode) {
            (Combiner::All, _) => bits.all(|b| b),
            (Combiner::Any, AnyMode::Or) => bits.any(|b| b),
            (Combiner::Any, AnyMode::Xor) => bits.fold(false, |a, b| a ^ b),
        })
    }

    /// Partial assignments for the subtree of `q` rooted at graph vertex `g`.
    fn expand(&self, q: usize, g: usize, partial: Vec<Vec<usize>>) -> Result<Vec<Vec<usize>>> {
        let mut out: Vec<Vec<usize>> = partial
            .into_iter()
            .map(|mut a| {
                a[q] = g;
                a
            })
            .collect();
        for &c in &self.children[q] {
            let ctype = &self.query.vertices[c].vtype;
            let mut next = Vec::new();
            for n in self.graph.posting_list(g, ctype) {
                if self.satisfies(c, n)? {
                    next.extend(self.expand(c, n, out.clone())?);
                }
            }
            out = next;
            if out.is_empty() {
                break;
            }
        }
        Ok(out)
    }
}

/// All matches of `query` in `graph`, with `ANY` read as logical OR.
pub fn oracle_match(graph: &AttributedGraph, query: &QueryGraph) -> Result<BTreeSet<PlainMatch>> {
    oracle_match_with(graph, query, AnyMode::Or)
}

pub fn oracle_match_with(graph: &AttributedGraph, query: &QueryGraph, any_mode: AnyMode) -> Result<BTreeSet<PlainMatch>> {
    query.validate()?;
    let schema = Schema::dictionaries(graph)?;
    let resolved = query.resolve(&schema)?;
    let ctx = Ctx {
        graph,
        query,
        children: (0..query.len()).map(|v| query.children(v)).collect(),
        schema,
        resolved,
        any_mode,
    };
    let mut out = BTreeSet::new();
    for g in graph.vertices_of_type(&query.vertices[query.start].vtype) {
        if ctx.satisfies(query.start, g)? {
            for a in ctx.expand(query.start, g, vec![vec![usize::MAX; query.len()]])? {
                out.insert(a.iter().map(|&i| graph.vertex(i).ext_id.clone()).collect());
            }
        }
    }
    Ok(out)
}

/// Independent per-slot check: types, predicates and parent-child edges.
pub fn validate_match(graph: &AttributedGraph, query: &QueryGraph, m: &PlainMatch, any_mode: AnyMode) -> Result<()> {
    if m.len() != query.len() {
        return Err(Error::LengthMismatch { expected: query.len(), actual: m.len() });
    }
    let schema = Schema::dictionaries(graph)?;
    let ids = m.iter().map(|id| graph.lookup(id)).collect::<Result<Vec<_>>>()?;
    for (q, target) in query.vertices.iter().enumerate() {
        let v = graph.vertex(ids[q]);
        if v.vtype != target.vtype {
            return Err(Error::Invalid(format!("{} is a {}, slot {} wants {}", v.ext_id, v.vtype, target.name, target.vtype)));
        }
        let ts = schema.vtype(&v.vtype)?;
        let mut bits = Vec::new();
        for spec in &target.predicates {
            let p = spec.resolve(&schema, &v.vtype)?;
            let attr = ts.attr(&spec.attr)?;
            bits.push(v.attrs.get(&spec.attr).and_then(|x| attr.index_of(x).ok()).is_some_and(|x| p.matches(x as u64)));
        }
        let ok = match (target.combiner, any_mode) {
            (Combiner::All, _) => bits.iter().all(|&b| b),
            (Combiner::Any, AnyMode::Or) => bits.iter().any(|&b| b),
            (Combiner::Any, AnyMode::Xor) => bits.iter().filter(|&&b| b).count() % 2 == 1,
        };
        if !ok {
            return Err(Error::Invalid(format!("{} fails the predicates of {}", v.ext_id, target.name)));
        }
        if let Some(p) = query.parent(q) {
            if !graph.neighbors(ids[p]).any(|n| n == ids[q]) {
                return Err(Error::Invalid(format!("{} and {} are not adjacent", m[p], m[q])));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    use crate::workload::{random_graph, random_query, GraphParams};

    const SOCIAL_GRAPH: &str = include_str!("../data/social.graph");

    #[test]
    fn unique_equality_finds_one() {
        let g = AttributedGraph::parse(SOCIAL_GRAPH).unwrap();
        let q = QueryGraph::parse("Q u U place = Harbin\n").unwrap();
        let m = oracle_match(&g, &q).unwrap();
        assert_eq!(m.into_iter().collect::<Vec<_>>(), vec![vec!["U1".to_string()]]);
    }

    #[test]
    fn every_match_validates() {
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let params = GraphParams { vertices: 120, ..GraphParams::default() };
        for _ in 0..20 {
            let g = random_graph(&params, &mut rng).unwrap();
            let Some(q) = random_query(&g, 5, &mut rng) else { continue };
            for m in oracle_match(&g, &q).unwrap() {
                validate_match(&g, &q, &m, AnyMode::Or).unwrap();
            }
        }
    }

    #[test]
    fn validator_rejects_non_edges() {
        let g = AttributedGraph::parse(SOCIAL_GRAPH).unwrap();
        let q = QueryGraph::parse("Q u U place = Harbin\nQ p P age in[] 30 40\nQE u p\n").unwrap();
        let ok = vec!["U1".to_string(), "P1".to_string()];
        validate_match(&g, &q, &ok, AnyMode::Or).unwrap();
        let bad = vec!["U1".to_string(), "P4".to_string()];
        assert!(validate_match(&g, &q, &bad, AnyMode::Or).is_err());
    }

    #[test]
    fn widening_a_range_keeps_matches() {
        let g = AttributedGraph::parse(SOCIAL_GRAPH).unwrap();
        let narrow = QueryGraph::parse("Q u U place = Harbin\nQ p P age in[] 31 35\nQE u p\n").unwrap();
        let wide = QueryGraph::parse("Q u U place = Harbin\nQ p P age in[] 30 60\nQE u p\n").unwrap();
        let a = oracle_match(&g, &narrow).unwrap();
        let b = oracle_match(&g, &wide).unwrap();
        assert!(a.is_subset(&b));
        assert_eq!(b.len(), 3);
    }
}
