//! Random attributed graphs and tree queries, for property tests and
//! benchmarks.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::fss::PredicateKind;
use crate::graph::{AttrDecl, AttributedGraph};
use crate::query::{Combiner, PredicateSpec, QueryGraph};
use crate::Result;

#[derive(Clone, Debug)]
pub struct GraphParams {
    pub vertices: usize,
    pub types: usize,
    /// Dictionary size range for the ordinary attribute `a0`.
    pub dict: (usize, usize),
    pub avg_degree: f64,
    /// Give type 0 a unique-valued attribute `uid`, which has a dictionary as
    /// large as the population.
    pub unique_attr: bool,
    pub missing_rate: f64,
}

impl Default for GraphParams {
    fn default() -> Self {
        GraphParams { vertices: 200, types: 3, dict: (16, 256), avg_degree: 4.0, unique_attr: true, missing_rate: 0.03 }
    }
}

pub fn type_name(t: usize) -> String {
    format!("T{t}")
}

/// Every type gets two attributes. Ext IDs look like `T1_17`.
pub fn random_graph<R: Rng + ?Sized>(p: &GraphParams, rng: &mut R) -> Result<AttributedGraph> {
    let mut g = AttributedGraph::new();
    let mut sizes = vec![p.vertices / p.types; p.types];
    sizes[0] += p.vertices % p.types;
    let mut ids: Vec<String> = Vec::with_capacity(p.vertices);
    for (t, &n) in sizes.iter().enumerate() {
        let name = type_name(t);
        let d0 = rng.gen_range(p.dict.0..=p.dict.1);
        let d1 = rng.gen_range(p.dict.0..=p.dict.1);
        let unique = p.unique_attr && t == 0;
        let range = |d: usize| Some((0..d).map(|v| v.to_string()).collect());
        g.declare(AttrDecl { vtype: name.clone(), attr: "a0".into(), unique: false, ordinal: true, values: range(d0) })?;
        let (attr1, d1) = if unique { ("uid", n) } else { ("a1", d1) };
        g.declare(AttrDecl { vtype: name.clone(), attr: attr1.into(), unique, ordinal: true, values: range(d1) })?;
        let mut uids: Vec<usize> = (0..n).collect();
        uids.shuffle(rng);
        for (i, &uid) in uids.iter().enumerate() {
            let id = format!("{name}_{i}");
            let mut attrs = Vec::new();
            if !rng.gen_bool(p.missing_rate) {
                attrs.push(("a0".to_string(), rng.gen_range(0..d0).to_string()));
            }
            if unique || !rng.gen_bool(p.missing_rate) {
                let v = if unique { uid } else { rng.gen_range(0..d1) };
                attrs.push((attr1.to_string(), v.to_string()));
            }
            g.add_vertex(&name, &id, attrs)?;
            ids.push(id);
        }
    }
    let edges = (p.vertices as f64 * p.avg_degree / 2.0).round() as usize;
    for _ in 0..edges {
        let a = ids.choose(rng).expect("non-empty");
        let b = ids.choose(rng).expect("non-empty");
        if a != b {
            g.add_edge(a, b)?;
        }
    }
    Ok(g)
}

fn domain(g: &AttributedGraph, vtype: &str, attr: &str) -> usize {
    g.declaration(vtype, attr).and_then(|d| d.values.as_ref()).map_or(1, Vec::len)
}

/// One predicate that usually holds for `value` (when present).
fn predicate_near<R: Rng + ?Sized>(attr: &str, value: Option<usize>, d: usize, rng: &mut R) -> PredicateSpec {
    let v = match value {
        Some(v) if rng.gen_bool(0.85) => v,
        _ => rng.gen_range(0..d),
    };
    let spread = (d / 8).max(1);
    let s = |x: usize| x.to_string();
    match rng.gen_range(0..6) {
        0 => PredicateSpec::new(attr, PredicateKind::Equal, &[&s(v)]),
        1 if v + 1 < d => PredicateSpec::new(attr, PredicateKind::Less, &[&s((v + rng.gen_range(1..=spread)).min(d - 1))]),
        2 => PredicateSpec::new(attr, PredicateKind::LessEq, &[&s((v + rng.gen_range(0..=spread)).min(d - 1))]),
        3 if v > 0 => PredicateSpec::new(attr, PredicateKind::Greater, &[&s(v.saturating_sub(rng.gen_range(1..=spread)))]),
        4 => PredicateSpec::new(attr, PredicateKind::GreaterEq, &[&s(v.saturating_sub(rng.gen_range(0..=spread)))]),
        _ => {
            let lo = v.saturating_sub(rng.gen_range(0..=spread));
            let hi = (v + rng.gen_range(0..=spread)).min(d - 1);
            let lower_closed = lo == v || rng.gen_bool(0.7);
            let upper_closed = hi == v || rng.gen_bool(0.7);
            PredicateSpec::new(attr, PredicateKind::Interval { lower_closed, upper_closed }, &[&s(lo), &s(hi)])
        }
    }
}

/// A tree query shaped after a random subtree of `g`, with predicates that
/// mostly hold on that subtree. Returns `None` when the walk gets stuck
/// before reaching two vertices.
pub fn random_query<R: Rng + ?Sized>(g: &AttributedGraph, max_vertices: usize, rng: &mut R) -> Option<QueryGraph> {
    let want = rng.gen_range(2..=max_vertices.max(2));
    let root = rng.gen_range(0..g.len());
    let mut anchors = vec![root];
    let mut parents = vec![None];
    for _ in 1..want {
        let options: Vec<(usize, usize)> = anchors
            .iter()
            .enumerate()
            .flat_map(|(q, &a)| g.neighbors(a).map(move |n| (q, n)))
            .collect();
        let &(q, n) = options.choose(rng)?;
        anchors.push(n);
        parents.push(Some(q));
    }
    if anchors.len() < 2 {
        return None;
    }
    let mut query = QueryGraph::new();
    for (q, &a) in anchors.iter().enumerate() {
        let v = g.vertex(a);
        let attrs: Vec<&String> = g.declarations().iter().filter(|d| d.vtype == v.vtype).map(|d| &d.attr).collect();
        let np = if rng.gen_bool(0.3) { 2 } else { 1 };
        let preds = (0..np)
            .map(|_| {
                let attr = *attrs.choose(rng).expect("typed attributes");
                let d = domain(g, &v.vtype, attr);
                let value = v.attrs.get(attr).and_then(|x| x.parse().ok());
                let unique = g.declaration(&v.vtype, attr).is_some_and(|d| d.unique);
                if unique && rng.gen_bool(0.6) {
                    PredicateSpec::new(attr, PredicateKind::Equal, &[&value.unwrap_or(0).to_string()])
                } else {
                    predicate_near(attr, value, d, rng)
                }
            })
            .collect();
        let combiner = if np > 1 && rng.gen_bool(0.4) { Combiner::Any } else { Combiner::All };
        query.add_vertex(&format!("q{q}"), &v.vtype, preds, combiner);
    }
    for (c, p) in parents.iter().enumerate() {
        if let Some(p) = p {
            query.add_edge(*p, c);
        }
    }
    query.validate().ok()?;
    Some(query)
}
