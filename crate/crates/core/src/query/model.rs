use std::collections::VecDeque;
use std::fmt::{self, Write as _};

use crate::error::{Error, Result};
use crate::fss::{Predicate, PredicateKind};
use crate::graph::Schema;

/// How the predicates on one target vertex combine.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Combiner {
    #[default]
    All,
    Any,
}

/// A predicate with operands still in plaintext value space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PredicateSpec {
    pub attr: String,
    pub kind: PredicateKind,
    pub operands: Vec<String>,
}

impl PredicateSpec {
    pub fn new(attr: &str, kind: PredicateKind, operands: &[&str]) -> Self {
        PredicateSpec {
            attr: attr.to_string(),
            kind,
            operands: operands.iter().map(|s| s.to_string()).collect(),
        }
    }

    /// Maps operands to dictionary indices.
    pub fn resolve(&self, schema: &Schema, vtype: &str) -> Result<Predicate> {
        let attr = schema.vtype(vtype)?.attr(&self.attr)?;
        let want = if self.kind.is_interval() { 2 } else { 1 };
        if self.operands.len() != want {
            return Err(Error::Query(format!(
                "{} on {vtype}.{} takes {want} operand(s), got {}",
                self.kind,
                self.attr,
                self.operands.len()
            )));
        }
        if self.kind != PredicateKind::Equal && !attr.ordinal {
            return Err(Error::Query(format!(
                "range predicate on {vtype}.{} needs an ordinal attribute",
                self.attr
            )));
        }
        let idx = |s: &str| {
            attr.index_of(s)
                .map(|i| i as u64)
                .map_err(|_| Error::Query(format!("operand {s:?} is outside the dictionary of {vtype}.{}", self.attr)))
        };
        let a = idx(&self.operands[0])?;
        let p = match self.kind {
            PredicateKind::Equal => Predicate::Equal(a),
            PredicateKind::Less => Predicate::Less(a),
            PredicateKind::LessEq => Predicate::LessEq(a),
            PredicateKind::Greater => Predicate::Greater(a),
            PredicateKind::GreaterEq => Predicate::GreaterEq(a),
            PredicateKind::Interval { lower_closed, upper_closed } => Predicate::Interval {
                lower: a,
                upper: idx(&self.operands[1])?,
                lower_closed,
                upper_closed,
            },
        };
        p.validate(attr.domain() as u64)
            .map_err(|e| Error::Query(format!("{vtype}.{}: {e}", self.attr)))?;
        Ok(p)
    }
}

impl fmt::Display for PredicateSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.attr, self.kind, self.operands.join(" "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TargetVertex {
    pub name: String,
    pub vtype: String,
    pub predicates: Vec<PredicateSpec>,
    pub combiner: Combiner,
}

/// A rooted-tree query. Vertex 0 need not be the root; `start` names it.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct QueryGraph {
    pub vertices: Vec<TargetVertex>,
    /// `(parent, child)` pairs.
    pub edges: Vec<(usize, usize)>,
    pub start: usize,
}

impl QueryGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_vertex(&mut self, name: &str, vtype: &str, predicates: Vec<PredicateSpec>, combiner: Combiner) -> usize {
        self.vertices.push(TargetVertex {
            name: name.to_string(),
            vtype: vtype.to_string(),
            predicates,
            combiner,
        });
        self.vertices.len() - 1
    }

    pub fn add_edge(&mut self, parent: usize, child: usize) {
        self.edges.push((parent, child));
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.vertices
            .iter()
            .position(|v| v.name == name)
            .ok_or_else(|| Error::Query(format!("unknown query vertex {name:?}")))
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.edges.iter().find(|e| e.1 == v).map(|e| e.0)
    }

    pub fn children(&self, v: usize) -> Vec<usize> {
        self.edges.iter().filter(|e| e.0 == v).map(|e| e.1).collect()
    }

    /// Checks that the query is a tree rooted at `start` and every vertex has
    /// at least one predicate.
    pub fn validate(&self) -> Result<()> {
        let n = self.vertices.len();
        if n == 0 {
            return Err(Error::Query("query has no vertices".into()));
        }
        if self.start >= n {
            return Err(Error::Query("start vertex out of range".into()));
        }
        for (i, v) in self.vertices.iter().enumerate() {
            if v.predicates.is_empty() {
                return Err(Error::Query(format!("vertex {} has no predicates", v.name)));
            }
            if self.vertices[..i].iter().any(|o| o.name == v.name) {
                return Err(Error::Query(format!("duplicate vertex name {}", v.name)));
            }
        }
        let mut parents = vec![0usize; n];
        for &(p, c) in &self.edges {
            if p >= n || c >= n || p == c {
                return Err(Error::Query(format!("bad edge ({p}, {c})")));
            }
            parents[c] += 1;
        }
        if parents[self.start] != 0 {
            return Err(Error::Query("start vertex has a parent".into()));
        }
        if let Some(v) = (0..n).find(|&v| v != self.start && parents[v] != 1) {
            return Err(Error::Query(format!(
                "vertex {} must have exactly one parent, has {}",
                self.vertices[v].name, parents[v]
            )));
        }
        if self.bfs_order().len() != n {
            return Err(Error::Query("query is not connected to its start vertex".into()));
        }
        Ok(())
    }

    /// Vertices in breadth-first order from `start`, children in edge order.
    pub fn bfs_order(&self) -> Vec<usize> {
        let mut seen = vec![false; self.vertices.len()];
        let mut order = Vec::new();
        let mut queue = VecDeque::from([self.start]);
        while let Some(v) = queue.pop_front() {
            if v >= seen.len() || std::mem::replace(&mut seen[v], true) {
                continue;
            }
            order.push(v);
            queue.extend(self.children(v));
        }
        order
    }

    /// Validates against a schema and resolves every predicate.
    pub fn resolve(&self, schema: &Schema) -> Result<Vec<Vec<(usize, Predicate)>>> {
        self.validate()?;
        self.vertices
            .iter()
            .map(|v| {
                let ts = schema.vtype(&v.vtype).map_err(|e| Error::Query(e.to_string()))?;
                v.predicates
                    .iter()
                    .map(|p| {
                        let a = ts.attr_index(&p.attr).map_err(|e| Error::Query(e.to_string()))?;
                        Ok((a, p.resolve(schema, &v.vtype)?))
                    })
                    .collect()
            })
            .collect()
    }

    /// Parses the line format:
    ///
    /// ```text
    /// Q <name> <type> <attr> <op> <operand> [<operand>]
    /// ANY <name>
    /// START <name>
    /// QE <parent> <child>
    /// ```
    ///
    /// `op` is one of `=`, `<`, `<=`, `>`, `>=`, `in[]`, `in[)`, `in(]`,
    /// `in()`. Repeating `Q` for a name adds a predicate. Without `START`
    /// the first vertex is the root.
    pub fn parse(text: &str) -> Result<Self> {
        let mut q = QueryGraph::new();
        let mut start: Option<usize> = None;
        let mut edges: Vec<(usize, String, String)> = Vec::new();
        let mut any: Vec<(usize, String)> = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = n + 1;
            let err = |message: String| Error::Parse { line, message };
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let f: Vec<&str> = body.split_whitespace().collect();
            match f[0] {
                "Q" => {
                    if f.len() < 6 {
                        return Err(err("expected `Q <name> <type> <attr> <op> <operand>...`".into()));
                    }
                    let kind = parse_op(f[4]).ok_or_else(|| err(format!("unknown operator {:?}", f[4])))?;
                    let spec = PredicateSpec::new(f[3], kind, &f[5..]);
                    let want = if kind.is_interval() { 2 } else { 1 };
                    if spec.operands.len() != want {
                        return Err(err(format!("{kind} takes {want} operand(s)")));
                    }
                    match q.vertices.iter_mut().find(|v| v.name == f[1]) {
                        Some(v) if v.vtype != f[2] => {
                            return Err(err(format!("vertex {} redeclared with type {}", f[1], f[2])));
                        }
                        Some(v) => v.predicates.push(spec),
                        None => {
                            q.add_vertex(f[1], f[2], vec![spec], Combiner::All);
                        }
                    }
                }
                "ANY" if f.len() == 2 => any.push((line, f[1].to_string())),
                "START" if f.len() == 2 => {
                    if start.is_some() {
                        return Err(err("START given twice".into()));
                    }
                    start = Some(line);
                    edges.push((line, String::new(), f[1].to_string()));
                }
                "QE" if f.len() == 3 => edges.push((line, f[1].to_string(), f[2].to_string())),
                _ => return Err(err(format!("unrecognised line {body:?}"))),
            }
        }
        for (line, name) in any {
            let i = q.index_of(&name).map_err(|e| Error::Parse { line, message: e.to_string() })?;
            q.vertices[i].combiner = Combiner::Any;
        }
        for (line, p, c) in edges {
            let lookup = |s: &str| q.index_of(s).map_err(|e| Error::Parse { line, message: e.to_string() });
            if p.is_empty() {
                q.start = lookup(&c)?;
            } else {
                let (p, c) = (lookup(&p)?, lookup(&c)?);
                q.add_edge(p, c);
            }
        }
        q.validate()?;
        Ok(q)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for v in &self.vertices {
            for p in &v.predicates {
                let _ = writeln!(out, "Q {} {} {} {} {}", v.name, v.vtype, p.attr, p.kind, p.operands.join(" "));
            }
            if v.combiner == Combiner::Any {
                let _ = writeln!(out, "ANY {}", v.name);
            }
        }
        if let Some(v) = self.vertices.get(self.start) {
            let _ = writeln!(out, "START {}", v.name);
        }
        for &(p, c) in &self.edges {
            let _ = writeln!(out, "QE {} {}", self.vertices[p].name, self.vertices[c].name);
        }
        out
    }
}

pub fn parse_op(s: &str) -> Option<PredicateKind> {
    Some(match s {
        "=" | "==" => PredicateKind::Equal,
        "<" => PredicateKind::Less,
        "<=" => PredicateKind::LessEq,
        ">" => PredicateKind::Greater,
        ">=" => PredicateKind::GreaterEq,
        "in[]" => PredicateKind::Interval { lower_closed: true, upper_closed: true },
        "in[)" => PredicateKind::Interval { lower_closed: true, upper_closed: false },
        "in(]" => PredicateKind::Interval { lower_closed: false, upper_closed: true },
        "in()" => PredicateKind::Interval { lower_closed: false, upper_closed: false },
        _ => return None,
    })
}
