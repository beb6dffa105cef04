use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vertex {
    pub vtype: String,
    pub ext_id: String,
    pub attrs: BTreeMap<String, String>,
}

/// An optional `A` line: dictionary and flags for one attribute.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AttrDecl {
    pub vtype: String,
    pub attr: String,
    pub unique: bool,
    pub ordinal: bool,
    /// Admissible values in dictionary order, if declared explicitly.
    pub values: Option<Vec<String>>,
}

/// Plaintext attributed graph with undirected edges. Every vertex has one
/// type; external IDs are unique across the whole graph.
#[derive(Clone, Debug, Default)]
pub struct AttributedGraph {
    vertices: Vec<Vertex>,
    by_ext: HashMap<String, usize>,
    adjacency: Vec<BTreeSet<usize>>,
    decls: Vec<AttrDecl>,
}

impl AttributedGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_vertex<I, K, V>(&mut self, vtype: &str, ext_id: &str, attrs: I) -> Result<usize>
    where
        I: IntoIterator<Item = (K, V)>,
        K: Into<String>,
        V: Into<String>,
    {
        check_token(vtype, "vertex type")?;
        check_token(ext_id, "vertex id")?;
        if self.by_ext.contains_key(ext_id) {
            return Err(Error::Schema(format!("duplicate vertex id {ext_id:?}")));
        }
        let mut map = BTreeMap::new();
        for (k, v) in attrs {
            let (k, v) = (k.into(), v.into());
            check_token(&k, "attribute name")?;
            check_token(&v, "attribute value")?;
            if map.insert(k.clone(), v).is_some() {
                return Err(Error::Schema(format!("vertex {ext_id:?} repeats attribute {k:?}")));
            }
        }
        let idx = self.vertices.len();
        self.vertices.push(Vertex {
            vtype: vtype.to_string(),
            ext_id: ext_id.to_string(),
            attrs: map,
        });
        self.by_ext.insert(ext_id.to_string(), idx);
        self.adjacency.push(BTreeSet::new());
        Ok(idx)
    }

    /// Adds an undirected edge. Repeated edges collapse into one.
    pub fn add_edge(&mut self, a: &str, b: &str) -> Result<()> {
        let ia = self.lookup(a)?;
        let ib = self.lookup(b)?;
        if ia == ib {
            return Err(Error::Schema(format!("self loop on {a:?}")));
        }
        self.adjacency[ia].insert(ib);
        self.adjacency[ib].insert(ia);
        Ok(())
    }

    pub fn declare(&mut self, decl: AttrDecl) -> Result<()> {
        if self.decls.iter().any(|d| d.vtype == decl.vtype && d.attr == decl.attr) {
            return Err(Error::Schema(format!(
                "attribute {}.{} declared twice",
                decl.vtype, decl.attr
            )));
        }
        self.decls.push(decl);
        Ok(())
    }

    pub fn declarations(&self) -> &[AttrDecl] {
        &self.decls
    }

    pub fn declaration(&self, vtype: &str, attr: &str) -> Option<&AttrDecl> {
        self.decls.iter().find(|d| d.vtype == vtype && d.attr == attr)
    }

    pub fn lookup(&self, ext_id: &str) -> Result<usize> {
        self.by_ext
            .get(ext_id)
            .copied()
            .ok_or_else(|| Error::Schema(format!("unknown vertex id {ext_id:?}")))
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertex(&self, i: usize) -> &Vertex {
        &self.vertices[i]
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.adjacency[i].iter().copied()
    }

    /// Neighbors of vertex `i` with type `vtype`, in insertion order of the
    /// neighbors.
    pub fn posting_list(&self, i: usize, vtype: &str) -> Vec<usize> {
        self.neighbors(i).filter(|&n| self.vertices[n].vtype == vtype).collect()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(BTreeSet::len).sum::<usize>() / 2
    }

    /// Vertex types in order of first appearance.
    pub fn types(&self) -> Vec<String> {
        let mut seen = Vec::<String>::new();
        for v in &self.vertices {
            if !seen.contains(&v.vtype) {
                seen.push(v.vtype.clone());
            }
        }
        for d in &self.decls {
            if !seen.contains(&d.vtype) {
                seen.push(d.vtype.clone());
            }
        }
        seen
    }

    /// Global indices of the vertices of one type, in order of appearance.
    /// The position in this list is the vertex's one-hot ID index.
    pub fn vertices_of_type(&self, vtype: &str) -> Vec<usize> {
        (0..self.vertices.len()).filter(|&i| self.vertices[i].vtype == vtype).collect()
    }

    /// Parses the line format:
    ///
    /// ```text
    /// # comment
    /// A <type> <attr> [unique] [ordinal] [values=v1,v2,...|range=lo..hi]
    /// V <type> <ext-id> <attr>=<value> ...
    /// E <ext-id> <ext-id>
    /// ```
    pub fn parse(text: &str) -> Result<Self> {
        let mut g = AttributedGraph::new();
        for (n, raw) in text.lines().enumerate() {
            let line = n + 1;
            let err = |message: String| Error::Parse { line, message };
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let fields: Vec<&str> = body.split_whitespace().collect();
            match fields[0] {
                "V" => {
                    if fields.len() < 3 {
                        return Err(err("expected `V <type> <id> [attr=value]...`".into()));
                    }
                    let attrs = fields[3..]
                        .iter()
                        .map(|kv| {
                            kv.split_once('=')
                                .filter(|(k, v)| !k.is_empty() && !v.is_empty())
                                .ok_or_else(|| err(format!("expected attr=value, got {kv:?}")))
                        })
                        .collect::<Result<Vec<_>>>()?;
                    g.add_vertex(fields[1], fields[2], attrs).map_err(|e| err(e.to_string()))?;
                }
                "E" => {
                    if fields.len() != 3 {
                        return Err(err("expected `E <id> <id>`".into()));
                    }
                    g.add_edge(fields[1], fields[2]).map_err(|e| err(e.to_string()))?;
                }
                "A" => {
                    if fields.len() < 3 {
                        return Err(err("expected `A <type> <attr> [flags]`".into()));
                    }
                    let mut decl = AttrDecl {
                        vtype: fields[1].to_string(),
                        attr: fields[2].to_string(),
                        ..AttrDecl::default()
                    };
                    for f in &fields[3..] {
                        match *f {
                            "unique" => decl.unique = true,
                            "ordinal" => decl.ordinal = true,
                            _ if f.starts_with("values=") => {
                                let vals: Vec<String> =
                                    f["values=".len()..].split(',').map(str::to_string).collect();
                                if vals.iter().any(String::is_empty) {
                                    return Err(err("empty value in list".into()));
                                }
                                decl.values = Some(vals);
                            }
                            _ if f.starts_with("range=") => {
                                let (lo, hi) = f["range=".len()..]
                                    .split_once("..")
                                    .ok_or_else(|| err(format!("bad range {f:?}")))?;
                                let lo: i64 = lo.parse().map_err(|_| err(format!("bad range {f:?}")))?;
                                let hi: i64 = hi.parse().map_err(|_| err(format!("bad range {f:?}")))?;
                                if lo > hi || hi - lo >= 1 << 20 {
                                    return Err(err(format!("bad range {f:?}")));
                                }
                                decl.values = Some((lo..=hi).map(|v| v.to_string()).collect());
                                decl.ordinal = true;
                            }
                            _ => return Err(err(format!("unknown attribute flag {f:?}"))),
                        }
                    }
                    g.declare(decl).map_err(|e| err(e.to_string()))?;
                }
                other => return Err(err(format!("unknown record type {other:?}"))),
            }
        }
        Ok(g)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for d in &self.decls {
            let _ = write!(out, "A {} {}", d.vtype, d.attr);
            if d.unique {
                out.push_str(" unique");
            }
            if d.ordinal {
                out.push_str(" ordinal");
            }
            if let Some(vals) = &d.values {
                let _ = write!(out, " values={}", vals.join(","));
            }
            out.push('\n');
        }
        for v in &self.vertices {
            let _ = write!(out, "V {} {}", v.vtype, v.ext_id);
            for (k, val) in &v.attrs {
                let _ = write!(out, " {k}={val}");
            }
            out.push('\n');
        }
        for (i, adj) in self.adjacency.iter().enumerate() {
            for &j in adj.iter().filter(|&&j| j > i) {
                let _ = writeln!(out, "E {} {}", self.vertices[i].ext_id, self.vertices[j].ext_id);
            }
        }
        out
    }
}

fn check_token(s: &str, what: &str) -> Result<()> {
    if s.is_empty() || s.chars().any(|c| c.is_whitespace() || c == '=' || c == '#' || c == ',') {
        return Err(Error::Schema(format!("{what} {s:?} is empty or contains a reserved character")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = "\
# two people
A P age range=0..3
V P a age=1 city=x
V P b age=2
V C c
E a b
E a c
E c a
";

    #[test]
    fn parse_and_query() {
        let g = AttributedGraph::parse(SMALL).unwrap();
        assert_eq!(g.len(), 3);
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.types(), vec!["P", "C"]);
        assert_eq!(g.vertices_of_type("P"), vec![0, 1]);
        assert_eq!(g.posting_list(0, "P"), vec![1]);
        assert_eq!(g.posting_list(0, "C"), vec![2]);
        let d = g.declaration("P", "age").unwrap();
        assert!(d.ordinal);
        assert_eq!(d.values.as_ref().unwrap().len(), 4);
    }

    #[test]
    fn text_round_trip() {
        let g = AttributedGraph::parse(SMALL).unwrap();
        let again = AttributedGraph::parse(&g.to_text()).unwrap();
        assert_eq!(again.vertices(), g.vertices());
        assert_eq!(again.edge_count(), 2);
        assert_eq!(again.declarations(), g.declarations());
    }

    #[test]
    fn errors_carry_line_numbers() {
        let e = AttributedGraph::parse("V P a\nE a zz\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }), "{e}");
        assert!(AttributedGraph::parse("V P a\nV Q a\n").is_err());
        assert!(AttributedGraph::parse("V P a x\n").is_err());
        assert!(AttributedGraph::parse("X\n").is_err());
        assert!(AttributedGraph::parse("V P a\nE a a\n").is_err());
    }
}
