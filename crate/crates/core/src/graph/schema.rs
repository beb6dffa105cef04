use serde::{Deserialize, Serialize};

use super::model::AttributedGraph;
use super::pad::pad_k_groups;
use crate::error::{Error, Result};
use crate::fss::domain_bits_for;
use crate::rss::BitVector;

/// One-hot vector with a single set bit at `index`.
pub fn encode_one_hot(index: usize, n: usize) -> Result<BitVector> {
    if index >= n {
        return Err(Error::OutOfDomain { value: index as u64, domain: n as u64 });
    }
    Ok(BitVector::one_hot(n, index))
}

/// Index of the set bit, or `None` for the all-zero dummy.
pub fn decode_one_hot(v: &BitVector) -> Result<Option<usize>> {
    match v.count_ones() {
        0 => Ok(None),
        1 => Ok(v.iter_ones().next()),
        w => Err(Error::NotOneHot(w)),
    }
}

/// Public dictionary and flags for one attribute of one vertex type.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttrSchema {
    pub name: String,
    pub values: Vec<String>,
    /// No two real vertices share a value.
    pub unique: bool,
    /// Dictionary order is the value order, so range predicates make sense.
    pub ordinal: bool,
}

impl AttrSchema {
    pub fn domain(&self) -> usize {
        self.values.len()
    }

    pub fn domain_bits(&self) -> u8 {
        domain_bits_for(self.values.len())
    }

    pub fn index_of(&self, value: &str) -> Result<usize> {
        self.values.iter().position(|v| v == value).ok_or_else(|| {
            Error::Schema(format!("value {value:?} is not in the dictionary of {}", self.name))
        })
    }

    pub fn encode(&self, value: &str) -> Result<BitVector> {
        encode_one_hot(self.index_of(value)?, self.domain())
    }

    pub fn decode(&self, v: &BitVector) -> Result<Option<&str>> {
        if v.len() != self.domain() {
            return Err(Error::LengthMismatch { expected: self.domain(), actual: v.len() });
        }
        Ok(decode_one_hot(v)?.map(|i| self.values[i].as_str()))
    }
}

/// Public layout of one vertex type after padding.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeSchema {
    pub name: String,
    /// Number of real vertices, which is also the one-hot ID width.
    pub population: usize,
    pub attributes: Vec<AttrSchema>,
    /// Padded posting-list length, indexed `[vertex][neighbor type]`.
    pub posting_lengths: Vec<Vec<usize>>,
    /// Padding groups as lists of vertex indices.
    pub groups: Vec<Vec<usize>>,
}

impl TypeSchema {
    pub fn attr_index(&self, name: &str) -> Result<usize> {
        self.attributes
            .iter()
            .position(|a| a.name == name)
            .ok_or_else(|| Error::Schema(format!("type {} has no attribute {name:?}", self.name)))
    }

    pub fn attr(&self, name: &str) -> Result<&AttrSchema> {
        Ok(&self.attributes[self.attr_index(name)?])
    }

    /// Longest padded posting list toward neighbor type `t` over the whole
    /// population.
    pub fn max_posting_len(&self, t: usize) -> usize {
        self.posting_lengths.iter().map(|l| l[t]).max().unwrap_or(0)
    }
}

/// Everything the servers may know about a graph: types, dictionaries, ID
/// widths and padded list lengths.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schema {
    pub k: usize,
    pub types: Vec<TypeSchema>,
}

/// Summary of the padding step.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PaddingStats {
    pub dummies: usize,
    pub real_entries: usize,
    /// Per type: its name and the size of each group.
    pub group_sizes: Vec<(String, Vec<usize>)>,
}

impl Schema {
    /// Builds dictionaries from declarations and observed values, then pads
    /// every type for k-automorphism.
    pub fn build(graph: &AttributedGraph, k: usize) -> Result<(Schema, PaddingStats)> {
        let type_names = graph.types();
        let mut types = Vec::with_capacity(type_names.len());
        let mut stats = PaddingStats::default();
        for name in &type_names {
            let members = graph.vertices_of_type(name);
            let attributes = build_attributes(graph, name, &members)?;
            let lengths: Vec<Vec<usize>> = members
                .iter()
                .map(|&v| type_names.iter().map(|t| graph.posting_list(v, t).len()).collect())
                .collect();
            stats.real_entries += lengths.iter().flatten().sum::<usize>();
            let padding = pad_k_groups(&lengths, k)
                .map_err(|e| Error::Invalid(format!("type {name}: {e}")))?;
            stats.dummies += padding.dummies;
            stats
                .group_sizes
                .push((name.clone(), padding.groups.iter().map(Vec::len).collect()));
            types.push(TypeSchema {
                name: name.clone(),
                population: members.len(),
                attributes,
                posting_lengths: padding.lengths,
                groups: padding.groups,
            });
        }
        Ok((Schema { k, types }, stats))
    }

    /// Dictionaries only, with no padding: enough to resolve query operands
    /// in plaintext.
    pub fn dictionaries(graph: &AttributedGraph) -> Result<Schema> {
        let types = graph
            .types()
            .into_iter()
            .map(|name| {
                let members = graph.vertices_of_type(&name);
                Ok(TypeSchema {
                    attributes: build_attributes(graph, &name, &members)?,
                    population: members.len(),
                    name,
                    posting_lengths: Vec::new(),
                    groups: Vec::new(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Schema { k: 1, types })
    }

    pub fn type_index(&self, name: &str) -> Result<usize> {
        self.types
            .iter()
            .position(|t| t.name == name)
            .ok_or_else(|| Error::Schema(format!("unknown vertex type {name:?}")))
    }

    pub fn vtype(&self, name: &str) -> Result<&TypeSchema> {
        Ok(&self.types[self.type_index(name)?])
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let schema: Schema = serde_json::from_str(s)?;
        schema.check()?;
        Ok(schema)
    }

    /// Internal consistency of a deserialized schema.
    pub fn check(&self) -> Result<()> {
        let nt = self.types.len();
        for t in &self.types {
            if t.posting_lengths.len() != t.population || t.posting_lengths.iter().any(|l| l.len() != nt) {
                return Err(Error::Schema(format!("type {} has a malformed length table", t.name)));
            }
            if t.attributes.iter().any(|a| a.values.is_empty()) {
                return Err(Error::Schema(format!("type {} has an empty dictionary", t.name)));
            }
        }
        Ok(())
    }
}

fn is_integer(s: &str) -> bool {
    s.parse::<i64>().is_ok()
}

fn build_attributes(graph: &AttributedGraph, vtype: &str, members: &[usize]) -> Result<Vec<AttrSchema>> {
    let mut names: Vec<String> = graph
        .declarations()
        .iter()
        .filter(|d| d.vtype == vtype)
        .map(|d| d.attr.clone())
        .collect();
    let mut seen: Vec<String> = members
        .iter()
        .flat_map(|&v| graph.vertex(v).attrs.keys().cloned())
        .filter(|a| !names.contains(a))
        .collect();
    seen.sort();
    seen.dedup();
    names.extend(seen);

    names
        .into_iter()
        .map(|name| {
            let observed: Vec<&str> = members
                .iter()
                .filter_map(|&v| graph.vertex(v).attrs.get(&name).map(String::as_str))
                .collect();
            let decl = graph.declaration(vtype, &name);
            let (values, numeric) = match decl.and_then(|d| d.values.clone()) {
                Some(values) => {
                    if let Some(missing) = observed.iter().find(|o| !values.iter().any(|v| v == *o)) {
                        return Err(Error::Schema(format!(
                            "value {missing:?} of {vtype}.{name} is missing from its declared dictionary"
                        )));
                    }
                    let mut sorted = values.clone();
                    sorted.sort();
                    sorted.dedup();
                    if sorted.len() != values.len() {
                        return Err(Error::Schema(format!("{vtype}.{name} declares a value twice")));
                    }
                    (values, false)
                }
                None => {
                    let mut values: Vec<String> = observed.iter().map(|s| s.to_string()).collect();
                    let numeric = !values.is_empty() && values.iter().all(|v| is_integer(v));
                    if numeric {
                        values.sort_by_key(|v| v.parse::<i64>().expect("checked integer"));
                    } else {
                        values.sort();
                    }
                    values.dedup();
                    (values, numeric)
                }
            };
            let unique = decl.is_some_and(|d| d.unique);
            if unique {
                let mut o = observed.clone();
                o.sort_unstable();
                if o.windows(2).any(|w| w[0] == w[1]) {
                    return Err(Error::Schema(format!("{vtype}.{name} is declared unique but repeats a value")));
                }
            }
            Ok(AttrSchema {
                name,
                values,
                unique,
                ordinal: numeric || decl.is_some_and(|d| d.ordinal),
            })
        })
        .collect()
}
