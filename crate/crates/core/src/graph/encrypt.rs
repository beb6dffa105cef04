use std::fs;
use std::path::Path;

use rand::{CryptoRng, Rng};
use serde::{Deserialize, Serialize};

use super::model::AttributedGraph;
use super::schema::{encode_one_hot, PaddingStats, Schema};
use crate::codec::{Reader, Writer};
use crate::error::{Error, Result};
use crate::rss::{reconstruct, share, BitVector, PartyId, SharedBitVector};

const GRAPH_MAGIC: &[u8; 4] = b"OGMG";
const GRAPH_VERSION: u16 = 1;

/// One party's view of an encrypted vertex. The type is public; the ID,
/// attribute values and posting-list entries are shared one-hot vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EncryptedVertex {
    pub vtype: usize,
    pub id: SharedBitVector,
    /// In schema attribute order.
    pub attrs: Vec<SharedBitVector>,
    /// `postings[t]` lists neighbors of type `t`, true entries first, then
    /// all-zero dummies up to the padded length.
    pub postings: Vec<Vec<SharedBitVector>>,
}

/// Everything one party stores for a graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EncryptedGraphShare {
    pub party: PartyId,
    pub schema: Schema,
    /// `vertices[t][i]` is vertex `i` of type `t`.
    pub vertices: Vec<Vec<EncryptedVertex>>,
}

/// Public sidecar: the schema plus external IDs in one-hot index order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sidecar {
    pub schema: Schema,
    /// `directory[t][i]` is the external ID of vertex `i` of type `t`.
    pub directory: Vec<Vec<String>>,
}

impl Sidecar {
    pub fn ext_id(&self, t: usize, i: usize) -> &str {
        &self.directory[t][i]
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let s: Sidecar = serde_json::from_str(&fs::read_to_string(path)?)?;
        s.schema.check()?;
        if s.directory.len() != s.schema.types.len()
            || s.directory.iter().zip(&s.schema.types).any(|(d, t)| d.len() != t.population)
        {
            return Err(Error::Schema("sidecar directory does not match its schema".into()));
        }
        Ok(s)
    }
}

/// Output of graph encryption.
pub struct EncryptedGraph {
    pub sidecar: Sidecar,
    pub shares: [EncryptedGraphShare; 3],
    pub stats: PaddingStats,
}

/// One-hot encodes, pads and secret-shares a plaintext graph.
pub fn encrypt_graph<R: Rng + CryptoRng + ?Sized>(
    graph: &AttributedGraph,
    k: usize,
    rng: &mut R,
) -> Result<EncryptedGraph> {
    let (schema, stats) = Schema::build(graph, k)?;
    let type_members: Vec<Vec<usize>> = schema.types.iter().map(|t| graph.vertices_of_type(&t.name)).collect();
    // global vertex index -> index within its type
    let mut local = vec![0usize; graph.len()];
    for members in &type_members {
        for (i, &g) in members.iter().enumerate() {
            local[g] = i;
        }
    }

    let mut per_party: [Vec<Vec<EncryptedVertex>>; 3] = Default::default();
    for (t, ts) in schema.types.iter().enumerate() {
        let mut rows: [Vec<EncryptedVertex>; 3] = Default::default();
        for (i, &g) in type_members[t].iter().enumerate() {
            let vertex = graph.vertex(g);
            let id = share(&encode_one_hot(i, ts.population)?, rng)?;
            let mut attrs: [Vec<SharedBitVector>; 3] = Default::default();
            for a in &ts.attributes {
                let plain = match vertex.attrs.get(&a.name) {
                    Some(v) => a.encode(v)?,
                    None => BitVector::zeros(a.domain()),
                };
                for (p, s) in share(&plain, rng)?.into_iter().enumerate() {
                    attrs[p].push(s);
                }
            }
            let mut postings: [Vec<Vec<SharedBitVector>>; 3] = Default::default();
            for (nt, nts) in schema.types.iter().enumerate() {
                let padded = ts.posting_lengths[i][nt];
                let mut entries: Vec<BitVector> = graph
                    .posting_list(g, &nts.name)
                    .into_iter()
                    .map(|n| encode_one_hot(local[n], nts.population))
                    .collect::<Result<_>>()?;
                if entries.len() > padded {
                    return Err(Error::Schema("posting list longer than its padded length".into()));
                }
                entries.resize(padded, BitVector::zeros(nts.population));
                let mut lists: [Vec<SharedBitVector>; 3] = Default::default();
                for e in &entries {
                    for (p, s) in share(e, rng)?.into_iter().enumerate() {
                        lists[p].push(s);
                    }
                }
                for (p, l) in lists.into_iter().enumerate() {
                    postings[p].push(l);
                }
            }
            let [a0, a1, a2] = attrs;
            let [p0, p1, p2] = postings;
            for (p, ((id, attrs), postings)) in id.into_iter().zip([a0, a1, a2]).zip([p0, p1, p2]).enumerate() {
                rows[p].push(EncryptedVertex { vtype: t, id, attrs, postings });
            }
        }
        for (p, r) in rows.into_iter().enumerate() {
            per_party[p].push(r);
        }
    }

    let directory = type_members
        .iter()
        .map(|m| m.iter().map(|&g| graph.vertex(g).ext_id.clone()).collect())
        .collect();
    let [v0, v1, v2] = per_party;
    let shares = [v0, v1, v2]
        .into_iter()
        .zip(PartyId::ALL)
        .map(|(vertices, party)| EncryptedGraphShare { party, schema: schema.clone(), vertices })
        .collect::<Vec<_>>()
        .try_into()
        .expect("three parties");
    Ok(EncryptedGraph {
        sidecar: Sidecar { schema, directory },
        shares,
        stats,
    })
}

impl EncryptedGraphShare {
    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let mut w = Writer::new();
        w.bytes(GRAPH_MAGIC).u16(GRAPH_VERSION).u8(self.party.number());
        w.str(&self.schema.to_json()?);
        for vs in &self.vertices {
            for v in vs {
                v.id.write_record(&mut w);
                for a in &v.attrs {
                    a.write_record(&mut w);
                }
                for list in &v.postings {
                    for e in list {
                        e.write_record(&mut w);
                    }
                }
            }
        }
        Ok(w.finish())
    }

    /// Parses a share file, checking every record against the embedded
    /// schema. `expected` rejects a file written for a different party.
    pub fn from_bytes(bytes: &[u8], expected: Option<PartyId>) -> Result<Self> {
        let mut r = Reader::new(bytes);
        r.expect_magic(GRAPH_MAGIC)?;
        let version = r.u16()?;
        if version != GRAPH_VERSION {
            return Err(Error::codec(format!("unsupported graph share version {version}")));
        }
        let party = PartyId::new(r.u8()?)?;
        if let Some(e) = expected {
            if e != party {
                return Err(Error::PartyMismatch { expected: e.number(), actual: party.number() });
            }
        }
        let schema = Schema::from_json(&r.str()?)?;
        let mut read = |width: usize| -> Result<SharedBitVector> {
            let s = SharedBitVector::read_record(&mut r)?;
            if s.party() != party {
                return Err(Error::PartyMismatch { expected: party.number(), actual: s.party().number() });
            }
            if s.len() != width {
                return Err(Error::LengthMismatch { expected: width, actual: s.len() });
            }
            Ok(s)
        };
        let mut vertices = Vec::with_capacity(schema.types.len());
        for (t, ts) in schema.types.iter().enumerate() {
            let mut vs = Vec::with_capacity(ts.population);
            for i in 0..ts.population {
                let id = read(ts.population)?;
                let attrs = ts.attributes.iter().map(|a| read(a.domain())).collect::<Result<_>>()?;
                let postings = schema
                    .types
                    .iter()
                    .enumerate()
                    .map(|(nt, nts)| (0..ts.posting_lengths[i][nt]).map(|_| read(nts.population)).collect())
                    .collect::<Result<_>>()?;
                vs.push(EncryptedVertex { vtype: t, id, attrs, postings });
            }
            vertices.push(vs);
        }
        r.finish()?;
        Ok(EncryptedGraphShare { party, schema, vertices })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_bytes()?)?;
        Ok(())
    }

    pub fn load(path: &Path, expected: Option<PartyId>) -> Result<Self> {
        Self::from_bytes(&fs::read(path)?, expected)
    }
}

/// Plaintext one-hot content of one vertex, as recovered from shares.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlainVertex {
    pub id: BitVector,
    pub attrs: Vec<BitVector>,
    pub postings: Vec<Vec<BitVector>>,
}

/// Reconstructs vertex `i` of type `t` from two or three party shares.
pub fn reconstruct_vertex(views: &[&EncryptedGraphShare], t: usize, i: usize) -> Result<PlainVertex> {
    if views.windows(2).any(|w| w[0].schema != w[1].schema) {
        return Err(Error::Schema("party shares disagree on the schema".into()));
    }
    let pick = |f: &dyn Fn(&EncryptedVertex) -> &SharedBitVector| -> Result<BitVector> {
        let parts: Vec<SharedBitVector> = views.iter().map(|g| f(&g.vertices[t][i]).clone()).collect();
        reconstruct(&parts)
    };
    let first = &views.first().ok_or(Error::EmptyInput("no shares"))?.vertices[t][i];
    let id = pick(&|v| &v.id)?;
    let attrs = (0..first.attrs.len()).map(|a| pick(&|v| &v.attrs[a])).collect::<Result<_>>()?;
    let postings = first
        .postings
        .iter()
        .enumerate()
        .map(|(nt, list)| (0..list.len()).map(|e| pick(&|v| &v.postings[nt][e])).collect())
        .collect::<Result<_>>()?;
    Ok(PlainVertex { id, attrs, postings })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::decode_one_hot;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    const G: &str = "\
V P a age=30
V P b age=35
V P c age=40
V C x field=sw
V C y field=net
E a x
E b x
E c y
E a b
";

    #[test]
    fn single_vertex_round_trip() {
        let g = AttributedGraph::parse("V P a age=3\nV P b age=4\n").unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let enc = encrypt_graph(&g, 2, &mut rng).unwrap();
        let views: Vec<&EncryptedGraphShare> = enc.shares.iter().collect();
        let v = reconstruct_vertex(&views, 0, 0).unwrap();
        let age = enc.sidecar.schema.types[0].attr("age").unwrap();
        assert_eq!(v.attrs[0], age.encode("3").unwrap());
        assert_eq!(v.id, BitVector::one_hot(2, 0));
    }

    #[test]
    fn reconstruction_matches_padded_graph() {
        let g = AttributedGraph::parse(G).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        let enc = encrypt_graph(&g, 2, &mut rng).unwrap();
        let schema = &enc.sidecar.schema;
        let views: Vec<&EncryptedGraphShare> = enc.shares[..2].iter().collect();
        for (t, ts) in schema.types.iter().enumerate() {
            for i in 0..ts.population {
                let v = reconstruct_vertex(&views, t, i).unwrap();
                let gi = g.lookup(enc.sidecar.ext_id(t, i)).unwrap();
                for (nt, nts) in schema.types.iter().enumerate() {
                    let truth: Vec<String> =
                        g.posting_list(gi, &nts.name).iter().map(|&n| g.vertex(n).ext_id.clone()).collect();
                    let list = &v.postings[nt];
                    assert_eq!(list.len(), ts.posting_lengths[i][nt]);
                    let decoded: Vec<Option<usize>> = list.iter().map(|e| decode_one_hot(e).unwrap()).collect();
                    let real: Vec<String> =
                        decoded.iter().flatten().map(|&j| enc.sidecar.ext_id(nt, j).to_string()).collect();
                    assert_eq!(real, truth);
                    assert!(decoded[truth.len()..].iter().all(Option::is_none));
                }
            }
        }
    }

    #[test]
    fn file_round_trip_and_party_check() {
        let g = AttributedGraph::parse(G).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let enc = encrypt_graph(&g, 2, &mut rng).unwrap();
        let bytes = enc.shares[1].to_bytes().unwrap();
        let back = EncryptedGraphShare::from_bytes(&bytes, Some(PartyId::ALL[1])).unwrap();
        assert_eq!(back, enc.shares[1]);
        assert!(EncryptedGraphShare::from_bytes(&bytes, Some(PartyId::ALL[0])).is_err());
        assert!(EncryptedGraphShare::from_bytes(&bytes[..bytes.len() - 3], None).is_err());
        let sizes: Vec<usize> = enc.shares.iter().map(|s| s.to_bytes().unwrap().len()).collect();
        assert!(sizes.iter().all(|&s| s == sizes[0]));
    }
}
