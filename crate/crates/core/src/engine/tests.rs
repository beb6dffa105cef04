use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use super::*;
use crate::fss::Predicate;
use crate::graph::{encrypt_graph, AttributedGraph, EncryptedGraph};
use crate::net::{run_local_trio, PartyConfig};
use crate::oracle::oracle_match;
use crate::query::{gen_token, Combiner, QueryGraph};
use crate::rss::{reconstruct, share, BitVector, PartyId, SharedBitVector};
use crate::workload::{random_graph, random_query, GraphParams};

const SOCIAL_GRAPH: &str = include_str!("../../data/social.graph");
const SOCIAL_QUERY: &str = include_str!("../../data/social.query");

fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// Shares every vector of `plain` and hands party `i` its views.
fn deal(plain: &[BitVector], seed: u64) -> [Vec<SharedBitVector>; 3] {
    let mut r = rng(seed);
    let mut out: [Vec<SharedBitVector>; 3] = Default::default();
    for v in plain {
        for (p, s) in share(v, &mut r).unwrap().into_iter().enumerate() {
            out[p].push(s);
        }
    }
    out
}

fn one_hot(i: usize, n: usize) -> BitVector {
    BitVector::one_hot(n, i)
}

fn recon(views: [SharedBitVector; 3]) -> BitVector {
    reconstruct(&views).unwrap()
}

#[test]
fn eval_matches_plaintext_filter() {
    let mut r = rng(1);
    let ages: Vec<usize> = (0..100).map(|_| r.gen_range(0..128)).collect();
    let attrs = deal(&ages.iter().map(|&a| one_hot(a, 128)).collect::<Vec<_>>(), 2);
    let pred = Predicate::closed(30, 40);
    let bundle = crate::fss::FssKeyBundle::generate(&pred, 7, &mut r).unwrap();
    let keys = PartyId::ALL.map(|p| bundle.party_keys(p));
    let inputs = [0, 1, 2].map(|i| (&keys[i], &attrs[i]));
    let out = run_local_trio(PartyConfig::trio(1, 3), inputs, |party, (k, a)| {
        let before = party.stats().opened_bits;
        let x = sec_eval(party, k, a)?;
        assert_eq!(party.stats().opened_bits, before, "evaluation opens nothing");
        Ok(x)
    })
    .unwrap();
    let mask: Vec<bool> = ages.iter().map(|&a| (30..=40).contains(&a)).collect();
    assert_eq!(recon(out), BitVector::from_bits(&mask));
}

#[test]
fn combiner_truth_tables() {
    let plain = [BitVector::from_bits(&[true, true, false, false]), BitVector::from_bits(&[true, false, true, false])];
    let views = deal(&plain, 4);
    let run = |c: Combiner, m: AnyMode| {
        recon(run_local_trio(PartyConfig::trio(2, 5), views.clone(), |party, v| combine_predicates(party, &v, c, m)).unwrap())
    };
    assert_eq!(run(Combiner::All, AnyMode::Or), BitVector::from_bits(&[true, false, false, false]));
    assert_eq!(run(Combiner::Any, AnyMode::Or), BitVector::from_bits(&[true, true, true, false]));
    assert_eq!(run(Combiner::Any, AnyMode::Xor), BitVector::from_bits(&[false, true, true, false]));
    let single = run_local_trio(PartyConfig::trio(2, 5), views.clone(), |party, v| {
        combine_predicates(party, &v[..1], Combiner::All, AnyMode::Or)
    })
    .unwrap();
    assert_eq!(recon(single), plain[0]);
    let none = run_local_trio(PartyConfig::trio(2, 5), views, |party, _| {
        combine_predicates(party, &[], Combiner::All, AnyMode::Or)
    });
    assert!(matches!(none, Err(crate::Error::EmptyInput(_))));
}

fn rows_and_flags(flags: &[bool], seed: u64) -> (Vec<BitVector>, [(SharedBitVector, Vec<SharedBitVector>); 3]) {
    let mut r = rng(seed);
    let rows: Vec<BitVector> = (0..flags.len()).map(|_| BitVector::random(20, &mut r)).collect();
    let x = share(&BitVector::from_bits(flags), &mut r).unwrap();
    let rv = deal(&rows, seed + 1);
    let [x0, x1, x2] = x;
    let [r0, r1, r2] = rv;
    (rows, [(x0, r0), (x1, r1), (x2, r2)])
}

#[test]
fn unique_fetch_selects_or_zeroes() {
    let (rows, inputs) = rows_and_flags(&[false, false, true, false], 6);
    let out = run_local_trio(PartyConfig::trio(3, 1), inputs.clone(), |party, (x, r)| {
        sec_fetch_unique(party, &x, &r, &[0..4, 0..2])
    })
    .unwrap();
    let [a, b, c] = out;
    assert_eq!(recon([a[0].clone(), b[0].clone(), c[0].clone()]), rows[2]);
    assert_eq!(recon([a[1].clone(), b[1].clone(), c[1].clone()]), BitVector::zeros(20));
}

#[test]
fn multi_fetch_keeps_exactly_the_matches() {
    for flags in [vec![true, false, true, false, false], vec![false; 5], vec![true; 5]] {
        let (rows, inputs) = rows_and_flags(&flags, 9);
        let out = run_local_trio(PartyConfig::trio(4, 2), inputs, |party, (x, r)| {
            sec_fetch_multi(party, &x, &r, &[0..5])
        })
        .unwrap();
        let [a, b, c] = out;
        let mut got: Vec<_> = (0..a[0].len())
            .map(|i| recon([a[0][i].clone(), b[0][i].clone(), c[0][i].clone()]).to_bytes())
            .collect();
        let mut want: Vec<_> = rows.iter().zip(&flags).filter(|(_, f)| **f).map(|(r, _)| r.to_bytes()).collect();
        got.sort();
        want.sort();
        assert_eq!(got, want);
    }
}

fn social() -> (AttributedGraph, EncryptedGraph) {
    let g = AttributedGraph::parse(SOCIAL_GRAPH).unwrap();
    let enc = encrypt_graph(&g, 2, &mut rng(11)).unwrap();
    (g, enc)
}

#[test]
fn access_drops_dummies_and_fetches_attributes() {
    let (g, enc) = social();
    let schema = &enc.sidecar.schema;
    let (u, p) = (schema.type_index("U").unwrap(), schema.type_index("P").unwrap());
    // U1 has three persons, U2 one padded up to three.
    assert_eq!(schema.types[u].max_posting_len(p), 3);
    let age = schema.types[p].attr_index("age").unwrap();
    let ids = deal(&[one_hot(0, 2), one_hot(1, 2)], 12);
    let inputs = [0, 1, 2].map(|i| (&enc.shares[i], &ids[i]));
    let out = run_local_trio(PartyConfig::trio(5, 3), inputs, |party, (share, ids)| {
        let mut cache = AccessCache::default();
        sec_access(party, share, &mut cache, u, ids, p, &[age])
    })
    .unwrap();
    let ages = &schema.types[p].attributes[age];
    for (m, ext) in [(0, "U1"), (1, "U2")] {
        let mut got: Vec<(String, String)> = (0..out[0][m].len())
            .map(|i| {
                let plain = recon([0, 1, 2].map(|q| out[q][m][i].clone()));
                let id = crate::graph::decode_one_hot(&plain.slice(0, 4)).unwrap().unwrap();
                let a = ages.decode(&plain.slice(4, ages.domain())).unwrap().unwrap();
                (enc.sidecar.ext_id(p, id).to_string(), a.to_string())
            })
            .collect();
        got.sort();
        let gi = g.lookup(ext).unwrap();
        let mut want: Vec<(String, String)> = g
            .posting_list(gi, "P")
            .into_iter()
            .map(|n| (g.vertex(n).ext_id.clone(), g.vertex(n).attrs["age"].clone()))
            .collect();
        want.sort();
        assert_eq!(got, want, "neighbors of {ext}");
    }
}

fn run_query(enc: &EncryptedGraph, q: &QueryGraph, seed: u64, config: EngineConfig) -> Vec<Vec<String>> {
    let tokens = gen_token(q, &enc.sidecar.schema, &mut rng(seed)).unwrap();
    let res = sec_match_local(&enc.shares, &tokens, &config, 6, seed).unwrap();
    let opened = open_results(&res, &enc.sidecar).unwrap();
    let mut ids: Vec<_> = opened.iter().map(OpenedSubgraph::ext_ids).collect();
    ids.sort();
    ids
}

#[test]
fn social_example_yields_two_subgraphs() {
    let (g, enc) = social();
    let q = QueryGraph::parse(SOCIAL_QUERY).unwrap();
    let got = run_query(&enc, &q, 13, EngineConfig::default());
    let want = vec![
        vec!["U1", "P1", "C1", "P3", "C2"].into_iter().map(String::from).collect::<Vec<_>>(),
        vec!["U1", "P2", "C1", "P3", "C2"].into_iter().map(String::from).collect(),
    ];
    assert_eq!(got, want);
    assert_eq!(oracle_match(&g, &q).unwrap().into_iter().collect::<Vec<_>>(), want);
}

#[test]
fn unsatisfiable_root_gives_nothing() {
    let (_, enc) = social();
    let q = QueryGraph::parse("Q u U place = Beijing\nQ p P age < 20\nQE u p\n").unwrap();
    assert!(run_query(&enc, &q, 14, EngineConfig::default()).is_empty());
}

#[test]
fn matches_oracle_on_random_instances() {
    let mut r = rng(15);
    let params = GraphParams { vertices: 90, dict: (16, 40), ..GraphParams::default() };
    let mut checked = 0;
    while checked < 6 {
        let g = random_graph(&params, &mut r).unwrap();
        let Some(q) = random_query(&g, 4, &mut r) else { continue };
        let enc = encrypt_graph(&g, 2, &mut r).unwrap();
        let want: Vec<Vec<String>> = oracle_match(&g, &q).unwrap().into_iter().collect();
        assert_eq!(run_query(&enc, &q, checked, EngineConfig::default()), want, "query:\n{}", q.to_text());
        checked += 1;
    }
}

#[test]
fn result_file_round_trip_and_tamper() {
    let (_, enc) = social();
    let q = QueryGraph::parse(SOCIAL_QUERY).unwrap();
    let tokens = gen_token(&q, &enc.sidecar.schema, &mut rng(16)).unwrap();
    let res = sec_match_local(&enc.shares, &tokens, &EngineConfig::default(), 7, 1).unwrap();
    let back: Vec<_> = res.iter().map(|r| MatchResultSet::from_bytes(&r.to_bytes()).unwrap()).collect();
    assert_eq!(open_results(&back[..2], &enc.sidecar).unwrap(), open_results(&res, &enc.sidecar).unwrap());
    assert!(open_results(&back[..1], &enc.sidecar).is_err());

    // Flip one bit of a matched ID in the share the other two don't replicate.
    let mut bad = back.clone();
    let slot = bad[0].subgraphs[0][1];
    let row = &mut bad[0].vertices[1].rows[slot];
    let plain = reconstruct(&[0, 1, 2].map(|p| res[p].vertices[1].rows[slot].clone())).unwrap();
    let hot = (0..4).find(|&i| !plain.get(i)).unwrap();
    let mut own = row.own().clone();
    own.set(hot, !own.get(hot));
    *row = SharedBitVector::new(PartyId::ALL[0], own, row.next().clone()).unwrap();
    assert!(open_results(&[bad[0].clone(), bad[1].clone()], &enc.sidecar).is_err());
}

#[test]
fn opened_flags_in_fetch_are_the_match_mask() {
    let flags = [true, false, false, true, true, false, false, false];
    let (_, inputs) = rows_and_flags(&flags, 20);
    let out = run_local_trio(PartyConfig::trio(8, 4), inputs, |party, (x, r)| {
        party.set_log_opened(true);
        sec_fetch_multi(party, &x, &r, &[0..8])?;
        Ok(party.opened_log().to_vec())
    })
    .unwrap();
    let log = &out[0];
    assert_eq!(log.len(), 1);
    assert_eq!(log[0].count_ones(), 3);
    assert_eq!(log[0].len(), 8);
}
