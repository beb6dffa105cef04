//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::collections::BTreeSet;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use common::{data, deal, rng};
use oblivgm::engine::{open_results, sec_eval, sec_fetch_multi, sec_match_local, EngineConfig, OpenedSubgraph};
use oblivgm::fss::{domain_bits_for, Predicate, PredicateKind};
use oblivgm::graph::{encrypt_graph, AttributedGraph, Schema};
use oblivgm::net::{run_local_trio, Party, PartyConfig};
use oblivgm::oracle::oracle_match;
use oblivgm::query::{gen_token, Combiner, PredicateSpec, QueryGraph};
use oblivgm::rss::{and_many, reconstruct, BitVector, PartyId, SharedBitVector};
use oblivgm::shuffle::{composed_permutation, pairwise_seeds, sec_shuffle, MatchTable};
use oblivgm::workload::{random_graph, random_query, GraphParams};
use rand::Rng;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn opened_ids(res: &[oblivgm::engine::MatchResultSet], enc: &oblivgm::graph::EncryptedGraph) -> Result<Vec<Vec<String>>, String> {
    Ok(open_results(res, &enc.sidecar).map_err(err)?.iter().map(OpenedSubgraph::ext_ids).collect())
}

fn oracle_equivalence() -> Outcome {
    let mut r = rng(101);
    let (mut done, mut nonempty) = (0, 0);
    let mut kinds = BTreeSet::new();
    let start = Instant::now();
    while done < 50 {
        let params = GraphParams {
            vertices: r.gen_range(100..=300),
            types: r.gen_range(2..=3),
            dict: (16, 256),
            ..GraphParams::default()
        };
        let g = random_graph(&params, &mut r).map_err(err)?;
        let Some(q) = random_query(&g, 5, &mut r) else { continue };
        for v in &q.vertices {
            for p in &v.predicates {
                kinds.insert(match p.kind {
                    PredicateKind::Equal => "=",
                    PredicateKind::Interval { .. } => "interval",
                    _ => "one-sided",
                });
            }
        }
        let enc = encrypt_graph(&g, 2, &mut r).map_err(err)?;
        let tokens = gen_token(&q, &enc.sidecar.schema, &mut r).map_err(err)?;
        let res = sec_match_local(&enc.shares, &tokens, &EngineConfig::default(), 1, done as u64).map_err(err)?;
        let got = opened_ids(&res, &enc)?;
        let want: Vec<Vec<String>> = oracle_match(&g, &q).map_err(err)?.into_iter().collect();
        ensure!(got == want, "instance {done}: {} vs {} matches for\n{}", got.len(), want.len(), q.to_text());
        nonempty += !want.is_empty() as usize;
        done += 1;
    }
    ensure!(kinds.len() == 3, "predicate mix too narrow: {kinds:?}");
    ensure!(nonempty >= 25, "only {nonempty} of 50 instances had matches");
    Ok(format!("50 instances, {nonempty} non-empty, {:.1} s", start.elapsed().as_secs_f64()))
}

fn social_example_through_cli() -> Outcome {
    let dir = tempfile::tempdir().map_err(err)?;
    let p = |name: &str| dir.path().join(name).to_str().unwrap().to_string();
    let (graph, query) = (data("social.graph"), data("social.query"));
    let (graph, query) = (graph.to_str().unwrap(), query.to_str().unwrap());
    let (enc, tok, res, schema) = (p("enc"), p("tok"), p("res"), p("enc/schema.json"));
    let steps: Vec<Vec<&str>> = vec![
        vec!["encrypt", "--graph", graph, "--k", "2", "--out-dir", &enc, "--seed", "a1"],
        vec!["tokenize", "--query", query, "--schema", &schema, "--out-dir", &tok, "--seed", "a2"],
        vec!["serve", "--local-trio", "--graph-dir", &enc, "--token-dir", &tok, "--out-dir", &res, "--seed", "a3"],
    ];
    let run = |args: &[&str]| -> Result<String, String> {
        let out = Command::new(env!("CARGO_BIN_EXE_oblivgm")).args(args).output().map_err(err)?;
        ensure!(out.status.success(), "{}: {}", args[0], String::from_utf8_lossy(&out.stderr));
        Ok(String::from_utf8_lossy(&out.stdout).into_owned())
    };
    for s in &steps {
        run(s)?;
    }
    let opened = run(&["open", "--results", &p("res/result1.bin"), &p("res/result3.bin"), "--schema", &schema])?;
    let want = "u=U1 p1=P1 c1=C1 p2=P3 c2=C2\nu=U1 p1=P2 c1=C1 p2=P3 c2=C2\n";
    ensure!(opened == want, "open printed:\n{opened}");
    let oracle = run(&["oracle", "--graph", graph, "--query", query])?;
    ensure!(oracle == opened, "oracle printed:\n{oracle}");
    Ok("both expected subgraphs, oracle agrees".into())
}

fn fss_exhaustive() -> Outcome {
    let mut r = rng(103);
    let start = Instant::now();
    let mut checks = 0;
    for _ in 0..100 {
        let bits = r.gen_range(1..=12u8);
        let n = 1u64 << bits;
        let a = r.gen_range(0..n);
        let b = r.gen_range(a..n);
        let preds = [
            Predicate::Equal(a),
            Predicate::Less(a),
            Predicate::LessEq(a),
            Predicate::Greater(a),
            Predicate::GreaterEq(a),
            Predicate::Interval { lower: a, upper: b, lower_closed: r.gen(), upper_closed: r.gen() },
        ];
        for p in preds {
            if p.validate(n).is_err() {
                continue;
            }
            let keys = p.gen_pair(bits, &mut r).map_err(err)?;
            let got = keys[0].full_domain_eval(n as usize).map_err(err)?.xor(&keys[1].full_domain_eval(n as usize).map_err(err)?).map_err(err)?;
            ensure!(got == p.indicator(n as usize), "{p} over 2^{bits}");
            checks += 1;
        }
    }
    // Largest domain at least once for every kind.
    for p in [Predicate::Equal(4095), Predicate::Less(2048), Predicate::GreaterEq(1), Predicate::closed(0, 4095)] {
        let keys = p.gen_pair(12, &mut r).map_err(err)?;
        let got = keys[0].full_domain_eval(4096).map_err(err)?.xor(&keys[1].full_domain_eval(4096).map_err(err)?).map_err(err)?;
        ensure!(got == p.indicator(4096), "{p} over 4096");
        checks += 1;
    }
    ensure!(start.elapsed() < Duration::from_secs(120), "took {:?}", start.elapsed());
    Ok(format!("{checks} full-domain checks, 0 failures"))
}

fn rss_gates() -> Outcome {
    let mut r = rng(104);
    let xs: Vec<BitVector> = (0..10_000).map(|_| BitVector::random(64, &mut r)).collect();
    let ys: Vec<BitVector> = (0..10_000).map(|_| BitVector::random(64, &mut r)).collect();
    let (a, b) = (deal(&xs, 1), deal(&ys, 2));
    let inputs = [0, 1, 2].map(|p| (a[p].clone(), b[p].clone()));
    let out = run_local_trio(PartyConfig::trio(4, 4), inputs, |party, (a, b)| {
        let z = and_many(party, &a.iter().zip(&b).collect::<Vec<_>>())?;
        let zeros = (0..10_000).map(|_| party.zero_share(64)).collect::<oblivgm::Result<Vec<_>>>()?;
        Ok((z, zeros))
    })
    .map_err(err)?;
    for i in 0..xs.len() {
        let z = reconstruct(&[0, 1, 2].map(|p| out[p].0[i].clone())).map_err(err)?;
        ensure!(z == xs[i].and(&ys[i]).map_err(err)?, "AND vector {i}");
        let sum = out[0].1[i].xor(&out[1].1[i]).map_err(err)?.xor(&out[2].1[i]).map_err(err)?;
        ensure!(sum.count_ones() == 0, "zero sharing {i}");
    }
    Ok("10^4 AND vectors, 10^4 zero sharings".into())
}

fn shuffle_checks() -> Outcome {
    let mut r = rng(105);
    for n in 1..=64usize {
        let rows: Vec<BitVector> = (0..n).map(|i| BitVector::from_words(vec![i as u32 * 7 + 1], 16).unwrap()).collect();
        let views = deal(&rows, n as u64);
        let out = run_local_trio(PartyConfig::trio(5, n as u64), views, |party, rows| {
            let seeds = party.shuffle_seeds().clone();
            Ok((sec_shuffle(party, MatchTable::new(rows, 16)?)?, seeds))
        })
        .map_err(err)?;
        let got: Vec<BitVector> =
            (0..n).map(|i| reconstruct(&[0, 1, 2].map(|p| out[p].0.rows[i].clone()))).collect::<oblivgm::Result<_>>().map_err(err)?;
        let mut a: Vec<u32> = got.iter().map(|v| v.words()[0]).collect();
        let mut b: Vec<u32> = rows.iter().map(|v| v.words()[0]).collect();
        // Position check against the seeded reference permutation.
        let (s12, s23, s31) = pairwise_seeds([&out[0].1, &out[1].1, &out[2].1]);
        let perm = composed_permutation(&s12, &s23, &s31, 0, 0, n);
        for (i, &to) in perm.iter().enumerate() {
            ensure!(got[to] == rows[i], "n={n}: row {i} not at {to}");
        }
        a.sort_unstable();
        b.sort_unstable();
        ensure!(a == b, "n={n}: multiset changed");
    }
    let rows: Vec<BitVector> = (0..8).map(|_| BitVector::random(32, &mut r)).collect();
    let order = |seed| -> Result<Vec<BitVector>, String> {
        let out = run_local_trio(PartyConfig::trio(6, seed), deal(&rows, 9), |party, rows| sec_shuffle(party, MatchTable::new(rows, 32)?))
            .map_err(err)?;
        (0..8).map(|i| reconstruct(&[0, 1, 2].map(|p| out[p].rows[i].clone())).map_err(err)).collect()
    };
    ensure!(order(1)? != order(2)?, "two seeds gave one order");
    Ok("sizes 1..=64 exhaustive, reference order, seed divergence".into())
}

fn k_automorphism() -> Outcome {
    let mut r = rng(106);
    let mut trend = Vec::new();
    for round in 0..5 {
        let g = random_graph(&GraphParams { vertices: 240, ..GraphParams::default() }, &mut r).map_err(err)?;
        let mut sizes = Vec::new();
        for k in [2, 4, 6] {
            let (schema, _) = Schema::build(&g, k).map_err(err)?;
            for t in &schema.types {
                for (i, lens) in t.posting_lengths.iter().enumerate() {
                    let peers = t.posting_lengths.iter().enumerate().filter(|(j, l)| *j != i && *l == lens).count();
                    ensure!(peers >= k - 1, "k={k}: {}#{i} has {peers} peers", t.name);
                }
            }
            let enc = encrypt_graph(&g, k, &mut r).map_err(err)?;
            let bytes: usize = enc.shares.iter().map(|s| s.to_bytes().map(|b| b.len())).sum::<oblivgm::Result<usize>>().map_err(err)?;
            sizes.push(bytes);
        }
        ensure!(sizes.windows(2).all(|w| w[0] <= w[1]), "graph {round}: sizes {sizes:?} not monotone");
        trend.push(sizes);
    }
    Ok(format!("peers >= k-1 everywhere; sizes {:?}", trend[0]))
}

fn token_ratio() -> Outcome {
    let g = AttributedGraph::parse(&common::social_graph()).map_err(err)?;
    let enc = encrypt_graph(&g, 2, &mut rng(107)).map_err(err)?;
    let size = |kind: PredicateKind, ops: &[&str]| -> Result<f64, String> {
        let mut q = QueryGraph::new();
        let a = q.add_vertex("a", "P", vec![PredicateSpec::new("age", kind, ops)], Combiner::All);
        let b = q.add_vertex("b", "P", vec![PredicateSpec::new("age", kind, ops)], Combiner::All);
        q.add_edge(a, b);
        let t = gen_token(&q, &enc.sidecar.schema, &mut rng(108)).map_err(err)?;
        Ok(t.iter().map(|t| t.to_bytes().len()).sum::<usize>() as f64)
    };
    let eq = size(PredicateKind::Equal, &["35"])?;
    let lt = size(PredicateKind::Less, &["35"])?;
    let iv = size(PredicateKind::Interval { lower_closed: true, upper_closed: true }, &["30", "40"])?;
    let ratio = iv / eq;
    ensure!(eq == lt, "equality {eq} vs one-sided {lt}");
    ensure!((1.7..=2.3).contains(&ratio), "interval/equality = {ratio:.3}");
    Ok(format!("interval/equality = {ratio:.3}, = and < both {eq} bytes"))
}

fn eval_bytes() -> Outcome {
    let mut r = rng(109);
    let n = 128usize;
    let attrs: Vec<BitVector> = (0..200).map(|_| BitVector::one_hot(n, r.gen_range(0..n))).collect();
    let attrs = deal(&attrs, 3);
    let bits = domain_bits_for(n);
    let bytes = |p: Predicate| -> Result<u64, String> {
        let keys = oblivgm::fss::FssKeyBundle::generate(&p, bits, &mut rng(110)).map_err(err)?;
        let keys = PartyId::ALL.map(|id| keys.party_keys(id));
        let inputs = [0, 1, 2].map(|i| (&keys[i], &attrs[i]));
        let out = run_local_trio(PartyConfig::trio(7, 7), inputs, |party: &mut Party, (k, a)| {
            let before = party.stats();
            sec_eval(party, k, a)?;
            Ok(party.stats().since(&before).bytes_sent)
        })
        .map_err(err)?;
        Ok(out.iter().sum())
    };
    let eq = bytes(Predicate::Equal(40))?;
    let lt = bytes(Predicate::Less(40))?;
    let iv = bytes(Predicate::closed(30, 40))?;
    ensure!(iv == 2 * eq, "interval {iv} bytes vs equality {eq}");
    ensure!(lt == eq, "one-sided {lt} bytes vs equality {eq}");
    Ok(format!("equality {eq} B, interval {iv} B"))
}

fn pattern_shape() -> Outcome {
    let mut r = rng(111);
    let c = 100usize;
    let ages: Vec<usize> = (0..c).map(|_| r.gen_range(0..128)).collect();
    let mask: Vec<bool> = ages.iter().map(|a| (30..=40).contains(a)).collect();
    let attrs = deal(&ages.iter().map(|&a| BitVector::one_hot(128, a)).collect::<Vec<_>>(), 4);
    let rows = deal(&(0..c).map(|i| BitVector::from_words(vec![i as u32], 8).unwrap()).collect::<Vec<_>>(), 5);
    let run = |seed: u64, key_seed: u64| -> Result<Vec<BitVector>, String> {
        let bundle = oblivgm::fss::FssKeyBundle::generate(&Predicate::closed(30, 40), 7, &mut rng(key_seed)).map_err(err)?;
        let keys = PartyId::ALL.map(|id| bundle.party_keys(id));
        let inputs = [0, 1, 2].map(|i| (&keys[i], &attrs[i], &rows[i]));
        let out = run_local_trio(PartyConfig::trio(8, seed), inputs, |party, (k, a, rows)| {
            party.set_log_opened(true);
            let x: SharedBitVector = sec_eval(party, k, a)?;
            sec_fetch_multi(party, &x, rows, &[0..rows.len()])?;
            Ok(party.opened_log().to_vec())
        })
        .map_err(err)?;
        Ok(out[0].clone())
    };
    let first = run(1, 1)?;
    let second = run(2, 2)?;
    ensure!(first.len() == 1 && second.len() == 1, "fetch should open exactly one flag vector");
    let ones = mask.iter().filter(|&&m| m).count();
    for log in [&first[0], &second[0]] {
        ensure!(log.len() == c && log.count_ones() == ones, "opened {} ones of {}, mask has {ones}", log.count_ones(), log.len());
    }
    ensure!(first[0] != second[0], "opened positions repeated across fresh seeds");

    // Whole query: fresh tokens differ byte-wise, answers agree.
    let g = AttributedGraph::parse(&common::social_graph()).map_err(err)?;
    let enc = encrypt_graph(&g, 2, &mut r).map_err(err)?;
    let q = QueryGraph::parse(&common::social_query()).map_err(err)?;
    let t1 = gen_token(&q, &enc.sidecar.schema, &mut r).map_err(err)?;
    let t2 = gen_token(&q, &enc.sidecar.schema, &mut r).map_err(err)?;
    ensure!((0..3).all(|i| t1[i].to_bytes() != t2[i].to_bytes()), "tokens repeated");
    let a = sec_match_local(&enc.shares, &t1, &EngineConfig::default(), 9, 1).map_err(err)?;
    let b = sec_match_local(&enc.shares, &t2, &EngineConfig::default(), 9, 2).map_err(err)?;
    ensure!(opened_ids(&a, &enc)? == opened_ids(&b, &enc)?, "answers differ");
    Ok(format!("{ones}/{c} flags opened, positions differ, tokens differ"))
}

fn desk_latency() -> Outcome {
    let mut r = rng(112);
    let params = GraphParams { vertices: 5000, types: 3, dict: (64, 64), avg_degree: 4.0, unique_attr: true, missing_rate: 0.0 };
    let g = random_graph(&params, &mut r).map_err(err)?;
    let enc = encrypt_graph(&g, 2, &mut r).map_err(err)?;
    // Two hops deep, four target vertices.
    let q = QueryGraph::parse("Q r T0 a0 < 8\nQ a T1 a0 in[] 0 30\nQ b T2 a1 >= 10\nQ c T1 a1 < 40\nQE r a\nQE a b\nQE r c\n")
        .map_err(err)?;
    let tokens = gen_token(&q, &enc.sidecar.schema, &mut r).map_err(err)?;
    let start = Instant::now();
    let res = sec_match_local(&enc.shares, &tokens, &EngineConfig::default(), 10, 1).map_err(err)?;
    let elapsed = start.elapsed();
    let got = opened_ids(&res, &enc)?;
    let want: Vec<Vec<String>> = oracle_match(&g, &q).map_err(err)?.into_iter().collect();
    ensure!(got == want, "answers differ from the oracle");
    ensure!(elapsed < Duration::from_secs(60), "took {elapsed:?}");
    Ok(format!("{} subgraphs in {:.2} s", got.len(), elapsed.as_secs_f64()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("oracle equivalence on 50 random instances", oracle_equivalence),
        ("worked social example through the CLI", social_example_through_cli),
        ("FSS full-domain correctness", fss_exhaustive),
        ("RSS AND gates and zero sharings", rss_gates),
        ("shuffle multiset, reference order, divergence", shuffle_checks),
        ("k-automorphism peers and size trend", k_automorphism),
        ("token size ratio", token_ratio),
        ("interval evaluation traffic is exactly 2x equality", eval_bytes),
        ("pattern shape", pattern_shape),
        ("desk-scale latency", desk_latency),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(note) => println!("PASS criterion {}: {name} ({note})", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {}: {name}: {why}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
