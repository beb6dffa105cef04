//! The binary, end to end.

mod common;

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use common::data;

fn oblivgm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_oblivgm")).args(args).output().expect("run binary")
}

fn ok(args: &[&str]) -> String {
    let out = oblivgm(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn social_pipeline_matches_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let (enc, tok, res) = (dir.path().join("enc"), dir.path().join("tok"), dir.path().join("res"));
    let (graph, query) = (data("social.graph"), data("social.query"));
    let stats = ok(&["encrypt", "--graph", s(&graph), "--k", "2", "--out-dir", s(&enc), "--seed", "1", "--verify"]);
    assert!(stats.contains("verify\tok"));
    ok(&["tokenize", "--query", s(&query), "--schema", s(&enc.join("schema.json")), "--out-dir", s(&tok), "--seed", "2"]);
    let out = oblivgm(&[
        "serve", "--local-trio", "--graph-dir", s(&enc), "--token-dir", s(&tok), "--out-dir", s(&res), "--seed", "3",
    ]);
    assert!(out.status.success());
    let progress = String::from_utf8(out.stderr).unwrap();
    assert!(progress.lines().any(|l| l.starts_with("[party-2] hop p1: 3 candidates")), "{progress}");
    let opened = ok(&[
        "open", "--results", s(&res.join("result1.bin")), s(&res.join("result2.bin")), "--schema", s(&enc.join("schema.json")),
    ]);
    assert_eq!(opened, "u=U1 p1=P1 c1=C1 p2=P3 c2=C2\nu=U1 p1=P2 c1=C1 p2=P3 c2=C2\n");
    assert_eq!(ok(&["oracle", "--graph", s(&graph), "--query", s(&query)]), opened);

    // `query` over loopback TCP lands on the same answer.
    let tcp = dir.path().join("tcp");
    ok(&["query", "--token-dir", s(&tok), "--graph-dir", s(&enc), "--out-dir", s(&tcp), "--tcp", "--seed", "3"]);
    assert_eq!(fs::read(tcp.join("result3.bin")).unwrap(), fs::read(res.join("result3.bin")).unwrap());
}

#[test]
fn seeded_commands_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let graph = data("social.graph");
    for d in ["a", "b"] {
        ok(&["encrypt", "--graph", s(&graph), "--out-dir", s(&dir.path().join(d)), "--seed", "0xbeef"]);
    }
    for f in ["party1.share", "party2.share", "party3.share", "schema.json"] {
        assert_eq!(fs::read(dir.path().join("a").join(f)).unwrap(), fs::read(dir.path().join("b").join(f)).unwrap());
    }
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let graph = data("social.graph");
    let code = |args: &[&str]| oblivgm(args).status.code().unwrap();
    // k larger than the smallest type.
    assert_eq!(code(&["encrypt", "--graph", s(&graph), "--k", "4", "--out-dir", s(dir.path())]), 2);
    assert_eq!(code(&["encrypt", "--graph", "/nonexistent", "--out-dir", s(dir.path())]), 2);
    assert_eq!(code(&["frobnicate"]), 2);
    let enc = dir.path().join("enc");
    ok(&["encrypt", "--graph", s(&graph), "--out-dir", s(&enc), "--seed", "1"]);
    let bad = dir.path().join("bad.query");
    fs::write(&bad, "Q u U place = Paris\n").unwrap();
    assert_eq!(code(&["tokenize", "--query", s(&bad), "--schema", s(&enc.join("schema.json")), "--out-dir", s(dir.path())]), 2);
    // A token of the wrong kind is rejected before any networking.
    let out = oblivgm(&[
        "serve", "--party", "1", "--graph-share", s(&enc.join("party1.share")),
        "--token", s(&enc.join("party1.share")), "--out", s(&dir.path().join("r")),
    ]);
    assert_eq!(out.status.code(), Some(2));
    // Peers that never show up are a protocol failure.
    let tok = dir.path().join("tok");
    ok(&["tokenize", "--query", s(&data("social.query")), "--schema", s(&enc.join("schema.json")), "--out-dir", s(&tok)]);
    let out = Command::new(env!("CARGO_BIN_EXE_oblivgm"))
        .env("OBLIVGM_BIND", "127.0.0.1:0")
        .env("OBLIVGM_PEERS", "1=127.0.0.1:9,2=127.0.0.1:9,3=127.0.0.1:9")
        .args(["serve", "--party", "1", "--graph-share", s(&enc.join("party1.share"))])
        .args(["--token", s(&tok.join("token1.bin")), "--out", s(&dir.path().join("r")), "--timeout-secs", "1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn bench_subprotocols_reports_interval_at_twice_equality() {
    let out = ok(&["bench", "--suite", "subprotocols", "--candidates", "64"]);
    let bytes = |step: &str| -> u64 {
        let line = out.lines().find(|l| l.split('\t').nth(1) == Some(step)).unwrap();
        line.split('\t').nth(4).unwrap().parse().unwrap()
    };
    assert_eq!(out.lines().next().unwrap(), "suite\tstep\tsize\trounds\tbytes\topened_bits\tms");
    assert_eq!(bytes("eval in[]"), 2 * bytes("eval ="));
    assert_eq!(bytes("eval <"), bytes("eval ="));
}
