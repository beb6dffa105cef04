//! End-to-end match of the bundled social query, three parties in one process.
//!
//!     cargo run --example local_match

use oblivgm::engine::{open_results, sec_match_local, EngineConfig};
use oblivgm::graph::{encrypt_graph, AttributedGraph};
use oblivgm::query::{gen_token, QueryGraph};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

fn main() -> oblivgm::Result<()> {
    let mut rng = ChaCha20Rng::seed_from_u64(1);
    let g = AttributedGraph::parse(include_str!("../data/social.graph"))?;
    let q = QueryGraph::parse(include_str!("../data/social.query"))?;
    let enc = encrypt_graph(&g, 2, &mut rng)?;
    let tokens = gen_token(&q, &enc.sidecar.schema, &mut rng)?;

    let results = sec_match_local(&enc.shares, &tokens, &EngineConfig::default(), 1, 2)?;
    for hop in &results[0].hops {
        println!("hop {}: {} candidates, {} matched ({:?})", hop.vertex, hop.candidates, hop.matched, hop.case);
    }
    let p = &results[0].phases;
    println!("bytes sent by party 1: eval {}, fetch {}, access {}", p.eval.comm.bytes_sent, p.fetch.comm.bytes_sent, p.access.comm.bytes_sent);
    // Any two of the three result shares suffice.
    for m in open_results(&results[..2], &enc.sidecar)? {
        println!("{m}");
    }
    Ok(())
}
