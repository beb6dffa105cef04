//! The same match with the three parties talking over loopback TCP.
//! For separate processes use the `serve --party N` subcommand with
//! OBLIVGM_BIND and OBLIVGM_PEERS set.
//!
//!     cargo run --example tcp_trio

use oblivgm::engine::{open_results, sec_match, EngineConfig};
use oblivgm::graph::{encrypt_graph, AttributedGraph};
use oblivgm::net::{run_tcp_trio, PartyConfig};
use oblivgm::query::{gen_token, QueryGraph};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

fn main() -> oblivgm::Result<()> {
    let mut rng = ChaCha20Rng::seed_from_u64(4);
    let g = AttributedGraph::parse(include_str!("../data/social.graph"))?;
    let q = QueryGraph::parse(include_str!("../data/social.query"))?;
    let enc = encrypt_graph(&g, 2, &mut rng)?;
    let tokens = gen_token(&q, &enc.sidecar.schema, &mut rng)?;

    let inputs = [0, 1, 2].map(|i| (&enc.shares[i], &tokens[i]));
    let results = run_tcp_trio(PartyConfig::trio(7, 8), inputs, |party, (graph, token)| {
        let r = sec_match(party, token, graph, &EngineConfig::default())?;
        let s = party.stats();
        println!("party {}: {} rounds, {} bytes sent", party.id().number(), s.rounds, s.bytes_sent);
        Ok(r)
    })?;
    for m in open_results(&results, &enc.sidecar)? {
        println!("{m}");
    }
    Ok(())
}
