//! Compare the secure engine with the plaintext oracle on random graphs and
//! random tree queries.
//!
//!     cargo run --release --example oracle -- [INSTANCES]

use oblivgm::engine::{open_results, sec_match_local, EngineConfig};
use oblivgm::graph::encrypt_graph;
use oblivgm::oracle::oracle_match;
use oblivgm::query::gen_token;
use oblivgm::workload::{random_graph, random_query, GraphParams};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

fn main() -> oblivgm::Result<()> {
    let instances: u64 = std::env::args().nth(1).map_or(10, |s| s.parse().expect("INSTANCES"));
    let mut rng = ChaCha20Rng::seed_from_u64(2024);
    let mut i = 0;
    while i < instances {
        let g = random_graph(&GraphParams::default(), &mut rng)?;
        let Some(q) = random_query(&g, 4, &mut rng) else { continue };
        let enc = encrypt_graph(&g, 2, &mut rng)?;
        let tokens = gen_token(&q, &enc.sidecar.schema, &mut rng)?;
        let res = sec_match_local(&enc.shares, &tokens, &EngineConfig::default(), 1, i)?;
        let secure: Vec<Vec<String>> = open_results(&res, &enc.sidecar)?.iter().map(|m| m.ext_ids()).collect();
        let plain: Vec<Vec<String>> = oracle_match(&g, &q)?.into_iter().collect();
        let verdict = if secure == plain { "agree" } else { "DISAGREE" };
        println!("instance {i}: {} vertices in query, {} matches, {verdict}", q.len(), plain.len());
        assert_eq!(secure, plain);
        i += 1;
    }
    Ok(())
}
