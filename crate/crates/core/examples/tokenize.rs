//! Turn a query into three per-server tokens and show what a server can see:
//! the tree shape and predicate kinds, never the operands.
//!
//!     cargo run --example tokenize

use oblivgm::graph::{encrypt_graph, AttributedGraph};
use oblivgm::query::{gen_token, QueryGraph};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

fn main() -> oblivgm::Result<()> {
    let mut rng = ChaCha20Rng::seed_from_u64(11);
    let g = AttributedGraph::parse(include_str!("../data/social.graph"))?;
    let schema = encrypt_graph(&g, 2, &mut rng)?.sidecar.schema;
    let q = QueryGraph::parse(include_str!("../data/social.query"))?;
    let tokens = gen_token(&q, &schema, &mut rng)?;

    for t in &tokens {
        println!("token for party {}: {} bytes", t.party.number(), t.to_bytes().len());
    }
    let shape = tokens[0].shape();
    println!("public shape, rooted at {}:", shape.vertices[shape.start].0);
    for (name, vtype, combiner, parent, preds) in &shape.vertices {
        let parent = parent.map_or("-".to_string(), |p| shape.vertices[p].0.clone());
        println!("  {name}: {vtype}, parent {parent}, {combiner:?} of {preds:?}");
    }
    Ok(())
}
