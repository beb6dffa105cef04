//! Encrypt the bundled social graph with k-automorphism padding and write
//! the three share files plus the public schema to a directory.
//!
//!     cargo run --example encrypt_graph -- [OUT_DIR] [K]

use std::path::PathBuf;

use oblivgm::cli::{share_path, sidecar_path};
use oblivgm::graph::{encrypt_graph, AttributedGraph};
use oblivgm::rss::PartyId;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

fn main() -> oblivgm::Result<()> {
    let mut args = std::env::args().skip(1);
    let dir = PathBuf::from(args.next().unwrap_or_else(|| "target/example-enc".into()));
    let k: usize = args.next().map_or(2, |s| s.parse().expect("K must be a number"));
    std::fs::create_dir_all(&dir)?;

    let g = AttributedGraph::parse(include_str!("../data/social.graph"))?;
    let enc = encrypt_graph(&g, k, &mut ChaCha20Rng::from_entropy())?;
    for p in PartyId::ALL {
        enc.shares[p.index()].save(&share_path(&dir, p))?;
    }
    enc.sidecar.save(&sidecar_path(&dir))?;

    println!("{} vertices, {} edges, k = {k}", g.len(), g.edge_count());
    println!("dummy posting entries added: {}", enc.stats.dummies);
    for (t, groups) in &enc.stats.group_sizes {
        println!("type {t}: group sizes {groups:?}");
    }
    println!("wrote {}", dir.display());
    Ok(())
}
