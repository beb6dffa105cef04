//! Shuffle a secret-shared table. No single party knows the permutation;
//! the reference permutation can only be rebuilt from all three seeds.
//!
//!     cargo run --example shuffle

use oblivgm::net::{run_local_trio, PartyConfig};
use oblivgm::rss::{reconstruct, share, BitVector, SharedBitVector};
use oblivgm::shuffle::{composed_permutation, pairwise_seeds, sec_shuffle, MatchTable};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

fn main() -> oblivgm::Result<()> {
    let mut rng = ChaCha20Rng::seed_from_u64(5);
    let rows: Vec<BitVector> = (0..8u32).map(|i| BitVector::from_words(vec![i], 8)).collect::<Result<_, _>>()?;
    let mut views: [Vec<SharedBitVector>; 3] = Default::default();
    for r in &rows {
        for (p, s) in share(r, &mut rng)?.into_iter().enumerate() {
            views[p].push(s);
        }
    }
    let out = run_local_trio(PartyConfig::trio(1, 99), views, |party, rows| {
        let seeds = party.shuffle_seeds().clone();
        Ok((sec_shuffle(party, MatchTable::new(rows, 8)?)?, seeds))
    })?;

    let shuffled: Vec<u32> = (0..rows.len())
        .map(|i| reconstruct(&[0, 1, 2].map(|p| out[p].0.rows[i].clone())).map(|v| v.words()[0]))
        .collect::<Result<_, _>>()?;
    println!("input  order: {:?}", (0..rows.len()).collect::<Vec<_>>());
    println!("output order: {shuffled:?}");

    let (s12, s23, s31) = pairwise_seeds([&out[0].1, &out[1].1, &out[2].1]);
    let perm = composed_permutation(&s12, &s23, &s31, 0, 0, rows.len());
    println!("row i went to position {perm:?}");
    Ok(())
}
