//! Secret-share two bit vectors among three parties, AND them with one
//! reshare round, and open the result.
//!
//!     cargo run --example share_and

use oblivgm::net::{run_local_trio, PartyConfig};
use oblivgm::rss::{and_gate, open, share, BitVector};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

fn main() -> oblivgm::Result<()> {
    let mut rng = ChaCha20Rng::seed_from_u64(7);
    let x = BitVector::from_bits(&[true, true, false, false, true]);
    let y = BitVector::from_bits(&[true, false, true, false, true]);
    let (xs, ys) = (share(&x, &mut rng)?, share(&y, &mut rng)?);
    for (p, s) in xs.iter().enumerate() {
        println!("party {} holds x-share pair ({}, {})", p + 1, s.own(), s.next());
    }

    let inputs = [0, 1, 2].map(|p| (xs[p].clone(), ys[p].clone()));
    let out = run_local_trio(PartyConfig::trio(1, 42), inputs, |party, (a, b)| {
        let before = party.stats();
        let z = and_gate(party, &a, &b)?;
        let stats = party.stats().since(&before);
        Ok((open(party, &z)?, stats))
    })?;
    println!("x AND y = {} (expected {})", out[0].0, x.and(&y)?);
    println!("each party sent {} payload bits in {} round(s) for the AND", out[0].1.payload_bits_sent, out[0].1.rounds);
    Ok(())
}
