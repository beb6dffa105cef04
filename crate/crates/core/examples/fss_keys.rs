//! Generate function secret sharing keys for each predicate kind and check
//! that the two halves recombine to the right indicator vector.
//!
//!     cargo run --example fss_keys

use oblivgm::fss::Predicate;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

fn main() -> oblivgm::Result<()> {
    let mut rng = ChaCha20Rng::seed_from_u64(3);
    let bits = 4;
    let n = 1usize << bits;
    let preds = [
        Predicate::Equal(5),
        Predicate::Less(5),
        Predicate::GreaterEq(12),
        Predicate::closed(3, 9),
        Predicate::Interval { lower: 3, upper: 9, lower_closed: false, upper_closed: false },
    ];
    for p in preds {
        let [k0, k1] = p.gen_pair(bits, &mut rng)?;
        let (e0, e1) = (k0.full_domain_eval(n)?, k1.full_domain_eval(n)?);
        let sum = e0.xor(&e1)?;
        println!("{p:>12}  half0 {e0}  half1 {e1}  xor {sum}  key {} B", k0.to_bytes().len());
        assert_eq!(sum, p.indicator(n));
    }
    Ok(())
}
