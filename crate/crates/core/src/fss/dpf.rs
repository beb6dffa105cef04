//! Distributed point function keys with output group Z₂ and β = 1.

use rand::Rng;

use super::prg;
use super::tree::{self, Level, TreeKey};
use crate::codec::{Reader, Writer};
use crate::error::Result;
use crate::rss::BitVector;

/// One half of a point-function pair. Evaluations of the two halves XOR to
/// `[x = α]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DpfKey(pub(crate) TreeKey);

pub fn dpf_gen<R: Rng + ?Sized>(alpha: u64, domain_bits: u8, rng: &mut R) -> Result<(DpfKey, DpfKey)> {
    tree::check_domain(domain_bits)?;
    tree::check_point(alpha, domain_bits)?;
    let roots = [rng.gen::<u128>(), rng.gen::<u128>()];
    let ([k0, k1], [s0, s1]) = tree::generate(domain_bits, alpha, roots, false, |bit, kids| {
        let lose = !bit as usize;
        Level {
            seed: kids[0][lose].seed ^ kids[1][lose].seed,
            t_left: kids[0][0].control ^ kids[1][0].control ^ bit ^ true,
            t_right: kids[0][1].control ^ kids[1][1].control ^ bit,
            value: false,
        }
    });
    let last = true ^ prg::leaf_bit(s0) ^ prg::leaf_bit(s1);
    let finish = |mut k: TreeKey| {
        k.last = last;
        DpfKey(k)
    };
    Ok((finish(k0), finish(k1)))
}

impl DpfKey {
    pub fn domain_bits(&self) -> u8 {
        self.0.domain_bits
    }

    pub fn eval(&self, x: u64) -> Result<bool> {
        self.0.eval(x, false)
    }

    pub fn full_domain_eval(&self, n: usize) -> Result<BitVector> {
        self.0.full_eval(n, false)
    }

    pub fn write(&self, w: &mut Writer) {
        self.0.write(w)
    }

    pub fn read(r: &mut Reader<'_>) -> Result<Self> {
        TreeKey::read(r).map(DpfKey)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn pair_vector(a: &DpfKey, b: &DpfKey, n: usize) -> BitVector {
        a.full_domain_eval(n).unwrap().xor(&b.full_domain_eval(n).unwrap()).unwrap()
    }

    #[test]
    fn smallest_domain() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let (a, b) = dpf_gen(0, 1, &mut rng).unwrap();
        assert!(a.eval(0).unwrap() ^ b.eval(0).unwrap());
        assert!(!(a.eval(1).unwrap() ^ b.eval(1).unwrap()));
    }

    #[test]
    fn one_hot_at_alpha_over_128() {
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        let (a, b) = dpf_gen(37, 7, &mut rng).unwrap();
        assert_eq!(pair_vector(&a, &b, 128), BitVector::one_hot(128, 37));
    }

    #[test]
    fn pointwise_over_256() {
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let (a, b) = dpf_gen(200, 8, &mut rng).unwrap();
        for x in 0..256u64 {
            assert_eq!(a.eval(x).unwrap() ^ b.eval(x).unwrap(), x == 200);
            assert_eq!(a.eval(x).unwrap(), a.eval(x).unwrap());
        }
        let full = a.full_domain_eval(256).unwrap();
        for x in 0..256 {
            assert_eq!(full.get(x), a.eval(x as u64).unwrap());
        }
        assert_eq!(pair_vector(&a, &b, 256).count_ones(), 1);
        assert_eq!(a.full_domain_eval(1).unwrap().len(), 1);
    }

    #[test]
    fn out_of_domain() {
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        assert!(dpf_gen(128, 7, &mut rng).is_err());
        let (a, _) = dpf_gen(3, 7, &mut rng).unwrap();
        assert!(a.eval(128).is_err());
        assert!(a.full_domain_eval(129).is_err());
    }

    #[test]
    fn halves_have_equal_length() {
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let (a, b) = dpf_gen(9, 10, &mut rng).unwrap();
        let enc = |k: &DpfKey| {
            let mut w = Writer::new();
            k.write(&mut w);
            w.finish()
        };
        assert_eq!(enc(&a).len(), enc(&b).len());
        assert_eq!(enc(&a).len(), TreeKey::encoded_len(10));
        let bytes = enc(&a);
        assert_eq!(DpfKey::read(&mut Reader::new(&bytes)).unwrap(), a);
    }
}
