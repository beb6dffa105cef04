use crate::error::{Error, Result};
use crate::prf::{Key128, Prf};

use super::BitVector;

const ZERO_LABEL: u32 = 0x5a45_524f;

/// Fresh sharings of zero: party `i` outputs `F(k_i, j) ⊕ F(k_{i-1}, j)` for
/// the `j`-th request, so the three outputs for one `j` cancel.
#[derive(Clone)]
pub struct ZeroShareContext {
    own: Prf,
    prev: Prf,
    counter: u64,
}

impl ZeroShareContext {
    /// `own` is `k_i`; `prev` is `k_{i-1}`, received from the previous party.
    pub fn new(own: &Key128, prev: &Key128) -> Self {
        Self {
            own: Prf::new(own),
            prev: Prf::new(prev),
            counter: 0,
        }
    }

    pub fn counter(&self) -> u64 {
        self.counter
    }

    pub fn next(&mut self, bits: usize) -> Result<BitVector> {
        let j = self.counter;
        self.counter = j.checked_add(1).ok_or(Error::CounterExhausted)?;
        let mut out = self.own.expand(ZERO_LABEL, j, bits);
        out.xor_assign(&self.prev.expand(ZERO_LABEL, j, bits))?;
        Ok(out)
    }
}
