//! Binary replicated secret sharing over packed bit vectors.
//!
//! Party `i` holds `(⟨x⟩_i, ⟨x⟩_{i+1})` with indices wrapping around, so any
//! two parties together see all three XOR shares. XOR is local; AND costs one
//! message of `n` bits to the next party per invocation.

mod bitvec;
mod ops;
mod share;
mod zero;

pub use bitvec::BitVector;
pub(crate) use ops::decode_bits;
pub use ops::{and_gate, and_many, open, open_many, reshare, select_sum_local};
pub use share::{reconstruct, share, PartyId, SharedBitVector};
pub use zero::ZeroShareContext;
