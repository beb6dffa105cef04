//! Function secret sharing over Z₂: point functions for equality, comparison
//! functions for one-sided ranges, and interval containment from two
//! comparisons.

mod bundle;
mod dcf;
mod dpf;
mod interval;
mod prg;
mod tree;

pub use bundle::{FssKeyBundle, Predicate, PredicateKey, PredicateKind};
pub use dcf::{dcf_gen, dcf_gen_offset, DcfKey};
pub use dpf::{dpf_gen, DpfKey};
pub use interval::{ic_gen, IntervalKey};
pub use tree::MAX_DOMAIN_BITS;

/// Tree depth for a public domain of `n` values: `n` rounded up to a power of
/// two, and at least one bit.
pub fn domain_bits_for(n: usize) -> u8 {
    (usize::BITS - n.saturating_sub(1).leading_zeros()).max(1) as u8
}
