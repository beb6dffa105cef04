//! Oblivious attributed subgraph matching among three non-colluding servers.
//!
//! A graph owner one-hot encodes every vertex ID, attribute value and
//! posting-list entry, pads posting lists for k-automorphism, and splits the
//! result with binary replicated secret sharing. Queries are rooted trees whose
//! predicates (equality, one-sided range, interval) become function secret
//! sharing keys. The servers evaluate predicates locally, fetch matches through
//! a secret-shared shuffle, and walk posting lists by one-hot selection, so no
//! single server learns the graph, the query operands, or which vertices match.

pub mod cli;
pub mod codec;
pub mod engine;
pub mod error;
pub mod fss;
pub mod graph;
pub mod net;
pub mod oracle;
pub mod prf;
pub mod query;
pub mod rss;
pub mod shuffle;
pub mod workload;

pub use error::{Error, Result};
