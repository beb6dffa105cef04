//! Rooted-tree queries and the per-server tokens derived from them.

mod model;
mod token;

pub use model::{parse_op, Combiner, PredicateSpec, QueryGraph, TargetVertex};
pub use token::{gen_token, PartyToken, ShapeVertex, TokenPredicate, TokenShape, TokenVertex};
