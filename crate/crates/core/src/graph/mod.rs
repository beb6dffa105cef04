//! Plaintext attributed graphs, public schemas with one-hot dictionaries,
//! k-automorphism padding, and encryption into three replicated shares.

mod encrypt;
mod model;
mod pad;
mod schema;

pub use encrypt::{
    encrypt_graph, reconstruct_vertex, EncryptedGraph, EncryptedGraphShare, EncryptedVertex, PlainVertex, Sidecar,
};
pub use model::{AttrDecl, AttributedGraph, Vertex};
pub use pad::{pad_k_groups, Padding};
pub use schema::{decode_one_hot, encode_one_hot, AttrSchema, PaddingStats, Schema, TypeSchema};
