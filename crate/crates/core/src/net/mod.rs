//! Three-party runtime: framed, round-tagged messaging over in-process queues
//! or TCP, plus session setup of the correlated randomness.

mod frame;
mod party;
mod tcp;
mod transport;

pub use frame::{op, Frame, FRAME_MAGIC, HEADER_LEN};
pub use party::{run_local_trio, run_tcp_trio, CommStats, Party, PartyConfig, ShuffleSeeds};
pub use tcp::{parse_peers, TcpTransport, BIND_ENV, PEERS_ENV};
pub use transport::{LocalTransport, Transport};
