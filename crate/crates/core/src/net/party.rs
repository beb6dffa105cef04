use std::collections::hash_map::DefaultHasher;
use std::hash::Hasher;
use std::net::{SocketAddr, TcpListener};
use std::thread;
use std::time::Duration;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use super::{op, Frame, LocalTransport, TcpTransport, Transport};
use crate::error::{Error, Result};
use crate::prf::Key128;
use crate::rss::{BitVector, PartyId, ZeroShareContext};

/// Per-party session parameters. `seed` drives every local random choice
/// (PRF key, shuffle seed), which makes whole runs reproducible.
#[derive(Clone, Debug)]
pub struct PartyConfig {
    pub party: PartyId,
    pub session: u32,
    pub seed: [u8; 32],
}

impl PartyConfig {
    /// Three configs whose seeds are derived from one master seed.
    pub fn trio(session: u32, master_seed: u64) -> [PartyConfig; 3] {
        PartyId::ALL.map(|party| {
            let mut rng = ChaCha20Rng::seed_from_u64(master_seed);
            rng.set_stream(party.number() as u64);
            PartyConfig {
                party,
                session,
                seed: rng.gen(),
            }
        })
    }
}

/// The two pairwise shuffle seeds a party holds: `s_{i,i+1}` shared with the
/// next party and `s_{i-1,i}` shared with the previous one. Party 1 holds
/// `s12` and `s31`, party 2 holds `s23` and `s12`, party 3 holds `s31` and `s23`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShuffleSeeds {
    pub with_next: Key128,
    pub with_prev: Key128,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CommStats {
    pub rounds: u64,
    pub frames_sent: u64,
    pub bytes_sent: u64,
    pub bytes_received: u64,
    /// Logical payload bits sent (before byte padding and frame headers).
    pub payload_bits_sent: u64,
    /// Bits revealed to this party by `open`.
    pub opened_bits: u64,
}

impl CommStats {
    pub fn since(&self, earlier: &CommStats) -> CommStats {
        CommStats {
            rounds: self.rounds - earlier.rounds,
            frames_sent: self.frames_sent - earlier.frames_sent,
            bytes_sent: self.bytes_sent - earlier.bytes_sent,
            bytes_received: self.bytes_received - earlier.bytes_received,
            payload_bits_sent: self.payload_bits_sent - earlier.payload_bits_sent,
            opened_bits: self.opened_bits - earlier.opened_bits,
        }
    }
}

/// One computing party: its transport, correlated randomness and round state.
/// Parties never share memory; everything crosses the transport as frames.
pub struct Party {
    id: PartyId,
    session: u32,
    round: u32,
    transport: Box<dyn Transport>,
    zero: ZeroShareContext,
    seeds: ShuffleSeeds,
    shuffle_invocations: u64,
    stats: CommStats,
    transcript: DefaultHasher,
    opened_log: Vec<BitVector>,
    log_opened: bool,
}

impl Party {
    /// Runs the key-setup round: party `i` samples `k_i` and `s_{i,i+1}`, sends
    /// both to party `i+1`, and receives `k_{i-1}`, `s_{i-1,i}` from party `i-1`.
    pub fn setup(config: PartyConfig, transport: Box<dyn Transport>) -> Result<Self> {
        let mut rng = ChaCha20Rng::from_seed(config.seed);
        let own_key: Key128 = rng.gen();
        let seed_next: Key128 = rng.gen();
        let mut party = Self {
            id: config.party,
            session: config.session,
            round: 0,
            transport,
            zero: ZeroShareContext::new(&own_key, &[0; 16]),
            seeds: ShuffleSeeds {
                with_next: seed_next,
                with_prev: [0; 16],
            },
            shuffle_invocations: 0,
            stats: CommStats::default(),
            transcript: DefaultHasher::new(),
            opened_log: Vec::new(),
            log_opened: false,
        };
        let mut payload = own_key.to_vec();
        payload.extend_from_slice(&seed_next);
        party.begin_round();
        let me = party.id;
        party.send_round(me.next(), op::SETUP, payload, 256)?;
        let got = party.recv_round(me.prev(), op::SETUP)?;
        if got.len() != 32 {
            return Err(Error::codec("setup payload must be 32 bytes"));
        }
        let prev_key: Key128 = got[..16].try_into().unwrap();
        party.zero = ZeroShareContext::new(&own_key, &prev_key);
        party.seeds.with_prev = got[16..].try_into().unwrap();
        Ok(party)
    }

    pub fn id(&self) -> PartyId {
        self.id
    }

    pub fn session(&self) -> u32 {
        self.session
    }

    pub fn round(&self) -> u32 {
        self.round
    }

    pub fn stats(&self) -> CommStats {
        self.stats
    }

    pub fn shuffle_seeds(&self) -> &ShuffleSeeds {
        &self.seeds
    }

    /// Fingerprint of every frame this party sent or received, in order.
    pub fn transcript_digest(&self) -> u64 {
        self.transcript.finish()
    }

    /// Keeps a copy of every opened vector (for access-pattern tests).
    pub fn set_log_opened(&mut self, on: bool) {
        self.log_opened = on;
    }

    pub fn opened_log(&self) -> &[BitVector] {
        &self.opened_log
    }

    pub fn zero_share(&mut self, bits: usize) -> Result<BitVector> {
        self.zero.next(bits)
    }

    pub(crate) fn next_shuffle_invocation(&mut self) -> u64 {
        let n = self.shuffle_invocations;
        self.shuffle_invocations += 1;
        n
    }

    pub(crate) fn record_opened(&mut self, bits: usize) {
        self.stats.opened_bits += bits as u64;
    }

    pub(crate) fn log_opened_value(&mut self, v: &BitVector) {
        if self.log_opened {
            self.opened_log.push(v.clone());
        }
    }

    /// Starts the next synchronized round. Every party calls this at the same
    /// protocol step, whether or not it sends in that round.
    pub fn begin_round(&mut self) -> u32 {
        self.round = self.round.checked_add(1).expect("round counter overflow");
        self.stats.rounds += 1;
        self.round
    }

    /// Sends `payload` tagged with the current round. `bits` is the logical
    /// payload size used for communication accounting.
    pub fn send_round(&mut self, to: PartyId, op: u16, payload: Vec<u8>, bits: usize) -> Result<()> {
        let frame = Frame {
            session: self.session,
            round: self.round,
            op,
            payload,
        };
        self.stats.frames_sent += 1;
        self.stats.bytes_sent += frame.wire_len() as u64;
        self.stats.payload_bits_sent += bits as u64;
        self.transcript.write(&[b'>', to.number()]);
        self.transcript.write(&frame.encode());
        self.transport.send(to, &frame)
    }

    /// Receives the current round's frame from `from`, rejecting frames from
    /// another session, round or operation.
    pub fn recv_round(&mut self, from: PartyId, op: u16) -> Result<Vec<u8>> {
        let frame = self.transport.recv(from)?;
        if frame.session != self.session {
            return Err(Error::SessionMismatch {
                expected: self.session,
                actual: frame.session,
            });
        }
        if frame.round != self.round {
            return Err(Error::RoundSkew {
                expected: self.round,
                actual: frame.round,
            });
        }
        if frame.op != op {
            return Err(Error::OpMismatch {
                round: self.round,
                expected: op,
                actual: frame.op,
            });
        }
        self.stats.bytes_received += frame.wire_len() as u64;
        self.transcript.write(&[b'<', from.number()]);
        self.transcript.write(&frame.encode());
        Ok(frame.payload)
    }
}

fn check_distinct(configs: &[PartyConfig; 3]) -> Result<()> {
    let mut seen = [false; 3];
    for c in configs {
        if std::mem::replace(&mut seen[c.party.index()], true) {
            return Err(Error::DuplicateParty(c.party.number()));
        }
    }
    Ok(())
}

/// Picks the most informative error when several parties fail: a peer that
/// aborted causes `Disconnected` at the others.
fn first_root_cause<T>(results: Vec<Result<T>>) -> Result<Vec<T>> {
    let mut errors = Vec::new();
    let mut oks = Vec::new();
    for r in results {
        match r {
            Ok(v) => oks.push(v),
            Err(e) => errors.push(e),
        }
    }
    if errors.is_empty() {
        return Ok(oks);
    }
    let idx = errors
        .iter()
        .position(|e| !matches!(e, Error::Disconnected(_)))
        .unwrap_or(0);
    Err(errors.swap_remove(idx))
}

fn run_with_transports<I, T, F>(
    configs: [PartyConfig; 3],
    transports: [Box<dyn Transport>; 3],
    inputs: [I; 3],
    f: &F,
) -> Result<[T; 3]>
where
    I: Send,
    T: Send,
    F: Fn(&mut Party, I) -> Result<T> + Sync,
{
    let results: Vec<Result<(PartyId, T)>> = thread::scope(|scope| {
        let handles: Vec<_> = configs
            .into_iter()
            .zip(transports)
            .zip(inputs)
            .map(|((config, transport), input)| {
                thread::Builder::new()
                    .name(format!("party-{}", config.party))
                    .spawn_scoped(scope, move || {
                        let id = config.party;
                        let mut party = Party::setup(config, transport)?;
                        f(&mut party, input).map(|v| (id, v))
                    })
                    .expect("spawn party thread")
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|_| Err(Error::Invalid("party thread panicked".into()))))
            .collect()
    });
    let mut done = first_root_cause(results)?;
    done.sort_by_key(|(id, _)| *id);
    let mut it = done.into_iter().map(|(_, v)| v);
    Ok([it.next().unwrap(), it.next().unwrap(), it.next().unwrap()])
}

/// Runs three parties as threads connected by in-process queues, giving party
/// `i` the input `inputs[i]`. Party `i` gets the config whose `party` field is `i`.
pub fn run_local_trio<I, T, F>(configs: [PartyConfig; 3], inputs: [I; 3], f: F) -> Result<[T; 3]>
where
    I: Send,
    T: Send,
    F: Fn(&mut Party, I) -> Result<T> + Sync,
{
    check_distinct(&configs)?;
    let mut configs = configs;
    configs.sort_by_key(|c| c.party);
    let transports = LocalTransport::mesh().map(|t| Box::new(t) as Box<dyn Transport>);
    run_with_transports(configs, transports, inputs, &f)
}

/// As [`run_local_trio`], but the parties talk over loopback TCP sockets.
pub fn run_tcp_trio<I, T, F>(configs: [PartyConfig; 3], inputs: [I; 3], f: F) -> Result<[T; 3]>
where
    I: Send,
    T: Send,
    F: Fn(&mut Party, I) -> Result<T> + Sync,
{
    check_distinct(&configs)?;
    let mut configs = configs;
    configs.sort_by_key(|c| c.party);
    let listeners = [0, 1, 2].map(|_| TcpListener::bind("127.0.0.1:0"));
    let mut bound = Vec::new();
    for l in listeners {
        bound.push(l?);
    }
    let addrs: Vec<SocketAddr> = bound.iter().map(|l| l.local_addr()).collect::<std::io::Result<_>>()?;
    let addrs: [SocketAddr; 3] = addrs.try_into().unwrap();
    let session = configs[0].session;
    let timeout = Duration::from_secs(20);
    let transports: Vec<Result<TcpTransport>> = thread::scope(|scope| {
        let handles: Vec<_> = bound
            .into_iter()
            .zip(PartyId::ALL)
            .map(|(listener, me)| {
                let addrs = &addrs;
                scope.spawn(move || TcpTransport::establish(me, session, listener, addrs, timeout))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("tcp setup thread")).collect()
    });
    let transports: Vec<Box<dyn Transport>> = first_root_cause(transports)?
        .into_iter()
        .map(|t| Box::new(t) as Box<dyn Transport>)
        .collect();
    let transports: [Box<dyn Transport>; 3] = transports.try_into().unwrap_or_else(|_| unreachable!());
    run_with_transports(configs, transports, inputs, &f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn setup_distributes_seeds_pairwise() {
        let seeds = run_local_trio(PartyConfig::trio(1, 5), [(), (), ()], |p, _| {
            Ok(p.shuffle_seeds().clone())
        })
        .unwrap();
        for i in 0..3 {
            assert_eq!(seeds[i].with_next, seeds[(i + 1) % 3].with_prev);
            assert_ne!(seeds[i].with_next, seeds[i].with_prev);
        }
    }

    #[test]
    fn zero_shares_cancel_after_setup() {
        let outs = run_local_trio(PartyConfig::trio(1, 6), [(), (), ()], |p, _| p.zero_share(96)).unwrap();
        let mut sum = outs[0].clone();
        sum.xor_assign(&outs[1]).unwrap();
        sum.xor_assign(&outs[2]).unwrap();
        assert_eq!(sum, BitVector::zeros(96));
    }

    #[test]
    fn duplicate_party_index_rejected() {
        let mut configs = PartyConfig::trio(1, 1);
        configs[2].party = configs[0].party;
        let r = run_local_trio(configs, [(), (), ()], |_, _| Ok(()));
        assert!(matches!(r, Err(Error::DuplicateParty(1))));
    }
}
