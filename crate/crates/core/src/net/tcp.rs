use std::io::{BufReader, BufWriter, Read, Write};
use std::net::{SocketAddr, TcpListener, TcpStream};
use std::sync::mpsc::{channel, Receiver};
use std::thread;
use std::time::{Duration, Instant};

use super::{Frame, Transport};
use crate::error::{Error, Result};
use crate::rss::PartyId;

const HANDSHAKE_MAGIC: &[u8; 4] = b"OGMH";

/// Environment variable holding this party's listen address.
pub const BIND_ENV: &str = "OBLIVGM_BIND";
/// Environment variable holding all three addresses as `1=host:port,2=…,3=…`.
pub const PEERS_ENV: &str = "OBLIVGM_PEERS";

struct Peer {
    writer: BufWriter<TcpStream>,
    inbound: Receiver<Result<Frame>>,
}

/// Length-prefixed frames over one TCP connection per peer. A background
/// thread per connection reads frames into an ordered queue.
pub struct TcpTransport {
    me: PartyId,
    peers: [Option<Peer>; 3],
}

/// Parses `1=127.0.0.1:7001,2=…,3=…`.
pub fn parse_peers(spec: &str) -> Result<[SocketAddr; 3]> {
    let mut out: [Option<SocketAddr>; 3] = [None; 3];
    for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (idx, addr) = item
            .split_once('=')
            .ok_or_else(|| Error::Invalid(format!("peer entry {item:?} is not <party>=<addr>")))?;
        let party = PartyId::new(
            idx.trim()
                .parse()
                .map_err(|_| Error::Invalid(format!("bad party index {idx:?}")))?,
        )?;
        let addr: SocketAddr = addr
            .trim()
            .parse()
            .map_err(|_| Error::Invalid(format!("bad socket address {addr:?}")))?;
        if out[party.index()].replace(addr).is_some() {
            return Err(Error::DuplicateParty(party.number()));
        }
    }
    let mut res = [SocketAddr::from(([0, 0, 0, 0], 0)); 3];
    for (i, a) in out.iter().enumerate() {
        res[i] = a.ok_or_else(|| Error::Invalid(format!("missing address for party {}", i + 1)))?;
    }
    Ok(res)
}

impl TcpTransport {
    /// Connects party `me` to both peers. Lower-numbered parties accept, higher
    /// ones dial; the dialer announces its index and the session id.
    pub fn establish(
        me: PartyId,
        session: u32,
        listener: TcpListener,
        peers: &[SocketAddr; 3],
        timeout: Duration,
    ) -> Result<Self> {
        let mut streams: [Option<TcpStream>; 3] = [None, None, None];
        for other in PartyId::ALL.into_iter().filter(|p| *p < me) {
            let mut stream = dial(peers[other.index()], timeout)?;
            let mut hello = Vec::with_capacity(9);
            hello.extend_from_slice(HANDSHAKE_MAGIC);
            hello.push(me.number());
            hello.extend_from_slice(&session.to_le_bytes());
            stream.write_all(&hello)?;
            streams[other.index()] = Some(stream);
        }
        let expected = PartyId::ALL.into_iter().filter(|p| *p > me).count();
        listener.set_nonblocking(true)?;
        let deadline = Instant::now() + timeout;
        let mut accepted = 0;
        while accepted < expected {
            match listener.accept() {
                Ok((mut stream, _)) => {
                    stream.set_nonblocking(false)?;
                    stream.set_read_timeout(Some(timeout))?;
                    let mut hello = [0u8; 9];
                    stream.read_exact(&mut hello)?;
                    stream.set_read_timeout(None)?;
                    if &hello[..4] != HANDSHAKE_MAGIC {
                        return Err(Error::codec("bad handshake magic"));
                    }
                    let peer = PartyId::new(hello[4])?;
                    let peer_session = u32::from_le_bytes(hello[5..9].try_into().unwrap());
                    if peer_session != session {
                        return Err(Error::SessionMismatch {
                            expected: session,
                            actual: peer_session,
                        });
                    }
                    if peer <= me || streams[peer.index()].is_some() {
                        return Err(Error::DuplicateParty(peer.number()));
                    }
                    streams[peer.index()] = Some(stream);
                    accepted += 1;
                }
                Err(e) if e.kind() == std::io::ErrorKind::WouldBlock => {
                    if Instant::now() > deadline {
                        return Err(Error::Io(std::io::Error::new(
                            std::io::ErrorKind::TimedOut,
                            "timed out waiting for peers",
                        )));
                    }
                    thread::sleep(Duration::from_millis(5));
                }
                Err(e) => return Err(e.into()),
            }
        }

        let mut peers_out: [Option<Peer>; 3] = [None, None, None];
        for (idx, stream) in streams.into_iter().enumerate() {
            let Some(stream) = stream else { continue };
            stream.set_nodelay(true)?;
            let reader = stream.try_clone()?;
            let (tx, rx) = channel();
            thread::spawn(move || {
                let mut reader = BufReader::with_capacity(1 << 16, reader);
                loop {
                    let frame = Frame::read_from(&mut reader);
                    let failed = frame.is_err();
                    if tx.send(frame).is_err() || failed {
                        break;
                    }
                }
            });
            peers_out[idx] = Some(Peer {
                writer: BufWriter::with_capacity(1 << 16, stream),
                inbound: rx,
            });
        }
        Ok(Self { me, peers: peers_out })
    }

    /// Binds the listen address from `OBLIVGM_BIND` and reads peers from
    /// `OBLIVGM_PEERS`.
    pub fn from_env(me: PartyId, session: u32, timeout: Duration) -> Result<Self> {
        let bind = std::env::var(BIND_ENV).map_err(|_| Error::Invalid(format!("{BIND_ENV} is not set")))?;
        let peers = std::env::var(PEERS_ENV).map_err(|_| Error::Invalid(format!("{PEERS_ENV} is not set")))?;
        let peers = parse_peers(&peers)?;
        let listener = TcpListener::bind(bind.trim())?;
        Self::establish(me, session, listener, &peers, timeout)
    }

    pub fn party(&self) -> PartyId {
        self.me
    }

    fn peer(&mut self, p: PartyId) -> Result<&mut Peer> {
        let me = self.me;
        self.peers[p.index()]
            .as_mut()
            .ok_or_else(|| Error::Invalid(format!("party {me} has no connection to party {p}")))
    }
}

fn dial(addr: SocketAddr, timeout: Duration) -> Result<TcpStream> {
    let deadline = Instant::now() + timeout;
    loop {
        match TcpStream::connect(addr) {
            Ok(s) => return Ok(s),
            Err(e) if Instant::now() < deadline => {
                let _ = e;
                thread::sleep(Duration::from_millis(10));
            }
            Err(e) => return Err(e.into()),
        }
    }
}

impl Transport for TcpTransport {
    fn send(&mut self, to: PartyId, frame: &Frame) -> Result<()> {
        let peer = self.peer(to)?;
        frame
            .write_to(&mut peer.writer)
            .map_err(|_| Error::Disconnected(to.number()))
    }

    fn recv(&mut self, from: PartyId) -> Result<Frame> {
        let peer = self.peer(from)?;
        match peer.inbound.recv() {
            Ok(Ok(frame)) => Ok(frame),
            Ok(Err(Error::Io(_))) | Err(_) => Err(Error::Disconnected(from.number())),
            Ok(Err(e)) => Err(e),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn peer_list_parsing() {
        let p = parse_peers("1=127.0.0.1:7001, 2=127.0.0.1:7002,3=127.0.0.1:7003").unwrap();
        assert_eq!(p[1].port(), 7002);
        assert!(matches!(
            parse_peers("1=127.0.0.1:1,1=127.0.0.1:2,3=127.0.0.1:3"),
            Err(Error::DuplicateParty(1))
        ));
        assert!(parse_peers("1=127.0.0.1:1,2=127.0.0.1:2").is_err());
        assert!(parse_peers("4=127.0.0.1:1").is_err());
    }
}
