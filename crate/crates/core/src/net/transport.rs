use std::sync::mpsc::{channel, Receiver, Sender};

use super::Frame;
use crate::error::{Error, Result};
use crate::rss::PartyId;

/// Reliable, ordered, per-peer frame delivery.
pub trait Transport: Send {
    fn send(&mut self, to: PartyId, frame: &Frame) -> Result<()>;
    fn recv(&mut self, from: PartyId) -> Result<Frame>;
}

/// In-process transport backed by one queue per ordered party pair. Frames are
/// encoded on send and decoded on receive, exactly as on a socket.
pub struct LocalTransport {
    me: PartyId,
    outbound: [Option<Sender<Vec<u8>>>; 3],
    inbound: [Option<Receiver<Vec<u8>>>; 3],
}

impl LocalTransport {
    /// Three fully connected endpoints, indexed by party.
    pub fn mesh() -> [LocalTransport; 3] {
        let mut outbound: [[Option<Sender<Vec<u8>>>; 3]; 3] = Default::default();
        let mut inbound: [[Option<Receiver<Vec<u8>>>; 3]; 3] = Default::default();
        for from in 0..3 {
            for to in 0..3 {
                if from != to {
                    let (tx, rx) = channel();
                    outbound[from][to] = Some(tx);
                    inbound[to][from] = Some(rx);
                }
            }
        }
        let mut out = outbound.into_iter();
        let mut inb = inbound.into_iter();
        PartyId::ALL.map(|me| LocalTransport {
            me,
            outbound: out.next().unwrap(),
            inbound: inb.next().unwrap(),
        })
    }

    pub fn party(&self) -> PartyId {
        self.me
    }
}

impl Transport for LocalTransport {
    fn send(&mut self, to: PartyId, frame: &Frame) -> Result<()> {
        let tx = self.outbound[to.index()]
            .as_ref()
            .ok_or_else(|| Error::Invalid(format!("party {} cannot send to itself", self.me)))?;
        tx.send(frame.encode()).map_err(|_| Error::Disconnected(to.number()))
    }

    fn recv(&mut self, from: PartyId) -> Result<Frame> {
        let rx = self.inbound[from.index()]
            .as_ref()
            .ok_or_else(|| Error::Invalid(format!("party {} cannot receive from itself", self.me)))?;
        let bytes = rx.recv().map_err(|_| Error::Disconnected(from.number()))?;
        Frame::decode(&bytes)
    }
}
