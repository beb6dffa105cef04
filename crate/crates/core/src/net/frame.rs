use std::io::{Read, Write};

use crate::error::{Error, Result};

pub const FRAME_MAGIC: &[u8; 4] = b"OGMF";
/// magic (4) + session (4) + round (4) + op tag (2) + payload length (4).
pub const HEADER_LEN: usize = 18;
/// Frames larger than this are rejected as corrupt.
pub const MAX_PAYLOAD: usize = 1 << 30;

/// Op tags carried in frame headers.
pub mod op {
    pub const SETUP: u16 = 0x0001;
    pub const RESHARE: u16 = 0x0002;
    pub const OPEN: u16 = 0x0003;
    pub const SHUFFLE: u16 = 0x0004;
    pub const ECHO: u16 = 0x00f0;
}

/// One message on the wire: `"OGMF"`, u32 session, u32 round, u16 op tag,
/// u32 payload length, payload. All integers little-endian.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frame {
    pub session: u32,
    pub round: u32,
    pub op: u16,
    pub payload: Vec<u8>,
}

impl Frame {
    pub fn wire_len(&self) -> usize {
        HEADER_LEN + self.payload.len()
    }

    fn header(&self) -> [u8; HEADER_LEN] {
        let mut h = [0u8; HEADER_LEN];
        h[..4].copy_from_slice(FRAME_MAGIC);
        h[4..8].copy_from_slice(&self.session.to_le_bytes());
        h[8..12].copy_from_slice(&self.round.to_le_bytes());
        h[12..14].copy_from_slice(&self.op.to_le_bytes());
        h[14..18].copy_from_slice(&(self.payload.len() as u32).to_le_bytes());
        h
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.wire_len());
        out.extend_from_slice(&self.header());
        out.extend_from_slice(&self.payload);
        out
    }

    fn parse_header(h: &[u8; HEADER_LEN]) -> Result<(u32, u32, u16, usize)> {
        if &h[..4] != FRAME_MAGIC {
            return Err(Error::codec("bad frame magic"));
        }
        let session = u32::from_le_bytes(h[4..8].try_into().unwrap());
        let round = u32::from_le_bytes(h[8..12].try_into().unwrap());
        let op = u16::from_le_bytes(h[12..14].try_into().unwrap());
        let len = u32::from_le_bytes(h[14..18].try_into().unwrap()) as usize;
        if len > MAX_PAYLOAD {
            return Err(Error::codec(format!("frame payload of {len} bytes exceeds limit")));
        }
        Ok((session, round, op, len))
    }

    pub fn decode(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < HEADER_LEN {
            return Err(Error::codec("truncated frame header"));
        }
        let (session, round, op, len) = Self::parse_header(bytes[..HEADER_LEN].try_into().unwrap())?;
        if bytes.len() != HEADER_LEN + len {
            return Err(Error::codec(format!(
                "frame length mismatch: header says {len}, have {}",
                bytes.len() - HEADER_LEN
            )));
        }
        Ok(Self {
            session,
            round,
            op,
            payload: bytes[HEADER_LEN..].to_vec(),
        })
    }

    pub fn write_to<W: Write>(&self, w: &mut W) -> Result<()> {
        w.write_all(&self.header())?;
        w.write_all(&self.payload)?;
        w.flush()?;
        Ok(())
    }

    pub fn read_from<R: Read>(r: &mut R) -> Result<Self> {
        let mut h = [0u8; HEADER_LEN];
        r.read_exact(&mut h)?;
        let (session, round, op, len) = Self::parse_header(&h)?;
        let mut payload = vec![0u8; len];
        r.read_exact(&mut payload)?;
        Ok(Self {
            session,
            round,
            op,
            payload,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_layout() {
        let f = Frame {
            session: 0x0102_0304,
            round: 9,
            op: op::OPEN,
            payload: vec![0xaa, 0xbb],
        };
        let bytes = f.encode();
        assert_eq!(&bytes[..4], b"OGMF");
        assert_eq!(&bytes[4..8], &[4, 3, 2, 1]);
        assert_eq!(&bytes[8..12], &[9, 0, 0, 0]);
        assert_eq!(&bytes[12..14], &[3, 0]);
        assert_eq!(&bytes[14..18], &[2, 0, 0, 0]);
        assert_eq!(bytes.len(), f.wire_len());
        assert_eq!(Frame::decode(&bytes).unwrap(), f);
        assert_eq!(Frame::read_from(&mut &bytes[..]).unwrap(), f);
        assert!(Frame::decode(&bytes[..bytes.len() - 1]).is_err());
    }
}
