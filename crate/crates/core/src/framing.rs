//! Wire formats and checksums.
//!
//! | format            | layout                                                  | bytes |
//! |-------------------|---------------------------------------------------------|-------|
//! | legacy packet     | `02` · 38 hex chars (19 bytes) · 4 hex chars CRC-16 · `03` | 44    |
//! | frame             | `AA 55 AA` · ts u16 · 3291 payload · CRC-32              | 3300  |
//! | sub-packet        | `AA 55 AA` · ts u16 · 33 payload · CRC-32                | 42    |
//! | codeword envelope | seed u32 · window u16 · 3300 payload · CRC-32            | 3310  |
//!
//! Integers are big-endian. Hex digits are uppercase. CRC-16 is
//! CCITT-FALSE over the raw legacy data; CRC-32 is the reflected 0x04C11DB7
//! variant over everything before it.

use crc::{Crc, CRC_16_IBM_3740, CRC_32_ISO_HDLC};
use thiserror::Error;

use crate::fountain::CombinationDescriptor;

const CRC16: Crc<u16> = Crc::<u16>::new(&CRC_16_IBM_3740);
const CRC32: Crc<u32> = Crc::<u32>::new(&CRC_32_ISO_HDLC);

pub const LEGACY_START: u8 = 0x02;
pub const LEGACY_STOP: u8 = 0x03;
pub const SYNC: [u8; 3] = [0xAA, 0x55, 0xAA];

pub const LEGACY_DATA_LEN: usize = 19;
pub const LEGACY_PACKET_LEN: usize = 44;
pub const FRAME_LEN: usize = 3300;
pub const FRAME_OVERHEAD: usize = 9;
pub const FRAME_PAYLOAD_LEN: usize = FRAME_LEN - FRAME_OVERHEAD;
pub const SUBPACKET_PAYLOAD_LEN: usize = 33;
pub const SUBPACKET_LEN: usize = SUBPACKET_PAYLOAD_LEN + FRAME_OVERHEAD;
pub const SUBPACKETS_PER_FRAME: usize = FRAME_LEN / SUBPACKET_PAYLOAD_LEN;
pub const ENVELOPE_LEN: usize = 4 + 2 + FRAME_LEN + 4;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FramingError {
    #[error("checksum mismatch")]
    Checksum,
    #[error("bad framing: {0}")]
    Framing(&'static str),
    #[error("expected {expected} bytes, got {got}")]
    Length { expected: usize, got: usize },
}

/// CRC-16/CCITT-FALSE: poly 0x1021, init 0xFFFF, unreflected, no final XOR.
pub fn crc16(data: &[u8]) -> u16 {
    CRC16.checksum(data)
}

/// CRC-32 (ISO-HDLC): reflected poly 0x04C11DB7, init and final XOR 0xFFFFFFFF.
pub fn crc32(data: &[u8]) -> u32 {
    CRC32.checksum(data)
}

fn check_len(bytes: &[u8], expected: usize) -> Result<(), FramingError> {
    if bytes.len() != expected {
        return Err(FramingError::Length {
            expected,
            got: bytes.len(),
        });
    }
    Ok(())
}

fn split_crc32(bytes: &[u8]) -> Result<&[u8], FramingError> {
    let (body, tail) = bytes.split_at(bytes.len() - 4);
    let stored = u32::from_be_bytes(tail.try_into().unwrap());
    if crc32(body) != stored {
        return Err(FramingError::Checksum);
    }
    Ok(body)
}

fn decode_hex_upper(chars: &[u8], out: &mut [u8]) -> Result<(), FramingError> {
    if !chars.iter().all(|c| matches!(c, b'0'..=b'9' | b'A'..=b'F')) {
        return Err(FramingError::Framing("non-hex character"));
    }
    hex::decode_to_slice(chars, out).map_err(|_| FramingError::Framing("non-hex character"))
}

/// Legacy 44-byte ASCII-hex packet.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LegacyPacket {
    pub data: [u8; LEGACY_DATA_LEN],
}

impl LegacyPacket {
    pub fn new(data: [u8; LEGACY_DATA_LEN]) -> Self {
        LegacyPacket { data }
    }

    pub fn to_bytes(&self) -> [u8; LEGACY_PACKET_LEN] {
        let mut out = [0u8; LEGACY_PACKET_LEN];
        out[0] = LEGACY_START;
        hex::encode_to_slice(self.data, &mut out[1..39]).unwrap();
        hex::encode_to_slice(crc16(&self.data).to_be_bytes(), &mut out[39..43]).unwrap();
        out[1..43].make_ascii_uppercase();
        out[43] = LEGACY_STOP;
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, FramingError> {
        check_len(bytes, LEGACY_PACKET_LEN)?;
        if bytes[0] != LEGACY_START || bytes[43] != LEGACY_STOP {
            return Err(FramingError::Framing("bad start/stop symbol"));
        }
        let mut data = [0u8; LEGACY_DATA_LEN];
        decode_hex_upper(&bytes[1..39], &mut data)?;
        let mut crc = [0u8; 2];
        decode_hex_upper(&bytes[39..43], &mut crc)?;
        if crc16(&data) != u16::from_be_bytes(crc) {
            return Err(FramingError::Checksum);
        }
        Ok(LegacyPacket { data })
    }
}

pub fn legacy_pack(data: &[u8]) -> Result<[u8; LEGACY_PACKET_LEN], FramingError> {
    check_len(data, LEGACY_DATA_LEN)?;
    Ok(LegacyPacket::new(data.try_into().unwrap()).to_bytes())
}

pub fn legacy_unpack(bytes: &[u8]) -> Result<[u8; LEGACY_DATA_LEN], FramingError> {
    LegacyPacket::from_bytes(bytes).map(|p| p.data)
}

/// One second of instrumentation data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frame {
    pub timestamp: u16,
    pub payload: Vec<u8>,
}

impl Frame {
    pub fn new(timestamp: u16, payload: Vec<u8>) -> Result<Self, FramingError> {
        check_len(&payload, FRAME_PAYLOAD_LEN)?;
        Ok(Frame { timestamp, payload })
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(FRAME_LEN);
        out.extend_from_slice(&SYNC);
        out.extend_from_slice(&self.timestamp.to_be_bytes());
        out.extend_from_slice(&self.payload);
        let crc = crc32(&out);
        out.extend_from_slice(&crc.to_be_bytes());
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, FramingError> {
        check_len(bytes, FRAME_LEN)?;
        if bytes[..3] != SYNC {
            return Err(FramingError::Framing("bad frame sync"));
        }
        let body = split_crc32(bytes)?;
        Ok(Frame {
            timestamp: u16::from_be_bytes([body[3], body[4]]),
            payload: body[5..].to_vec(),
        })
    }
}

pub fn frame_pack(timestamp: u16, payload: &[u8]) -> Result<Vec<u8>, FramingError> {
    check_len(payload, FRAME_PAYLOAD_LEN)?;
    Ok(Frame {
        timestamp,
        payload: payload.to_vec(),
    }
    .to_bytes())
}

pub fn frame_unpack(bytes: &[u8]) -> Result<Frame, FramingError> {
    Frame::from_bytes(bytes)
}

/// 42-byte packet of the uncoded scheme: one hundredth of a serialized frame.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SubPacket {
    pub timestamp: u16,
    pub payload: [u8; SUBPACKET_PAYLOAD_LEN],
}

impl SubPacket {
    pub fn to_bytes(&self) -> [u8; SUBPACKET_LEN] {
        let mut out = [0u8; SUBPACKET_LEN];
        self.write_to(&mut out);
        out
    }

    fn write_to(&self, out: &mut [u8]) {
        out[..3].copy_from_slice(&SYNC);
        out[3..5].copy_from_slice(&self.timestamp.to_be_bytes());
        out[5..38].copy_from_slice(&self.payload);
        let crc = crc32(&out[..38]);
        out[38..42].copy_from_slice(&crc.to_be_bytes());
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, FramingError> {
        check_len(bytes, SUBPACKET_LEN)?;
        if bytes[..3] != SYNC {
            return Err(FramingError::Framing("bad sub-packet sync"));
        }
        let body = split_crc32(bytes)?;
        Ok(SubPacket {
            timestamp: u16::from_be_bytes([body[3], body[4]]),
            payload: body[5..38].try_into().unwrap(),
        })
    }
}

/// Splits a serialized 3300-byte frame into 100 sub-packets and appends them to `out`.
pub fn split_into_subpackets(timestamp: u16, frame_bytes: &[u8], out: &mut Vec<u8>) {
    assert_eq!(frame_bytes.len(), FRAME_LEN);
    for chunk in frame_bytes.chunks_exact(SUBPACKET_PAYLOAD_LEN) {
        let start = out.len();
        out.resize(start + SUBPACKET_LEN, 0);
        SubPacket {
            timestamp,
            payload: chunk.try_into().unwrap(),
        }
        .write_to(&mut out[start..]);
    }
}

/// Fountain codeword with its combination descriptor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodewordEnvelope {
    pub descriptor: CombinationDescriptor,
    pub payload: Vec<u8>,
}

impl CodewordEnvelope {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(ENVELOPE_LEN);
        out.extend_from_slice(&self.descriptor.seed.to_be_bytes());
        out.extend_from_slice(&self.descriptor.window.to_be_bytes());
        out.extend_from_slice(&self.payload);
        let crc = crc32(&out);
        out.extend_from_slice(&crc.to_be_bytes());
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, FramingError> {
        check_len(bytes, ENVELOPE_LEN)?;
        let body = split_crc32(bytes)?;
        let seed = u32::from_be_bytes(body[..4].try_into().unwrap());
        let window = u16::from_be_bytes([body[4], body[5]]);
        if window == 0 {
            return Err(FramingError::Framing("zero window"));
        }
        Ok(CodewordEnvelope {
            descriptor: CombinationDescriptor { seed, window },
            payload: body[6..].to_vec(),
        })
    }
}

pub fn envelope_pack(descriptor: CombinationDescriptor, payload: &[u8]) -> Result<Vec<u8>, FramingError> {
    check_len(payload, FRAME_LEN)?;
    Ok(CodewordEnvelope {
        descriptor,
        payload: payload.to_vec(),
    }
    .to_bytes())
}

pub fn envelope_unpack(bytes: &[u8]) -> Result<CodewordEnvelope, FramingError> {
    CodewordEnvelope::from_bytes(bytes)
}
