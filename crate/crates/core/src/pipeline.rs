//! The four end-to-end encoding schemes, link-rate accounting, and
//! end-of-flight recovery.
//!
//! Wire bytes are aligned per second. A byte stream that is not a multiple
//! of the RS data length ends in a shortened block with the full parity
//! count, e.g. a 3310-byte envelope under RS(255,223) is fourteen full
//! blocks plus one RS(220,188) block.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::block_codes::{ReedSolomon, RsParams};
use crate::fountain::{FountainCodeword, FountainDecoder, FountainEncoder, FountainError};
use crate::framing::{
    envelope_unpack, split_into_subpackets, CodewordEnvelope, Frame, FramingError, SubPacket, ENVELOPE_LEN, FRAME_LEN,
    SUBPACKETS_PER_FRAME, SUBPACKET_LEN, SUBPACKET_PAYLOAD_LEN,
};

/// Source data rate: one 3300-byte frame per second.
pub const DATA_RATE: f64 = FRAME_LEN as f64;
/// RS-422 link: 76.8 kbps with start and stop bits per byte.
pub const LINK_CAPACITY: f64 = 7680.0;
pub const WIRE_BITS_PER_BYTE: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PipelineError {
    #[error("frame for second {got} supplied, expected second {expected}")]
    OutOfOrder { expected: u32, got: u32 },
    #[error("frame timestamp {timestamp} does not match second {t}")]
    TimestampMismatch { timestamp: u16, t: u32 },
    #[error("unknown scheme {0:?} (expected uncoded, rs255_111, rs223_df12 or rs191_df47)")]
    UnknownScheme(String),
    #[error(transparent)]
    Framing(#[from] FramingError),
    #[error(transparent)]
    Fountain(#[from] FountainError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Uncoded,
    #[serde(rename = "rs255_111")]
    Rs255_111,
    #[serde(rename = "rs223_df12")]
    Rs223Df12,
    #[serde(rename = "rs191_df47")]
    Rs191Df47,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [Scheme::Uncoded, Scheme::Rs255_111, Scheme::Rs223Df12, Scheme::Rs191Df47];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Uncoded => "uncoded",
            Scheme::Rs255_111 => "rs255_111",
            Scheme::Rs223Df12 => "rs223_df12",
            Scheme::Rs191Df47 => "rs191_df47",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Scheme::Uncoded => "Uncoded",
            Scheme::Rs255_111 => "RS(255,111)",
            Scheme::Rs223Df12 => "RS(255,223) + DF 1/2",
            Scheme::Rs191Df47 => "RS(255,191) + DF 4/7",
        }
    }

    pub fn rs_params(self) -> Option<RsParams> {
        let (n, k) = match self {
            Scheme::Uncoded => return None,
            Scheme::Rs255_111 => (255, 111),
            Scheme::Rs223Df12 => (255, 223),
            Scheme::Rs191Df47 => (255, 191),
        };
        Some(RsParams::new(n, k).unwrap())
    }

    /// Fountain rate as (numerator, denominator).
    pub fn df_rate(self) -> Option<(u32, u32)> {
        match self {
            Scheme::Rs223Df12 => Some((1, 2)),
            Scheme::Rs191Df47 => Some((4, 7)),
            _ => None,
        }
    }

    /// Codewords emitted during second `t`: 2 per second at rate 1/2,
    /// 2-2-2-1 across each four-second group at rate 4/7.
    pub fn codewords_in_second(self, t: u32) -> usize {
        match self.df_rate() {
            None => 0,
            Some((1, 2)) => 2,
            Some((4, 7)) => [2, 2, 2, 1][(t % 4) as usize],
            Some(_) => unreachable!(),
        }
    }

    /// Accounting units per frame: sub-packets for the uncoded scheme, whole frames otherwise.
    pub fn units_per_frame(self) -> usize {
        match self {
            Scheme::Uncoded => SUBPACKETS_PER_FRAME,
            _ => 1,
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = PipelineError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.trim().to_ascii_lowercase().replace('-', "_");
        Scheme::ALL
            .into_iter()
            .find(|sc| sc.name() == norm)
            .ok_or_else(|| PipelineError::UnknownScheme(s.to_string()))
    }
}

/// Bytes after RS encoding `len` bytes (last block shortened).
pub fn rs_wire_len(len: usize, params: RsParams) -> usize {
    let full = len / params.k();
    let rem = len % params.k();
    full * params.n() + if rem > 0 { rem + params.parity() } else { 0 }
}

/// Wire bytes emitted by `scheme` during second `t`.
pub fn wire_len_in_second(scheme: Scheme, t: u32) -> usize {
    match scheme {
        Scheme::Uncoded => SUBPACKETS_PER_FRAME * SUBPACKET_LEN,
        Scheme::Rs255_111 => rs_wire_len(FRAME_LEN, scheme.rs_params().unwrap()),
        _ => scheme.codewords_in_second(t) * rs_wire_len(ENVELOPE_LEN, scheme.rs_params().unwrap()),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateBudget {
    /// Source bytes per second.
    pub data_rate: f64,
    /// Bytes per second from the nominal expansion factors (n/k, codeword rate).
    pub wire_rate: f64,
    /// Bytes per second actually framed, counting shortened final blocks.
    pub framed_wire_rate: f64,
    pub link_capacity: f64,
}

impl RateBudget {
    pub fn over_capacity(&self) -> bool {
        self.wire_rate > self.link_capacity
    }

    /// Wire rate in kbps on the RS-422 link (start and stop bit per byte).
    pub fn wire_kbps(&self) -> f64 {
        self.wire_rate * WIRE_BITS_PER_BYTE / 1000.0
    }

    pub fn utilization(&self) -> f64 {
        self.wire_rate / self.link_capacity
    }
}

pub fn rate_budget(scheme: Scheme) -> RateBudget {
    let (wire_rate, framed_wire_rate) = match scheme {
        Scheme::Uncoded => {
            let r = (SUBPACKETS_PER_FRAME * SUBPACKET_LEN) as f64;
            (r, r)
        }
        Scheme::Rs255_111 => {
            let p = scheme.rs_params().unwrap();
            (
                DATA_RATE * p.n() as f64 / p.k() as f64,
                rs_wire_len(FRAME_LEN, p) as f64,
            )
        }
        Scheme::Rs223Df12 | Scheme::Rs191Df47 => {
            let p = scheme.rs_params().unwrap();
            let (num, den) = scheme.df_rate().unwrap();
            let codewords = den as f64 / num as f64;
            (
                codewords * ENVELOPE_LEN as f64 * p.n() as f64 / p.k() as f64,
                codewords * rs_wire_len(ENVELOPE_LEN, p) as f64,
            )
        }
    };
    RateBudget {
        data_rate: DATA_RATE,
        wire_rate,
        framed_wire_rate,
        link_capacity: LINK_CAPACITY,
    }
}

fn rs_encode_stream(rs: &ReedSolomon, data: &[u8], out: &mut Vec<u8>) {
    for chunk in data.chunks(rs.params().k()) {
        rs.encode_into(chunk, out);
    }
}

/// Errors-only decode of an RS-framed stream carrying `data_len` bytes.
/// `None` when any block is uncorrectable.
fn rs_decode_stream(rs: &ReedSolomon, wire: &[u8], data_len: usize) -> Option<Vec<u8>> {
    let p = rs.params();
    if wire.len() != rs_wire_len(data_len, p) {
        return None;
    }
    let mut out = Vec::with_capacity(data_len);
    let mut offset = 0;
    let mut remaining = data_len;
    let mut block = Vec::with_capacity(p.n());
    while remaining > 0 {
        let k = remaining.min(p.k());
        let len = k + p.parity();
        block.clear();
        block.extend_from_slice(&wire[offset..offset + len]);
        rs.correct(&mut block, &[]).ok()?;
        out.extend_from_slice(&block[..k]);
        offset += len;
        remaining -= k;
    }
    Some(out)
}

/// Transmit-side state for one flight.
#[derive(Debug)]
pub struct FlightEncoder {
    scheme: Scheme,
    rs: Option<ReedSolomon>,
    fountain: Option<FountainEncoder>,
    next_t: u32,
}

impl FlightEncoder {
    pub fn new(scheme: Scheme) -> Self {
        FlightEncoder {
            scheme,
            rs: scheme.rs_params().map(ReedSolomon::new),
            fountain: scheme.df_rate().map(|_| FountainEncoder::new(FRAME_LEN)),
            next_t: 0,
        }
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    /// Wire bytes for second `t`; frames must arrive as t = 0, 1, 2, ...
    pub fn encode_second(&mut self, frame: &Frame, t: u32) -> Result<Vec<u8>, PipelineError> {
        if t != self.next_t {
            return Err(PipelineError::OutOfOrder {
                expected: self.next_t,
                got: t,
            });
        }
        if frame.timestamp as u32 != t {
            return Err(PipelineError::TimestampMismatch {
                timestamp: frame.timestamp,
                t,
            });
        }
        let bytes = frame.to_bytes();
        let mut out = Vec::with_capacity(wire_len_in_second(self.scheme, t));
        match self.scheme {
            Scheme::Uncoded => split_into_subpackets(frame.timestamp, &bytes, &mut out),
            Scheme::Rs255_111 => rs_encode_stream(self.rs.as_ref().unwrap(), &bytes, &mut out),
            Scheme::Rs223Df12 | Scheme::Rs191Df47 => {
                let fountain = self.fountain.as_mut().unwrap();
                fountain.push_frame(&bytes)?;
                for _ in 0..self.scheme.codewords_in_second(t) {
                    let cw = fountain.next_codeword()?;
                    let env = CodewordEnvelope {
                        descriptor: cw.descriptor,
                        payload: cw.payload,
                    }
                    .to_bytes();
                    rs_encode_stream(self.rs.as_ref().unwrap(), &env, &mut out);
                }
            }
        }
        self.next_t += 1;
        Ok(out)
    }
}

/// Per-frame recovery: for each frame, the content of each accounting unit
/// that arrived intact (33-byte chunks for the uncoded scheme, the full
/// serialized frame otherwise).
#[derive(Clone, Debug)]
pub struct FlightRecovery {
    pub scheme: Scheme,
    pub units: Vec<Vec<Option<Vec<u8>>>>,
}

impl FlightRecovery {
    pub fn frame_count(&self) -> usize {
        self.units.len()
    }

    pub fn units_per_frame(&self) -> usize {
        self.scheme.units_per_frame()
    }

    pub fn recovered_units(&self, frame: usize) -> usize {
        self.units[frame].iter().filter(|u| u.is_some()).count()
    }

    pub fn is_frame_recovered(&self, frame: usize) -> bool {
        self.recovered_units(frame) == self.units_per_frame()
    }

    pub fn recovered_frames(&self) -> usize {
        (0..self.frame_count()).filter(|&f| self.is_frame_recovered(f)).count()
    }

    /// Units of `frame` whose recovered content equals the transmitted frame bytes.
    pub fn correct_units(&self, frame: usize, truth: &[u8]) -> usize {
        let unit = if self.scheme == Scheme::Uncoded {
            SUBPACKET_PAYLOAD_LEN
        } else {
            FRAME_LEN
        };
        self.units[frame]
            .iter()
            .zip(truth.chunks(unit))
            .filter(|(got, want)| got.as_deref() == Some(*want))
            .count()
    }
}

/// Receive-side state for one flight. Call [`FlightDecoder::decode_second`]
/// for every second, including dropped ones, then [`FlightDecoder::finish`].
#[derive(Debug)]
pub struct FlightDecoder {
    scheme: Scheme,
    rs: Option<ReedSolomon>,
    fountain: Option<FountainDecoder>,
    units: Vec<Vec<Option<Vec<u8>>>>,
    envelopes_ingested: usize,
}

impl FlightDecoder {
    pub fn new(scheme: Scheme) -> Self {
        FlightDecoder {
            scheme,
            rs: scheme.rs_params().map(ReedSolomon::new),
            fountain: scheme.df_rate().map(|_| FountainDecoder::new(FRAME_LEN)),
            units: Vec::new(),
            envelopes_ingested: 0,
        }
    }

    pub fn fountain(&self) -> Option<&FountainDecoder> {
        self.fountain.as_ref()
    }

    pub fn envelopes_ingested(&self) -> usize {
        self.envelopes_ingested
    }

    pub fn decode_second(&mut self, t: u32, received: Option<&[u8]>) {
        let t_idx = t as usize;
        if self.units.len() <= t_idx {
            self.units.resize(t_idx + 1, vec![None; self.scheme.units_per_frame()]);
        }
        let Some(rx) = received else { return };
        if rx.len() != wire_len_in_second(self.scheme, t) {
            return;
        }
        match self.scheme {
            Scheme::Uncoded => {
                for (i, chunk) in rx.chunks_exact(SUBPACKET_LEN).enumerate() {
                    if let Ok(sp) = SubPacket::from_bytes(chunk) {
                        if sp.timestamp as u32 == t {
                            self.units[t_idx][i] = Some(sp.payload.to_vec());
                        }
                    }
                }
            }
            Scheme::Rs255_111 => {
                if let Some(bytes) = rs_decode_stream(self.rs.as_ref().unwrap(), rx, FRAME_LEN) {
                    if valid_frame(&bytes, t) {
                        self.units[t_idx][0] = Some(bytes);
                    }
                }
            }
            Scheme::Rs223Df12 | Scheme::Rs191Df47 => {
                let rs = self.rs.as_ref().unwrap();
                let env_wire = rs_wire_len(ENVELOPE_LEN, rs.params());
                for chunk in rx.chunks_exact(env_wire) {
                    let Some(bytes) = rs_decode_stream(rs, chunk, ENVELOPE_LEN) else {
                        continue;
                    };
                    let Ok(env) = envelope_unpack(&bytes) else {
                        continue;
                    };
                    // a window reaching past the current second cannot be genuine
                    if env.descriptor.window as u32 > t + 1 {
                        continue;
                    }
                    let cw = FountainCodeword {
                        descriptor: env.descriptor,
                        payload: env.payload,
                    };
                    if self.fountain.as_mut().unwrap().ingest(&cw).is_ok() {
                        self.envelopes_ingested += 1;
                    }
                }
            }
        }
    }

    pub fn finish(mut self) -> FlightRecovery {
        if let Some(fountain) = &self.fountain {
            for (f, units) in self.units.iter_mut().enumerate() {
                if let Some(bytes) = fountain.frame(f) {
                    if valid_frame(bytes, f as u32) {
                        units[0] = Some(bytes.to_vec());
                    }
                }
            }
        }
        FlightRecovery {
            scheme: self.scheme,
            units: self.units,
        }
    }
}

fn valid_frame(bytes: &[u8], t: u32) -> bool {
    Frame::from_bytes(bytes).is_ok_and(|f| f.timestamp as u32 == t)
}

/// Decodes a whole received flight: one entry per second, `None` for dropped seconds.
pub fn decode_flight<'a, I>(received: I, scheme: Scheme) -> FlightRecovery
where
    I: IntoIterator<Item = (u32, Option<&'a [u8]>)>,
{
    let mut dec = FlightDecoder::new(scheme);
    for (t, rx) in received {
        dec.decode_second(t, rx);
    }
    dec.finish()
}
