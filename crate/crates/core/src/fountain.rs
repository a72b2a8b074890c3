//! Streaming dense random fountain code over GF(2).
//!
//! Every codeword is the XOR of a random subset of the frames produced so
//! far. The subset is described by `(seed, window)`: bit `i < window - 1`
//! is bit `i` of the splitmix64 stream seeded with `seed` (outputs consumed
//! least-significant bit first), and bit `window - 1` (the newest frame) is
//! always set. Decoding is incremental Gauss-Jordan elimination, so a frame
//! becomes available as soon as its unit vector enters the received span.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::galois::{xor_bytes, BitVector, Eliminator, GaloisError, InsertOutcome};

pub type IngestOutcome = InsertOutcome;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FountainError {
    #[error("no frames to combine")]
    NoFrames,
    #[error("frame of {got} bytes, expected {expected}")]
    FrameSize { expected: usize, got: usize },
    #[error("window must be at least 1")]
    ZeroWindow,
    #[error("window {0} exceeds the wire limit of 65535 frames")]
    WindowOverflow(usize),
    #[error(transparent)]
    Galois(#[from] GaloisError),
}

/// Conveys which frames a codeword combines.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CombinationDescriptor {
    pub seed: u32,
    /// Frames `0..window` are eligible.
    pub window: u16,
}

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// splitmix64 output stream.
#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix64(self.state)
    }
}

/// splitmix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Raw coefficient stream for `seed`, `len` bits long.
pub fn coefficient_stream(seed: u32, len: usize) -> BitVector {
    let mut rng = SplitMix64::new(seed as u64);
    let words = (0..len.div_ceil(64)).map(|_| rng.next_u64()).collect();
    BitVector::from_words(words, len)
}

/// Expands a descriptor into its `window`-bit combination vector.
pub fn expand_combination(d: CombinationDescriptor) -> Result<BitVector, FountainError> {
    if d.window == 0 {
        return Err(FountainError::ZeroWindow);
    }
    let w = d.window as usize;
    let mut v = coefficient_stream(d.seed, w);
    v.set(w - 1, true);
    Ok(v)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FountainCodeword {
    pub descriptor: CombinationDescriptor,
    pub payload: Vec<u8>,
}

/// XOR of the frames selected by `expand_combination((seed, frames.len()))`.
pub fn fountain_encode<F: AsRef<[u8]>>(frames: &[F], seed: u32) -> Result<FountainCodeword, FountainError> {
    let first = frames.first().ok_or(FountainError::NoFrames)?.as_ref().len();
    if let Some(bad) = frames.iter().find(|f| f.as_ref().len() != first) {
        return Err(FountainError::FrameSize {
            expected: first,
            got: bad.as_ref().len(),
        });
    }
    if frames.len() > u16::MAX as usize {
        return Err(FountainError::WindowOverflow(frames.len()));
    }
    let descriptor = CombinationDescriptor {
        seed,
        window: frames.len() as u16,
    };
    let combo = expand_combination(descriptor)?;
    let mut payload = vec![0u8; first];
    for i in combo.iter_ones() {
        xor_bytes(&mut payload, frames[i].as_ref());
    }
    Ok(FountainCodeword { descriptor, payload })
}

/// Causal encoder: frames arrive over time, each codeword draws from all of
/// them. Seeds are the codeword sequence number starting at 0.
#[derive(Clone, Debug)]
pub struct FountainEncoder {
    frame_len: usize,
    frames: Vec<Vec<u8>>,
    next_seed: u32,
}

impl FountainEncoder {
    pub fn new(frame_len: usize) -> Self {
        FountainEncoder {
            frame_len,
            frames: Vec::new(),
            next_seed: 0,
        }
    }

    pub fn push_frame(&mut self, frame: &[u8]) -> Result<(), FountainError> {
        if frame.len() != self.frame_len {
            return Err(FountainError::FrameSize {
                expected: self.frame_len,
                got: frame.len(),
            });
        }
        if self.frames.len() == u16::MAX as usize {
            return Err(FountainError::WindowOverflow(self.frames.len() + 1));
        }
        self.frames.push(frame.to_vec());
        Ok(())
    }

    pub fn frame_count(&self) -> usize {
        self.frames.len()
    }

    pub fn next_seed(&self) -> u32 {
        self.next_seed
    }

    pub fn next_codeword(&mut self) -> Result<FountainCodeword, FountainError> {
        let cw = fountain_encode(&self.frames, self.next_seed)?;
        self.next_seed = self.next_seed.wrapping_add(1);
        Ok(cw)
    }
}

/// Incremental decoder state.
#[derive(Clone, Debug)]
pub struct FountainDecoder {
    eliminator: Eliminator,
    frames_seen: usize,
    newly_recovered: Vec<usize>,
}

impl FountainDecoder {
    pub fn new(frame_len: usize) -> Self {
        FountainDecoder {
            eliminator: Eliminator::new(0, frame_len),
            frames_seen: 0,
            newly_recovered: Vec::new(),
        }
    }

    pub fn frame_len(&self) -> usize {
        self.eliminator.payload_len()
    }

    /// Highest window observed.
    pub fn frames_seen(&self) -> usize {
        self.frames_seen
    }

    pub fn rank(&self) -> usize {
        self.eliminator.rank()
    }

    pub fn ingest(&mut self, cw: &FountainCodeword) -> Result<IngestOutcome, FountainError> {
        let combo = expand_combination(cw.descriptor)?;
        self.ingest_combination(&combo, &cw.payload)
    }

    /// Ingests an explicit combination vector; bit `i` selects frame `i`.
    pub fn ingest_combination(&mut self, combo: &BitVector, payload: &[u8]) -> Result<IngestOutcome, FountainError> {
        if payload.len() != self.frame_len() {
            return Err(FountainError::FrameSize {
                expected: self.frame_len(),
                got: payload.len(),
            });
        }
        self.frames_seen = self.frames_seen.max(combo.len());
        self.eliminator.grow(self.frames_seen);
        let out = self.eliminator.insert(combo, payload)?;
        self.newly_recovered.extend(self.eliminator.drain_newly_solved());
        Ok(out)
    }

    pub fn is_recovered(&self, frame: usize) -> bool {
        self.eliminator.is_solved(frame)
    }

    pub fn recovered_count(&self) -> usize {
        self.eliminator.solved_count()
    }

    pub fn frame(&self, index: usize) -> Option<&[u8]> {
        self.eliminator.solution(index)
    }

    /// Frames recovered since the last call.
    pub fn take_newly_recovered(&mut self) -> Vec<usize> {
        std::mem::take(&mut self.newly_recovered)
    }

    /// Every frame whose unit vector lies in the received span.
    pub fn recovered(&self) -> BTreeMap<usize, Vec<u8>> {
        self.eliminator.solve()
    }
}
