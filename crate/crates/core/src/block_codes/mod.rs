//! Telemetry Hamming sublayer, Reed-Solomon codec and block interleaver.

mod hamming;
mod interleave;
mod reed_solomon;

pub use hamming::{hamming_decode, hamming_encode, HammingWord};
pub use interleave::{deinterleave, interleave};
pub use reed_solomon::{rs_decode, rs_encode, rs_shorten_encode, ReedSolomon, RsCodeword, RsParams};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BlockCodeError {
    #[error("invalid RS parameters ({n},{k}): need 0 < k < n <= 255")]
    InvalidParams { n: usize, k: usize },
    #[error("expected {expected} data symbols, got {got}")]
    DataLength { expected: usize, got: usize },
    #[error("shortened data length {len} must be in 1..={k}")]
    ShortenedLength { len: usize, k: usize },
    #[error("block of {got} symbols does not fit a code of length {expected}")]
    BlockLength { expected: usize, got: usize },
    #[error("erasure position {position} outside block of {len}")]
    ErasureOutOfRange { position: usize, len: usize },
    #[error("erasure position {0} listed twice")]
    DuplicateErasure(usize),
    #[error("uncorrectable block")]
    Uncorrectable,
    #[error("interleaver needs at least one block")]
    EmptyInterleave,
    #[error("ragged interleaver input: expected {expected} bytes, got {got}")]
    RaggedBlocks { expected: usize, got: usize },
}
