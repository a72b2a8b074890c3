//! Finite-field arithmetic over GF(2^8) and dense linear algebra over GF(2).

mod bitvec;
mod eliminator;
mod gf256;
mod matrix;

pub use bitvec::BitVector;
pub(crate) use eliminator::xor_bytes;
pub use eliminator::{Eliminator, InsertOutcome};
pub use gf256::{gf_inv, gf_mul, poly_eval, Gf256, GENERATOR, PRIMITIVE_POLY};
pub(crate) use gf256::{EXP, LOG};
pub use matrix::Gf2Matrix;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GaloisError {
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("row width {got} does not match matrix width {expected}")]
    WidthMismatch { expected: usize, got: usize },
    #[error("combination width {width} exceeds eliminator dimension {dimension}")]
    WidthExceedsDimension { width: usize, dimension: usize },
    #[error("payload of {got} bytes, eliminator expects {expected}")]
    PayloadLength { expected: usize, got: usize },
}
