//! Blocks, PRFs, one-time pads, permutations, oblivious transfer and session
//! randomness.

mod block;
mod otp;
mod ot;
mod permutation;
mod prf;
mod rng;

pub use block::{pack_bits, unpack_bits, Block};
pub use ot::{OtReceiver, OtSender};
pub use otp::{otp_encrypt, prf_apply, BlockMatrix, PadLedger};
pub use permutation::Permutation;
pub use prf::{encrypt_rounds, sbox, Prf, PrfId, PrfKey};
pub use rng::SessionRng;

use crate::transport::TransportError;

#[derive(Debug, thiserror::Error)]
pub enum CryptoError {
    #[error("shape mismatch: expected {expected:?}, found {found:?}")]
    ShapeMismatch { expected: (usize, usize), found: (usize, usize) },
    #[error("one-time pad reused")]
    PadReuse,
    #[error("not a permutation")]
    NotAPermutation,
    #[error("invalid group element")]
    InvalidPoint,
    #[error("malformed: {0}")]
    Malformed(String),
    #[error(transparent)]
    Transport(#[from] TransportError),
}
