//! Semi-honest garbled circuits: circuit construction, garbling and
//! evaluation, and a session engine with persistent unreleased values.

mod aes;
mod builder;
mod circuit;
mod garble;
mod hash;
mod session;

pub use self::aes::{aes_circuit, sbox_circuit};
pub use builder::{Bit, CircuitBuilder};
pub use circuit::{Circuit, Gate, GateKind, GateSpec, Input, InputKind, Wire};
pub use garble::{evaluate, garble, TABLE_BYTES_PER_AND};
pub use hash::FixedKeyHash;
pub use session::{recombine, xor_share_circuit, GcSession, GcStats, GroupResult, OutputGroup, ReleaseTarget, SecretRef};

use crate::crypto::CryptoError;
use crate::transport::TransportError;

#[derive(Debug, thiserror::Error)]
pub enum GcError {
    #[error(transparent)]
    Transport(#[from] TransportError),
    #[error(transparent)]
    Crypto(#[from] CryptoError),
    #[error("circuit has a cycle")]
    CycleDetected,
    #[error("wire {0} is never driven")]
    Undriven(Wire),
    #[error("wire {0} is driven more than once")]
    MultiplyDriven(Wire),
    #[error("wire {0} out of range")]
    WireOutOfRange(Wire),
    #[error("arity mismatch: expected {expected}, found {found}")]
    Arity { expected: usize, found: usize },
    #[error("secret belongs to another session")]
    CrossSession,
    #[error("malformed message: {0}")]
    Malformed(String),
}
