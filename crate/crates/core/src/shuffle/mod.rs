//! Encrypted-input preparation and the two-sided oblivious row shuffle.
//!
//! The result is an XOR sharing of `π_B(π_A(V))` where `V` joins the
//! consumer's and provider's row payloads and neither party learns the
//! composed permutation.

mod layout;
mod prepare;
mod rows;

pub use layout::RowLayout;
pub use prepare::{open_prepared, prepare_consumer, prepare_provider, PrepareStateA, PrepareStateB};
pub use rows::{shuffle_consumer, shuffle_provider, SharedMatrix, ShuffleOptions, ShuffleOutput};

use crate::crypto::{BlockMatrix, CryptoError, PadLedger, PrfId, SessionRng};
use crate::gc::{GcError, GcSession};
use crate::transport::{Channel, TransportError};

#[derive(Debug, thiserror::Error)]
pub enum ShuffleError {
    #[error(transparent)]
    Transport(#[from] TransportError),
    #[error(transparent)]
    Crypto(#[from] CryptoError),
    #[error(transparent)]
    Gc(#[from] GcError),
    #[error("{what}: expected {expected}, found {found}")]
    Shape { what: &'static str, expected: usize, found: usize },
    #[error("layout: {0}")]
    Layout(String),
}

/// Preparation followed by the shuffle, consumer side. `rows` are the A
/// region bits of each variable row.
#[allow(clippy::too_many_arguments)]
pub fn run_consumer(
    channel: &mut Channel,
    gc: &mut GcSession,
    layout: &RowLayout,
    rows: &[Vec<bool>],
    prf: PrfId,
    opts: &ShuffleOptions,
    rng: &mut SessionRng,
    ledger: &mut PadLedger,
) -> Result<ShuffleOutput, ShuffleError> {
    let f_a: BlockMatrix = layout.pack_a(rows)?;
    let state = prepare_consumer(channel, layout, &f_a, prf, rng, ledger)?;
    shuffle_consumer(channel, gc, layout, state, opts, rng, ledger)
}

/// Provider side; `rows` are the B region bits.
#[allow(clippy::too_many_arguments)]
pub fn run_provider(
    channel: &mut Channel,
    gc: &mut GcSession,
    layout: &RowLayout,
    rows: &[Vec<bool>],
    prf: PrfId,
    opts: &ShuffleOptions,
    rng: &mut SessionRng,
    ledger: &mut PadLedger,
) -> Result<ShuffleOutput, ShuffleError> {
    let f_b = layout.pack_b(rows)?;
    let state = prepare_provider(channel, layout, &f_b, prf, rng, ledger)?;
    shuffle_provider(channel, gc, layout, state, rows.len(), opts, rng, ledger)
}
