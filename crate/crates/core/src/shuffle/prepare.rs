use crate::crypto::{otp_encrypt, prf_apply, BlockMatrix, PadLedger, PrfId, PrfKey, SessionRng};
use crate::transport::{Channel, FrameTag};

use super::{RowLayout, ShuffleError};

/// What the consumer keeps after preparation: the provider's pads `R` and
/// the joint matrix encrypted under the provider's key.
pub struct PrepareStateA {
    pub(crate) prf: PrfId,
    pub(crate) pads: BlockMatrix,
    pub(crate) ciphertext: BlockMatrix,
}

/// What the provider keeps: its key only.
pub struct PrepareStateB {
    pub(crate) key: PrfKey,
}

impl PrepareStateA {
    pub fn pads(&self) -> &BlockMatrix {
        &self.pads
    }

    pub fn ciphertext(&self) -> &BlockMatrix {
        &self.ciphertext
    }
}

/// Test-side decryption with both parties' states.
pub fn open_prepared(a: &PrepareStateA, b: &PrepareStateB) -> Result<BlockMatrix, ShuffleError> {
    Ok(otp_encrypt(&a.ciphertext, &b.key, &a.pads)?)
}

pub(crate) fn recv_matrix(
    channel: &mut Channel,
    tag: FrameTag,
    rows: usize,
    cols: usize,
) -> Result<BlockMatrix, ShuffleError> {
    let bytes = channel.recv_expect(tag)?;
    if bytes.len() != rows * cols * 16 {
        return Err(ShuffleError::Shape {
            what: tag.name(),
            expected: rows * cols * 16,
            found: bytes.len(),
        });
    }
    Ok(BlockMatrix::from_bytes(rows, cols, &bytes)?)
}

/// Consumer side of preparation. `f_a` is the packed A region, one row per
/// variable.
pub fn prepare_consumer(
    channel: &mut Channel,
    layout: &RowLayout,
    f_a: &BlockMatrix,
    prf: PrfId,
    rng: &mut SessionRng,
    ledger: &mut PadLedger,
) -> Result<PrepareStateA, ShuffleError> {
    let n = f_a.rows();
    check_cols(f_a, layout.a_blocks())?;
    let k_a = PrfKey::sample(prf, rng);
    let r_a = BlockMatrix::random(n, layout.a_blocks(), rng);
    ledger.consume(&k_a, &r_a)?;
    let psi = otp_encrypt(f_a, &k_a, &r_a)?;
    channel.send(FrameTag::Psi, &psi.to_bytes())?;

    let phi_a = recv_matrix(channel, FrameTag::PhiA, n, layout.a_blocks())?;
    let phi_b = recv_matrix(channel, FrameTag::PhiB, n, layout.b_blocks())?;
    let pad_a = recv_matrix(channel, FrameTag::PadA, n, layout.a_blocks())?;
    let pad_b = recv_matrix(channel, FrameTag::PadB, n, layout.b_blocks())?;

    let own_removed = phi_a.xor(&prf_apply(&k_a, &r_a))?;
    Ok(PrepareStateA { prf, pads: pad_a.concat_cols(&pad_b)?, ciphertext: own_removed.concat_cols(&phi_b)? })
}

/// Provider side of preparation. `f_b` is the packed B region.
pub fn prepare_provider(
    channel: &mut Channel,
    layout: &RowLayout,
    f_b: &BlockMatrix,
    prf: PrfId,
    rng: &mut SessionRng,
    ledger: &mut PadLedger,
) -> Result<PrepareStateB, ShuffleError> {
    let n = f_b.rows();
    check_cols(f_b, layout.b_blocks())?;
    let key = PrfKey::sample(prf, rng);
    let pad_a = BlockMatrix::random(n, layout.a_blocks(), rng);
    let pad_b = BlockMatrix::random(n, layout.b_blocks(), rng);
    ledger.consume(&key, &pad_a)?;
    ledger.consume(&key, &pad_b)?;

    let psi = recv_matrix(channel, FrameTag::Psi, n, layout.a_blocks())?;
    let phi_a = otp_encrypt(&psi, &key, &pad_a)?;
    let phi_b = otp_encrypt(f_b, &key, &pad_b)?;
    channel.send(FrameTag::PhiA, &phi_a.to_bytes())?;
    channel.send(FrameTag::PhiB, &phi_b.to_bytes())?;
    channel.send(FrameTag::PadA, &pad_a.to_bytes())?;
    channel.send(FrameTag::PadB, &pad_b.to_bytes())?;
    Ok(PrepareStateB { key })
}

fn check_cols(m: &BlockMatrix, cols: usize) -> Result<(), ShuffleError> {
    if m.cols() != cols {
        return Err(ShuffleError::Shape { what: "region", expected: cols, found: m.cols() });
    }
    Ok(())
}
