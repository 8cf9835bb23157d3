use crate::crypto::{prf_apply, Block, BlockMatrix, PadLedger, Permutation, PrfId, PrfKey, SessionRng};
use crate::gc::{aes_circuit, Bit, Circuit, CircuitBuilder, GcSession, OutputGroup, SecretRef};
use crate::transport::{Channel, FrameTag, ReleasePurpose, Role};

use super::prepare::recv_matrix;
use super::{PrepareStateA, PrepareStateB, RowLayout, ShuffleError};

#[derive(Clone, Debug, Default)]
pub struct ShuffleOptions {
    /// Replaces this party's sampled permutation; for tests.
    pub force_permutation: Option<Permutation>,
}

/// One party's XOR share of the permuted payload.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SharedMatrix {
    layout: RowLayout,
    share: BlockMatrix,
}

impl SharedMatrix {
    pub fn layout(&self) -> &RowLayout {
        &self.layout
    }

    pub fn blocks(&self) -> &BlockMatrix {
        &self.share
    }

    pub fn rows(&self) -> usize {
        self.share.rows()
    }

    /// This party's share, one bit vector per row in layout order.
    pub fn bits(&self) -> Vec<Vec<bool>> {
        self.layout.unpack(&self.share)
    }

    /// Test-side recombination of both shares.
    pub fn recombine(a: &SharedMatrix, b: &SharedMatrix) -> Result<Vec<Vec<bool>>, ShuffleError> {
        Ok(a.layout.unpack(&a.share.xor(&b.share)?))
    }
}

pub struct ShuffleOutput {
    pub share: SharedMatrix,
    /// The permutation this party contributed.
    pub permutation: Permutation,
}

fn block_bits(blocks: &[Block]) -> Vec<bool> {
    blocks.iter().flat_map(|b| (0..128).map(move |k| b.bit(k))).collect()
}

fn bits_to_blocks(bits: &[bool]) -> Vec<Block> {
    bits.chunks(128)
        .map(|chunk| {
            let mut b = Block::ZERO;
            for (k, &v) in chunk.iter().enumerate() {
                b.set_bit(k, v);
            }
            b
        })
        .collect()
}

/// `PRF(k_B, x) ⊕ PRF(k_A', y)` for each of `blocks` block pairs, with `x`
/// from the evaluator, `y` from the garbler and both keys carried.
fn mask_circuit(blocks: usize, rounds: usize) -> Circuit {
    let mut b = CircuitBuilder::new();
    let x = b.evaluator_inputs(128 * blocks);
    let y = b.garbler_inputs(128 * blocks);
    let k_b: Vec<Vec<Bit>> = (0..=rounds).map(|_| b.carried_inputs(128)).collect();
    let k_a: Vec<Vec<Bit>> = (0..=rounds).map(|_| b.carried_inputs(128)).collect();
    let mut out = Vec::with_capacity(128 * blocks);
    for blk in 0..blocks {
        let r = 128 * blk..128 * (blk + 1);
        let delta = aes_circuit(&mut b, &x[r.clone()], &k_b);
        let gamma = aes_circuit(&mut b, &y[r], &k_a);
        out.extend(b.xor_vec(&delta, &gamma));
    }
    b.finish(&out)
}

fn key_secrets(
    channel: &mut Channel,
    gc: &mut GcSession,
    prf: PrfId,
    own_key: &PrfKey,
) -> Result<(SecretRef, SecretRef), ShuffleError> {
    let len = 128 * (prf.rounds() + 1);
    let own = block_bits(&own_key.round_keys());
    let (b_bits, a_bits): (&[bool], &[bool]) = match gc.role() {
        Role::Provider => (&own, &[]),
        Role::Consumer => (&[], &own),
    };
    let k_b = gc.input_from(channel, Role::Provider, len, b_bits)?;
    let k_a = gc.input_from(channel, Role::Consumer, len, a_bits)?;
    Ok((k_b, k_a))
}

fn pick_permutation(n: usize, opts: &ShuffleOptions, rng: &mut SessionRng) -> Result<Permutation, ShuffleError> {
    match &opts.force_permutation {
        Some(p) if p.len() != n => Err(ShuffleError::Shape { what: "forced permutation", expected: n, found: p.len() }),
        Some(p) => Ok(p.clone()),
        None => Ok(Permutation::sample(n, rng)),
    }
}

/// Consumer side of the row shuffle.
pub fn shuffle_consumer(
    channel: &mut Channel,
    gc: &mut GcSession,
    layout: &RowLayout,
    state: PrepareStateA,
    opts: &ShuffleOptions,
    rng: &mut SessionRng,
    ledger: &mut PadLedger,
) -> Result<ShuffleOutput, ShuffleError> {
    let (n, cols) = state.ciphertext.shape();
    let prf = state.prf;
    let key = PrfKey::sample(prf, rng);
    let pads = BlockMatrix::random(n, cols, rng);
    ledger.consume(&key, &pads)?;
    let pi_a = pick_permutation(n, opts, rng)?;

    let masked = state.ciphertext.xor(&prf_apply(&key, &pads))?;
    let sigma = pi_a.apply_rows(&masked);
    let permuted_pads = pi_a.apply_rows(&pads);
    channel.send(FrameTag::Sigma, &sigma.to_bytes())?;
    channel.send(FrameTag::PermutedPadA, &permuted_pads.to_bytes())?;
    let lambda = prf_apply(&key, &permuted_pads);
    let permuted_r = pi_a.apply_rows(&state.pads);

    let (k_b, k_a) = key_secrets(channel, gc, prf, &key)?;
    let circuit = mask_circuit(cols, prf.rounds());
    for r in 0..n {
        let inputs = block_bits(permuted_r.row(r));
        let mut out = gc.execute(channel, &circuit, &inputs, &[&k_b, &k_a], &[OutputGroup::keep(128 * cols)])?;
        let dg = out.pop().unwrap().into_secret().unwrap();
        gc.release_masked_to_garbler(channel, &dg, &block_bits(lambda.row(r)), ReleasePurpose::ShuffleMasked)?;
    }

    let theta = recv_matrix(channel, FrameTag::PermutedTheta, n, cols)?;
    let _r1 = recv_matrix(channel, FrameTag::PermutedR1, n, cols)?;
    let r2 = recv_matrix(channel, FrameTag::PermutedR2, n, cols)?;
    let share = theta.xor(&prf_apply(&key, &r2))?;
    Ok(ShuffleOutput { share: SharedMatrix { layout: layout.clone(), share }, permutation: pi_a })
}

/// Provider side of the row shuffle.
#[allow(clippy::too_many_arguments)]
pub fn shuffle_provider(
    channel: &mut Channel,
    gc: &mut GcSession,
    layout: &RowLayout,
    state: PrepareStateB,
    n: usize,
    opts: &ShuffleOptions,
    rng: &mut SessionRng,
    ledger: &mut PadLedger,
) -> Result<ShuffleOutput, ShuffleError> {
    let cols = layout.blocks();
    let prf = state.key.id();
    let r1 = BlockMatrix::random(n, cols, rng);
    let r2 = BlockMatrix::random(n, cols, rng);
    ledger.consume(&state.key, &r1)?;
    let omega = prf_apply(&state.key, &r1);

    let sigma = recv_matrix(channel, FrameTag::Sigma, n, cols)?;
    let _permuted_pads = recv_matrix(channel, FrameTag::PermutedPadA, n, cols)?;

    let (k_b, k_a) = key_secrets(channel, gc, prf, &state.key)?;
    let circuit = mask_circuit(cols, prf.rounds());
    let mut theta = BlockMatrix::zeros(n, cols);
    for r in 0..n {
        let inputs = block_bits(r2.row(r));
        let mut out = gc.execute(channel, &circuit, &inputs, &[&k_b, &k_a], &[OutputGroup::keep(128 * cols)])?;
        let dg = out.pop().unwrap().into_secret().unwrap();
        let value = gc
            .release_masked_to_garbler(channel, &dg, &[], ReleasePurpose::ShuffleMasked)?
            .expect("garbler learns the masked value");
        for (c, blk) in bits_to_blocks(&value).into_iter().enumerate() {
            theta.set(r, c, blk ^ sigma.get(r, c) ^ omega.get(r, c));
        }
    }

    let pi_b = pick_permutation(n, opts, rng)?;
    let permuted_r1 = pi_b.apply_rows(&r1);
    channel.send(FrameTag::PermutedTheta, &pi_b.apply_rows(&theta).to_bytes())?;
    channel.send(FrameTag::PermutedR1, &permuted_r1.to_bytes())?;
    channel.send(FrameTag::PermutedR2, &pi_b.apply_rows(&r2).to_bytes())?;
    let share = prf_apply(&state.key, &permuted_r1);
    Ok(ShuffleOutput { share: SharedMatrix { layout: layout.clone(), share }, permutation: pi_b })
}
