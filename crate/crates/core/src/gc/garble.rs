//! Point-and-permute garbling with free XOR and four-row AND tables.

use rand::{CryptoRng, RngCore};

use super::circuit::{Circuit, GateKind};
use super::hash::FixedKeyHash;
use super::GcError;
use crate::crypto::Block;

pub const TABLE_BYTES_PER_AND: usize = 64;

/// Garbles `circuit`. `input_zero[k]` is the zero label of `circuit.inputs()[k]`.
/// Returns the zero label of every wire and the AND tables. The k-th AND
/// gate uses tweak `tweak + k`.
pub fn garble<R: RngCore + CryptoRng + ?Sized>(
    circuit: &Circuit,
    input_zero: &[Block],
    delta: Block,
    tweak: u64,
    hash: &FixedKeyHash,
    rng: &mut R,
) -> (Vec<Block>, Vec<u8>) {
    assert_eq!(input_zero.len(), circuit.inputs().len());
    let mut zero = vec![Block::ZERO; circuit.num_wires()];
    for (inp, &l) in circuit.inputs().iter().zip(input_zero) {
        zero[inp.wire as usize] = l;
    }
    let mut tables = Vec::with_capacity(TABLE_BYTES_PER_AND * circuit.and_count());
    let mut t = tweak;
    for g in circuit.gates() {
        let a0 = zero[g.a as usize];
        zero[g.out as usize] = match g.kind {
            GateKind::Xor => a0 ^ zero[g.b as usize],
            GateKind::Not => a0 ^ delta,
            GateKind::And => {
                let b0 = zero[g.b as usize];
                let c0 = Block::random(rng);
                let (pa, pb) = (a0.lsb(), b0.lsb());
                let pick = |z: Block, p: bool, bit: bool| if p == bit { z } else { z ^ delta };
                let mut pairs = [(Block::ZERO, Block::ZERO); 4];
                for (r, pair) in pairs.iter_mut().enumerate() {
                    let (i, j) = (r >> 1 == 1, r & 1 == 1);
                    *pair = (pick(a0, pa, i), pick(b0, pb, j));
                }
                let hs = hash.hash4(pairs, t);
                for (r, h) in hs.iter().enumerate() {
                    let (i, j) = (r >> 1 == 1, r & 1 == 1);
                    let v = (i ^ pa) & (j ^ pb);
                    let row = *h ^ c0 ^ if v { delta } else { Block::ZERO };
                    tables.extend_from_slice(&row.to_bytes());
                }
                t += 1;
                c0
            }
        };
    }
    (zero, tables)
}

/// Evaluates with one active label per input; returns the active label of
/// every wire.
pub fn evaluate(
    circuit: &Circuit,
    input_labels: &[Block],
    tables: &[u8],
    tweak: u64,
    hash: &FixedKeyHash,
) -> Result<Vec<Block>, GcError> {
    if input_labels.len() != circuit.inputs().len() {
        return Err(GcError::Arity { expected: circuit.inputs().len(), found: input_labels.len() });
    }
    if tables.len() != TABLE_BYTES_PER_AND * circuit.and_count() {
        return Err(GcError::Malformed(format!("{} table bytes", tables.len())));
    }
    let mut w = vec![Block::ZERO; circuit.num_wires()];
    for (inp, &l) in circuit.inputs().iter().zip(input_labels) {
        w[inp.wire as usize] = l;
    }
    let mut t = tweak;
    let mut at = 0usize;
    for g in circuit.gates() {
        let a = w[g.a as usize];
        w[g.out as usize] = match g.kind {
            GateKind::Xor => a ^ w[g.b as usize],
            GateKind::Not => a,
            GateKind::And => {
                let b = w[g.b as usize];
                let r = 2 * a.lsb() as usize + b.lsb() as usize;
                let off = at + 16 * r;
                let row = Block::from_bytes(tables[off..off + 16].try_into().unwrap());
                at += TABLE_BYTES_PER_AND;
                let out = row ^ hash.hash(a, b, t);
                t += 1;
                out
            }
        };
    }
    Ok(w)
}
