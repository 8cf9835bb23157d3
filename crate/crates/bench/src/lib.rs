//! Fixtures shared by the criterion benches.

use ppsat_core::crypto::{Block, PrfId};
use ppsat_core::gc::{aes_circuit, Bit, Circuit, CircuitBuilder};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

pub fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// One block through the in-circuit cipher, keys as evaluator inputs.
pub fn cipher_circuit(id: PrfId) -> Circuit {
    let mut b = CircuitBuilder::new();
    let input = b.garbler_inputs(128);
    let keys: Vec<Vec<Bit>> = (0..=id.rounds()).map(|_| b.evaluator_inputs(128)).collect();
    let out = aes_circuit(&mut b, &input, &keys);
    b.finish(&out)
}

pub fn random_labels(n: usize, seed: u64) -> Vec<Block> {
    let mut r = rng(seed);
    (0..n).map(|_| Block::random(&mut r)).collect()
}
