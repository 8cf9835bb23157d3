use aes::cipher::{generic_array::GenericArray, BlockEncrypt, KeyInit};
use aes::Aes128;

use crate::crypto::Block;

const FIXED_KEY: [u8; 16] = *b"ppsat-gc-fixkey!";

/// Tweakable correlation-robust hash from fixed-key AES:
/// `H(a, b, t) = pi(K) ^ K` with `K = 2a ^ 4b ^ t`.
pub struct FixedKeyHash {
    cipher: Aes128,
}

impl Default for FixedKeyHash {
    fn default() -> Self {
        FixedKeyHash { cipher: Aes128::new(GenericArray::from_slice(&FIXED_KEY)) }
    }
}

impl FixedKeyHash {
    #[inline]
    fn prep(a: Block, b: Block, tweak: u64) -> Block {
        a.double() ^ b.double().double() ^ Block(tweak as u128)
    }

    pub fn hash(&self, a: Block, b: Block, tweak: u64) -> Block {
        let k = Self::prep(a, b, tweak);
        let mut blk = GenericArray::from(k.to_bytes());
        self.cipher.encrypt_block(&mut blk);
        Block::from_bytes(blk.into()) ^ k
    }

    /// Four hashes with one pipelined cipher call.
    pub fn hash4(&self, pairs: [(Block, Block); 4], tweak: u64) -> [Block; 4] {
        let ks = pairs.map(|(a, b)| Self::prep(a, b, tweak));
        let mut blks = ks.map(|k| GenericArray::from(k.to_bytes()));
        self.cipher.encrypt_blocks(&mut blks);
        let mut out = [Block::ZERO; 4];
        for i in 0..4 {
            out[i] = Block::from_bytes(blks[i].into()) ^ ks[i];
        }
        out
    }
}
