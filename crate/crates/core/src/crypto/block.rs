use std::fmt;
use std::ops::{BitXor, BitXorAssign};

use rand::{CryptoRng, RngCore};

/// A 128-bit value: wire labels, PRF inputs and outputs, packed matrix rows.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Block(pub u128);

impl Block {
    pub const ZERO: Block = Block(0);
    pub const SIZE: usize = 16;

    pub fn random<R: RngCore + CryptoRng + ?Sized>(rng: &mut R) -> Block {
        let mut bytes = [0u8; 16];
        rng.fill_bytes(&mut bytes);
        Block::from_bytes(bytes)
    }

    #[inline]
    pub fn lsb(self) -> bool {
        self.0 & 1 == 1
    }

    #[inline]
    pub fn bit(self, index: usize) -> bool {
        (self.0 >> index) & 1 == 1
    }

    #[inline]
    pub fn set_bit(&mut self, index: usize, value: bool) {
        if value {
            self.0 |= 1u128 << index;
        } else {
            self.0 &= !(1u128 << index);
        }
    }

    #[inline]
    pub fn to_bytes(self) -> [u8; 16] {
        self.0.to_le_bytes()
    }

    #[inline]
    pub fn from_bytes(bytes: [u8; 16]) -> Block {
        Block(u128::from_le_bytes(bytes))
    }

    /// Multiplication by `x` in GF(2^128) modulo x^128 + x^7 + x^2 + x + 1.
    #[inline]
    pub fn double(self) -> Block {
        let carry = self.0 >> 127;
        Block((self.0 << 1) ^ (carry * 0x87))
    }

    /// Reads `count` blocks from a little-endian byte slice.
    pub fn read_many(bytes: &[u8]) -> Option<Vec<Block>> {
        if !bytes.len().is_multiple_of(16) {
            return None;
        }
        Some(
            bytes
                .chunks_exact(16)
                .map(|c| Block::from_bytes(c.try_into().unwrap()))
                .collect(),
        )
    }

    pub fn write_many(blocks: &[Block], out: &mut Vec<u8>) {
        out.reserve(blocks.len() * 16);
        for b in blocks {
            out.extend_from_slice(&b.to_bytes());
        }
    }
}

impl BitXor for Block {
    type Output = Block;
    #[inline]
    fn bitxor(self, rhs: Block) -> Block {
        Block(self.0 ^ rhs.0)
    }
}

impl BitXorAssign for Block {
    #[inline]
    fn bitxor_assign(&mut self, rhs: Block) {
        self.0 ^= rhs.0;
    }
}

impl fmt::Debug for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Block({:032x})", self.0)
    }
}

impl From<u128> for Block {
    fn from(v: u128) -> Block {
        Block(v)
    }
}

/// Packs booleans LSB-first into bytes.
pub fn pack_bits(bits: &[bool]) -> Vec<u8> {
    let mut out = vec![0u8; bits.len().div_ceil(8)];
    for (i, &b) in bits.iter().enumerate() {
        if b {
            out[i / 8] |= 1 << (i % 8);
        }
    }
    out
}

/// Inverse of [`pack_bits`]; `None` if `bytes` is too short for `count` bits.
pub fn unpack_bits(bytes: &[u8], count: usize) -> Option<Vec<bool>> {
    if bytes.len() != count.div_ceil(8) {
        return None;
    }
    Some((0..count).map(|i| (bytes[i / 8] >> (i % 8)) & 1 == 1).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn double_reduces_top_bit() {
        assert_eq!(Block(1 << 127).double(), Block(0x87));
        assert_eq!(Block(3).double(), Block(6));
    }

    #[test]
    fn bit_packing_round_trip() {
        let bits = [true, false, true, true, false, false, false, true, true];
        let packed = pack_bits(&bits);
        assert_eq!(packed.len(), 2);
        assert_eq!(unpack_bits(&packed, bits.len()).unwrap(), bits);
        assert!(unpack_bits(&packed, 20).is_none());
    }
}
