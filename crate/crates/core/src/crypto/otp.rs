use std::collections::HashSet;

use rand::{CryptoRng, RngCore};

use super::block::Block;
use super::prf::{Prf, PrfKey};
use super::CryptoError;

/// A row-major matrix of 128-bit blocks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Block>,
}

impl BlockMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        BlockMatrix { rows, cols, data: vec![Block::ZERO; rows * cols] }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<Block>) -> Result<Self, CryptoError> {
        if data.len() != rows * cols {
            return Err(CryptoError::ShapeMismatch {
                expected: (rows, cols),
                found: (data.len(), 1),
            });
        }
        Ok(BlockMatrix { rows, cols, data })
    }

    /// Fresh uniform blocks of the given shape.
    pub fn random<R: RngCore + CryptoRng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Self {
        let data = (0..rows * cols).map(|_| Block::random(rng)).collect();
        BlockMatrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, r: usize, c: usize) -> Block {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Block) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Block] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [Block] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[Block] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<Block> {
        self.data
    }

    pub fn xor(&self, other: &BlockMatrix) -> Result<BlockMatrix, CryptoError> {
        self.check_shape(other)?;
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| a ^ b).collect();
        Ok(BlockMatrix { rows: self.rows, cols: self.cols, data })
    }

    /// Horizontal concatenation `{self other}`.
    pub fn concat_cols(&self, other: &BlockMatrix) -> Result<BlockMatrix, CryptoError> {
        if self.rows != other.rows {
            return Err(CryptoError::ShapeMismatch { expected: self.shape(), found: other.shape() });
        }
        let cols = self.cols + other.cols;
        let mut data = Vec::with_capacity(self.rows * cols);
        for r in 0..self.rows {
            data.extend_from_slice(self.row(r));
            data.extend_from_slice(other.row(r));
        }
        Ok(BlockMatrix { rows: self.rows, cols, data })
    }

    /// Splits columns `[0, at)` and `[at, cols)`.
    pub fn split_cols(&self, at: usize) -> (BlockMatrix, BlockMatrix) {
        let mut left = BlockMatrix::zeros(self.rows, at);
        let mut right = BlockMatrix::zeros(self.rows, self.cols - at);
        for r in 0..self.rows {
            left.row_mut(r).copy_from_slice(&self.row(r)[..at]);
            right.row_mut(r).copy_from_slice(&self.row(r)[at..]);
        }
        (left, right)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.data.len() * 16);
        Block::write_many(&self.data, &mut out);
        out
    }

    pub fn from_bytes(rows: usize, cols: usize, bytes: &[u8]) -> Result<Self, CryptoError> {
        let data = Block::read_many(bytes).ok_or(CryptoError::ShapeMismatch {
            expected: (rows, cols),
            found: (bytes.len(), 0),
        })?;
        BlockMatrix::from_vec(rows, cols, data)
    }

    fn check_shape(&self, other: &BlockMatrix) -> Result<(), CryptoError> {
        if self.shape() != other.shape() {
            return Err(CryptoError::ShapeMismatch { expected: self.shape(), found: other.shape() });
        }
        Ok(())
    }
}

/// Element-wise PRF application.
pub fn prf_apply(key: &PrfKey, input: &BlockMatrix) -> BlockMatrix {
    let prf = Prf::new(key);
    BlockMatrix { rows: input.rows, cols: input.cols, data: prf.eval_many(&input.data) }
}

/// One-time pad `v ⊕ PRF(key, r)`. Applying it twice with the same pad is the
/// identity.
pub fn otp_encrypt(v: &BlockMatrix, key: &PrfKey, r: &BlockMatrix) -> Result<BlockMatrix, CryptoError> {
    v.check_shape(r)?;
    v.xor(&prf_apply(key, r))
}

/// Records every (key, pad block) pair used to encrypt during a session and
/// rejects reuse.
#[derive(Default)]
pub struct PadLedger {
    used: HashSet<(u64, Block)>,
}

impl PadLedger {
    pub fn new() -> Self {
        PadLedger::default()
    }

    pub fn consume(&mut self, key: &PrfKey, r: &BlockMatrix) -> Result<(), CryptoError> {
        let fp = key.fingerprint();
        for &block in r.as_slice() {
            if !self.used.insert((fp, block)) {
                return Err(CryptoError::PadReuse);
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.used.len()
    }

    pub fn is_empty(&self) -> bool {
        self.used.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crypto::prf::PrfId;
    use crate::crypto::rng::SessionRng;

    #[test]
    fn zero_plaintext_yields_pad() {
        let mut rng = SessionRng::deterministic(3);
        let k = PrfKey::sample(PrfId::TestCipher, &mut rng);
        let r = BlockMatrix::random(3, 2, &mut rng);
        let ct = otp_encrypt(&BlockMatrix::zeros(3, 2), &k, &r).unwrap();
        assert_eq!(ct, prf_apply(&k, &r));
    }

    #[test]
    fn encryption_is_an_involution() {
        let mut rng = SessionRng::deterministic(4);
        let k = PrfKey::sample(PrfId::Aes128, &mut rng);
        let r = BlockMatrix::random(4, 3, &mut rng);
        let v = BlockMatrix::random(4, 3, &mut rng);
        let twice = otp_encrypt(&otp_encrypt(&v, &k, &r).unwrap(), &k, &r).unwrap();
        assert_eq!(twice, v);
    }

    #[test]
    fn prf_apply_is_cellwise() {
        let mut rng = SessionRng::deterministic(5);
        let k = PrfKey::sample(PrfId::TestCipher, &mut rng);
        let m = BlockMatrix::random(5, 4, &mut rng);
        let out = prf_apply(&k, &m);
        let prf = Prf::new(&k);
        for r in 0..5 {
            for c in 0..4 {
                assert_eq!(out.get(r, c), prf.eval(m.get(r, c)));
            }
        }
    }

    #[test]
    fn distinct_keys_disagree_somewhere() {
        let mut rng = SessionRng::deterministic(6);
        for _ in 0..100 {
            let r = BlockMatrix::random(2, 2, &mut rng);
            let k1 = PrfKey::sample(PrfId::TestCipher, &mut rng);
            let k2 = PrfKey::sample(PrfId::TestCipher, &mut rng);
            assert_ne!(prf_apply(&k1, &r), prf_apply(&k2, &r));
        }
    }

    #[test]
    fn shape_mismatch_is_rejected() {
        let mut rng = SessionRng::deterministic(7);
        let k = PrfKey::sample(PrfId::TestCipher, &mut rng);
        let err = otp_encrypt(&BlockMatrix::zeros(2, 2), &k, &BlockMatrix::zeros(2, 3));
        assert!(matches!(err, Err(CryptoError::ShapeMismatch { .. })));
    }

    #[test]
    fn ledger_rejects_pad_reuse() {
        let mut rng = SessionRng::deterministic(8);
        let k = PrfKey::sample(PrfId::TestCipher, &mut rng);
        let r = BlockMatrix::random(2, 2, &mut rng);
        let mut ledger = PadLedger::new();
        ledger.consume(&k, &r).unwrap();
        assert_eq!(ledger.len(), 4);
        assert!(matches!(ledger.consume(&k, &r), Err(CryptoError::PadReuse)));
        let other = PrfKey::sample(PrfId::TestCipher, &mut rng);
        ledger.consume(&other, &r).unwrap();
    }
}
