//! Block-cipher PRF used for one-time pads.
//!
//! Two instantiations share one wire registry: full AES-128 and a two-round
//! reduced variant for fast in-circuit evaluation during development. The
//! reduced cipher keeps the AES round structure so the garbled evaluation
//! circuit is the same code with a smaller round count.

use std::sync::OnceLock;

use aes::cipher::{generic_array::GenericArray, BlockEncrypt, KeyInit};
use rand::{CryptoRng, RngCore};
use sha2::{Digest, Sha256};

use super::block::Block;

/// Stable numeric PRF identifiers exchanged during the handshake.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum PrfId {
    Aes128 = 1,
    TestCipher = 2,
}

impl PrfId {
    pub fn from_wire(id: u8) -> Option<PrfId> {
        match id {
            1 => Some(PrfId::Aes128),
            2 => Some(PrfId::TestCipher),
            _ => None,
        }
    }

    pub fn rounds(self) -> usize {
        match self {
            PrfId::Aes128 => 10,
            PrfId::TestCipher => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            PrfId::Aes128 => "aes128",
            PrfId::TestCipher => "test",
        }
    }

    pub fn parse(name: &str) -> Option<PrfId> {
        match name {
            "aes128" | "aes" => Some(PrfId::Aes128),
            "test" | "aes128-r2" => Some(PrfId::TestCipher),
            _ => None,
        }
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct PrfKey {
    bytes: [u8; 16],
    id: PrfId,
}

impl std::fmt::Debug for PrfKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "PrfKey({:?}, {:016x})", self.id, self.fingerprint())
    }
}

impl PrfKey {
    pub fn sample<R: RngCore + CryptoRng + ?Sized>(id: PrfId, rng: &mut R) -> PrfKey {
        let mut bytes = [0u8; 16];
        rng.fill_bytes(&mut bytes);
        PrfKey { bytes, id }
    }

    pub fn from_bytes(id: PrfId, bytes: [u8; 16]) -> PrfKey {
        PrfKey { bytes, id }
    }

    pub fn id(&self) -> PrfId {
        self.id
    }

    /// Short non-reversible tag used by the pad-reuse audit.
    pub fn fingerprint(&self) -> u64 {
        let d = Sha256::new().chain_update(b"pad-key").chain_update(self.bytes).finalize();
        u64::from_le_bytes(d[..8].try_into().unwrap())
    }

    /// The `rounds + 1` round keys of the AES-128 schedule, as blocks.
    pub fn round_keys(&self) -> Vec<Block> {
        expand_key(&self.bytes)
            .iter()
            .take(self.id.rounds() + 1)
            .map(|rk| Block::from_bytes(*rk))
            .collect()
    }
}

/// A keyed PRF instance.
pub struct Prf {
    id: PrfId,
    round_keys: Vec<[u8; 16]>,
    hardware: Option<aes::Aes128>,
}

impl Prf {
    pub fn new(key: &PrfKey) -> Prf {
        let hardware = match key.id {
            PrfId::Aes128 => Some(aes::Aes128::new(GenericArray::from_slice(&key.bytes))),
            PrfId::TestCipher => None,
        };
        let round_keys = expand_key(&key.bytes)[..=key.id.rounds()].to_vec();
        Prf { id: key.id, round_keys, hardware }
    }

    pub fn id(&self) -> PrfId {
        self.id
    }

    pub fn eval(&self, input: Block) -> Block {
        match &self.hardware {
            Some(cipher) => {
                let mut b = GenericArray::from(input.to_bytes());
                cipher.encrypt_block(&mut b);
                Block::from_bytes(b.into())
            }
            None => Block::from_bytes(encrypt_rounds(&self.round_keys, input.to_bytes())),
        }
    }

    pub fn eval_many(&self, inputs: &[Block]) -> Vec<Block> {
        match &self.hardware {
            Some(cipher) => {
                let mut blocks: Vec<_> =
                    inputs.iter().map(|b| GenericArray::from(b.to_bytes())).collect();
                cipher.encrypt_blocks(&mut blocks);
                blocks.into_iter().map(|b| Block::from_bytes(b.into())).collect()
            }
            None => inputs.iter().map(|&b| self.eval(b)).collect(),
        }
    }
}

fn gf_mul(mut a: u8, mut b: u8) -> u8 {
    let mut p = 0u8;
    while b != 0 {
        if b & 1 == 1 {
            p ^= a;
        }
        let hi = a & 0x80;
        a <<= 1;
        if hi != 0 {
            a ^= 0x1b;
        }
        b >>= 1;
    }
    p
}

/// The AES S-box, derived from inversion in GF(2^8) and the affine map.
pub fn sbox() -> &'static [u8; 256] {
    static TABLE: OnceLock<[u8; 256]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut table = [0u8; 256];
        for (x, slot) in table.iter_mut().enumerate() {
            let x = x as u8;
            let inv = if x == 0 { 0 } else { (1..=255u8).find(|&y| gf_mul(x, y) == 1).unwrap() };
            let mut s = inv;
            for shift in 1..5 {
                s ^= inv.rotate_left(shift);
            }
            *slot = s ^ 0x63;
        }
        table
    })
}

fn expand_key(key: &[u8; 16]) -> [[u8; 16]; 11] {
    let sb = sbox();
    let mut words = [[0u8; 4]; 44];
    for i in 0..4 {
        words[i].copy_from_slice(&key[4 * i..4 * i + 4]);
    }
    let mut rcon = 1u8;
    for i in 4..44 {
        let mut t = words[i - 1];
        if i % 4 == 0 {
            t = [sb[t[1] as usize] ^ rcon, sb[t[2] as usize], sb[t[3] as usize], sb[t[0] as usize]];
            rcon = gf_mul(rcon, 2);
        }
        for k in 0..4 {
            words[i][k] = words[i - 4][k] ^ t[k];
        }
    }
    let mut out = [[0u8; 16]; 11];
    for (r, rk) in out.iter_mut().enumerate() {
        for c in 0..4 {
            rk[4 * c..4 * c + 4].copy_from_slice(&words[4 * r + c]);
        }
    }
    out
}

/// AES encryption with `round_keys.len() - 1` rounds; the last round omits
/// MixColumns exactly as in the full cipher.
pub fn encrypt_rounds(round_keys: &[[u8; 16]], input: [u8; 16]) -> [u8; 16] {
    let sb = sbox();
    let rounds = round_keys.len() - 1;
    let mut s = input;
    xor_in(&mut s, &round_keys[0]);
    for (r, rk) in round_keys.iter().enumerate().skip(1) {
        for b in s.iter_mut() {
            *b = sb[*b as usize];
        }
        s = shift_rows(&s);
        if r != rounds {
            s = mix_columns(&s);
        }
        xor_in(&mut s, rk);
    }
    s
}

fn xor_in(s: &mut [u8; 16], k: &[u8; 16]) {
    for (a, b) in s.iter_mut().zip(k) {
        *a ^= b;
    }
}

fn shift_rows(s: &[u8; 16]) -> [u8; 16] {
    let mut out = [0u8; 16];
    for c in 0..4 {
        for r in 0..4 {
            out[r + 4 * c] = s[r + 4 * ((c + r) % 4)];
        }
    }
    out
}

fn mix_columns(s: &[u8; 16]) -> [u8; 16] {
    let mut out = [0u8; 16];
    for c in 0..4 {
        let a = &s[4 * c..4 * c + 4];
        for r in 0..4 {
            out[4 * c + r] = gf_mul(a[r], 2)
                ^ gf_mul(a[(r + 1) % 4], 3)
                ^ a[(r + 2) % 4]
                ^ a[(r + 3) % 4];
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crypto::rng::SessionRng;

    #[test]
    fn sbox_known_entries() {
        let sb = sbox();
        assert_eq!(sb[0x00], 0x63);
        assert_eq!(sb[0x01], 0x7c);
        assert_eq!(sb[0x53], 0xed);
        assert_eq!(sb[0xff], 0x16);
    }

    #[test]
    fn fips197_vector() {
        let key: [u8; 16] = core::array::from_fn(|i| i as u8);
        let pt: [u8; 16] = core::array::from_fn(|i| (i as u8) * 0x11);
        let ct = encrypt_rounds(&expand_key(&key), pt);
        let expected = [
            0x69, 0xc4, 0xe0, 0xd8, 0x6a, 0x7b, 0x04, 0x30, 0xd8, 0xcd, 0xb7, 0x80, 0x70, 0xb4,
            0xc5, 0x5a,
        ];
        assert_eq!(ct, expected);
    }

    #[test]
    fn software_rounds_match_hardware_cipher() {
        let mut rng = SessionRng::deterministic(1);
        for _ in 0..50 {
            let key = PrfKey::sample(PrfId::Aes128, &mut rng);
            let x = Block::random(&mut rng);
            let prf = Prf::new(&key);
            let soft = encrypt_rounds(&expand_key(&key.bytes), x.to_bytes());
            assert_eq!(prf.eval(x), Block::from_bytes(soft));
            assert_eq!(prf.eval_many(&[x, x])[1], prf.eval(x));
        }
    }

    #[test]
    fn deterministic_and_key_sensitive() {
        let mut rng = SessionRng::deterministic(2);
        let x = Block::random(&mut rng);
        let k1 = PrfKey::sample(PrfId::TestCipher, &mut rng);
        let k2 = PrfKey::sample(PrfId::TestCipher, &mut rng);
        assert_eq!(Prf::new(&k1).eval(x), Prf::new(&k1).eval(x));
        assert_ne!(Prf::new(&k1).eval(x), Prf::new(&k2).eval(x));
        assert_eq!(k1.round_keys().len(), 3);
    }
}
