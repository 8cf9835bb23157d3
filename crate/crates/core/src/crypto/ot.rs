//! 1-out-of-2 oblivious transfer of 128-bit messages over Ristretto.
//!
//! The sender publishes `S = aG` once per session. For choice `c` the
//! receiver sends `R = 2(cS + bG)` and derives its key from `2bS`; the sender
//! derives keys from `aR` and `aR - 2aS`, exactly one of which matches. The
//! doublings let every compression go through the batched
//! double-and-compress routine, which shares one field inversion per batch.

use curve25519_dalek::constants::RISTRETTO_BASEPOINT_TABLE;
use curve25519_dalek::ristretto::{CompressedRistretto, RistrettoBasepointTable, RistrettoPoint};
use curve25519_dalek::scalar::Scalar;
use rand::{CryptoRng, RngCore};
use sha2::{Digest, Sha256};

use super::block::Block;
use super::CryptoError;
use crate::transport::{Channel, FrameTag};

fn derive_key(index: u64, r: &CompressedRistretto, shared: &CompressedRistretto) -> Block {
    let digest = Sha256::new()
        .chain_update(b"ppsat-ot")
        .chain_update(index.to_le_bytes())
        .chain_update(r.as_bytes())
        .chain_update(shared.as_bytes())
        .finalize();
    Block::from_bytes(digest[..16].try_into().unwrap())
}

fn decode_point(bytes: &[u8]) -> Result<(CompressedRistretto, RistrettoPoint), CryptoError> {
    let c = CompressedRistretto::from_slice(bytes).map_err(|_| CryptoError::InvalidPoint)?;
    let p = c.decompress().ok_or(CryptoError::InvalidPoint)?;
    Ok((c, p))
}

pub struct OtSender {
    a: Scalar,
    two_a_s: RistrettoPoint,
    counter: u64,
}

impl OtSender {
    /// Samples the session secret and sends `S`.
    pub fn setup<R: RngCore + CryptoRng>(channel: &mut Channel, rng: &mut R) -> Result<OtSender, CryptoError> {
        let a = Scalar::random(rng);
        let s = RistrettoPoint::mul_base(&a);
        channel.send(FrameTag::OtSetup, s.compress().as_bytes())?;
        Ok(OtSender { a, two_a_s: (a + a) * s, counter: 0 })
    }

    /// Transfers `m0` or `m1` of every pair according to the receiver's
    /// hidden choices.
    pub fn send(&mut self, channel: &mut Channel, pairs: &[(Block, Block)]) -> Result<(), CryptoError> {
        let points = channel.recv_expect(FrameTag::OtChoices)?;
        if points.len() != 32 * pairs.len() {
            return Err(CryptoError::Malformed(format!(
                "{} bytes of choices for {} transfers",
                points.len(),
                pairs.len()
            )));
        }
        let mut announced = Vec::with_capacity(pairs.len());
        let mut shared = Vec::with_capacity(2 * pairs.len());
        for chunk in points.chunks_exact(32) {
            let (rc, r) = decode_point(chunk)?;
            let ar = self.a * r;
            shared.push(ar);
            shared.push(ar - self.two_a_s);
            announced.push(rc);
        }
        // 2 * (aR) and 2 * (aR - 2aS); the receiver doubles its point too.
        let compressed = RistrettoPoint::double_and_compress_batch(&shared);
        let mut out = Vec::with_capacity(32 * pairs.len());
        for ((rc, keys), (m0, m1)) in announced.iter().zip(compressed.chunks_exact(2)).zip(pairs) {
            let k0 = derive_key(self.counter, rc, &keys[0]);
            let k1 = derive_key(self.counter, rc, &keys[1]);
            self.counter += 1;
            out.extend_from_slice(&(*m0 ^ k0).to_bytes());
            out.extend_from_slice(&(*m1 ^ k1).to_bytes());
        }
        channel.send(FrameTag::OtCiphertexts, &out)?;
        Ok(())
    }
}

pub struct OtReceiver {
    s: RistrettoPoint,
    s_table: RistrettoBasepointTable,
    counter: u64,
}

impl OtReceiver {
    pub fn setup(channel: &mut Channel) -> Result<OtReceiver, CryptoError> {
        let bytes = channel.recv_expect(FrameTag::OtSetup)?;
        let (_, s) = decode_point(&bytes)?;
        Ok(OtReceiver { s, s_table: RistrettoBasepointTable::create(&s), counter: 0 })
    }

    /// Half of the point announced for `choice` with receiver scalar `b`.
    pub fn choice_point(&self, choice: bool, b: &Scalar) -> RistrettoPoint {
        let bg = b * RISTRETTO_BASEPOINT_TABLE;
        if choice {
            bg + self.s
        } else {
            bg
        }
    }

    pub fn receive<R: RngCore + CryptoRng>(
        &mut self,
        channel: &mut Channel,
        choices: &[bool],
        rng: &mut R,
    ) -> Result<Vec<Block>, CryptoError> {
        let scalars: Vec<Scalar> = choices.iter().map(|_| Scalar::random(rng)).collect();
        self.receive_with_scalars(channel, choices, &scalars)
    }

    pub fn receive_with_scalars(
        &mut self,
        channel: &mut Channel,
        choices: &[bool],
        scalars: &[Scalar],
    ) -> Result<Vec<Block>, CryptoError> {
        assert_eq!(choices.len(), scalars.len());
        let halves: Vec<RistrettoPoint> =
            choices.iter().zip(scalars).map(|(&c, b)| self.choice_point(c, b)).collect();
        let announced = RistrettoPoint::double_and_compress_batch(&halves);
        let mut payload = Vec::with_capacity(32 * choices.len());
        for r in &announced {
            payload.extend_from_slice(r.as_bytes());
        }
        channel.send(FrameTag::OtChoices, &payload)?;
        // The sender's matching point is a * 2(cS + bG) - 2caS = 2bS, doubled.
        let key_points: Vec<RistrettoPoint> = scalars.iter().map(|b| &(b + b) * &self.s_table).collect();
        let key_points = RistrettoPoint::double_and_compress_batch(&key_points);
        let cts = channel.recv_expect(FrameTag::OtCiphertexts)?;
        if cts.len() != 32 * choices.len() {
            return Err(CryptoError::Malformed("ciphertext length".into()));
        }
        let mut out = Vec::with_capacity(choices.len());
        for (i, ((&c, kp), rc)) in choices.iter().zip(&key_points).zip(&announced).enumerate() {
            let key = derive_key(self.counter, rc, kp);
            self.counter += 1;
            let at = 32 * i + if c { 16 } else { 0 };
            let ct = Block::from_bytes(cts[at..at + 16].try_into().unwrap());
            out.push(ct ^ key);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crypto::SessionRng;

    #[test]
    fn receiver_gets_chosen_message() {
        let (mut cs, mut cr) = Channel::pair();
        let mut rng = SessionRng::deterministic(1);
        let pairs: Vec<(Block, Block)> =
            (0..40).map(|_| (Block::random(&mut rng), Block::random(&mut rng))).collect();
        let choices: Vec<bool> = (0..40).map(|i| i % 3 == 1).collect();
        let p2 = pairs.clone();
        let t = std::thread::spawn(move || {
            let mut rng = SessionRng::deterministic(2);
            let mut s = OtSender::setup(&mut cs, &mut rng).unwrap();
            s.send(&mut cs, &p2).unwrap();
            s.send(&mut cs, &p2[..3]).unwrap();
        });
        let mut r = OtReceiver::setup(&mut cr).unwrap();
        let got = r.receive(&mut cr, &choices, &mut rng).unwrap();
        for ((g, (m0, m1)), c) in got.iter().zip(&pairs).zip(&choices) {
            assert_eq!(g, if *c { m1 } else { m0 });
        }
        let got = r.receive(&mut cr, &[true, false, true], &mut rng).unwrap();
        assert_eq!(got, vec![pairs[0].1, pairs[1].0, pairs[2].1]);
        t.join().unwrap();
    }

    #[test]
    fn sender_view_is_choice_independent() {
        let (mut cs, mut cr) = Channel::pair();
        let mut rng = SessionRng::deterministic(3);
        let a = Scalar::random(&mut rng);
        let s = RistrettoPoint::mul_base(&a);
        cs.send(FrameTag::OtSetup, s.compress().as_bytes()).unwrap();
        let r = OtReceiver::setup(&mut cr).unwrap();
        let b = Scalar::random(&mut rng);
        // Choice 1 with b and choice 0 with b + a announce the same point.
        assert_eq!(r.choice_point(true, &b), r.choice_point(false, &(b + a)));
    }

    #[test]
    fn rejects_garbage_points() {
        let (mut cs, mut cr) = Channel::pair();
        cs.send(FrameTag::OtSetup, &[0xff; 32]).unwrap();
        assert!(matches!(OtReceiver::setup(&mut cr), Err(CryptoError::InvalidPoint)));
    }
}
