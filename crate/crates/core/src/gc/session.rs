use rand::RngCore;

use super::circuit::{Circuit, InputKind};
use super::garble::{evaluate, garble, TABLE_BYTES_PER_AND};
use super::hash::FixedKeyHash;
use super::GcError;
use crate::crypto::{pack_bits, unpack_bits, Block, OtReceiver, OtSender, SessionRng};
use crate::transport::{Channel, FrameTag, ReleasePurpose, Role};

/// Who learns an output group.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ReleaseTarget {
    ToA,
    ToB,
    ToBoth,
    KeepShared,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OutputGroup {
    pub len: usize,
    pub target: ReleaseTarget,
    pub purpose: ReleasePurpose,
}

impl OutputGroup {
    pub fn new(len: usize, target: ReleaseTarget, purpose: ReleasePurpose) -> Self {
        OutputGroup { len, target, purpose }
    }

    pub fn keep(len: usize) -> Self {
        OutputGroup::new(len, ReleaseTarget::KeepShared, ReleasePurpose::Generic)
    }
}

/// An unreleased bit vector that persists between executions.
///
/// The garbler holds the zero label of each bit and the evaluator the active
/// label. Their point-and-permute bits form an XOR sharing of the value, and
/// neither side's labels alone determine it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SecretRef {
    session: u64,
    labels: Vec<Block>,
}

impl SecretRef {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn session(&self) -> u64 {
        self.session
    }

    pub fn slice(&self, range: std::ops::Range<usize>) -> SecretRef {
        SecretRef { session: self.session, labels: self.labels[range].to_vec() }
    }

    pub fn concat(parts: &[&SecretRef]) -> SecretRef {
        let session = parts.first().map_or(0, |p| p.session);
        SecretRef { session, labels: parts.iter().flat_map(|p| p.labels.iter().copied()).collect() }
    }

    /// The local party's labels; for test-time recombination only.
    pub fn labels(&self) -> &[Block] {
        &self.labels
    }

    /// This party's XOR share of each bit.
    pub fn share_bits(&self) -> Vec<bool> {
        self.labels.iter().map(|l| l.lsb()).collect()
    }
}

/// Test-side recombination of the two parties' views of one secret.
pub fn recombine(garbler: &SecretRef, evaluator: &SecretRef) -> Vec<bool> {
    garbler.labels.iter().zip(&evaluator.labels).map(|(g, e)| g != e).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupResult {
    /// Plaintext bits learned by this party.
    Released(Vec<bool>),
    /// Released to the peer only.
    Withheld,
    Kept(SecretRef),
}

impl GroupResult {
    pub fn bits(&self) -> Option<&[bool]> {
        match self {
            GroupResult::Released(b) => Some(b),
            _ => None,
        }
    }

    pub fn into_secret(self) -> Option<SecretRef> {
        match self {
            GroupResult::Kept(s) => Some(s),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct GcStats {
    pub executions: u64,
    pub and_gates: u64,
    pub free_gates: u64,
    pub table_bytes: u64,
    pub ot_transfers: u64,
    pub released_bits: u64,
}

#[allow(clippy::large_enum_variant)]
enum Side {
    Garbler { delta: Block, ot: OtSender },
    Evaluator { ot: OtReceiver },
}

/// One garbled-circuit engine per session. Party B garbles, party A evaluates.
pub struct GcSession {
    id: u64,
    side: Side,
    constant: Block,
    hash: FixedKeyHash,
    rng: SessionRng,
    tweak: u64,
    stats: GcStats,
}

impl GcSession {
    pub fn setup(channel: &mut Channel, role: Role, mut rng: SessionRng) -> Result<GcSession, GcError> {
        let id = rng.next_u64();
        let (side, constant) = match role {
            Role::Provider => {
                let mut delta = Block::random(&mut rng);
                delta.set_bit(0, true);
                let constant = Block::random(&mut rng);
                channel.send(FrameTag::GcSetup, &constant.to_bytes())?;
                let ot = OtSender::setup(channel, &mut rng)?;
                (Side::Garbler { delta, ot }, constant)
            }
            Role::Consumer => {
                let bytes = channel.recv_expect(FrameTag::GcSetup)?;
                let constant = Block::read_many(&bytes)
                    .filter(|v| v.len() == 1)
                    .ok_or_else(|| GcError::Malformed("setup".into()))?[0];
                let ot = OtReceiver::setup(channel)?;
                (Side::Evaluator { ot }, constant)
            }
        };
        Ok(GcSession { id, side, constant, hash: FixedKeyHash::default(), rng, tweak: 0, stats: GcStats::default() })
    }

    pub fn role(&self) -> Role {
        match self.side {
            Side::Garbler { .. } => Role::Provider,
            Side::Evaluator { .. } => Role::Consumer,
        }
    }

    pub fn stats(&self) -> GcStats {
        self.stats
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    fn constant_label(&self, v: bool) -> Block {
        match &self.side {
            Side::Garbler { delta, .. } if v => self.constant ^ *delta,
            _ => self.constant,
        }
    }

    /// Public constants as a secret vector.
    pub fn constant(&self, bits: &[bool]) -> SecretRef {
        SecretRef { session: self.id, labels: bits.iter().map(|&v| self.constant_label(v)).collect() }
    }

    /// Bitwise complement without communication.
    pub fn negate(&self, s: &SecretRef) -> Result<SecretRef, GcError> {
        self.check(s)?;
        let labels = match &self.side {
            Side::Garbler { delta, .. } => s.labels.iter().map(|l| *l ^ *delta).collect(),
            Side::Evaluator { .. } => s.labels.clone(),
        };
        Ok(SecretRef { session: self.id, labels })
    }

    fn check(&self, s: &SecretRef) -> Result<(), GcError> {
        if s.session != self.id && !s.labels.is_empty() {
            return Err(GcError::CrossSession);
        }
        Ok(())
    }

    /// Runs one circuit. `own_inputs` are this party's inputs (garbler or
    /// evaluator, in declaration order), `carried` fills the carried inputs in
    /// order, and the outputs are split into `groups`.
    pub fn execute(
        &mut self,
        channel: &mut Channel,
        circuit: &Circuit,
        own_inputs: &[bool],
        carried: &[&SecretRef],
        groups: &[OutputGroup],
    ) -> Result<Vec<GroupResult>, GcError> {
        let own_kind = match self.side {
            Side::Garbler { .. } => InputKind::Garbler,
            Side::Evaluator { .. } => InputKind::Evaluator,
        };
        let expected = circuit.count_inputs(own_kind);
        if own_inputs.len() != expected {
            return Err(GcError::Arity { expected, found: own_inputs.len() });
        }
        let carried_len: usize = carried.iter().map(|s| s.len()).sum();
        let expected = circuit.count_inputs(InputKind::Carried);
        if carried_len != expected {
            return Err(GcError::Arity { expected, found: carried_len });
        }
        for s in carried {
            self.check(s)?;
        }
        let group_len: usize = groups.iter().map(|g| g.len).sum();
        if group_len != circuit.outputs().len() {
            return Err(GcError::Arity { expected: circuit.outputs().len(), found: group_len });
        }

        let mut carried_labels = carried.iter().flat_map(|s| s.labels.iter().copied());
        let n_and = circuit.and_count();
        let tweak = self.tweak;
        self.tweak += n_and as u64;
        self.stats.executions += 1;
        self.stats.and_gates += n_and as u64;
        self.stats.free_gates += circuit.free_count() as u64;
        self.stats.table_bytes += (TABLE_BYTES_PER_AND * n_and) as u64;
        self.stats.ot_transfers += circuit.count_inputs(InputKind::Evaluator) as u64;

        let wires = match &mut self.side {
            Side::Garbler { delta, ot } => {
                let delta = *delta;
                let mut zeros = Vec::with_capacity(circuit.inputs().len());
                let mut own_active = Vec::new();
                let mut ot_pairs = Vec::new();
                let mut own = own_inputs.iter();
                for inp in circuit.inputs() {
                    let z = match inp.kind {
                        InputKind::Garbler => {
                            let z = Block::random(&mut self.rng);
                            let v = *own.next().unwrap();
                            own_active.push(if v { z ^ delta } else { z });
                            z
                        }
                        InputKind::Evaluator => {
                            let z = Block::random(&mut self.rng);
                            ot_pairs.push((z, z ^ delta));
                            z
                        }
                        InputKind::Carried => carried_labels.next().unwrap(),
                        InputKind::Constant(v) => self.constant ^ if v { delta } else { Block::ZERO },
                    };
                    zeros.push(z);
                }
                let (wires, tables) = garble(circuit, &zeros, delta, tweak, &self.hash, &mut self.rng);
                if n_and > 0 {
                    channel.send(FrameTag::GarbledTables, &tables)?;
                }
                drop(tables);
                if !own_active.is_empty() {
                    let mut buf = Vec::with_capacity(16 * own_active.len());
                    Block::write_many(&own_active, &mut buf);
                    channel.send(FrameTag::GarblerLabels, &buf)?;
                }
                if !ot_pairs.is_empty() {
                    ot.send(channel, &ot_pairs)?;
                }
                wires
            }
            Side::Evaluator { ot } => {
                let tables = if n_and > 0 { channel.recv_expect(FrameTag::GarbledTables)? } else { Vec::new() };
                let n_garbler = circuit.count_inputs(InputKind::Garbler);
                let garbler_labels = if n_garbler > 0 {
                    let bytes = channel.recv_expect(FrameTag::GarblerLabels)?;
                    Block::read_many(&bytes)
                        .filter(|v| v.len() == n_garbler)
                        .ok_or_else(|| GcError::Malformed("garbler labels".into()))?
                } else {
                    Vec::new()
                };
                let received = if !own_inputs.is_empty() {
                    ot.receive(channel, own_inputs, &mut self.rng)?
                } else {
                    Vec::new()
                };
                let (mut g, mut e) = (garbler_labels.into_iter(), received.into_iter());
                let labels: Vec<Block> = circuit
                    .inputs()
                    .iter()
                    .map(|inp| match inp.kind {
                        InputKind::Garbler => g.next().unwrap(),
                        InputKind::Evaluator => e.next().unwrap(),
                        InputKind::Carried => carried_labels.next().unwrap(),
                        InputKind::Constant(_) => self.constant,
                    })
                    .collect();
                evaluate(circuit, &labels, &tables, tweak, &self.hash)?
            }
        };

        let mut results = Vec::with_capacity(groups.len());
        let mut outs = circuit.outputs().iter().map(|&w| wires[w as usize]);
        let garbler = matches!(self.side, Side::Garbler { .. });
        for group in groups {
            let labels: Vec<Block> = outs.by_ref().take(group.len).collect();
            let lsbs: Vec<bool> = labels.iter().map(|l| l.lsb()).collect();
            let result = match (group.target, garbler) {
                (ReleaseTarget::KeepShared, _) => GroupResult::Kept(SecretRef { session: self.id, labels }),
                (ReleaseTarget::ToA, true) => {
                    send_release(channel, FrameTag::OutputDecode, group.purpose, &lsbs)?;
                    GroupResult::Withheld
                }
                (ReleaseTarget::ToA, false) => {
                    let d = recv_release(channel, FrameTag::OutputDecode, group)?;
                    GroupResult::Released(xor_bits(&lsbs, &d))
                }
                (ReleaseTarget::ToB, true) => {
                    let d = recv_release(channel, FrameTag::OutputToGarbler, group)?;
                    GroupResult::Released(xor_bits(&lsbs, &d))
                }
                (ReleaseTarget::ToB, false) => {
                    send_release(channel, FrameTag::OutputToGarbler, group.purpose, &lsbs)?;
                    GroupResult::Withheld
                }
                (ReleaseTarget::ToBoth, true) => {
                    send_release(channel, FrameTag::OutputDecode, group.purpose, &lsbs)?;
                    let v = recv_release(channel, FrameTag::ReleasedValue, group)?;
                    GroupResult::Released(v)
                }
                (ReleaseTarget::ToBoth, false) => {
                    let d = recv_release(channel, FrameTag::OutputDecode, group)?;
                    let v = xor_bits(&lsbs, &d);
                    send_release(channel, FrameTag::ReleasedValue, group.purpose, &v)?;
                    GroupResult::Released(v)
                }
            };
            if matches!(result, GroupResult::Released(_)) {
                self.stats.released_bits += group.len as u64;
            }
            results.push(result);
        }
        Ok(results)
    }

    /// Turns plaintext bits into a secret. `own` are this party's XOR shares;
    /// the secret is the XOR of both parties' shares.
    pub fn share(&mut self, channel: &mut Channel, own: &[bool]) -> Result<SecretRef, GcError> {
        let c = xor_share_circuit(own.len());
        let mut r = self.execute(channel, &c, own, &[], &[OutputGroup::keep(own.len())])?;
        Ok(r.pop().unwrap().into_secret().unwrap())
    }

    /// A secret supplied entirely by `owner`. The other party passes no bits;
    /// both must agree on `len`.
    pub fn input_from(
        &mut self,
        channel: &mut Channel,
        owner: Role,
        len: usize,
        bits: &[bool],
    ) -> Result<SecretRef, GcError> {
        let mut b = super::CircuitBuilder::new();
        let wires = match owner {
            Role::Provider => b.garbler_inputs(len),
            Role::Consumer => b.evaluator_inputs(len),
        };
        let c = b.finish(&wires);
        let own: &[bool] = if owner == self.role() { bits } else { &[] };
        let mut r = self.execute(channel, &c, own, &[], &[OutputGroup::keep(len)])?;
        Ok(r.pop().unwrap().into_secret().unwrap())
    }

    /// Releases `s` to the garbler after the evaluator XORs `mask` into its
    /// share, so the garbler learns `s ⊕ mask` and nothing about `s` alone.
    /// Returns the value at the garbler and `None` at the evaluator.
    pub fn release_masked_to_garbler(
        &mut self,
        channel: &mut Channel,
        s: &SecretRef,
        mask: &[bool],
        purpose: ReleasePurpose,
    ) -> Result<Option<Vec<bool>>, GcError> {
        self.check(s)?;
        let group = OutputGroup::new(s.len(), ReleaseTarget::ToB, purpose);
        let lsbs: Vec<bool> = s.labels.iter().map(|l| l.lsb()).collect();
        match self.side {
            Side::Garbler { .. } => {
                let d = recv_release(channel, FrameTag::OutputToGarbler, &group)?;
                self.stats.released_bits += s.len() as u64;
                Ok(Some(xor_bits(&lsbs, &d)))
            }
            Side::Evaluator { .. } => {
                if mask.len() != s.len() {
                    return Err(GcError::Arity { expected: s.len(), found: mask.len() });
                }
                send_release(channel, FrameTag::OutputToGarbler, purpose, &xor_bits(&lsbs, mask))?;
                Ok(None)
            }
        }
    }

    /// Releases an existing secret.
    pub fn release(
        &mut self,
        channel: &mut Channel,
        s: &SecretRef,
        target: ReleaseTarget,
        purpose: ReleasePurpose,
    ) -> Result<GroupResult, GcError> {
        let mut b = super::CircuitBuilder::new();
        let bits = b.carried_inputs(s.len());
        let c = b.finish(&bits);
        let mut r = self.execute(channel, &c, &[], &[s], &[OutputGroup::new(s.len(), target, purpose)])?;
        Ok(r.pop().unwrap())
    }
}

/// Garbler bit XOR evaluator bit, per position.
pub fn xor_share_circuit(len: usize) -> Circuit {
    let mut b = super::CircuitBuilder::new();
    let g = b.garbler_inputs(len);
    let e = b.evaluator_inputs(len);
    let out = b.xor_vec(&g, &e);
    b.finish(&out)
}

fn xor_bits(a: &[bool], b: &[bool]) -> Vec<bool> {
    a.iter().zip(b).map(|(x, y)| x ^ y).collect()
}

fn send_release(channel: &mut Channel, tag: FrameTag, purpose: ReleasePurpose, bits: &[bool]) -> Result<(), GcError> {
    let mut payload = vec![purpose as u8];
    payload.extend_from_slice(&pack_bits(bits));
    channel.send(tag, &payload)?;
    Ok(())
}

fn recv_release(channel: &mut Channel, tag: FrameTag, group: &OutputGroup) -> Result<Vec<bool>, GcError> {
    let payload = channel.recv_expect(tag)?;
    if payload.first() != Some(&(group.purpose as u8)) {
        return Err(GcError::Malformed("release purpose".into()));
    }
    unpack_bits(&payload[1..], group.len).ok_or_else(|| GcError::Malformed("release bits".into()))
}
