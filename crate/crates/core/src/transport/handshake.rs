use std::time::Duration;

use crate::crypto::PrfId;

use super::channel::Channel;
use super::frame::FrameTag;
use super::TransportError;

pub const PROTOCOL_VERSION: u16 = 1;
pub const HELLO_LEN: usize = 61;

/// Party A holds the consumer agreement and evaluates circuits; party B
/// holds the provider configuration and garbles.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Role {
    Consumer = 0,
    Provider = 1,
}

impl Role {
    pub fn from_wire(v: u8) -> Option<Role> {
        match v {
            0 => Some(Role::Consumer),
            1 => Some(Role::Provider),
            _ => None,
        }
    }

    pub fn peer(self) -> Role {
        match self {
            Role::Consumer => Role::Provider,
            Role::Provider => Role::Consumer,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Role::Consumer => "consumer",
            Role::Provider => "provider",
        }
    }

    pub fn parse(s: &str) -> Option<Role> {
        match s.to_ascii_lowercase().as_str() {
            "consumer" | "a" => Some(Role::Consumer),
            "provider" | "b" => Some(Role::Provider),
            _ => None,
        }
    }
}

/// What one party announces about itself.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalParams {
    pub version: u16,
    pub role: Role,
    pub n_common: u32,
    pub n_aux: u32,
    pub m: u32,
    pub prf: PrfId,
    pub label_bits: u16,
    pub packed: bool,
    pub deterministic: bool,
    pub seed: u64,
    /// SHA-256 over the ordered common variable names.
    pub names_digest: [u8; 32],
    /// Width the provider needs for its priorities; the consumer sends 0.
    pub prior_bits: u8,
}

impl LocalParams {
    pub fn new(role: Role, n_common: u32, n_aux: u32, m: u32) -> Self {
        LocalParams {
            version: PROTOCOL_VERSION,
            role,
            n_common,
            n_aux,
            m,
            prf: PrfId::Aes128,
            label_bits: 128,
            packed: true,
            deterministic: false,
            seed: 0,
            names_digest: [0; 32],
            prior_bits: 0,
        }
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HELLO_LEN);
        out.extend_from_slice(&self.version.to_le_bytes());
        out.push(self.role as u8);
        out.extend_from_slice(&self.n_common.to_le_bytes());
        out.extend_from_slice(&self.n_aux.to_le_bytes());
        out.extend_from_slice(&self.m.to_le_bytes());
        out.push(self.prf as u8);
        out.extend_from_slice(&self.label_bits.to_le_bytes());
        out.push(self.packed as u8);
        out.push(self.deterministic as u8);
        out.extend_from_slice(&self.seed.to_le_bytes());
        out.extend_from_slice(&self.names_digest);
        out.push(self.prior_bits);
        out
    }

    pub fn decode(bytes: &[u8]) -> Result<LocalParams, TransportError> {
        if bytes.len() != HELLO_LEN {
            return Err(TransportError::Malformed(format!("hello of {} bytes", bytes.len())));
        }
        let u16_at = |i: usize| u16::from_le_bytes([bytes[i], bytes[i + 1]]);
        let u32_at = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().unwrap());
        let version = u16_at(0);
        let role = Role::from_wire(bytes[2])
            .ok_or_else(|| TransportError::Malformed(format!("role byte {}", bytes[2])))?;
        let prf = PrfId::from_wire(bytes[15]).ok_or(TransportError::PrfMismatch {
            local: 0,
            remote: bytes[15],
        })?;
        let flag = |b: u8| match b {
            0 => Ok(false),
            1 => Ok(true),
            _ => Err(TransportError::Malformed(format!("flag byte {b}"))),
        };
        Ok(LocalParams {
            version,
            role,
            n_common: u32_at(3),
            n_aux: u32_at(7),
            m: u32_at(11),
            prf,
            label_bits: u16_at(16),
            packed: flag(bytes[18])?,
            deterministic: flag(bytes[19])?,
            seed: u64::from_le_bytes(bytes[20..28].try_into().unwrap()),
            names_digest: bytes[28..60].try_into().unwrap(),
            prior_bits: bytes[60],
        })
    }
}

/// Parameters both parties hold after a successful handshake.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SessionParams {
    pub version: u16,
    /// The local party's role.
    pub role: Role,
    pub n_common: u32,
    pub n_aux_a: u32,
    pub n_aux_b: u32,
    pub m_a: u32,
    pub m_b: u32,
    pub prf: PrfId,
    pub label_bits: u16,
    pub packed: bool,
    pub deterministic: bool,
    pub seed_a: u64,
    pub seed_b: u64,
    pub prior_bits: u8,
}

impl SessionParams {
    pub fn n(&self) -> usize {
        (self.n_common + self.n_aux_a + self.n_aux_b) as usize
    }

    pub fn m(&self) -> usize {
        (self.m_a + self.m_b) as usize
    }

    /// The same agreement seen from the other side.
    pub fn for_role(&self, role: Role) -> SessionParams {
        SessionParams { role, ..self.clone() }
    }
}

/// Bits needed to write `v` in binary.
pub fn bit_length(v: u64) -> u8 {
    (64 - v.leading_zeros()) as u8
}

/// Agrees on session parameters, checking both announcements symmetrically.
pub fn agree(local: &LocalParams, remote: &LocalParams) -> Result<SessionParams, TransportError> {
    if local.version != remote.version {
        return Err(TransportError::VersionMismatch { local: local.version, remote: remote.version });
    }
    if local.role == remote.role {
        return Err(TransportError::RoleConflict(local.role.name()));
    }
    if local.prf != remote.prf {
        return Err(TransportError::PrfMismatch { local: local.prf as u8, remote: remote.prf as u8 });
    }
    let disagree = |what: &str| Err(TransportError::ShapeDisagreement(what.to_string()));
    if local.n_common != remote.n_common {
        return disagree(&format!("n_common {} vs {}", local.n_common, remote.n_common));
    }
    if local.names_digest != remote.names_digest {
        return disagree("common variable names differ");
    }
    if local.label_bits != remote.label_bits {
        return disagree("label length");
    }
    if local.packed != remote.packed {
        return disagree("block packing");
    }
    if local.deterministic != remote.deterministic {
        return disagree("deterministic mode");
    }
    let (a, b) = match local.role {
        Role::Consumer => (local, remote),
        Role::Provider => (remote, local),
    };
    let n = a.n_common as u64 + a.n_aux as u64 + b.n_aux as u64;
    if b.m as u64 + a.m as u64 > u32::MAX as u64 || n > u32::MAX as u64 {
        return disagree("instance too large");
    }
    let prior_bits = b.prior_bits.max(bit_length(n)).max(1);
    Ok(SessionParams {
        version: local.version,
        role: local.role,
        n_common: a.n_common,
        n_aux_a: a.n_aux,
        n_aux_b: b.n_aux,
        m_a: a.m,
        m_b: b.m,
        prf: local.prf,
        label_bits: local.label_bits,
        packed: local.packed,
        deterministic: local.deterministic,
        seed_a: a.seed,
        seed_b: b.seed,
        prior_bits,
    })
}

/// Exchanges Hello frames and agrees on parameters. A mismatch sends Abort
/// to the peer before returning the error.
pub fn handshake(
    channel: &mut Channel,
    local: &LocalParams,
    timeout: Option<Duration>,
) -> Result<SessionParams, TransportError> {
    channel.set_timeout(timeout)?;
    channel.send(FrameTag::Hello, &local.encode())?;
    let remote = channel.recv_expect(FrameTag::Hello).and_then(|p| LocalParams::decode(&p));
    let result = remote.and_then(|remote| agree(local, &remote));
    match &result {
        Err(TransportError::PeerAborted(_)) | Err(TransportError::Timeout) | Err(TransportError::PeerClosed) => {}
        Err(e) => channel.abort(&e.to_string()),
        Ok(_) => {}
    }
    channel.set_timeout(None)?;
    result
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair() -> (LocalParams, LocalParams) {
        let mut a = LocalParams::new(Role::Consumer, 4, 2, 7);
        let mut b = LocalParams::new(Role::Provider, 4, 3, 5);
        a.seed = 11;
        b.seed = 12;
        b.prior_bits = 2;
        (a, b)
    }

    #[test]
    fn hello_round_trip() {
        let (a, _) = pair();
        let bytes = a.encode();
        assert_eq!(bytes.len(), HELLO_LEN);
        assert_eq!(LocalParams::decode(&bytes).unwrap(), a);
    }

    #[test]
    fn agreed_params_echo_both_counts() {
        let (a, b) = pair();
        let pa = agree(&a, &b).unwrap();
        let pb = agree(&b, &a).unwrap();
        assert_eq!(pa.for_role(Role::Provider), pb);
        assert_eq!((pa.n_aux_a, pa.n_aux_b, pa.m_a, pa.m_b), (2, 3, 7, 5));
        assert_eq!(pa.n(), 9);
        assert_eq!(pa.prior_bits, 4);
    }

    #[test]
    fn version_prf_role_and_shape_mismatches() {
        let (a, b) = pair();
        let mut v2 = b.clone();
        v2.version = 2;
        assert!(matches!(agree(&a, &v2), Err(TransportError::VersionMismatch { local: 1, remote: 2 })));
        let mut prf = b.clone();
        prf.prf = PrfId::TestCipher;
        assert!(matches!(agree(&a, &prf), Err(TransportError::PrfMismatch { .. })));
        let mut same = b.clone();
        same.role = Role::Consumer;
        assert!(matches!(agree(&a, &same), Err(TransportError::RoleConflict(_))));
        let mut shape = b.clone();
        shape.n_common = 5;
        assert!(matches!(agree(&a, &shape), Err(TransportError::ShapeDisagreement(_))));
    }

    #[test]
    fn handshake_over_pipe() {
        let (a, b) = pair();
        let (mut ca, mut cb) = Channel::pair();
        let t = std::thread::spawn(move || handshake(&mut cb, &b, None));
        let pa = handshake(&mut ca, &a, None).unwrap();
        let pb = t.join().unwrap().unwrap();
        assert_eq!(pa.for_role(Role::Provider), pb);
    }

    #[test]
    fn handshake_version_abort() {
        let (a, mut b) = pair();
        b.version = 2;
        let (mut ca, mut cb) = Channel::pair();
        let t = std::thread::spawn(move || handshake(&mut cb, &b, None));
        assert!(matches!(handshake(&mut ca, &a, None), Err(TransportError::VersionMismatch { .. })));
        assert!(t.join().unwrap().is_err());
    }

    #[test]
    fn handshake_timeout() {
        let (a, _) = pair();
        let (mut ca, _cb) = Channel::pair();
        let r = handshake(&mut ca, &a, Some(Duration::from_millis(30)));
        assert!(matches!(r, Err(TransportError::Timeout)));
    }
}
