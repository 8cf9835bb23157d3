//! Framing, channels, transcripts and the session handshake.

mod channel;
mod frame;
mod handshake;
mod transcript;

pub use channel::{mem_pipe, Channel, Duplex, MemPipe};
pub use frame::{Frame, FrameTag, ReleasePurpose, FRAME_HEADER_LEN};
pub use handshake::{agree, bit_length, handshake, LocalParams, Role, SessionParams, HELLO_LEN, PROTOCOL_VERSION};
pub use transcript::{Direction, FrameRecord, Transcript};

#[derive(Debug, thiserror::Error)]
pub enum TransportError {
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("peer closed the connection")]
    PeerClosed,
    #[error("timed out waiting for peer")]
    Timeout,
    #[error("unknown frame tag 0x{0:02x}")]
    UnknownTag(u8),
    #[error("frame length {0} exceeds limit")]
    LengthOverflow(usize),
    #[error("peer aborted: {0}")]
    PeerAborted(String),
    #[error("expected {} frame, got {}", .expected.name(), .found.name())]
    UnexpectedFrame { expected: FrameTag, found: FrameTag },
    #[error("malformed payload: {0}")]
    Malformed(String),
    #[error("protocol version mismatch: local {local}, remote {remote}")]
    VersionMismatch { local: u16, remote: u16 },
    #[error("prf mismatch: local {local}, remote {remote}")]
    PrfMismatch { local: u8, remote: u8 },
    #[error("both parties claim the {0} role")]
    RoleConflict(&'static str),
    #[error("shape disagreement: {0}")]
    ShapeDisagreement(String),
}
