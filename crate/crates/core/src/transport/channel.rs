use std::io::{self, Read, Write};
use std::net::{TcpListener, TcpStream, ToSocketAddrs};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError, Sender};
use std::time::Duration;

use super::frame::{Frame, FrameTag, FRAME_HEADER_LEN};
use super::transcript::{Direction, Transcript};
use super::TransportError;

/// A bidirectional byte stream.
pub trait Duplex: Read + Write + Send {
    fn set_read_timeout(&mut self, timeout: Option<Duration>) -> io::Result<()>;
}

impl Duplex for TcpStream {
    fn set_read_timeout(&mut self, timeout: Option<Duration>) -> io::Result<()> {
        TcpStream::set_read_timeout(self, timeout)
    }
}

/// One end of an in-process duplex pipe.
pub struct MemPipe {
    tx: Sender<Vec<u8>>,
    rx: Receiver<Vec<u8>>,
    pending: Vec<u8>,
    offset: usize,
    timeout: Option<Duration>,
}

/// Two connected in-process pipe ends.
pub fn mem_pipe() -> (MemPipe, MemPipe) {
    let (tx_a, rx_b) = mpsc::channel();
    let (tx_b, rx_a) = mpsc::channel();
    let end = |tx, rx| MemPipe { tx, rx, pending: Vec::new(), offset: 0, timeout: None };
    (end(tx_a, rx_a), end(tx_b, rx_b))
}

impl Read for MemPipe {
    fn read(&mut self, buf: &mut [u8]) -> io::Result<usize> {
        if buf.is_empty() {
            return Ok(0);
        }
        while self.offset == self.pending.len() {
            let next = match self.timeout {
                Some(t) => self.rx.recv_timeout(t).map_err(|e| match e {
                    RecvTimeoutError::Timeout => io::Error::from(io::ErrorKind::TimedOut),
                    RecvTimeoutError::Disconnected => io::Error::from(io::ErrorKind::UnexpectedEof),
                }),
                None => self.rx.recv().map_err(|_| io::Error::from(io::ErrorKind::UnexpectedEof)),
            };
            match next {
                Ok(chunk) => {
                    self.pending = chunk;
                    self.offset = 0;
                }
                Err(e) if e.kind() == io::ErrorKind::UnexpectedEof => return Ok(0),
                Err(e) => return Err(e),
            }
        }
        let n = buf.len().min(self.pending.len() - self.offset);
        buf[..n].copy_from_slice(&self.pending[self.offset..self.offset + n]);
        self.offset += n;
        Ok(n)
    }
}

impl Write for MemPipe {
    fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
        self.tx
            .send(buf.to_vec())
            .map_err(|_| io::Error::from(io::ErrorKind::BrokenPipe))?;
        Ok(buf.len())
    }

    fn flush(&mut self) -> io::Result<()> {
        Ok(())
    }
}

impl Duplex for MemPipe {
    fn set_read_timeout(&mut self, timeout: Option<Duration>) -> io::Result<()> {
        self.timeout = timeout;
        Ok(())
    }
}

/// Framed, transcript-recording channel to the peer.
///
/// Every frame is `tag (1 byte) | length (u32 LE) | payload`. The raw byte
/// counters are kept at the stream level, independently of the transcript.
pub struct Channel {
    stream: Box<dyn Duplex>,
    transcript: Transcript,
    raw_sent: u64,
    raw_received: u64,
    max_payload: usize,
}

impl Channel {
    pub fn new(stream: Box<dyn Duplex>) -> Self {
        Channel {
            stream,
            transcript: Transcript::default(),
            raw_sent: 0,
            raw_received: 0,
            max_payload: u32::MAX as usize,
        }
    }

    /// An in-process connected pair.
    pub fn pair() -> (Channel, Channel) {
        let (a, b) = mem_pipe();
        (Channel::new(Box::new(a)), Channel::new(Box::new(b)))
    }

    pub fn connect<A: ToSocketAddrs>(addr: A) -> Result<Channel, TransportError> {
        let stream = TcpStream::connect(addr)?;
        stream.set_nodelay(true)?;
        Ok(Channel::new(Box::new(stream)))
    }

    /// Accepts exactly one peer.
    pub fn listen<A: ToSocketAddrs>(addr: A) -> Result<Channel, TransportError> {
        let listener = TcpListener::bind(addr)?;
        let (stream, _) = listener.accept()?;
        stream.set_nodelay(true)?;
        Ok(Channel::new(Box::new(stream)))
    }

    pub fn set_timeout(&mut self, timeout: Option<Duration>) -> Result<(), TransportError> {
        Ok(self.stream.set_read_timeout(timeout)?)
    }

    /// Limits accepted payload sizes; larger incoming lengths are fatal.
    pub fn set_max_payload(&mut self, max: usize) {
        self.max_payload = max.min(u32::MAX as usize);
    }

    pub fn transcript(&self) -> &Transcript {
        &self.transcript
    }

    pub fn transcript_mut(&mut self) -> &mut Transcript {
        &mut self.transcript
    }

    pub fn take_transcript(&mut self) -> Transcript {
        std::mem::take(&mut self.transcript)
    }

    /// Bytes written to and read from the stream.
    pub fn raw_counters(&self) -> (u64, u64) {
        (self.raw_sent, self.raw_received)
    }

    pub fn send(&mut self, tag: FrameTag, payload: &[u8]) -> Result<(), TransportError> {
        if payload.len() > u32::MAX as usize {
            return Err(TransportError::LengthOverflow(payload.len()));
        }
        let mut buf = Vec::with_capacity(FRAME_HEADER_LEN + payload.len());
        buf.push(tag as u8);
        buf.extend_from_slice(&(payload.len() as u32).to_le_bytes());
        buf.extend_from_slice(payload);
        self.stream.write_all(&buf).map_err(map_io)?;
        self.stream.flush().map_err(map_io)?;
        self.raw_sent += buf.len() as u64;
        self.transcript.append(Direction::Sent, tag, payload);
        Ok(())
    }

    pub fn recv(&mut self) -> Result<Frame, TransportError> {
        let mut header = [0u8; FRAME_HEADER_LEN];
        self.stream.read_exact(&mut header).map_err(map_io)?;
        let len = u32::from_le_bytes(header[1..].try_into().unwrap()) as usize;
        let tag = FrameTag::from_u8(header[0]).ok_or(TransportError::UnknownTag(header[0]))?;
        if len > self.max_payload {
            return Err(TransportError::LengthOverflow(len));
        }
        let mut payload = vec![0u8; len];
        self.stream.read_exact(&mut payload).map_err(map_io)?;
        self.raw_received += (FRAME_HEADER_LEN + len) as u64;
        self.transcript.append(Direction::Received, tag, &payload);
        if tag == FrameTag::Abort {
            return Err(TransportError::PeerAborted(String::from_utf8_lossy(&payload).into_owned()));
        }
        Ok(Frame { tag, payload })
    }

    /// Receives a frame and insists on its tag.
    pub fn recv_expect(&mut self, tag: FrameTag) -> Result<Vec<u8>, TransportError> {
        let frame = self.recv()?;
        if frame.tag != tag {
            return Err(TransportError::UnexpectedFrame { expected: tag, found: frame.tag });
        }
        Ok(frame.payload)
    }

    /// Best-effort notification; errors are ignored because the session is
    /// being torn down anyway.
    pub fn abort(&mut self, reason: &str) {
        let _ = self.send(FrameTag::Abort, reason.as_bytes());
    }
}

fn map_io(e: io::Error) -> TransportError {
    match e.kind() {
        io::ErrorKind::UnexpectedEof | io::ErrorKind::BrokenPipe | io::ErrorKind::ConnectionReset => {
            TransportError::PeerClosed
        }
        io::ErrorKind::TimedOut | io::ErrorKind::WouldBlock => TransportError::Timeout,
        _ => TransportError::Io(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_payload_is_five_bytes() {
        let (mut a, mut b) = Channel::pair();
        a.send(FrameTag::Raw, &[]).unwrap();
        let f = b.recv().unwrap();
        assert!(f.payload.is_empty());
        assert_eq!(a.raw_counters().0, 5);
        assert_eq!(b.transcript().total_bytes(), 5);
    }

    #[test]
    fn mebibyte_round_trip() {
        let (mut a, mut b) = Channel::pair();
        let payload: Vec<u8> = (0..1 << 20).map(|i| (i * 31 % 251) as u8).collect();
        a.send(FrameTag::Raw, &payload).unwrap();
        assert_eq!(b.recv_expect(FrameTag::Raw).unwrap(), payload);
    }

    #[test]
    fn unknown_tag_is_fatal() {
        let (mut a, b) = mem_pipe();
        a.write_all(&[0xee, 0, 0, 0, 0]).unwrap();
        let mut ch = Channel::new(Box::new(b));
        assert!(matches!(ch.recv(), Err(TransportError::UnknownTag(0xee))));
    }

    #[test]
    fn closed_peer_and_timeout() {
        let (a, mut b) = Channel::pair();
        drop(a);
        assert!(matches!(b.recv(), Err(TransportError::PeerClosed)));
        let (_a, mut b) = Channel::pair();
        b.set_timeout(Some(Duration::from_millis(20))).unwrap();
        assert!(matches!(b.recv(), Err(TransportError::Timeout)));
    }

    #[test]
    fn oversized_length_is_rejected() {
        let (mut a, mut b) = Channel::pair();
        b.set_max_payload(4);
        a.send(FrameTag::Raw, &[0; 8]).unwrap();
        assert!(matches!(b.recv(), Err(TransportError::LengthOverflow(8))));
    }

    #[test]
    fn tcp_round_trip() {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let addr = listener.local_addr().unwrap();
        let server = std::thread::spawn(move || {
            let (s, _) = listener.accept().unwrap();
            let mut ch = Channel::new(Box::new(s));
            let got = ch.recv_expect(FrameTag::Raw).unwrap();
            ch.send(FrameTag::Raw, &got).unwrap();
        });
        let mut c = Channel::connect(addr).unwrap();
        c.send(FrameTag::Raw, b"ping").unwrap();
        assert_eq!(c.recv_expect(FrameTag::Raw).unwrap(), b"ping");
        server.join().unwrap();
    }
}
