use std::fmt::Write as _;
use std::time::{Duration, Instant};

use super::frame::{FrameTag, FRAME_HEADER_LEN};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Sent,
    Received,
}

impl Direction {
    pub fn name(self) -> &'static str {
        match self {
            Direction::Sent => "sent",
            Direction::Received => "received",
        }
    }
}

#[derive(Clone, Debug)]
pub struct FrameRecord {
    pub index: usize,
    pub direction: Direction,
    pub tag: FrameTag,
    /// Header plus payload.
    pub wire_bytes: usize,
    pub elapsed: Duration,
    /// Only kept when payload capture is on.
    pub payload: Option<Vec<u8>>,
}

impl FrameRecord {
    pub fn payload_len(&self) -> usize {
        self.wire_bytes - FRAME_HEADER_LEN
    }
}

/// Append-only log of every frame crossing the party boundary.
#[derive(Clone, Debug)]
pub struct Transcript {
    started: Instant,
    capture_payloads: bool,
    records: Vec<FrameRecord>,
    total: u64,
}

impl Default for Transcript {
    fn default() -> Self {
        Transcript::new(false)
    }
}

impl Transcript {
    pub fn new(capture_payloads: bool) -> Self {
        Transcript { started: Instant::now(), capture_payloads, records: Vec::new(), total: 0 }
    }

    pub fn set_capture_payloads(&mut self, on: bool) {
        self.capture_payloads = on;
    }

    pub(crate) fn append(&mut self, direction: Direction, tag: FrameTag, payload: &[u8]) {
        let wire_bytes = FRAME_HEADER_LEN + payload.len();
        self.total += wire_bytes as u64;
        self.records.push(FrameRecord {
            index: self.records.len(),
            direction,
            tag,
            wire_bytes,
            elapsed: self.started.elapsed(),
            payload: self.capture_payloads.then(|| payload.to_vec()),
        });
    }

    pub fn records(&self) -> &[FrameRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Total wire bytes in both directions.
    pub fn total_bytes(&self) -> u64 {
        self.total
    }

    pub fn bytes_in(&self, direction: Direction) -> u64 {
        self.records
            .iter()
            .filter(|r| r.direction == direction)
            .map(|r| r.wire_bytes as u64)
            .sum()
    }

    /// `(direction, tag, wire bytes)` for every frame, in order.
    pub fn shape(&self) -> Vec<(Direction, FrameTag, usize)> {
        self.records.iter().map(|r| (r.direction, r.tag, r.wire_bytes)).collect()
    }

    /// CSV with columns `frame,direction,type,bytes,timestamp_s`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("frame,direction,type,bytes,timestamp_s\n");
        for r in &self.records {
            let _ = writeln!(
                out,
                "{},{},{},{},{:.6}",
                r.index,
                r.direction.name(),
                r.tag.name(),
                r.wire_bytes,
                r.elapsed.as_secs_f64()
            );
        }
        out
    }
}
