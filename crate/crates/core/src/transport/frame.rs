/// One-byte frame type tags. The numeric values are the wire registry.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum FrameTag {
    Hello = 0x01,
    Abort = 0x03,

    // Encrypted-input preparation.
    Psi = 0x10,
    PhiA = 0x11,
    PhiB = 0x12,
    PadA = 0x13,
    PadB = 0x14,

    // Row shuffle.
    Sigma = 0x20,
    PermutedPadA = 0x21,
    PermutedTheta = 0x22,
    PermutedR1 = 0x23,
    PermutedR2 = 0x24,

    // Garbled circuits.
    GcSetup = 0x30,
    GarbledTables = 0x31,
    GarblerLabels = 0x32,
    OutputDecode = 0x33,
    OutputToGarbler = 0x34,
    ReleasedValue = 0x35,

    // Oblivious transfer.
    OtSetup = 0x40,
    OtChoices = 0x41,
    OtCiphertexts = 0x42,

    /// Free-form payload for diagnostics and tests.
    Raw = 0x7e,
}

impl FrameTag {
    pub const ALL: [FrameTag; 22] = [
        FrameTag::Hello,
        FrameTag::Abort,
        FrameTag::Psi,
        FrameTag::PhiA,
        FrameTag::PhiB,
        FrameTag::PadA,
        FrameTag::PadB,
        FrameTag::Sigma,
        FrameTag::PermutedPadA,
        FrameTag::PermutedTheta,
        FrameTag::PermutedR1,
        FrameTag::PermutedR2,
        FrameTag::GcSetup,
        FrameTag::GarbledTables,
        FrameTag::GarblerLabels,
        FrameTag::OutputDecode,
        FrameTag::OutputToGarbler,
        FrameTag::ReleasedValue,
        FrameTag::OtSetup,
        FrameTag::OtChoices,
        FrameTag::OtCiphertexts,
        FrameTag::Raw,
    ];

    pub fn from_u8(v: u8) -> Option<FrameTag> {
        FrameTag::ALL.iter().copied().find(|t| *t as u8 == v)
    }

    pub fn name(self) -> &'static str {
        match self {
            FrameTag::Hello => "hello",
            FrameTag::Abort => "abort",
            FrameTag::Psi => "psi",
            FrameTag::PhiA => "phi_a",
            FrameTag::PhiB => "phi_b",
            FrameTag::PadA => "pad_a",
            FrameTag::PadB => "pad_b",
            FrameTag::Sigma => "sigma",
            FrameTag::PermutedPadA => "perm_pad_a",
            FrameTag::PermutedTheta => "perm_theta",
            FrameTag::PermutedR1 => "perm_r1",
            FrameTag::PermutedR2 => "perm_r2",
            FrameTag::GcSetup => "gc_setup",
            FrameTag::GarbledTables => "gc_tables",
            FrameTag::GarblerLabels => "gc_garbler_labels",
            FrameTag::OutputDecode => "gc_output_decode",
            FrameTag::OutputToGarbler => "gc_output_to_garbler",
            FrameTag::ReleasedValue => "gc_released_value",
            FrameTag::OtSetup => "ot_setup",
            FrameTag::OtChoices => "ot_choices",
            FrameTag::OtCiphertexts => "ot_ciphertexts",
            FrameTag::Raw => "raw",
        }
    }
}

/// Header size: one tag byte and a little-endian `u32` length.
pub const FRAME_HEADER_LEN: usize = 5;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frame {
    pub tag: FrameTag,
    pub payload: Vec<u8>,
}

impl Frame {
    pub fn wire_len(&self) -> usize {
        FRAME_HEADER_LEN + self.payload.len()
    }
}

/// What a release frame discloses. First payload byte of every
/// `OutputDecode`, `OutputToGarbler` and `ReleasedValue` frame.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum ReleasePurpose {
    /// Contradiction and success flags after resolution.
    CheckFlags = 1,
    /// Unit-literal index (0 when none).
    UnitIndex = 2,
    /// Branching index.
    BranchIndex = 3,
    /// The masked shuffle payload delivered to the provider.
    ShuffleMasked = 4,
    /// Ad-hoc releases outside the solver, e.g. in tests.
    Generic = 0x7f,
}

impl ReleasePurpose {
    pub fn from_u8(v: u8) -> Option<ReleasePurpose> {
        match v {
            1 => Some(ReleasePurpose::CheckFlags),
            2 => Some(ReleasePurpose::UnitIndex),
            3 => Some(ReleasePurpose::BranchIndex),
            4 => Some(ReleasePurpose::ShuffleMasked),
            0x7f => Some(ReleasePurpose::Generic),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_round_trips() {
        for t in FrameTag::ALL {
            assert_eq!(FrameTag::from_u8(t as u8), Some(t));
        }
        assert_eq!(FrameTag::from_u8(0xff), None);
    }
}
