use crate::crypto::{Block, BlockMatrix};

use super::ShuffleError;

/// How each row's payload is laid out in 128-bit blocks.
///
/// A row carries fields owned by the consumer (the A region) followed by
/// fields owned by the provider (the B region). Packed, a region's fields are
/// concatenated and cut into blocks; unpacked, every field gets a block of
/// its own.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RowLayout {
    a_fields: Vec<usize>,
    b_fields: Vec<usize>,
    packed: bool,
}

impl RowLayout {
    pub fn new(a_fields: Vec<usize>, b_fields: Vec<usize>, packed: bool) -> Result<Self, ShuffleError> {
        if let Some(&w) = a_fields.iter().chain(&b_fields).find(|&&w| w == 0 || w > 128) {
            return Err(ShuffleError::Layout(format!("field width {w} outside 1..=128")));
        }
        Ok(RowLayout { a_fields, b_fields, packed })
    }

    /// Formula rows: two bits per clause cell on each side, then the
    /// provider's priority and initial assignment.
    pub fn for_formula(m_a: usize, m_b: usize, prior_bits: usize, packed: bool) -> Self {
        let mut b_fields = vec![2; m_b];
        b_fields.push(prior_bits.max(1));
        b_fields.push(1);
        RowLayout::new(vec![2; m_a], b_fields, packed).expect("widths are valid")
    }

    pub fn packed(&self) -> bool {
        self.packed
    }

    pub fn a_bits(&self) -> usize {
        self.a_fields.iter().sum()
    }

    pub fn b_bits(&self) -> usize {
        self.b_fields.iter().sum()
    }

    pub fn a_blocks(&self) -> usize {
        region_blocks(&self.a_fields, self.packed)
    }

    pub fn b_blocks(&self) -> usize {
        region_blocks(&self.b_fields, self.packed)
    }

    pub fn blocks(&self) -> usize {
        self.a_blocks() + self.b_blocks()
    }

    /// Packs the A region of every row.
    pub fn pack_a(&self, rows: &[Vec<bool>]) -> Result<BlockMatrix, ShuffleError> {
        pack_region(&self.a_fields, self.packed, rows)
    }

    pub fn pack_b(&self, rows: &[Vec<bool>]) -> Result<BlockMatrix, ShuffleError> {
        pack_region(&self.b_fields, self.packed, rows)
    }

    /// Full row bits, A region then B region.
    pub fn unpack(&self, m: &BlockMatrix) -> Vec<Vec<bool>> {
        let ab = self.a_blocks();
        (0..m.rows())
            .map(|r| {
                let row = m.row(r);
                let mut bits = unpack_region(&self.a_fields, self.packed, &row[..ab]);
                bits.extend(unpack_region(&self.b_fields, self.packed, &row[ab..]));
                bits
            })
            .collect()
    }
}

fn region_blocks(fields: &[usize], packed: bool) -> usize {
    if packed {
        fields.iter().sum::<usize>().div_ceil(128)
    } else {
        fields.len()
    }
}

/// Bit position of each field start; packed fields run on, unpacked ones
/// start on a block boundary.
fn field_offsets(fields: &[usize], packed: bool) -> Vec<usize> {
    let mut at = 0;
    fields
        .iter()
        .map(|&w| {
            let start = at;
            at += if packed { w } else { 128 };
            start
        })
        .collect()
}

fn pack_region(fields: &[usize], packed: bool, rows: &[Vec<bool>]) -> Result<BlockMatrix, ShuffleError> {
    let width: usize = fields.iter().sum();
    let cols = region_blocks(fields, packed);
    let offsets = field_offsets(fields, packed);
    let mut out = BlockMatrix::zeros(rows.len(), cols);
    for (r, bits) in rows.iter().enumerate() {
        if bits.len() != width {
            return Err(ShuffleError::Layout(format!("row {r} has {} bits, layout wants {width}", bits.len())));
        }
        let row = out.row_mut(r);
        let mut k = 0;
        for (&w, &start) in fields.iter().zip(&offsets) {
            for t in 0..w {
                let pos = start + t;
                row[pos / 128].set_bit(pos % 128, bits[k]);
                k += 1;
            }
        }
    }
    Ok(out)
}

fn unpack_region(fields: &[usize], packed: bool, blocks: &[Block]) -> Vec<bool> {
    let offsets = field_offsets(fields, packed);
    let mut bits = Vec::with_capacity(fields.iter().sum());
    for (&w, &start) in fields.iter().zip(&offsets) {
        for t in 0..w {
            let pos = start + t;
            bits.push(blocks[pos / 128].bit(pos % 128));
        }
    }
    bits
}
