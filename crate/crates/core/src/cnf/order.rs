use sha2::{Digest, Sha256};

use super::{CnfError, CnfFormula, CnfMatrix};
use crate::transport::Role;

/// Row layout shared by both parties: common variables in the provider's
/// published order, then the consumer's auxiliaries, then the provider's.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VariableOrder {
    common: Vec<String>,
    n_aux_a: usize,
    n_aux_b: usize,
}

impl VariableOrder {
    pub fn new(common: Vec<String>, n_aux_a: usize, n_aux_b: usize) -> Self {
        VariableOrder { common, n_aux_a, n_aux_b }
    }

    /// Anonymous common variables `x1..xn`.
    pub fn anonymous(n_common: usize, n_aux_a: usize, n_aux_b: usize) -> Self {
        VariableOrder::new((1..=n_common).map(|i| format!("x{i}")).collect(), n_aux_a, n_aux_b)
    }

    pub fn n(&self) -> usize {
        self.common.len() + self.n_aux_a + self.n_aux_b
    }

    pub fn n_common(&self) -> usize {
        self.common.len()
    }

    pub fn n_aux(&self, role: Role) -> usize {
        match role {
            Role::Consumer => self.n_aux_a,
            Role::Provider => self.n_aux_b,
        }
    }

    pub fn common(&self) -> &[String] {
        &self.common
    }

    /// Zero-based row of a common variable name.
    pub fn row_of(&self, name: &str) -> Option<usize> {
        self.common.iter().position(|c| c == name)
    }

    /// Printable name of a zero-based row.
    pub fn name(&self, row: usize) -> String {
        let nc = self.common.len();
        if row < nc {
            self.common[row].clone()
        } else if row < nc + self.n_aux_a {
            format!("aux.consumer.{}", row - nc + 1)
        } else {
            format!("aux.provider.{}", row - nc - self.n_aux_a + 1)
        }
    }

    /// Rows of one party's local variables. Locally, variables `1..=n_common`
    /// are the common ones in canonical order and the rest are auxiliaries.
    pub fn local_rows(&self, role: Role) -> Vec<usize> {
        let nc = self.common.len();
        let offset = match role {
            Role::Consumer => nc,
            Role::Provider => nc + self.n_aux_a,
        };
        (0..nc).chain(offset..offset + self.n_aux(role)).collect()
    }

    /// The party's zero-padded n-row matrix.
    pub fn to_matrix(&self, f: &CnfFormula, role: Role) -> Result<CnfMatrix, CnfError> {
        let rows = self.local_rows(role);
        if f.num_vars() > rows.len() {
            return Err(CnfError::VariableNotInOrder(rows.len() + 1));
        }
        CnfMatrix::encode(f, &rows, self.n())
    }

    /// The party's formula renumbered into the joint variable space.
    pub fn to_joint(&self, f: &CnfFormula, role: Role) -> Result<CnfFormula, CnfError> {
        let rows = self.local_rows(role);
        if f.num_vars() > rows.len() {
            return Err(CnfError::VariableNotInOrder(rows.len() + 1));
        }
        f.remap(self.n(), |v| rows[v - 1] + 1)
    }

    /// SHA-256 over the length-prefixed common names.
    pub fn names_digest(&self) -> [u8; 32] {
        names_digest(&self.common)
    }
}

pub(crate) fn names_digest(names: &[String]) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update((names.len() as u64).to_le_bytes());
    for name in names {
        h.update((name.len() as u64).to_le_bytes());
        h.update(name.as_bytes());
    }
    h.finalize().into()
}

/// What one party discloses about its formula before alignment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartyMeta {
    pub common: Vec<String>,
    pub n_aux: usize,
    pub m: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alignment {
    pub order: VariableOrder,
    pub m_a: usize,
    pub m_b: usize,
}

impl Alignment {
    pub fn n(&self) -> usize {
        self.order.n()
    }

    pub fn m(&self) -> usize {
        self.m_a + self.m_b
    }
}

/// Both parties run this on the same two metadata records and get the same
/// order.
pub fn align(meta_a: &PartyMeta, meta_b: &PartyMeta) -> Result<Alignment, CnfError> {
    if meta_a.common != meta_b.common {
        let first = meta_a
            .common
            .iter()
            .zip(&meta_b.common)
            .position(|(x, y)| x != y)
            .unwrap_or(meta_a.common.len().min(meta_b.common.len()));
        return Err(CnfError::NameMismatch(format!(
            "{} vs {} names, first difference at {}",
            meta_a.common.len(),
            meta_b.common.len(),
            first
        )));
    }
    Ok(Alignment {
        order: VariableOrder::new(meta_b.common.clone(), meta_a.n_aux, meta_b.n_aux),
        m_a: meta_a.m,
        m_b: meta_b.m,
    })
}
