//! CNF formulas, DIMACS ingestion, the two-bit matrix encoding and variable
//! alignment between the two parties.

mod dimacs;
mod formula;
mod matrix;
mod order;

pub use dimacs::{parse_dimacs, DimacsError};
pub use formula::{eval_assignment, CnfFormula, Lit};
pub use matrix::CnfMatrix;
pub use order::{align, Alignment, PartyMeta, VariableOrder};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CnfError {
    #[error("literal {lit} outside 1..={num_vars}")]
    LiteralOutOfRange { lit: Lit, num_vars: usize },
    #[error("clause {0} is empty")]
    EmptyClause(usize),
    #[error("clause {clause} is a tautology on variable {var}")]
    Tautology { clause: usize, var: usize },
    #[error("variable {0} has no row in the variable order")]
    VariableNotInOrder(usize),
    #[error("assignment covers {found} variables, formula has {expected}")]
    AssignmentLength { expected: usize, found: usize },
    #[error("shared variable lists disagree: {0}")]
    NameMismatch(String),
    #[error("matrix shapes disagree: {0:?} vs {1:?}")]
    ShapeMismatch((usize, usize), (usize, usize)),
}
