//! Plaintext references: brute-force SAT, the plaintext search driver with
//! the same event stream as the two-party solver, and circuit evaluation.

mod dpll;

pub use dpll::{dpll_plain, PlainOutcome};

use crate::cnf::{eval_assignment, CnfFormula};
use crate::gc::{Circuit, GateKind, InputKind};

pub const BRUTE_FORCE_LIMIT: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("{0} variables exceed the brute-force limit")]
    TooManyVariables(usize),
    #[error("{expected} inputs expected, {found} given")]
    Arity { expected: usize, found: usize },
}

/// Exhaustive satisfiability over all `2^n` assignments.
pub fn brute_force_sat(f: &CnfFormula) -> Result<bool, OracleError> {
    let n = f.num_vars();
    if n > BRUTE_FORCE_LIMIT {
        return Err(OracleError::TooManyVariables(n));
    }
    let mut assignment = vec![false; n];
    for bits in 0u64..(1u64 << n) {
        for (v, slot) in assignment.iter_mut().enumerate() {
            *slot = (bits >> v) & 1 == 1;
        }
        if eval_assignment(f, &assignment).expect("length matches") {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Evaluates a circuit in the clear. `inputs` are the values of all
/// non-constant inputs in declaration order.
pub fn eval_circuit(c: &Circuit, inputs: &[bool]) -> Result<Vec<bool>, OracleError> {
    let needed = c.inputs().iter().filter(|i| !matches!(i.kind, InputKind::Constant(_))).count();
    if needed != inputs.len() {
        return Err(OracleError::Arity { expected: needed, found: inputs.len() });
    }
    let mut w = vec![false; c.num_wires()];
    let mut given = inputs.iter();
    for inp in c.inputs() {
        w[inp.wire as usize] = match inp.kind {
            InputKind::Constant(v) => v,
            _ => *given.next().unwrap(),
        };
    }
    for g in c.gates() {
        let a = w[g.a as usize];
        w[g.out as usize] = match g.kind {
            GateKind::Xor => a ^ w[g.b as usize],
            GateKind::And => a & w[g.b as usize],
            GateKind::Not => !a,
        };
    }
    Ok(c.outputs().iter().map(|&o| w[o as usize]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brute_force_small_cases() {
        let f = CnfFormula::new(1, vec![vec![1], vec![-1]]).unwrap();
        assert!(!brute_force_sat(&f).unwrap());
        assert!(brute_force_sat(&CnfFormula::new(3, vec![]).unwrap()).unwrap());
        let g = CnfFormula::new(2, vec![vec![1, 2], vec![-1, 2]]).unwrap();
        assert!(brute_force_sat(&g).unwrap());
        assert!(brute_force_sat(&CnfFormula::new(25, vec![]).unwrap()).is_err());
    }
}
