use std::fmt::Write as _;

use super::CnfError;

/// A DIMACS-style literal: `v` or `-v` with `v >= 1`.
pub type Lit = i32;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CnfFormula {
    num_vars: usize,
    clauses: Vec<Vec<Lit>>,
}

impl CnfFormula {
    pub fn new(num_vars: usize, clauses: Vec<Vec<Lit>>) -> Result<Self, CnfError> {
        for (j, clause) in clauses.iter().enumerate() {
            if clause.is_empty() {
                return Err(CnfError::EmptyClause(j));
            }
            for &lit in clause {
                if lit == 0 || lit.unsigned_abs() as usize > num_vars {
                    return Err(CnfError::LiteralOutOfRange { lit, num_vars });
                }
            }
        }
        Ok(CnfFormula { num_vars, clauses })
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    pub fn clauses(&self) -> &[Vec<Lit>] {
        &self.clauses
    }

    /// Raises the variable count, e.g. to make room for auxiliaries that
    /// occur in no clause.
    pub fn with_num_vars(mut self, num_vars: usize) -> Result<Self, CnfError> {
        let used = self.max_var();
        if num_vars < used {
            return Err(CnfError::LiteralOutOfRange { lit: used as Lit, num_vars });
        }
        self.num_vars = num_vars;
        Ok(self)
    }

    pub fn max_var(&self) -> usize {
        self.clauses.iter().flatten().map(|l| l.unsigned_abs() as usize).max().unwrap_or(0)
    }

    /// Splits into the first `k` clauses and the rest, keeping the variable count.
    pub fn split_at(&self, k: usize) -> (CnfFormula, CnfFormula) {
        let k = k.min(self.clauses.len());
        (
            CnfFormula { num_vars: self.num_vars, clauses: self.clauses[..k].to_vec() },
            CnfFormula { num_vars: self.num_vars, clauses: self.clauses[k..].to_vec() },
        )
    }

    /// Renumbers every variable through `map` (1-based in, 1-based out).
    pub fn remap(&self, num_vars: usize, map: impl Fn(usize) -> usize) -> Result<CnfFormula, CnfError> {
        let clauses = self
            .clauses
            .iter()
            .map(|c| {
                c.iter()
                    .map(|&l| {
                        let v = map(l.unsigned_abs() as usize) as Lit;
                        if l < 0 {
                            -v
                        } else {
                            v
                        }
                    })
                    .collect()
            })
            .collect();
        CnfFormula::new(num_vars, clauses)
    }

    /// Conjunction over a shared variable space.
    pub fn and(&self, other: &CnfFormula) -> CnfFormula {
        let mut clauses = self.clauses.clone();
        clauses.extend(other.clauses.iter().cloned());
        CnfFormula { num_vars: self.num_vars.max(other.num_vars), clauses }
    }

    /// DIMACS text with one clause per line in stored order.
    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.num_vars, self.clauses.len());
        for clause in &self.clauses {
            for lit in clause {
                let _ = write!(out, "{lit} ");
            }
            out.push_str("0\n");
        }
        out
    }

    /// Debug dump: one clause per line, literals sorted by variable then sign,
    /// duplicates collapsed.
    pub fn dump(&self) -> String {
        let mut out = format!("vars {} clauses {}\n", self.num_vars, self.clauses.len());
        for (j, clause) in self.clauses.iter().enumerate() {
            let mut lits = clause.clone();
            lits.sort_by_key(|l| (l.unsigned_abs(), *l > 0));
            lits.dedup();
            let body: Vec<String> = lits
                .iter()
                .map(|l| if *l < 0 { format!("!x{}", -l) } else { format!("x{l}") })
                .collect();
            let _ = writeln!(out, "c{}: {}", j + 1, body.join(" | "));
        }
        out
    }
}

/// True iff every clause has a satisfied literal. `assignment[v - 1]` is the
/// value of variable `v`.
pub fn eval_assignment(f: &CnfFormula, assignment: &[bool]) -> Result<bool, CnfError> {
    if assignment.len() != f.num_vars {
        return Err(CnfError::AssignmentLength { expected: f.num_vars, found: assignment.len() });
    }
    Ok(f.clauses.iter().all(|c| {
        c.iter().any(|&l| assignment[l.unsigned_abs() as usize - 1] == (l > 0))
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_checks() {
        assert!(matches!(CnfFormula::new(1, vec![vec![]]), Err(CnfError::EmptyClause(0))));
        assert!(matches!(
            CnfFormula::new(1, vec![vec![2]]),
            Err(CnfError::LiteralOutOfRange { lit: 2, .. })
        ));
        assert!(CnfFormula::new(2, vec![vec![1, -2]]).is_ok());
    }

    #[test]
    fn evaluation() {
        let f = CnfFormula::new(1, vec![vec![1], vec![-1]]).unwrap();
        assert!(!eval_assignment(&f, &[true]).unwrap());
        assert!(!eval_assignment(&f, &[false]).unwrap());
        let g = CnfFormula::new(2, vec![vec![1, 2]]).unwrap();
        assert!(eval_assignment(&g, &[true, false]).unwrap());
        assert!(eval_assignment(&g, &[true]).is_err());
    }

    #[test]
    fn dump_is_sorted_and_deduplicated() {
        let f = CnfFormula::new(3, vec![vec![3, -1, 3]]).unwrap();
        assert_eq!(f.dump(), "vars 3 clauses 1\nc1: !x1 | x3\n");
    }
}
