use super::{CnfError, CnfFormula, Lit};
use crate::crypto::Permutation;

/// The n×m two-bit encoding: `O` marks occurrence of variable i in clause j,
/// `P` its polarity. Absent literals always carry `P = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CnfMatrix {
    n: usize,
    m: usize,
    o: Vec<bool>,
    p: Vec<bool>,
}

impl CnfMatrix {
    pub fn zeros(n: usize, m: usize) -> Self {
        CnfMatrix { n, m, o: vec![false; n * m], p: vec![false; n * m] }
    }

    /// Encodes `f` with variable `v` on row `rows[v - 1]` of an `n`-row matrix.
    pub fn encode(f: &CnfFormula, rows: &[usize], n: usize) -> Result<Self, CnfError> {
        let mut mat = CnfMatrix::zeros(n, f.num_clauses());
        for (j, clause) in f.clauses().iter().enumerate() {
            for &lit in clause {
                let v = lit.unsigned_abs() as usize;
                let i = *rows.get(v - 1).ok_or(CnfError::VariableNotInOrder(v))?;
                if i >= n {
                    return Err(CnfError::VariableNotInOrder(v));
                }
                let (o, p) = mat.get(i, j);
                if o && p != (lit > 0) {
                    return Err(CnfError::Tautology { clause: j, var: v });
                }
                mat.set(i, j, true, lit > 0);
            }
        }
        Ok(mat)
    }

    /// Encodes with the natural order, variable v on row v - 1.
    pub fn from_formula(f: &CnfFormula) -> Result<Self, CnfError> {
        let rows: Vec<usize> = (0..f.num_vars()).collect();
        CnfMatrix::encode(f, &rows, f.num_vars())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// `(O, P)` of cell `(i, j)`, zero-based.
    pub fn get(&self, i: usize, j: usize) -> (bool, bool) {
        (self.o[i * self.m + j], self.p[i * self.m + j])
    }

    pub fn set(&mut self, i: usize, j: usize, o: bool, p: bool) {
        self.o[i * self.m + j] = o;
        self.p[i * self.m + j] = o && p;
    }

    pub fn row(&self, i: usize) -> Vec<(bool, bool)> {
        (0..self.m).map(|j| self.get(i, j)).collect()
    }

    /// Literals of column j with 1-based row indices.
    pub fn column_literals(&self, j: usize) -> Vec<Lit> {
        (0..self.n)
            .filter_map(|i| match self.get(i, j) {
                (true, true) => Some(i as Lit + 1),
                (true, false) => Some(-(i as Lit + 1)),
                _ => None,
            })
            .collect()
    }

    /// Reads the clauses back; fails on an all-zero column.
    pub fn to_formula(&self) -> Result<CnfFormula, CnfError> {
        CnfFormula::new(self.n, (0..self.m).map(|j| self.column_literals(j)).collect())
    }

    /// Columns of `self` followed by those of `other`.
    pub fn concat_cols(&self, other: &CnfMatrix) -> Result<CnfMatrix, CnfError> {
        if self.n != other.n {
            return Err(CnfError::ShapeMismatch((self.n, self.m), (other.n, other.m)));
        }
        let mut out = CnfMatrix::zeros(self.n, self.m + other.m);
        for i in 0..self.n {
            for j in 0..self.m {
                let (o, p) = self.get(i, j);
                out.set(i, j, o, p);
            }
            for j in 0..other.m {
                let (o, p) = other.get(i, j);
                out.set(i, self.m + j, o, p);
            }
        }
        Ok(out)
    }

    /// Row i moves to row `perm.map(i)`.
    pub fn permute_rows(&self, perm: &Permutation) -> CnfMatrix {
        assert_eq!(perm.len(), self.n);
        let mut out = CnfMatrix::zeros(self.n, self.m);
        for i in 0..self.n {
            let t = perm.map(i);
            for j in 0..self.m {
                let (o, p) = self.get(i, j);
                out.set(t, j, o, p);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_clause_example() {
        let f = CnfFormula::new(2, vec![vec![1, -2], vec![2]]).unwrap();
        let mat = CnfMatrix::from_formula(&f).unwrap();
        assert_eq!(mat.get(0, 0), (true, true));
        assert_eq!(mat.get(1, 0), (true, false));
        assert_eq!(mat.get(0, 1), (false, false));
        assert_eq!(mat.get(1, 1), (true, true));
    }

    #[test]
    fn single_clause_and_unused_variable() {
        let f = CnfFormula::new(1, vec![vec![1]]).unwrap();
        let mat = CnfMatrix::from_formula(&f).unwrap();
        assert_eq!((mat.n(), mat.m(), mat.get(0, 0)), (1, 1, (true, true)));
        let g = CnfFormula::new(3, vec![vec![1, 2], vec![-2]]).unwrap();
        let mat = CnfMatrix::from_formula(&g).unwrap();
        assert!(mat.row(2).iter().all(|c| *c == (false, false)));
    }

    #[test]
    fn duplicates_collapse_and_tautologies_fail() {
        let f = CnfFormula::new(2, vec![vec![1, 1, -2]]).unwrap();
        let mat = CnfMatrix::from_formula(&f).unwrap();
        assert_eq!(mat.column_literals(0), vec![1, -2]);
        let t = CnfFormula::new(2, vec![vec![2], vec![1, -1]]).unwrap();
        assert_eq!(CnfMatrix::from_formula(&t), Err(CnfError::Tautology { clause: 1, var: 1 }));
    }

    #[test]
    fn absent_cells_have_zero_polarity() {
        let mut mat = CnfMatrix::zeros(2, 2);
        mat.set(1, 1, false, true);
        assert_eq!(mat.get(1, 1), (false, false));
    }
}
