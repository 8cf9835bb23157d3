use std::collections::HashMap;

use crate::cnf::{CnfFormula, Lit};

use super::{BgpError, BooleanModel, Expr};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TseytinOutput {
    /// Variables `1..=order.len()` are the named ones, the rest auxiliary.
    pub formula: CnfFormula,
    pub n_aux: usize,
}

struct Node {
    lit: Lit,
    pos: bool,
    neg: bool,
}

struct Encoder<'a> {
    index: HashMap<&'a str, Lit>,
    next: Lit,
    nodes: HashMap<Expr, Node>,
    clauses: Vec<Vec<Lit>>,
}

impl<'a> Encoder<'a> {
    fn fresh(&mut self) -> Lit {
        self.next += 1;
        self.next
    }

    fn clause(&mut self, mut lits: Vec<Lit>) {
        lits.sort_unstable_by_key(|l| (l.abs(), *l));
        lits.dedup();
        if lits.windows(2).any(|w| w[0] == -w[1]) {
            return;
        }
        self.clauses.push(lits);
    }

    /// A literal standing for `e`. With `pos` the literal implies `e`,
    /// otherwise `e` implies the literal; each direction is emitted once.
    fn lit(&mut self, e: &Expr, pos: bool) -> Result<Lit, BgpError> {
        match e {
            Expr::Var(name) => self.index.get(name.as_str()).copied().ok_or_else(|| BgpError::Undeclared(name.clone())),
            Expr::Not(inner) => Ok(-self.lit(inner, !pos)?),
            Expr::Const(v) => {
                let t = self.fresh();
                self.clause(vec![if *v { t } else { -t }]);
                Ok(t)
            }
            Expr::And(children) | Expr::Or(children) => {
                let is_and = matches!(e, Expr::And(_));
                let t = match self.nodes.get(e) {
                    Some(node) if (pos && node.pos) || (!pos && node.neg) => return Ok(node.lit),
                    Some(node) => node.lit,
                    None => {
                        let t = self.fresh();
                        self.nodes.insert(e.clone(), Node { lit: t, pos: false, neg: false });
                        t
                    }
                };
                let node = self.nodes.get_mut(e).unwrap();
                if pos {
                    node.pos = true;
                } else {
                    node.neg = true;
                }
                let mut lits = Vec::with_capacity(children.len());
                for c in children {
                    lits.push(self.lit(c, pos)?);
                }
                match (is_and, pos) {
                    (true, true) => lits.iter().for_each(|&l| self.clause(vec![-t, l])),
                    (false, true) => self.clause(std::iter::once(-t).chain(lits).collect()),
                    (true, false) => self.clause(std::iter::once(t).chain(lits.iter().map(|l| -l)).collect()),
                    (false, false) => lits.iter().for_each(|&l| self.clause(vec![t, -l])),
                }
                Ok(t)
            }
        }
    }

    fn assert(&mut self, e: &Expr) -> Result<(), BgpError> {
        match e {
            Expr::Const(true) => Ok(()),
            Expr::Const(false) => {
                let t = self.fresh();
                self.clause(vec![t]);
                self.clause(vec![-t]);
                Ok(())
            }
            Expr::And(children) => children.iter().try_for_each(|c| self.assert(c)),
            Expr::Or(children) => {
                let lits = children.iter().map(|c| self.lit(c, true)).collect::<Result<Vec<_>, _>>()?;
                self.clause(lits);
                Ok(())
            }
            other => {
                let l = self.lit(other, true)?;
                self.clause(vec![l]);
                Ok(())
            }
        }
    }
}

/// Equisatisfiable CNF of `model` with one-sided (polarity-aware) definitions
/// for subformulas and shared auxiliaries for repeated ones. `order` numbers
/// the named variables.
pub fn tseytin(model: &BooleanModel, order: &[String]) -> Result<TseytinOutput, BgpError> {
    let index: HashMap<&str, Lit> = order.iter().enumerate().map(|(i, v)| (v.as_str(), i as Lit + 1)).collect();
    let mut enc = Encoder { index, next: order.len() as Lit, nodes: HashMap::new(), clauses: Vec::new() };
    for c in &model.constraints {
        enc.assert(c)?;
    }
    let n_aux = enc.next as usize - order.len();
    let formula = CnfFormula::new(enc.next as usize, enc.clauses).map_err(BgpError::Cnf)?;
    Ok(TseytinOutput { formula, n_aux })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::brute_force_sat;

    #[test]
    fn unit_for_a_variable() {
        let mut m = BooleanModel::new(vec!["v".into()]);
        m.assert(Expr::var("v"));
        let out = tseytin(&m, &m.vars).unwrap();
        assert_eq!(out.formula.clauses(), &[vec![1]]);
        assert_eq!(out.n_aux, 0);
    }

    #[test]
    fn xor_is_five_clauses_over_two_auxiliaries() {
        let (a, b) = (Expr::var("a"), Expr::var("b"));
        let xor = Expr::or([Expr::and([a.clone(), Expr::not(b.clone())]), Expr::and([Expr::not(a), b])]);
        let mut m = BooleanModel::new(vec!["a".into(), "b".into()]);
        m.assert(xor);
        let out = tseytin(&m, &m.vars).unwrap();
        // one top clause over two auxiliaries plus two definitions each
        assert_eq!(out.n_aux, 2);
        assert_eq!(out.formula.num_clauses(), 5);
        assert!(brute_force_sat(&out.formula).unwrap());
        let mut both = m.clone();
        both.assert(Expr::iff(Expr::var("a"), Expr::var("b")));
        assert!(!both.brute_force_sat());
        assert!(!brute_force_sat(&tseytin(&both, &both.vars).unwrap().formula).unwrap());
    }

    #[test]
    fn false_constraint_is_unsatisfiable() {
        let mut m = BooleanModel::new(vec![]);
        m.assert(Expr::Const(false));
        let out = tseytin(&m, &[]).unwrap();
        assert!(!brute_force_sat(&out.formula).unwrap());
    }

    #[test]
    fn undeclared_variable_is_an_error() {
        let mut m = BooleanModel::new(vec![]);
        m.assert(Expr::var("ghost"));
        assert!(matches!(tseytin(&m, &[]), Err(BgpError::Undeclared(_))));
    }
}
