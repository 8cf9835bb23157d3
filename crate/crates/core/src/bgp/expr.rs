use std::collections::{BTreeSet, HashMap};

/// Boolean expressions over named one-bit variables. The constructors fold
/// constants and flatten nested connectives so that encodings stay small.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Expr {
    Const(bool),
    Var(String),
    Not(Box<Expr>),
    And(Vec<Expr>),
    Or(Vec<Expr>),
}

impl Expr {
    pub fn var(name: impl Into<String>) -> Expr {
        Expr::Var(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(e: Expr) -> Expr {
        match e {
            Expr::Const(v) => Expr::Const(!v),
            Expr::Not(inner) => *inner,
            other => Expr::Not(Box::new(other)),
        }
    }

    pub fn and(parts: impl IntoIterator<Item = Expr>) -> Expr {
        let mut out = Vec::new();
        for p in parts {
            match p {
                Expr::Const(true) => {}
                Expr::Const(false) => return Expr::Const(false),
                Expr::And(inner) => out.extend(inner),
                other => out.push(other),
            }
        }
        out.dedup();
        match out.len() {
            0 => Expr::Const(true),
            1 => out.pop().unwrap(),
            _ => Expr::And(out),
        }
    }

    pub fn or(parts: impl IntoIterator<Item = Expr>) -> Expr {
        let mut out = Vec::new();
        for p in parts {
            match p {
                Expr::Const(false) => {}
                Expr::Const(true) => return Expr::Const(true),
                Expr::Or(inner) => out.extend(inner),
                other => out.push(other),
            }
        }
        out.dedup();
        match out.len() {
            0 => Expr::Const(false),
            1 => out.pop().unwrap(),
            _ => Expr::Or(out),
        }
    }

    pub fn implies(a: Expr, b: Expr) -> Expr {
        Expr::or([Expr::not(a), b])
    }

    pub fn iff(a: Expr, b: Expr) -> Expr {
        Expr::and([Expr::implies(a.clone(), b.clone()), Expr::implies(b, a)])
    }

    /// `if c then t else e`.
    pub fn ite(c: Expr, t: Expr, e: Expr) -> Expr {
        match (&t, &e) {
            (Expr::Const(true), Expr::Const(false)) => c,
            (Expr::Const(false), Expr::Const(true)) => Expr::not(c),
            (Expr::Const(true), _) => Expr::or([c, e]),
            (Expr::Const(false), _) => Expr::and([Expr::not(c), e]),
            (_, Expr::Const(true)) => Expr::or([Expr::not(c), t]),
            (_, Expr::Const(false)) => Expr::and([c, t]),
            _ if t == e => t,
            _ => Expr::or([Expr::and([c.clone(), t]), Expr::and([Expr::not(c), e])]),
        }
    }

    pub fn eval(&self, env: &dyn Fn(&str) -> bool) -> bool {
        match self {
            Expr::Const(v) => *v,
            Expr::Var(name) => env(name),
            Expr::Not(e) => !e.eval(env),
            Expr::And(es) => es.iter().all(|e| e.eval(env)),
            Expr::Or(es) => es.iter().any(|e| e.eval(env)),
        }
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Expr::Const(_) => {}
            Expr::Var(name) => {
                out.insert(name.clone());
            }
            Expr::Not(e) => e.collect_vars(out),
            Expr::And(es) | Expr::Or(es) => es.iter().for_each(|e| e.collect_vars(out)),
        }
    }
}

/// A named bit vector; bit `k` has weight `2^k` and is called `name.k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitVec {
    pub name: String,
    pub width: usize,
}

impl BitVec {
    pub fn new(name: impl Into<String>, width: usize) -> Self {
        BitVec { name: name.into(), width }
    }

    pub fn bit_name(&self, k: usize) -> String {
        format!("{}.{k}", self.name)
    }

    pub fn bit(&self, k: usize) -> Expr {
        Expr::Var(self.bit_name(k))
    }

    /// Bit names, most significant first.
    pub fn bit_names(&self) -> Vec<String> {
        (0..self.width).rev().map(|k| self.bit_name(k)).collect()
    }

    fn lit(&self, k: usize, value: bool) -> Expr {
        if value {
            self.bit(k)
        } else {
            Expr::not(self.bit(k))
        }
    }

    pub fn eq_const(&self, value: u64) -> Expr {
        if self.width < 64 && value >> self.width != 0 {
            return Expr::Const(false);
        }
        Expr::and((0..self.width).map(|k| self.lit(k, (value >> k) & 1 == 1)))
    }

    /// The top `len` bits agree with the top `len` bits of `value`, where
    /// `value` is `self.width` bits wide.
    pub fn prefix_match(&self, value: u64, len: usize) -> Expr {
        let len = len.min(self.width);
        Expr::and((self.width - len..self.width).map(|k| self.lit(k, (value >> k) & 1 == 1)))
    }

    /// Unsigned `self < value`.
    pub fn lt_const(&self, value: u64) -> Expr {
        let mut acc = Expr::Const(false);
        for k in 0..self.width {
            acc = if (value >> k) & 1 == 1 {
                Expr::or([Expr::not(self.bit(k)), acc])
            } else {
                Expr::and([Expr::not(self.bit(k)), acc])
            };
        }
        if self.width < 64 && value >> self.width != 0 {
            return Expr::Const(true);
        }
        acc
    }

    /// Unsigned `self > value`.
    pub fn gt_const(&self, value: u64) -> Expr {
        if self.width < 64 && value >> self.width != 0 {
            return Expr::Const(false);
        }
        let mut acc = Expr::Const(false);
        for k in 0..self.width {
            acc = if (value >> k) & 1 == 1 {
                Expr::and([self.bit(k), acc])
            } else {
                Expr::or([self.bit(k), acc])
            };
        }
        acc
    }
}

/// Declared variables plus constraints that must all hold.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BooleanModel {
    /// One-bit variable names in declaration order.
    pub vars: Vec<String>,
    pub constraints: Vec<Expr>,
}

impl BooleanModel {
    pub fn new(vars: Vec<String>) -> Self {
        BooleanModel { vars, constraints: Vec::new() }
    }

    pub fn assert(&mut self, e: Expr) {
        if e != Expr::Const(true) {
            self.constraints.push(e);
        }
    }

    /// Variables used but never declared.
    pub fn undeclared(&self) -> Vec<String> {
        let mut used = BTreeSet::new();
        for c in &self.constraints {
            c.collect_vars(&mut used);
        }
        let declared: BTreeSet<&String> = self.vars.iter().collect();
        used.into_iter().filter(|v| !declared.contains(v)).collect()
    }

    pub fn holds(&self, env: &HashMap<String, bool>) -> bool {
        let lookup = |v: &str| env.get(v).copied().unwrap_or(false);
        self.constraints.iter().all(|c| c.eval(&lookup))
    }

    /// Exhaustive satisfiability over the declared variables; only for small
    /// models.
    pub fn brute_force_sat(&self) -> bool {
        let n = self.vars.len();
        assert!(n <= 24, "model too large to enumerate");
        let mut env = HashMap::new();
        for bits in 0u64..(1 << n) {
            for (k, v) in self.vars.iter().enumerate() {
                env.insert(v.clone(), (bits >> k) & 1 == 1);
            }
            if self.holds(&env) {
                return true;
            }
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn value_env(v: &BitVec, x: u64) -> impl Fn(&str) -> bool + '_ {
        move |name: &str| {
            let k: usize = name.rsplit('.').next().unwrap().parse().unwrap();
            assert!(name.starts_with(&v.name));
            (x >> k) & 1 == 1
        }
    }

    #[test]
    fn comparators_match_integers() {
        let v = BitVec::new("lp", 4);
        for c in 0..20u64 {
            for x in 0..16u64 {
                assert_eq!(v.lt_const(c).eval(&value_env(&v, x)), x < c, "{x} < {c}");
                assert_eq!(v.gt_const(c).eval(&value_env(&v, x)), x > c, "{x} > {c}");
                assert_eq!(v.eq_const(c).eval(&value_env(&v, x)), x == c);
            }
        }
    }

    #[test]
    fn prefix_match_compares_leading_bits() {
        let v = BitVec::new("p", 4);
        for len in 0..=4 {
            for x in 0..16u64 {
                let want = len == 0 || (x >> (4 - len)) == (0b1010 >> (4 - len));
                assert_eq!(v.prefix_match(0b1010, len).eval(&value_env(&v, x)), want);
            }
        }
    }

    #[test]
    fn ite_folds_constants() {
        let c = Expr::var("c");
        assert_eq!(Expr::ite(c.clone(), Expr::Const(true), Expr::Const(false)), c);
        assert_eq!(Expr::ite(c.clone(), Expr::Const(false), Expr::Const(true)), Expr::not(c));
        assert_eq!(Expr::and([Expr::Const(true), Expr::Const(false)]), Expr::Const(false));
        assert_eq!(Expr::or(Vec::new()), Expr::Const(false));
    }
}
