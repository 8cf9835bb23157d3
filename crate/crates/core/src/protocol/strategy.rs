use std::str::FromStr;

use crate::cnf::VariableOrder;
use crate::transport::{bit_length, Role};

use super::ProtocolError;

/// A variable named in a strategy file: a common name, a 1-based joint row,
/// or every auxiliary row of one party (`@aux-consumer`, `@aux-provider`).
/// A group entry gives its rows descending priorities starting at
/// `priority` (never below 1), so earlier rows win.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VarRef {
    Name(String),
    Row(usize),
    Aux(Role),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrategyEntry {
    pub var: VarRef,
    pub priority: u64,
    pub assign: bool,
}

/// The provider's search strategy before it is resolved against the joint
/// row order. Rows not mentioned keep the default: priority `n - row` (so
/// earlier rows first) and initial value true.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StrategySpec {
    pub entries: Vec<StrategyEntry>,
}

/// Resolved priorities and initial values, indexed by joint row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Strategy {
    pub prior: Vec<u64>,
    pub assign: Vec<bool>,
}

impl Strategy {
    pub fn default_for(n: usize) -> Strategy {
        Strategy { prior: (1..=n as u64).rev().collect(), assign: vec![true; n] }
    }

    pub fn prior_bits(&self) -> u8 {
        bit_length(self.prior.iter().copied().max().unwrap_or(1)).max(1)
    }
}

impl StrategySpec {
    /// Widest priority this spec can produce for `n` rows.
    pub fn max_priority(&self, n: usize) -> u64 {
        self.entries.iter().map(|e| e.priority).chain([n as u64]).max().unwrap_or(1)
    }

    pub fn resolve(&self, order: &VariableOrder) -> Result<Strategy, ProtocolError> {
        let n = order.n();
        let mut s = Strategy::default_for(n);
        for e in &self.entries {
            let (rows, descending) = match &e.var {
                VarRef::Name(name) => {
                    let row = order
                        .row_of(name)
                        .ok_or_else(|| ProtocolError::Strategy(format!("unknown variable {name}")))?;
                    (row..row + 1, false)
                }
                VarRef::Row(r) if (1..=n).contains(r) => (r - 1..*r, false),
                VarRef::Row(r) => return Err(ProtocolError::Strategy(format!("row {r} outside 1..={n}"))),
                VarRef::Aux(role) => {
                    let start = match role {
                        Role::Consumer => order.n_common(),
                        Role::Provider => order.n_common() + order.n_aux(Role::Consumer),
                    };
                    (start..start + order.n_aux(*role), true)
                }
            };
            if e.priority == 0 {
                return Err(ProtocolError::Strategy("priorities must be at least 1".into()));
            }
            for (k, row) in rows.enumerate() {
                s.prior[row] = if descending { e.priority.saturating_sub(k as u64).max(1) } else { e.priority };
                s.assign[row] = e.assign;
            }
        }
        Ok(s)
    }
}

/// Lines of `<var> <priority> <0|1>`; `#` starts a comment. A numeric var is a
/// joint row, anything else a common name.
impl FromStr for StrategySpec {
    type Err = ProtocolError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut entries = Vec::new();
        for (k, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = || ProtocolError::Strategy(format!("line {}: expected `<var> <priority> <0|1>`", k + 1));
            let parts: Vec<&str> = line.split_whitespace().collect();
            let [var, pri, val] = parts[..] else { return Err(bad()) };
            let var = match (var, var.parse::<usize>()) {
                ("@aux-consumer", _) => VarRef::Aux(Role::Consumer),
                ("@aux-provider", _) => VarRef::Aux(Role::Provider),
                (_, Ok(r)) => VarRef::Row(r),
                (_, Err(_)) => VarRef::Name(var.to_string()),
            };
            let priority = pri.parse().map_err(|_| bad())?;
            let assign = match val {
                "0" | "false" => false,
                "1" | "true" => true,
                _ => return Err(bad()),
            };
            entries.push(StrategyEntry { var, priority, assign });
        }
        Ok(StrategySpec { entries })
    }
}
