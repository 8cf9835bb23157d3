//! An abstract BGP model: provider router configurations and consumer
//! agreements compiled to CNF over a shared, exposed variable list.

mod encode;
mod expr;
mod model;
mod scenario;
mod tseytin;

pub use encode::{community_var, encode_agreement, encode_config, exposed_variables, from_var, lp_vec, out_var, prefix_vec};
pub use expr::{BitVec, BooleanModel, Expr};
pub use model::{Agreement, Community, ExportRule, LocalPrefRule, Match, NeighborSel, Prefix, Router, RouterConfig, Topology};
pub use scenario::Scenario;
pub use tseytin::{tseytin, TseytinOutput};

use crate::cnf::CnfError;
use crate::protocol::{PartyInput, StrategyEntry, StrategySpec, VarRef};
use crate::transport::Role;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BgpError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("{0}")]
    Io(String),
    #[error("unknown router {0}")]
    UnknownRouter(String),
    #[error("{router} has no neighbor {neighbor}")]
    UnknownNeighbor { router: String, neighbor: String },
    #[error("router {0} is not in the provider AS")]
    NotProvider(String),
    #[error("unknown AS {0}")]
    UnknownAs(u32),
    #[error("community {0} is not declared")]
    UnknownCommunity(String),
    #[error("variable {0} is not declared")]
    Undeclared(String),
    #[error(transparent)]
    Cnf(CnfError),
}

fn compile(model: &BooleanModel, topo: &Topology) -> Result<PartyInput, BgpError> {
    let common = exposed_variables(topo);
    let out = tseytin(model, &common)?;
    Ok(PartyInput { formula: out.formula, common, n_aux: out.n_aux })
}

/// The provider's configuration formula.
pub fn config_input(topo: &Topology, configs: &[RouterConfig]) -> Result<PartyInput, BgpError> {
    compile(&encode_config(topo, configs)?, topo)
}

/// The consumer's formula for one agreement, already negated.
pub fn agreement_input(topo: &Topology, agreement: &Agreement) -> Result<PartyInput, BgpError> {
    compile(&encode_agreement(topo, agreement)?, topo)
}

/// A branching order for BGP sessions: gate outputs of both parties first,
/// then route origin, export validity, local preference, communities and
/// finally prefix bits. Priorities are distinct, so the order does not
/// depend on the shuffle.
pub fn provider_strategy(topo: &Topology) -> StrategySpec {
    const STRIDE: u64 = 1 << 12;
    let tier = |name: &str| {
        if name.contains(".best.from.") {
            5
        } else if name.starts_with("out.") {
            4
        } else if name.contains(".best.lp.") {
            3
        } else if name.contains(".best.comm.") {
            2
        } else {
            1
        }
    };
    let mut entries = vec![
        StrategyEntry { var: VarRef::Aux(Role::Consumer), priority: 7 * STRIDE - 1, assign: true },
        StrategyEntry { var: VarRef::Aux(Role::Provider), priority: 6 * STRIDE + STRIDE / 2 - 1, assign: true },
    ];
    entries.extend(exposed_variables(topo).into_iter().enumerate().map(|(k, name)| StrategyEntry {
        priority: tier(&name) * STRIDE + (STRIDE - 1 - k as u64),
        var: VarRef::Name(name),
        assign: true,
    }));
    StrategySpec { entries }
}
