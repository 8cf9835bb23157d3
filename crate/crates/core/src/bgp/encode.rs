use super::expr::{BitVec, BooleanModel, Expr};
use super::model::{Agreement, Match, RouterConfig, Topology};
use super::BgpError;

pub fn prefix_vec(router: &str, topo: &Topology) -> BitVec {
    BitVec::new(format!("{router}.best.prefix"), topo.prefix_bits)
}

pub fn lp_vec(router: &str, topo: &Topology) -> BitVec {
    BitVec::new(format!("{router}.best.lp"), topo.lp_bits)
}

pub fn community_var(router: &str, tag: super::Community) -> String {
    format!("{router}.best.comm.{tag}")
}

pub fn from_var(router: &str, neighbor: &str) -> String {
    format!("{router}.best.from.{neighbor}")
}

pub fn out_var(router: &str, neighbor: &str) -> String {
    format!("out.{router}.{neighbor}.valid")
}

/// The variables the provider exposes, in their canonical order: per
/// provider router its best-route prefix and local preference (most
/// significant bit first), community flags, learned-from flags, and one
/// export-valid flag per external neighbor.
pub fn exposed_variables(topo: &Topology) -> Vec<String> {
    let mut out = Vec::new();
    for r in topo.provider_routers() {
        out.extend(prefix_vec(&r.name, topo).bit_names());
        out.extend(lp_vec(&r.name, topo).bit_names());
        out.extend(topo.communities.iter().map(|&c| community_var(&r.name, c)));
        out.extend(topo.neighbors(&r.name).iter().map(|n| from_var(&r.name, &n.name)));
        out.extend(topo.external_neighbors(&r.name).iter().map(|n| out_var(&r.name, &n.name)));
    }
    out
}

fn learned_from_as(topo: &Topology, router: &str, asn: u32) -> Expr {
    Expr::or(topo.neighbors(router).iter().filter(|n| n.asn == asn).map(|n| Expr::var(from_var(router, &n.name))))
}

fn condition(topo: &Topology, router: &str, m: &Match) -> Result<Expr, BgpError> {
    Ok(match m {
        Match::Prefix(p) => prefix_vec(router, topo).prefix_match(topo.prefix_value(p), p.len as usize),
        Match::Community(c) => {
            if !topo.communities.contains(c) {
                return Err(BgpError::UnknownCommunity(c.to_string()));
            }
            Expr::var(community_var(router, *c))
        }
        Match::FromAs(asn) => {
            if !topo.has_as(*asn) {
                return Err(BgpError::UnknownAs(*asn));
            }
            learned_from_as(topo, router, *asn)
        }
    })
}

fn conditions(topo: &Topology, router: &str, ms: &[Match]) -> Result<Expr, BgpError> {
    Ok(Expr::and(ms.iter().map(|m| condition(topo, router, m)).collect::<Result<Vec<_>, _>>()?))
}

/// First-match chain: the value of the first rule whose condition holds.
fn first_match(rules: &[(Expr, Expr)], default: Expr) -> Expr {
    rules.iter().rev().fold(default, |rest, (c, v)| Expr::ite(c.clone(), v.clone(), rest))
}

/// The provider's configuration as constraints over the exposed variables.
pub fn encode_config(topo: &Topology, configs: &[RouterConfig]) -> Result<BooleanModel, BgpError> {
    topo.validate()?;
    let mut model = BooleanModel::new(exposed_variables(topo));
    for cfg in configs {
        let r = topo.router(&cfg.router).ok_or_else(|| BgpError::UnknownRouter(cfg.router.clone()))?;
        if r.asn != topo.provider_as {
            return Err(BgpError::NotProvider(cfg.router.clone()));
        }
    }
    for r in topo.provider_routers() {
        let default_cfg = RouterConfig::new(r.name.clone());
        let cfg = configs.iter().find(|c| c.router == r.name).unwrap_or(&default_cfg);

        let from: Vec<String> = topo.neighbors(&r.name).iter().map(|n| from_var(&r.name, &n.name)).collect();
        for (k, x) in from.iter().enumerate() {
            for y in &from[k + 1..] {
                model.assert(Expr::or([Expr::not(Expr::var(x)), Expr::not(Expr::var(y))]));
            }
        }

        for rule in &cfg.export {
            if let super::NeighborSel::Name(n) = &rule.to {
                if !topo.neighbors(&r.name).iter().any(|x| &x.name == n) {
                    return Err(BgpError::UnknownNeighbor { router: r.name.clone(), neighbor: n.clone() });
                }
            }
        }
        for n in topo.external_neighbors(&r.name) {
            let mut chain = Vec::new();
            for rule in cfg.export.iter().filter(|rule| rule.to.covers(n)) {
                chain.push((conditions(topo, &r.name, &rule.conditions)?, Expr::Const(rule.permit)));
            }
            let valid = first_match(&chain, Expr::Const(cfg.default_export));
            model.assert(Expr::iff(Expr::var(out_var(&r.name, &n.name)), valid));
        }

        let lp = lp_vec(&r.name, topo);
        let mut chain = Vec::new();
        for rule in &cfg.local_pref {
            if rule.value >> topo.lp_bits != 0 {
                return Err(BgpError::Parse { line: 0, msg: format!("local preference {} too wide", rule.value) });
            }
            chain.push((conditions(topo, &r.name, &rule.conditions)?, rule.value));
        }
        for k in 0..lp.width {
            let bit_rules: Vec<(Expr, Expr)> =
                chain.iter().map(|(c, v)| (c.clone(), Expr::Const((v >> k) & 1 == 1))).collect();
            let value = first_match(&bit_rules, Expr::Const((cfg.default_local_pref >> k) & 1 == 1));
            model.assert(Expr::iff(lp.bit(k), value));
        }
    }
    Ok(model)
}

/// The negation of an agreement: satisfiable together with a configuration
/// exactly when the configuration violates it.
pub fn encode_agreement(topo: &Topology, a: &Agreement) -> Result<BooleanModel, BgpError> {
    topo.validate()?;
    let mut model = BooleanModel::new(exposed_variables(topo));
    let check_as = |asn: u32| if topo.has_as(asn) { Ok(()) } else { Err(BgpError::UnknownAs(asn)) };
    let mut violations = Vec::new();
    for r in topo.provider_routers() {
        let name = &r.name;
        match a {
            Agreement::SelectiveExport { prefix, avoid_as } => {
                check_as(*avoid_as)?;
                let matches = prefix_vec(name, topo).prefix_match(topo.prefix_value(prefix), prefix.len as usize);
                for n in topo.external_neighbors(name).into_iter().filter(|n| n.asn == *avoid_as) {
                    violations.push(Expr::and([matches.clone(), Expr::var(out_var(name, &n.name))]));
                }
            }
            Agreement::SetLocalPref { prefix, value, from_as } => {
                let matches = prefix_vec(name, topo).prefix_match(topo.prefix_value(prefix), prefix.len as usize);
                let from = match from_as {
                    Some(asn) => {
                        check_as(*asn)?;
                        learned_from_as(topo, name, *asn)
                    }
                    None => Expr::Const(true),
                };
                violations.push(Expr::and([matches, from, Expr::not(lp_vec(name, topo).eq_const(*value))]));
            }
            Agreement::PreferAvoidAs { asn, prefer, threshold } => {
                check_as(*asn)?;
                let lp = lp_vec(name, topo);
                let ok = if *prefer { lp.gt_const(*threshold) } else { lp.lt_const(*threshold) };
                violations.push(Expr::and([learned_from_as(topo, name, *asn), Expr::not(ok)]));
            }
        }
    }
    model.assert(Expr::or(violations));
    Ok(model)
}
