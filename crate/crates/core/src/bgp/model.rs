use std::fmt;
use std::net::Ipv4Addr;
use std::str::FromStr;

use super::BgpError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Router {
    pub name: String,
    pub asn: u32,
    pub ip: u32,
}

/// Routers, links and the provider's AS; what the provider exposes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Topology {
    pub routers: Vec<Router>,
    pub links: Vec<(String, String)>,
    pub provider_as: u32,
    pub communities: Vec<Community>,
    pub prefix_bits: usize,
    pub lp_bits: usize,
}

impl Default for Topology {
    fn default() -> Self {
        Topology { routers: Vec::new(), links: Vec::new(), provider_as: 0, communities: Vec::new(), prefix_bits: 32, lp_bits: 8 }
    }
}

impl Topology {
    pub fn router(&self, name: &str) -> Option<&Router> {
        self.routers.iter().find(|r| r.name == name)
    }

    pub fn provider_routers(&self) -> impl Iterator<Item = &Router> {
        self.routers.iter().filter(move |r| r.asn == self.provider_as)
    }

    /// Routers linked to `name`, in declaration order.
    pub fn neighbors(&self, name: &str) -> Vec<&Router> {
        self.routers
            .iter()
            .filter(|r| {
                self.links.iter().any(|(x, y)| (x == name && y == &r.name) || (y == name && x == &r.name))
            })
            .collect()
    }

    /// Neighbors in a different AS; only those receive exports.
    pub fn external_neighbors(&self, name: &str) -> Vec<&Router> {
        self.neighbors(name).into_iter().filter(|r| r.asn != self.provider_as).collect()
    }

    pub fn validate(&self) -> Result<(), BgpError> {
        for (x, y) in &self.links {
            for end in [x, y] {
                if self.router(end).is_none() {
                    return Err(BgpError::UnknownRouter(end.clone()));
                }
            }
        }
        for (k, r) in self.routers.iter().enumerate() {
            if self.routers[..k].iter().any(|o| o.name == r.name) {
                return Err(BgpError::Parse { line: 0, msg: format!("router {} declared twice", r.name) });
            }
        }
        if self.provider_routers().next().is_none() {
            return Err(BgpError::Parse { line: 0, msg: "no router in the provider AS".into() });
        }
        if !(1..=32).contains(&self.prefix_bits) || !(1..=16).contains(&self.lp_bits) {
            return Err(BgpError::Parse { line: 0, msg: "unsupported bit width".into() });
        }
        Ok(())
    }

    pub fn has_as(&self, asn: u32) -> bool {
        self.routers.iter().any(|r| r.asn == asn)
    }

    /// The top `prefix_bits` bits of a 32-bit address.
    pub fn prefix_value(&self, p: &Prefix) -> u64 {
        (p.addr >> (32 - self.prefix_bits)) as u64
    }
}

/// A community tag written `high:low`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Community(pub u32);

impl FromStr for Community {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (hi, lo) = s.split_once(':').ok_or_else(|| format!("community `{s}` is not high:low"))?;
        let hi: u16 = hi.parse().map_err(|_| format!("bad community `{s}`"))?;
        let lo: u16 = lo.parse().map_err(|_| format!("bad community `{s}`"))?;
        Ok(Community(((hi as u32) << 16) | lo as u32))
    }
}

impl fmt::Display for Community {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.0 >> 16, self.0 & 0xffff)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Prefix {
    pub addr: u32,
    pub len: u8,
}

impl FromStr for Prefix {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (addr, len) = s.split_once('/').ok_or_else(|| format!("prefix `{s}` lacks a length"))?;
        let addr: Ipv4Addr = addr.parse().map_err(|_| format!("bad address in `{s}`"))?;
        let len: u8 = len.parse().map_err(|_| format!("bad length in `{s}`"))?;
        if len > 32 {
            return Err(format!("prefix length {len} exceeds 32"));
        }
        Ok(Prefix { addr: u32::from(addr), len })
    }
}

impl fmt::Display for Prefix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", Ipv4Addr::from(self.addr), self.len)
    }
}

/// Conditions a rule tests on the router's best route; all must hold.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Match {
    Prefix(Prefix),
    Community(Community),
    /// Learned from a neighbor in this AS.
    FromAs(u32),
}

/// Which neighbors an export rule covers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NeighborSel {
    All,
    Name(String),
    Ip(u32),
    As(u32),
}

impl NeighborSel {
    pub fn covers(&self, r: &Router) -> bool {
        match self {
            NeighborSel::All => true,
            NeighborSel::Name(n) => &r.name == n,
            NeighborSel::Ip(ip) => r.ip == *ip,
            NeighborSel::As(asn) => r.asn == *asn,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExportRule {
    pub to: NeighborSel,
    pub permit: bool,
    pub conditions: Vec<Match>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalPrefRule {
    pub value: u64,
    pub conditions: Vec<Match>,
}

/// Export and local-preference policy of one provider router. Rules are
/// tried in order and the first whose conditions hold decides.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RouterConfig {
    pub router: String,
    pub export: Vec<ExportRule>,
    pub default_export: bool,
    pub local_pref: Vec<LocalPrefRule>,
    pub default_local_pref: u64,
}

impl RouterConfig {
    pub fn new(router: impl Into<String>) -> Self {
        RouterConfig { router: router.into(), export: Vec::new(), default_export: true, local_pref: Vec::new(), default_local_pref: 100 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Agreement {
    /// Routes for `prefix` are never exported to neighbors in `avoid_as`.
    SelectiveExport { prefix: Prefix, avoid_as: u32 },
    /// Routes for `prefix` (learned from `from_as` if given) get local
    /// preference `value`.
    SetLocalPref { prefix: Prefix, value: u64, from_as: Option<u32> },
    /// Routes learned from `asn` get a local preference above (prefer) or
    /// below (avoid) `threshold`.
    PreferAvoidAs { asn: u32, prefer: bool, threshold: u64 },
}

impl fmt::Display for Agreement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Agreement::SelectiveExport { prefix, avoid_as } => write!(f, "selective-export {prefix} avoid-as {avoid_as}"),
            Agreement::SetLocalPref { prefix, value, from_as: Some(a) } => {
                write!(f, "set-local-pref {prefix} {value} from-as {a}")
            }
            Agreement::SetLocalPref { prefix, value, from_as: None } => write!(f, "set-local-pref {prefix} {value}"),
            Agreement::PreferAvoidAs { asn, prefer: true, threshold } => write!(f, "prefer-as {asn} above {threshold}"),
            Agreement::PreferAvoidAs { asn, prefer: false, threshold } => write!(f, "avoid-as {asn} below {threshold}"),
        }
    }
}
