//! Line-oriented scenario files. One declaration per line, `#` comments.
//!
//! ```text
//! router <name> as <asn> ip <a.b.c.d>
//! link <router> <router>
//! provider-as <asn>
//! community <high:low>
//! prefix-bits <1..32>
//!
//! config <router>
//!   export <neighbor> permit|deny [<match>...]
//!   export-default permit|deny
//!   local-pref <value> [<match>...]
//!   local-pref-default <value>
//!
//! agreement selective-export <prefix> avoid-as <asn>
//! agreement set-local-pref <prefix> <value> [from-as <asn>]
//! agreement avoid-as <asn> below <value>
//! agreement prefer-as <asn> above <value>
//! ```
//!
//! `<neighbor>` is a router name, `*`, `ip <addr>` or `as <asn>`; `<match>`
//! is `prefix <p/len>`, `community <tag>` or `from-as <asn>`. Lines after
//! `config` up to the next `config` or a non-config declaration belong to
//! that router.

use std::net::Ipv4Addr;
use std::path::Path;

use super::model::*;
use super::BgpError;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Scenario {
    pub topology: Topology,
    pub configs: Vec<RouterConfig>,
    pub agreements: Vec<Agreement>,
}

struct Tokens<'a> {
    line: usize,
    words: std::iter::Peekable<std::str::SplitWhitespace<'a>>,
}

impl<'a> Tokens<'a> {
    fn err(&self, msg: impl Into<String>) -> BgpError {
        BgpError::Parse { line: self.line, msg: msg.into() }
    }

    fn next(&mut self, what: &str) -> Result<&'a str, BgpError> {
        self.words.next().ok_or_else(|| self.err(format!("expected {what}")))
    }

    fn keyword(&mut self, kw: &str) -> Result<(), BgpError> {
        match self.words.next() {
            Some(w) if w == kw => Ok(()),
            Some(w) => Err(self.err(format!("expected `{kw}`, found `{w}`"))),
            None => Err(self.err(format!("expected `{kw}`"))),
        }
    }

    fn parse<T: std::str::FromStr>(&mut self, what: &str) -> Result<T, BgpError> {
        let w = self.next(what)?;
        w.parse().map_err(|_| self.err(format!("bad {what} `{w}`")))
    }

    fn parse_with<T>(&mut self, what: &str, f: impl FnOnce(&str) -> Result<T, String>) -> Result<T, BgpError> {
        let w = self.next(what)?;
        f(w).map_err(|m| self.err(m))
    }

    fn ip(&mut self) -> Result<u32, BgpError> {
        let ip: Ipv4Addr = self.parse("address")?;
        Ok(u32::from(ip))
    }

    fn permit(&mut self) -> Result<bool, BgpError> {
        match self.next("permit or deny")? {
            "permit" => Ok(true),
            "deny" => Ok(false),
            w => Err(self.err(format!("expected permit or deny, found `{w}`"))),
        }
    }

    fn matches(&mut self) -> Result<Vec<Match>, BgpError> {
        let mut out = Vec::new();
        while let Some(w) = self.words.next() {
            out.push(match w {
                "prefix" => Match::Prefix(self.parse_with("prefix", str::parse)?),
                "community" => Match::Community(self.parse_with("community", str::parse)?),
                "from-as" => Match::FromAs(self.parse("AS number")?),
                w => return Err(self.err(format!("unknown match `{w}`"))),
            });
        }
        Ok(out)
    }

    fn end(&mut self) -> Result<(), BgpError> {
        match self.words.next() {
            None => Ok(()),
            Some(w) => Err(self.err(format!("unexpected `{w}`"))),
        }
    }
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Scenario, BgpError> {
        let mut s = Scenario::default();
        s.extend(text)?;
        Ok(s)
    }

    /// Reads and concatenates several files, so a topology can be shared
    /// between a configuration file and an agreement file.
    pub fn from_files<P: AsRef<Path>>(paths: &[P]) -> Result<Scenario, BgpError> {
        let mut s = Scenario::default();
        for p in paths {
            let text = std::fs::read_to_string(p.as_ref())
                .map_err(|e| BgpError::Io(format!("{}: {e}", p.as_ref().display())))?;
            s.extend(&text)?;
        }
        s.topology.validate()?;
        Ok(s)
    }

    pub fn extend(&mut self, text: &str) -> Result<(), BgpError> {
        let mut current: Option<usize> = None;
        for (k, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("");
            let mut t = Tokens { line: k + 1, words: line.split_whitespace().peekable() };
            let Some(head) = t.words.next() else { continue };
            let in_config = matches!(head, "export" | "export-default" | "local-pref" | "local-pref-default");
            if !in_config {
                current = None;
            }
            match head {
                "router" => {
                    let name = t.next("router name")?.to_string();
                    t.keyword("as")?;
                    let asn = t.parse("AS number")?;
                    t.keyword("ip")?;
                    let ip = t.ip()?;
                    t.end()?;
                    self.topology.routers.push(Router { name, asn, ip });
                }
                "link" => {
                    let a = t.next("router")?.to_string();
                    let b = t.next("router")?.to_string();
                    t.end()?;
                    self.topology.links.push((a, b));
                }
                "provider-as" => {
                    self.topology.provider_as = t.parse("AS number")?;
                    t.end()?;
                }
                "community" => {
                    let c: Community = t.parse_with("community", str::parse)?;
                    t.end()?;
                    if !self.topology.communities.contains(&c) {
                        self.topology.communities.push(c);
                    }
                }
                "prefix-bits" => {
                    self.topology.prefix_bits = t.parse("width")?;
                    t.end()?;
                }
                "config" => {
                    let name = t.next("router name")?.to_string();
                    t.end()?;
                    let idx = match self.configs.iter().position(|c| c.router == name) {
                        Some(i) => i,
                        None => {
                            self.configs.push(RouterConfig::new(name));
                            self.configs.len() - 1
                        }
                    };
                    current = Some(idx);
                }
                "agreement" => {
                    let a = parse_agreement(&mut t)?;
                    self.agreements.push(a);
                }
                _ if in_config => {
                    let idx = current.ok_or_else(|| t.err(format!("`{head}` outside a config block")))?;
                    let cfg = &mut self.configs[idx];
                    match head {
                        "export" => {
                            let to = match t.next("neighbor")? {
                                "*" => NeighborSel::All,
                                "ip" => NeighborSel::Ip(t.ip()?),
                                "as" => NeighborSel::As(t.parse("AS number")?),
                                name => NeighborSel::Name(name.to_string()),
                            };
                            let permit = t.permit()?;
                            let conditions = t.matches()?;
                            cfg.export.push(ExportRule { to, permit, conditions });
                        }
                        "export-default" => {
                            cfg.default_export = t.permit()?;
                            t.end()?;
                        }
                        "local-pref" => {
                            let value = t.parse("local preference")?;
                            let conditions = t.matches()?;
                            cfg.local_pref.push(LocalPrefRule { value, conditions });
                        }
                        _ => {
                            cfg.default_local_pref = t.parse("local preference")?;
                            t.end()?;
                        }
                    }
                    current = Some(idx);
                }
                other => return Err(t.err(format!("unknown declaration `{other}`"))),
            }
        }
        Ok(())
    }
}

fn parse_agreement(t: &mut Tokens<'_>) -> Result<Agreement, BgpError> {
    let a = match t.next("agreement kind")? {
        "selective-export" => {
            let prefix = t.parse_with("prefix", str::parse)?;
            t.keyword("avoid-as")?;
            Agreement::SelectiveExport { prefix, avoid_as: t.parse("AS number")? }
        }
        "set-local-pref" => {
            let prefix = t.parse_with("prefix", str::parse)?;
            let value = t.parse("local preference")?;
            let from_as = match t.words.next() {
                None => None,
                Some("from-as") => Some(t.parse("AS number")?),
                Some(w) => return Err(t.err(format!("unexpected `{w}`"))),
            };
            Agreement::SetLocalPref { prefix, value, from_as }
        }
        kind @ ("avoid-as" | "prefer-as") => {
            let asn = t.parse("AS number")?;
            let prefer = kind == "prefer-as";
            t.keyword(if prefer { "above" } else { "below" })?;
            Agreement::PreferAvoidAs { asn, prefer, threshold: t.parse("local preference")? }
        }
        w => return Err(t.err(format!("unknown agreement `{w}`"))),
    };
    t.end()?;
    Ok(a)
}
