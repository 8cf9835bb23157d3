use std::fmt;
use std::str::FromStr;

/// One publicly visible step of the search. Indices are 1-based positions in
/// the shuffled variable order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SearchEvent {
    UnitPropagate(usize),
    Branch(usize),
    /// Trail depth after re-pushing the flipped branch.
    Backtrack(usize),
    Contradiction,
    Success,
}

impl fmt::Display for SearchEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SearchEvent::UnitPropagate(i) => write!(f, "unit {i}"),
            SearchEvent::Branch(i) => write!(f, "branch {i}"),
            SearchEvent::Backtrack(d) => write!(f, "backtrack {d}"),
            SearchEvent::Contradiction => f.write_str("contradiction"),
            SearchEvent::Success => f.write_str("success"),
        }
    }
}

impl FromStr for SearchEvent {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut parts = s.split_whitespace();
        let head = parts.next().ok_or("empty line")?;
        let arg = |p: Option<&str>| -> Result<usize, String> {
            p.ok_or(format!("`{head}` needs an argument"))?.parse().map_err(|e| format!("{e}"))
        };
        let ev = match head {
            "unit" => SearchEvent::UnitPropagate(arg(parts.next())?),
            "branch" => SearchEvent::Branch(arg(parts.next())?),
            "backtrack" => SearchEvent::Backtrack(arg(parts.next())?),
            "contradiction" => SearchEvent::Contradiction,
            "success" => SearchEvent::Success,
            other => return Err(format!("unknown event `{other}`")),
        };
        if parts.next().is_some() {
            return Err(format!("trailing tokens in `{s}`"));
        }
        Ok(ev)
    }
}

/// One event per line.
pub fn trace_text(events: &[SearchEvent]) -> String {
    let mut out = String::new();
    for e in events {
        out.push_str(&e.to_string());
        out.push('\n');
    }
    out
}

pub fn parse_trace(text: &str) -> Result<Vec<SearchEvent>, String> {
    text.lines().filter(|l| !l.trim().is_empty()).map(str::parse).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trace_round_trip() {
        let evs = vec![
            SearchEvent::Branch(3),
            SearchEvent::UnitPropagate(1),
            SearchEvent::Contradiction,
            SearchEvent::Backtrack(1),
            SearchEvent::Success,
        ];
        let text = trace_text(&evs);
        assert_eq!(text, "branch 3\nunit 1\ncontradiction\nbacktrack 1\nsuccess\n");
        assert_eq!(parse_trace(&text).unwrap(), evs);
        assert!(parse_trace("jump 2").is_err());
    }
}
