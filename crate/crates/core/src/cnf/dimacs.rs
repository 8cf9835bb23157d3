use super::{CnfError, CnfFormula, Lit};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DimacsError {
    #[error("line {line}: malformed header")]
    MalformedHeader { line: usize },
    #[error("no `p cnf` header")]
    MissingHeader,
    #[error("line {line}: bad token `{token}`")]
    BadToken { line: usize, token: String },
    #[error("line {line}: literal {lit} outside 1..={num_vars}")]
    LiteralOutOfRange { line: usize, lit: Lit, num_vars: usize },
    #[error("line {line}: clause lacks terminating 0")]
    MissingTerminator { line: usize },
    #[error("line {line}: empty clause")]
    EmptyClause { line: usize },
    #[error("declared {declared} clauses, found {found}")]
    ClauseCount { declared: usize, found: usize },
}

/// Parses DIMACS CNF. Clauses may span lines; a `%` line ends the input as
/// in the SATLIB uniform random files.
pub fn parse_dimacs(text: &str) -> Result<CnfFormula, DimacsError> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses: Vec<Vec<Lit>> = Vec::new();
    let mut current: Vec<Lit> = Vec::new();
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('c') {
            continue;
        }
        if trimmed.starts_with('%') {
            break;
        }
        if trimmed.starts_with('p') {
            let parts: Vec<&str> = trimmed.split_whitespace().collect();
            if header.is_some() || parts.len() != 4 || parts[0] != "p" || parts[1] != "cnf" {
                return Err(DimacsError::MalformedHeader { line });
            }
            let n = parts[2].parse().map_err(|_| DimacsError::MalformedHeader { line })?;
            let m = parts[3].parse().map_err(|_| DimacsError::MalformedHeader { line })?;
            header = Some((n, m));
            continue;
        }
        let (num_vars, _) = header.ok_or(DimacsError::MissingHeader)?;
        for token in trimmed.split_whitespace() {
            let lit: Lit = token
                .parse()
                .map_err(|_| DimacsError::BadToken { line, token: token.to_string() })?;
            if lit == 0 {
                if current.is_empty() {
                    return Err(DimacsError::EmptyClause { line });
                }
                clauses.push(std::mem::take(&mut current));
            } else {
                if lit.unsigned_abs() as usize > num_vars {
                    return Err(DimacsError::LiteralOutOfRange { line, lit, num_vars });
                }
                current.push(lit);
                last_line = line;
            }
        }
    }

    let (num_vars, declared) = header.ok_or(DimacsError::MissingHeader)?;
    if !current.is_empty() {
        return Err(DimacsError::MissingTerminator { line: last_line });
    }
    if clauses.len() != declared {
        return Err(DimacsError::ClauseCount { declared, found: clauses.len() });
    }
    CnfFormula::new(num_vars, clauses).map_err(|e| match e {
        CnfError::LiteralOutOfRange { lit, num_vars } => {
            DimacsError::LiteralOutOfRange { line: 0, lit, num_vars }
        }
        _ => DimacsError::EmptyClause { line: 0 },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_simple_files() {
        let f = parse_dimacs("p cnf 2 2\n1 -2 0\n2 0").unwrap();
        assert_eq!(f.num_vars(), 2);
        assert_eq!(f.clauses(), &[vec![1, -2], vec![2]]);
        let g = parse_dimacs("p cnf 1 1\n1 0").unwrap();
        assert_eq!(g.clauses(), &[vec![1]]);
    }

    #[test]
    fn distinct_errors_with_lines() {
        assert_eq!(
            parse_dimacs("p cnf 1 1\n2 0"),
            Err(DimacsError::LiteralOutOfRange { line: 2, lit: 2, num_vars: 1 })
        );
        assert_eq!(parse_dimacs("p cnf x 1\n1 0"), Err(DimacsError::MalformedHeader { line: 1 }));
        assert_eq!(parse_dimacs("c hi\np cnf 2 1\n1\n2"), Err(DimacsError::MissingTerminator { line: 4 }));
        assert_eq!(parse_dimacs("1 0"), Err(DimacsError::MissingHeader));
        assert_eq!(parse_dimacs("p cnf 2 2\n1 0"), Err(DimacsError::ClauseCount { declared: 2, found: 1 }));
        assert!(matches!(parse_dimacs("p cnf 2 1\n1 a 0"), Err(DimacsError::BadToken { line: 2, .. })));
    }

    #[test]
    fn satlib_trailer_and_multiline_clauses() {
        let text = "c uf\np cnf 3 2\n 1 -2\n 3 0\n-1 2 3 0\n%\n0\n\n";
        let f = parse_dimacs(text).unwrap();
        assert_eq!(f.clauses(), &[vec![1, -2, 3], vec![-1, 2, 3]]);
    }

    #[test]
    fn dimacs_round_trip() {
        let f = CnfFormula::new(4, vec![vec![1, -4], vec![2, 3, -1]]).unwrap();
        assert_eq!(parse_dimacs(&f.to_dimacs()).unwrap(), f);
    }
}
