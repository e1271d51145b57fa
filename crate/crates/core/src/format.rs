//! Reading and writing the `.dnf` and `.sets` text formats.
//!
//! Both formats are line based: optional `c` comment lines, one
//! `p <kind> <n> <m>` header, then `m` lines of nonzero integers each
//! terminated by `0`.

use std::io::{self, Write};

use thiserror::Error;

use crate::dnf::{Dnf, FormulaError, Term};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: variable {var} out of range 1..={n}")]
    OutOfRange { line: usize, var: u64, n: usize },
    #[error("line {line}: term contains both x{var} and its negation")]
    Contradictory { line: usize, var: usize },
}

fn syntax(line: usize, msg: impl Into<String>) -> ParseError {
    ParseError::Syntax { line, msg: msg.into() }
}

struct Body {
    n: usize,
    rows: Vec<(usize, Vec<i64>)>,
}

fn parse_body(text: &str, kind: &str) -> Result<Body, ParseError> {
    let mut header: Option<(usize, usize)> = None;
    let mut rows = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let s = raw.trim();
        if s.is_empty() || s == "c" || s.starts_with("c ") || s.starts_with("c\t") {
            continue;
        }
        if s.starts_with('p') {
            if header.is_some() {
                return Err(syntax(line, "duplicate header"));
            }
            let parts: Vec<&str> = s.split_whitespace().collect();
            if parts.len() != 4 || parts[0] != "p" || parts[1] != kind {
                return Err(syntax(line, format!("expected `p {kind} <n> <m>`")));
            }
            let n: usize = parts[2].parse().map_err(|_| syntax(line, "bad variable count"))?;
            let m: usize = parts[3].parse().map_err(|_| syntax(line, "bad term count"))?;
            if n == 0 {
                return Err(syntax(line, "variable count must be positive"));
            }
            header = Some((n, m));
            continue;
        }
        let Some((n, _)) = header else {
            return Err(syntax(line, "data before header"));
        };
        let mut nums = Vec::new();
        let mut closed = false;
        for tok in s.split_whitespace() {
            if closed {
                return Err(syntax(line, "tokens after terminating 0"));
            }
            let x: i64 = tok.parse().map_err(|_| syntax(line, format!("not an integer: {tok}")))?;
            if x == 0 {
                closed = true;
            } else {
                if x.unsigned_abs() as usize > n {
                    return Err(ParseError::OutOfRange { line, var: x.unsigned_abs(), n });
                }
                nums.push(x);
            }
        }
        if !closed {
            return Err(syntax(line, "line not terminated by 0"));
        }
        rows.push((line, nums));
    }
    let Some((n, m)) = header else {
        return Err(syntax(text.lines().count().max(1), "missing header"));
    };
    if rows.len() != m {
        return Err(syntax(
            text.lines().count().max(1),
            format!("header announces {m} lines, found {}", rows.len()),
        ));
    }
    Ok(Body { n, rows })
}

/// Parses a `.dnf` file. Duplicate terms are dropped.
pub fn parse_dnf(text: &str) -> Result<Dnf, ParseError> {
    let body = parse_body(text, "dnf")?;
    let mut terms = Vec::with_capacity(body.rows.len());
    for (line, nums) in &body.rows {
        let t = Term::from_dimacs(nums)
            .map_err(|var| ParseError::Contradictory { line: *line, var })?;
        terms.push(t);
    }
    Dnf::new(body.n, terms).map_err(|e| match e {
        // Range was already checked per line.
        FormulaError::VarOutOfRange { .. } | FormulaError::NoVariables | FormulaError::Contradictory(_) => {
            syntax(0, e.to_string())
        }
    })
}

/// Parses a `.sets` file into `(n, sets)`; elements are `1..=n`.
pub fn parse_sets(text: &str) -> Result<(usize, Vec<Vec<usize>>), ParseError> {
    let body = parse_body(text, "sets")?;
    let mut sets = Vec::with_capacity(body.rows.len());
    for (line, nums) in body.rows {
        if nums.iter().any(|&x| x < 0) {
            return Err(syntax(line, "set elements must be positive"));
        }
        let mut s: Vec<usize> = nums.iter().map(|&x| x as usize).collect();
        s.sort_unstable();
        s.dedup();
        sets.push(s);
    }
    Ok((body.n, sets))
}

pub fn write_sets(out: &mut impl Write, n: usize, sets: &[Vec<usize>]) -> io::Result<()> {
    writeln!(out, "p sets {} {}", n, sets.len())?;
    for s in sets {
        for e in s {
            write!(out, "{e} ")?;
        }
        writeln!(out, "0")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_example() {
        let d = parse_dnf("c example\np dnf 3 2\n1 2 0\n-3 0\n").unwrap();
        assert_eq!(d, Dnf::from_dimacs(3, &[&[1, 2], &[-3]]).unwrap());
        assert_eq!(d.num_terms(), 2);
        assert_eq!(d.size(), 3);
    }

    #[test]
    fn dedups_terms() {
        let d = parse_dnf("p dnf 3 3\n1 2 0\n1 2 0\n-3 0\n").unwrap();
        assert_eq!(d.num_terms(), 2);
    }

    #[test]
    fn rejects_contradiction() {
        assert_eq!(
            parse_dnf("p dnf 2 1\n1 -1 0\n"),
            Err(ParseError::Contradictory { line: 2, var: 1 })
        );
    }

    #[test]
    fn reports_line_numbers() {
        assert!(matches!(parse_dnf("p dnf 2 1\n1 x 0\n"), Err(ParseError::Syntax { line: 2, .. })));
        assert!(matches!(
            parse_dnf("p dnf 2 1\n1 3 0\n"),
            Err(ParseError::OutOfRange { line: 2, var: 3, n: 2 })
        ));
        assert!(matches!(parse_dnf("1 2 0\n"), Err(ParseError::Syntax { line: 1, .. })));
        assert!(matches!(parse_dnf("p dnf 2 2\n1 0\n"), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse_dnf("p dnf 2 1\n1 2\n"), Err(ParseError::Syntax { line: 2, .. })));
    }

    #[test]
    fn empty_term_line_is_tautology() {
        let d = parse_dnf("p dnf 2 1\n0\n").unwrap();
        assert!(d.has_empty_term());
    }

    #[test]
    fn sets_format() {
        let (n, sets) = parse_sets("p sets 3 2\n3 1 0\n0\n").unwrap();
        assert_eq!(n, 3);
        assert_eq!(sets, vec![vec![1, 3], vec![]]);
        let mut buf = Vec::new();
        write_sets(&mut buf, n, &sets).unwrap();
        assert_eq!(parse_sets(std::str::from_utf8(&buf).unwrap()).unwrap(), (n, sets));
        assert!(parse_sets("p sets 3 1\n-1 0\n").is_err());
    }
}
