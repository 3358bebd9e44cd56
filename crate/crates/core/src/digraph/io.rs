//! Plain-text digraph format: a header line `n m`, then `m` lines `u v`
//! (0-based). Blank lines are ignored. The writer emits arcs sorted.

use std::collections::HashSet;
use std::fmt::Write as _;

use super::Digraph;
use crate::error::{Error, Result};

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn two_numbers(line_no: usize, line: &str) -> Result<(usize, usize)> {
    let mut it = line.split_whitespace();
    let mut next = |what: &str| -> Result<usize> {
        let tok = it.next().ok_or_else(|| parse_err(line_no, format!("missing {what}")))?;
        tok.parse()
            .map_err(|_| parse_err(line_no, format!("invalid {what} {tok:?}")))
    };
    let a = next("first field")?;
    let b = next("second field")?;
    if it.next().is_some() {
        return Err(parse_err(line_no, "trailing fields"));
    }
    Ok((a, b))
}

pub fn read_digraph(text: &str) -> Result<Digraph> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let (hline, header) = lines.next().ok_or_else(|| parse_err(1, "missing header"))?;
    let (n, m) = two_numbers(hline, header)?;
    let mut edges = Vec::with_capacity(m.min(1 << 16));
    let mut seen = HashSet::with_capacity(m.min(1 << 16));
    let mut last_line = hline;
    for (no, line) in lines {
        last_line = no;
        if edges.len() == m {
            return Err(parse_err(no, format!("more than {m} edge lines")));
        }
        let (u, v) = two_numbers(no, line)?;
        let problem = if u >= n || v >= n {
            Some(Error::VertexOutOfRange { vertex: u.max(v), n })
        } else if u == v {
            Some(Error::SelfLoop(u))
        } else if seen.contains(&(u, v)) {
            Some(Error::DuplicateEdge(u, v))
        } else if seen.contains(&(v, u)) {
            Some(Error::AntiParallel(u, v))
        } else {
            None
        };
        if let Some(e) = problem {
            return Err(parse_err(no, e.to_string()));
        }
        seen.insert((u, v));
        edges.push((u, v));
    }
    if edges.len() != m {
        return Err(parse_err(
            last_line,
            format!("expected {m} edge lines, found {}", edges.len()),
        ));
    }
    Digraph::new(n, edges).map_err(|e| parse_err(last_line, e.to_string()))
}

pub fn write_digraph(g: &Digraph) -> String {
    let mut out = String::new();
    writeln!(out, "{} {}", g.n(), g.m()).unwrap();
    for &(u, v) in g.edges() {
        writeln!(out, "{u} {v}").unwrap();
    }
    out
}
