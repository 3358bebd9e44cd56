//! Independent checks of a digraph + permutation (+ coloring, + claimed
//! `q`) artifact. Only the parsed arc list is used; acyclicity, colors and
//! against-degrees are recomputed here.

use std::collections::{HashSet, VecDeque};
use std::fmt::Write as _;

use acychrom::digraph::read_digraph;
use acychrom::{Digraph, Result};

use crate::artifacts::{parse_coloring, parse_line};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let _ = writeln!(out, "{} {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
        }
        let _ = writeln!(out, "{}", if self.pass() { "PASS" } else { "FAIL" });
        out
    }
}

fn check(name: &'static str, pass: bool, detail: impl Into<String>) -> Check {
    Check {
        name,
        pass,
        detail: detail.into(),
    }
}

fn orientation_check(g: &Digraph) -> Check {
    let mut seen = HashSet::new();
    for &(u, v) in g.edges() {
        if u == v || u >= g.n() || v >= g.n() {
            return check("orientation", false, format!("bad arc ({u}, {v})"));
        }
        if !seen.insert((u.min(v), u.max(v))) {
            return check("orientation", false, format!("pair {{{u}, {v}}} appears twice"));
        }
    }
    check("orientation", true, format!("{} vertices, {} arcs", g.n(), g.m()))
}

/// Checks `G_π` for the ranks `ranks`.
pub fn verify_artifacts(g: &Digraph, ranks: &[usize], coloring: Option<&[usize]>, q: Option<usize>) -> VerifyReport {
    let n = g.n();
    let mut checks = vec![orientation_check(g)];

    let mut seen = vec![false; n];
    let is_perm = ranks.len() == n && ranks.iter().all(|&r| r < n && !std::mem::replace(&mut seen[r], true));
    checks.push(check(
        "permutation",
        is_perm,
        if is_perm {
            format!("ranks of {n} vertices")
        } else {
            "ranks are not a permutation of 0..n".into()
        },
    ));
    if !is_perm {
        return VerifyReport { checks };
    }

    let forward: Vec<(usize, usize)> = g.edges().iter().copied().filter(|&(u, v)| ranks[u] < ranks[v]).collect();
    let mut indeg = vec![0usize; n];
    let mut out = vec![Vec::new(); n];
    for &(u, v) in &forward {
        indeg[v] += 1;
        out[u].push(v);
    }
    let mut queue: VecDeque<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
    let mut removed = 0;
    while let Some(u) = queue.pop_front() {
        removed += 1;
        for &v in &out[u] {
            indeg[v] -= 1;
            if indeg[v] == 0 {
                queue.push_back(v);
            }
        }
    }
    checks.push(check(
        "acyclic",
        removed == n,
        format!("G_pi has {} arcs, {} of {n} vertices sorted", forward.len(), removed),
    ));

    if let Some(color) = coloring {
        let c = if color.len() != n {
            check("coloring", false, format!("{} colors for {n} vertices", color.len()))
        } else if let Some(&(u, v)) = forward.iter().find(|&&(u, v)| color[u] == color[v]) {
            check("coloring", false, format!("arc ({u}, {v}) has both ends colored {}", color[u]))
        } else {
            let used: HashSet<usize> = color.iter().copied().collect();
            check("coloring", true, format!("proper with {} colors", used.len()))
        };
        checks.push(c);
    }

    if let Some(q) = q {
        let mut deg = vec![0usize; n];
        for &(u, v) in g.edges() {
            if ranks[u] > ranks[v] {
                deg[u] += 1;
                deg[v] += 1;
            }
        }
        let c = match (0..n).find(|&v| deg[v] > q) {
            Some(v) => check("against-degree", false, format!("vertex {v} has {} arcs against the order, claimed q = {q}", deg[v])),
            None => check("against-degree", true, format!("max {} <= q = {q}", deg.iter().max().copied().unwrap_or(0))),
        };
        checks.push(c);
    }
    VerifyReport { checks }
}

/// Parses the three files and checks them. Parse errors carry line numbers.
pub fn verify_texts(graph: &str, perm: &str, coloring: Option<&str>, q: Option<usize>) -> Result<VerifyReport> {
    let g = read_digraph(graph)?;
    let ranks = parse_line(perm, g.n())?;
    let color = coloring.map(|c| parse_coloring(c, g.n())).transpose()?;
    Ok(verify_artifacts(&g, &ranks, color.as_deref(), q))
}
