//! The red/blue split of a complete multipartite graph in which both colors
//! need exactly `√(n/s)` colors while `α*` of the whole graph is below `s`.

use std::fmt;

use acychrom::digraph::multipartite_bucket_graph;
use acychrom::oracles::{bipartite_independence_number_exact, chromatic_number_exact};
use acychrom::{OracleLimits, Result, UndirectedGraph};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DemoReport {
    pub n: usize,
    pub s: usize,
    pub parts: usize,
    pub buckets: usize,
    pub chi_red: usize,
    pub chi_blue: usize,
    /// `α*` of the complete multipartite graph (red ∪ blue).
    pub alpha_star: usize,
}

impl DemoReport {
    /// `√(n/s)`.
    pub fn expected(&self) -> usize {
        self.buckets
    }

    pub fn holds(&self) -> bool {
        self.chi_red == self.expected() && self.chi_blue == self.expected() && self.alpha_star <= self.s
    }
}

impl fmt::Display for DemoReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "n={} s={} parts={} buckets={}", self.n, self.s, self.parts, self.buckets)?;
        writeln!(f, "chi_red={} chi_blue={} expected={}", self.chi_red, self.chi_blue, self.expected())?;
        writeln!(f, "alpha_star={} s={} within={}", self.alpha_star, self.s, self.alpha_star <= self.s)?;
        write!(f, "{}", if self.holds() { "PASS" } else { "FAIL" })
    }
}

pub fn counterexample_demo(n: usize, s: usize, limits: &OracleLimits) -> Result<DemoReport> {
    let split = multipartite_bucket_graph(n, s)?;
    let chi_red = chromatic_number_exact(&split.red, limits)?.0;
    let chi_blue = chromatic_number_exact(&split.blue, limits)?.0;
    let union = UndirectedGraph::new(n, split.red.edges().iter().chain(split.blue.edges()).copied())?;
    let alpha_star = bipartite_independence_number_exact(&union, limits)?;
    Ok(DemoReport {
        n,
        s,
        parts: split.parts,
        buckets: split.buckets,
        chi_red,
        chi_blue,
        alpha_star,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cases() {
        let lim = OracleLimits::default();
        let r = counterexample_demo(4, 1, &lim).unwrap();
        assert_eq!((r.chi_red, r.chi_blue), (2, 2));
        assert!(r.holds());
        let r = counterexample_demo(9, 1, &lim).unwrap();
        assert_eq!((r.chi_red, r.chi_blue), (3, 3));
        assert_eq!(r.alpha_star, 0);
        assert!(counterexample_demo(10, 3, &lim).is_err());
        assert!(counterexample_demo(8, 1, &lim).is_err());
    }
}
