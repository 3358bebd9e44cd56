use num_rational::Ratio;
use rand::seq::SliceRandom;

use super::{binomial, chromatic_number_exact, k_coloring, Coloring, OracleLimits};
use crate::digraph::{Digraph, Permutation};
use crate::error::{Error, Result};
use crate::rng;

/// All orders of `0..n` in lexicographic order.
#[derive(Debug, Clone)]
pub struct Permutations {
    next: Option<Vec<usize>>,
}

impl Permutations {
    pub fn new(n: usize) -> Self {
        Permutations {
            next: Some((0..n).collect()),
        }
    }
}

impl Iterator for Permutations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let cur = self.next.take()?;
        let mut nxt = cur.clone();
        let n = nxt.len();
        if n > 1 {
            if let Some(i) = (0..n - 1).rev().find(|&i| nxt[i] < nxt[i + 1]) {
                let j = (i + 1..n).rev().find(|&j| nxt[j] > nxt[i]).expect("successor");
                nxt.swap(i, j);
                nxt[i + 1..].reverse();
                self.next = Some(nxt);
            }
        }
        Some(cur)
    }
}

/// Number of `k`-subsets `S` with `G[S]` acyclic.
pub fn count_acyclic_ksets(g: &Digraph, k: usize, limits: &OracleLimits) -> Result<u128> {
    let n = g.n();
    if k > n {
        return Ok(0);
    }
    let total = binomial(n, k);
    if total > limits.max_subset_enum || n > 64 {
        return Err(Error::TooLarge {
            what: "acyclic k-set enumeration",
            size: total,
            limit: limits.max_subset_enum,
        });
    }
    let masks = g.masks().expect("n <= 64");
    let mut count = 0u128;
    for_each_kset(n, k, |s| {
        if masks.is_acyclic_on(s) {
            count += 1;
        }
    });
    Ok(count)
}

/// Calls `f` on every `k`-subset of `0..n` as a mask, in increasing mask
/// order (Gosper's hack).
pub(crate) fn for_each_kset(n: usize, k: usize, mut f: impl FnMut(u64)) {
    if k > n || n > 64 {
        return;
    }
    if k == 0 {
        f(0);
        return;
    }
    let limit_bit = if n == 64 { None } else { Some(1u64 << n) };
    let mut s: u64 = if k == 64 { u64::MAX } else { (1u64 << k) - 1 };
    loop {
        f(s);
        let c = s & s.wrapping_neg();
        let (r, overflow) = s.overflowing_add(c);
        if overflow || r == 0 {
            return;
        }
        let next = (((r ^ s) >> 2) / c) | r;
        if let Some(b) = limit_bit {
            if next >= b {
                return;
            }
        }
        s = next;
    }
}

/// `f(G)` with a witness permutation and an optimal coloring of `G_π`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FExact {
    pub f: usize,
    pub witness: Permutation,
    pub coloring: Coloring,
}

struct FSearch<'a> {
    n: usize,
    out: &'a [u64],
    inn: &'a [u64],
    und: Vec<u64>,
    upper: usize,
    best: usize,
    best_order: Vec<usize>,
    order: Vec<usize>,
}

impl FSearch<'_> {
    fn chi_at_least(&self, adj: &[u64], from: usize) -> usize {
        (from..=self.n)
            .find(|&k| k_coloring(adj, k).is_some())
            .unwrap_or(self.n)
    }

    fn go(&mut self, placed: u64, fwd: &mut [u64]) {
        if self.best >= self.upper {
            return;
        }
        let depth = self.order.len();
        if depth > 0 {
            // Every completion of this prefix yields a subgraph of `ub`:
            // forward arcs among the prefix, prefix-to-rest arcs, and all
            // arcs inside the rest.
            let ub: Vec<u64> = (0..self.n)
                .map(|v| {
                    if placed >> v & 1 == 1 {
                        fwd[v] | (self.out[v] & !placed)
                    } else {
                        (self.und[v] & !placed) | (self.inn[v] & placed)
                    }
                })
                .collect();
            if k_coloring(&ub, self.best).is_some() {
                return;
            }
            if depth == self.n {
                self.best = self.chi_at_least(&ub, self.best + 1);
                self.best_order = self.order.clone();
                return;
            }
        }
        for v in 0..self.n {
            if placed >> v & 1 == 1 {
                continue;
            }
            let newly = self.inn[v] & placed;
            fwd[v] = newly;
            let mut it = newly;
            while it != 0 {
                let u = it.trailing_zeros() as usize;
                it &= it - 1;
                fwd[u] |= 1 << v;
            }
            self.order.push(v);
            self.go(placed | 1 << v, fwd);
            self.order.pop();
            let mut it = newly;
            while it != 0 {
                let u = it.trailing_zeros() as usize;
                it &= it - 1;
                fwd[u] &= !(1 << v);
            }
            fwd[v] = 0;
        }
    }
}

/// Exact `f(G)`, the largest chromatic number of an acyclic subgraph.
///
/// Any acyclic subgraph `H` sits inside `G_π` for `π` a topological order
/// of `H` extended to all vertices, so maximizing `χ(G_π)` over
/// permutations suffices. The search enumerates permutation prefixes and
/// prunes a prefix once the union of all its completions is colorable with
/// the best count found so far; it stops early at `χ(G)`.
pub fn f_exact(g: &Digraph, limits: &OracleLimits) -> Result<FExact> {
    let n = g.n();
    OracleLimits::guard("exact f(G)", n, limits.max_n_exact_fg.min(limits.max_n_exact_chi))?;
    let identity = Permutation::identity(n);
    let (chi_id, _) = chromatic_number_exact(&g.forward_subgraph(&identity)?.underlying(), limits)?;
    let (upper, _) = chromatic_number_exact(&g.underlying(), limits)?;
    let masks = g.masks().expect("n <= 64");
    let mut search = FSearch {
        n,
        out: &masks.out,
        inn: &masks.inn,
        und: (0..n).map(|v| masks.out[v] | masks.inn[v]).collect(),
        upper,
        best: chi_id,
        best_order: (0..n).collect(),
        order: Vec::with_capacity(n),
    };
    search.go(0, &mut vec![0u64; n]);
    let witness = Permutation::from_order(&search.best_order)?;
    let (f, coloring) = chromatic_number_exact(&g.forward_subgraph(&witness)?.underlying(), limits)?;
    debug_assert_eq!(f, search.best);
    Ok(FExact { f, witness, coloring })
}

/// Fraction of the `n!` permutations `π` with `G_π` edgeless.
///
/// `G_π` is edgeless exactly when `π` lists every arc head before its
/// tail, so the count equals the number of topological orders of `G`
/// (equivalently of its reverse), computed by a dynamic program over
/// vertex subsets.
pub fn edgeless_probability_exact(g: &Digraph, limits: &OracleLimits) -> Result<Ratio<u128>> {
    let n = g.n();
    OracleLimits::guard("exact edgeless probability", n, limits.max_perm_enum.min(22))?;
    let masks = g.masks().expect("n <= 22");
    let mut ways = vec![0u128; 1 << n];
    ways[0] = 1;
    for set in 0..(1usize << n) {
        let w = ways[set];
        if w == 0 {
            continue;
        }
        for v in 0..n {
            if set >> v & 1 == 0 && masks.inn[v] & !(set as u64) == 0 {
                ways[set | 1 << v] += w;
            }
        }
    }
    let factorial: u128 = (1..=n as u128).product();
    Ok(Ratio::new(ways[(1 << n) - 1], factorial))
}

/// Sampled frequency with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub trials: u64,
    pub hits: u64,
    pub mean: f64,
    pub std_error: f64,
}

impl McEstimate {
    pub fn from_hits(hits: u64, trials: u64) -> Self {
        let mean = hits as f64 / trials as f64;
        McEstimate {
            trials,
            hits,
            mean,
            std_error: (mean * (1.0 - mean) / trials as f64).sqrt(),
        }
    }
}

/// Monte Carlo estimate of the edgeless-`G_π` probability.
pub fn edgeless_probability_mc(g: &Digraph, trials: u64, seed: u64) -> Result<McEstimate> {
    if trials == 0 {
        return Err(Error::Precondition("trials must be at least 1".into()));
    }
    let mut rng = rng::seeded(seed);
    let mut rank: Vec<usize> = (0..g.n()).collect();
    let mut hits = 0;
    for _ in 0..trials {
        rank.shuffle(&mut rng);
        if g.edges().iter().all(|&(u, v)| rank[u] > rank[v]) {
            hits += 1;
        }
    }
    Ok(McEstimate::from_hits(hits, trials))
}

/// `ln((s·e/k)^k)`.
pub fn ln_gallai_bound(k: usize, s: usize) -> f64 {
    ln_gallai_bound_real(k as f64, s as f64)
}

/// `ln((s·e/k)^k)` for real `k`, `s`.
pub fn ln_gallai_bound_real(k: f64, s: f64) -> f64 {
    k * (s.ln() + 1.0 - k.ln())
}

/// `(s·e/k)^k`, evaluated in the log domain. The acyclic k-set threshold
/// `(k/(s·e))^k` is its reciprocal.
pub fn gallai_bound_value(k: usize, s: usize) -> f64 {
    ln_gallai_bound(k, s).exp()
}

/// `ln((k/(s·e))^k)`.
pub fn gallai_threshold_ln(k: usize, s: usize) -> f64 {
    -ln_gallai_bound(k, s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digraph::{directed_cycle, transitive_tournament};

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn lim() -> OracleLimits {
        OracleLimits::default()
    }

    #[test]
    fn permutations_enumerate_all() {
        let all: Vec<_> = Permutations::new(3).collect();
        assert_eq!(all.len(), 6);
        assert_eq!(all[0], vec![0, 1, 2]);
        assert_eq!(all[5], vec![2, 1, 0]);
        assert_eq!(Permutations::new(0).count(), 1);
        assert_eq!(Permutations::new(5).count(), 120);
    }

    #[test]
    fn kset_enumeration_counts() {
        let mut c = 0;
        for_each_kset(6, 3, |_| c += 1);
        assert_eq!(c, 20);
        let mut z = Vec::new();
        for_each_kset(4, 0, |s| z.push(s));
        assert_eq!(z, vec![0]);
    }

    #[test]
    fn acyclic_kset_examples() {
        let c3 = directed_cycle(3);
        assert_eq!(count_acyclic_ksets(&c3, 3, &lim()).unwrap(), 0);
        assert_eq!(count_acyclic_ksets(&c3, 2, &lim()).unwrap(), 3);
        let t4 = transitive_tournament(4);
        for k in 0..=4 {
            assert_eq!(count_acyclic_ksets(&t4, k, &lim()).unwrap(), binomial(4, k));
        }
    }

    #[test]
    fn f_examples() {
        for n in 1..=6 {
            assert_eq!(f_exact(&transitive_tournament(n), &lim()).unwrap().f, n);
        }
        let c3 = f_exact(&directed_cycle(3), &lim()).unwrap();
        assert_eq!(c3.f, 2);
        assert_eq!(f_exact(&directed_cycle(4), &lim()).unwrap().f, 2);
    }

    #[test]
    fn edgeless_examples() {
        assert_eq!(edgeless_probability_exact(&directed_cycle(3), &lim()).unwrap(), Ratio::from_integer(0));
        assert_eq!(
            edgeless_probability_exact(&transitive_tournament(4), &lim()).unwrap(),
            Ratio::new(1, 24)
        );
        let e = Digraph::new(5, []).unwrap();
        assert_eq!(edgeless_probability_exact(&e, &lim()).unwrap(), Ratio::from_integer(1));
    }

    #[test]
    fn edgeless_mc_examples() {
        let t4 = edgeless_probability_mc(&transitive_tournament(4), 10_000, 5).unwrap();
        assert!((t4.mean - 1.0 / 24.0).abs() <= 3.0 * t4.std_error, "{t4:?}");
        assert_eq!(edgeless_probability_mc(&directed_cycle(3), 500, 1).unwrap().hits, 0);
        assert_eq!(edgeless_probability_mc(&Digraph::new(3, []).unwrap(), 50, 1).unwrap().mean, 1.0);
        assert!(edgeless_probability_mc(&directed_cycle(3), 0, 1).is_err());
    }

    #[test]
    fn gallai_bound_examples() {
        assert!(close(gallai_bound_value(4, 1), (std::f64::consts::E / 4.0).powi(4), 1e-12));
        assert!(close(gallai_bound_value(4, 1), 0.2134, 1e-3));
        assert!(close(gallai_bound_value(3, 1), 0.7439, 1e-4));
        assert!(gallai_bound_value(4, 1) >= 1.0 / 24.0);
        // base exactly one at k = s·e
        assert!(close(ln_gallai_bound_real(std::f64::consts::E, 1.0), 0.0, 1e-15));
        assert!(close(ln_gallai_bound_real(2.0 * std::f64::consts::E, 2.0), 0.0, 1e-14));
        assert!(gallai_bound_value(3, 1) < 1.0 && gallai_bound_value(2, 1) > 1.0);
        assert!(close(gallai_threshold_ln(4, 1), -ln_gallai_bound(4, 1), 0.0));
    }
}
