use super::{coloring, OracleLimits};
use crate::digraph::UndirectedGraph;
use crate::error::Result;

fn max_independent(adj: &[u64], cand: u64, size: usize, best: &mut (usize, u64), chosen: u64) {
    if cand == 0 {
        if size > best.0 {
            *best = (size, chosen);
        }
        return;
    }
    if size + cand.count_ones() as usize <= best.0 {
        return;
    }
    // branch on a vertex of maximum degree inside the candidates; a vertex
    // with no candidate neighbours is always taken
    let mut it = cand;
    let mut pick = cand.trailing_zeros() as usize;
    let mut pick_deg = 0;
    while it != 0 {
        let v = it.trailing_zeros() as usize;
        it &= it - 1;
        let d = (adj[v] & cand).count_ones();
        if d == 0 {
            max_independent(adj, cand & !(1 << v), size + 1, best, chosen | 1 << v);
            return;
        }
        if d > pick_deg {
            pick = v;
            pick_deg = d;
        }
    }
    let v = pick;
    max_independent(adj, cand & !(1 << v) & !adj[v], size + 1, best, chosen | 1 << v);
    max_independent(adj, cand & !(1 << v), size, best, chosen);
}

/// A maximum independent set as a vertex mask (`n <= 64`).
pub fn maximum_independent_set(h: &UndirectedGraph, limits: &OracleLimits) -> Result<u64> {
    OracleLimits::guard("exact independence number", h.n(), limits.max_n_exact_chi.min(64))?;
    let adj = h.masks().expect("n <= 64");
    let mut best = (0, 0);
    max_independent(&adj, crate::digraph::low_mask(h.n()), 0, &mut best, 0);
    Ok(best.1)
}

/// Exact α.
pub fn independence_number_exact(h: &UndirectedGraph, limits: &OracleLimits) -> Result<usize> {
    Ok(maximum_independent_set(h, limits)?.count_ones() as usize)
}

/// Exact α*: the largest `k` with disjoint `k`-sets `A`, `B` and no `A–B`
/// edge. For each `A`, the best partner is every vertex outside `A ∪ N(A)`,
/// so α* = max over `A` of `min(|A|, n − |A ∪ N(A)|)`.
pub fn bipartite_independence_number_exact(h: &UndirectedGraph, limits: &OracleLimits) -> Result<usize> {
    let n = h.n();
    OracleLimits::guard("exact bipartite independence number", n, limits.max_n_exact_astar.min(24))?;
    let adj = h.masks().expect("n <= 24");
    // nbr[A] = N(A) built from A without its lowest vertex
    let size = 1usize << n;
    let mut nbr = vec![0u32; size];
    let mut best = 0usize;
    for a in 1..size {
        let low = a.trailing_zeros() as usize;
        let covered = nbr[a & (a - 1)] | adj[low] as u32;
        nbr[a] = covered;
        let closed = (covered | a as u32).count_ones() as usize;
        let k = (a.count_ones() as usize).min(n - closed);
        best = best.max(k);
    }
    Ok(best)
}

/// Greedy clique partition of the vertex set (a coloring of the complement);
/// its size bounds α from above.
pub fn clique_cover_upper_bound(h: &UndirectedGraph) -> usize {
    let n = h.n();
    let complement = UndirectedGraph::new(
        n,
        (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).filter(|&(u, v)| !h.adjacent(u, v)),
    )
    .expect("complement of a simple graph");
    coloring::greedy_coloring(&complement, coloring::OrderPolicy::Dsatur).num_colors
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digraph::{directed_cycle, random_tournament};

    fn lim() -> OracleLimits {
        OracleLimits::default()
    }

    #[test]
    fn alpha_examples() {
        assert_eq!(independence_number_exact(&UndirectedGraph::complete(5), &lim()).unwrap(), 1);
        assert_eq!(independence_number_exact(&UndirectedGraph::empty(7), &lim()).unwrap(), 7);
        assert_eq!(independence_number_exact(&directed_cycle(5).underlying(), &lim()).unwrap(), 2);
    }

    #[test]
    fn alpha_star_examples() {
        let t = random_tournament(7, 2).underlying();
        assert_eq!(bipartite_independence_number_exact(&t, &lim()).unwrap(), 0);
        assert_eq!(bipartite_independence_number_exact(&UndirectedGraph::empty(6), &lim()).unwrap(), 3);
        let two_k3 =
            UndirectedGraph::new(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap();
        assert_eq!(bipartite_independence_number_exact(&two_k3, &lim()).unwrap(), 3);
    }

    #[test]
    fn clique_cover_bounds_alpha() {
        for seed in 0..20 {
            let h = crate::digraph::random_orientation_gnp(12, 0.4, seed).unwrap().underlying();
            let a = independence_number_exact(&h, &lim()).unwrap();
            assert!(clique_cover_upper_bound(&h) >= a);
        }
    }
}
