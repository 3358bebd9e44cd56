use super::OracleLimits;
use crate::digraph::UndirectedGraph;
use crate::error::{Error, Result};

/// A vertex coloring with colors `0..num_colors`, each used at least once.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coloring {
    pub color: Vec<usize>,
    pub num_colors: usize,
}

impl Coloring {
    /// Relabels colors to `0..c` by first appearance.
    pub fn normalized(color: Vec<usize>) -> Self {
        let mut map = std::collections::HashMap::new();
        let color: Vec<usize> = color
            .into_iter()
            .map(|c| {
                let next = map.len();
                *map.entry(c).or_insert(next)
            })
            .collect();
        Coloring {
            num_colors: map.len(),
            color,
        }
    }

    /// First monochromatic edge, if any.
    pub fn conflict(&self, h: &UndirectedGraph) -> Option<(usize, usize)> {
        h.edges()
            .iter()
            .copied()
            .find(|&(u, v)| self.color[u] == self.color[v])
    }

    /// Proper on `h`, sized to `h`, and using exactly `0..num_colors`.
    pub fn is_proper(&self, h: &UndirectedGraph) -> bool {
        if self.color.len() != h.n() {
            return false;
        }
        let mut used = vec![false; self.num_colors];
        for &c in &self.color {
            if c >= self.num_colors {
                return false;
            }
            used[c] = true;
        }
        used.iter().all(|&u| u) && self.conflict(h).is_none()
    }
}

/// Vertex order used by [`greedy_coloring`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OrderPolicy {
    /// Vertex ids ascending.
    Natural,
    /// Descending degree, ties by id.
    LargestFirst,
    /// Reverse of a smallest-last (degeneracy) elimination order.
    Degeneracy,
    /// Saturation degree, recomputed after each assignment.
    #[default]
    Dsatur,
}

fn first_free(taken: &[bool]) -> usize {
    taken.iter().position(|&t| !t).unwrap_or(taken.len())
}

fn greedy_in_order(h: &UndirectedGraph, order: &[usize]) -> Coloring {
    let mut color = vec![usize::MAX; h.n()];
    for &v in order {
        let mut taken = vec![false; h.degree(v) + 1];
        for &x in h.neighbors(v) {
            if color[x] < taken.len() {
                taken[color[x]] = true;
            }
        }
        color[v] = first_free(&taken);
    }
    Coloring::normalized(color)
}

fn degeneracy_order(h: &UndirectedGraph) -> Vec<usize> {
    let n = h.n();
    let mut deg: Vec<usize> = (0..n).map(|v| h.degree(v)).collect();
    let mut removed = vec![false; n];
    let mut elim = Vec::with_capacity(n);
    for _ in 0..n {
        let v = (0..n)
            .filter(|&v| !removed[v])
            .min_by_key(|&v| (deg[v], v))
            .expect("vertices remain");
        removed[v] = true;
        elim.push(v);
        for &x in h.neighbors(v) {
            if !removed[x] {
                deg[x] -= 1;
            }
        }
    }
    elim.reverse();
    elim
}

fn dsatur(h: &UndirectedGraph) -> Coloring {
    let n = h.n();
    let mut color = vec![usize::MAX; n];
    let mut seen: Vec<Vec<bool>> = vec![Vec::new(); n];
    for _ in 0..n {
        let v = (0..n)
            .filter(|&v| color[v] == usize::MAX)
            .max_by_key(|&v| {
                let sat = seen[v].iter().filter(|&&b| b).count();
                (sat, h.degree(v), std::cmp::Reverse(v))
            })
            .expect("uncolored vertex");
        let c = first_free(&seen[v]);
        color[v] = c;
        for &x in h.neighbors(v) {
            if seen[x].len() <= c {
                seen[x].resize(c + 1, false);
            }
            seen[x][c] = true;
        }
    }
    Coloring::normalized(color)
}

/// Greedy proper coloring; an upper bound on χ.
pub fn greedy_coloring(h: &UndirectedGraph, policy: OrderPolicy) -> Coloring {
    match policy {
        OrderPolicy::Natural => greedy_in_order(h, &(0..h.n()).collect::<Vec<_>>()),
        OrderPolicy::LargestFirst => {
            let mut order: Vec<usize> = (0..h.n()).collect();
            order.sort_by_key(|&v| (std::cmp::Reverse(h.degree(v)), v));
            greedy_in_order(h, &order)
        }
        OrderPolicy::Degeneracy => greedy_in_order(h, &degeneracy_order(h)),
        OrderPolicy::Dsatur => dsatur(h),
    }
}

/// Size of a greedily grown clique (descending degree); a lower bound on χ.
pub fn clique_lower_bound(h: &UndirectedGraph) -> usize {
    let mut order: Vec<usize> = (0..h.n()).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(h.degree(v)), v));
    let mut best = usize::from(h.n() > 0);
    for &start in &order {
        let mut clique = vec![start];
        for &v in &order {
            if v != start && clique.iter().all(|&c| h.adjacent(c, v)) {
                clique.push(v);
            }
        }
        best = best.max(clique.len());
    }
    best
}

/// Backtracking search for a proper `k`-coloring over neighborhood masks
/// (`n <= 64`). Picks the uncolored vertex of largest saturation first and
/// only opens one new color per level.
pub fn k_coloring(adj: &[u64], k: usize) -> Option<Vec<usize>> {
    let n = adj.len();
    if n == 0 {
        return Some(Vec::new());
    }
    if k == 0 {
        return None;
    }
    let mut classes = vec![0u64; k];
    let mut color = vec![usize::MAX; n];
    fn go(adj: &[u64], classes: &mut [u64], color: &mut [usize], used: usize, left: usize) -> bool {
        if left == 0 {
            return true;
        }
        // choose the most constrained uncolored vertex
        let mut pick = usize::MAX;
        let mut key = (0usize, 0usize);
        for v in 0..adj.len() {
            if color[v] != usize::MAX {
                continue;
            }
            let sat = classes[..used].iter().filter(|&&c| c & adj[v] != 0).count();
            let deg = adj[v].count_ones() as usize;
            if pick == usize::MAX || (sat, deg) > key {
                pick = v;
                key = (sat, deg);
            }
        }
        let v = pick;
        let top = (used + 1).min(classes.len());
        for c in 0..top {
            if classes[c] & adj[v] == 0 {
                classes[c] |= 1 << v;
                color[v] = c;
                if go(adj, classes, color, used.max(c + 1), left - 1) {
                    return true;
                }
                classes[c] &= !(1 << v);
                color[v] = usize::MAX;
            }
        }
        false
    }
    go(adj, &mut classes, &mut color, 0, n).then_some(color)
}

/// Exact χ with a witness coloring. The witness is re-validated before it
/// is returned.
pub fn chromatic_number_exact(h: &UndirectedGraph, limits: &OracleLimits) -> Result<(usize, Coloring)> {
    OracleLimits::guard("exact chromatic number", h.n(), limits.max_n_exact_chi.min(64))?;
    if h.n() == 0 {
        return Ok((0, Coloring { color: vec![], num_colors: 0 }));
    }
    let adj = h.masks().expect("n <= 64");
    let upper = greedy_coloring(h, OrderPolicy::Dsatur);
    let lower = clique_lower_bound(h);
    let mut best = upper;
    for k in lower..best.num_colors {
        if let Some(color) = k_coloring(&adj, k) {
            best = Coloring::normalized(color);
            break;
        }
    }
    if !best.is_proper(h) {
        return Err(Error::Precondition("internal: exact coloring failed validation".into()));
    }
    Ok((best.num_colors, best))
}
