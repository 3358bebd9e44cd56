//! Constructive Gallai–Milgram: a cover of `V(G)` by at most `α(G)`
//! vertex-disjoint directed paths.
//!
//! The construction follows the classical inductive proof. Starting from
//! singleton paths, a *reduction* replaces a cover `P` by a cover with one
//! path fewer whose end vertices are a subset of the ends of `P`:
//!
//! * pick an arc `a → b` between two path ends (lowest ids first);
//! * if `b` is a singleton path, append it to the path ending at `a`;
//! * otherwise delete `b` (its predecessor `v` becomes an end), reduce the
//!   smaller instance recursively, and re-attach `b` after `v` if `v` is
//!   still an end, else after `a` (one of the two always is).
//!
//! When the ends are pairwise non-adjacent no arc exists and the reduction
//! reports the ends instead. That set is independent in `G` and has one
//! vertex per path, so the final cover never has more than `α(G)` paths,
//! and the returned certificate proves it without computing `α`.

use num_bigint::BigUint;
use num_traits::One;

use crate::digraph::Digraph;
use crate::error::{Error, Result};
use crate::oracles::gallai_threshold_ln;

/// Vertex-disjoint directed paths covering every vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathCover {
    paths: Vec<Vec<usize>>,
}

impl PathCover {
    /// Validates disjointness, coverage and that consecutive vertices are
    /// arcs of `g`. Empty paths are rejected.
    pub fn new(g: &Digraph, paths: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; g.n()];
        for path in &paths {
            if path.is_empty() {
                return Err(Error::Precondition("empty path in cover".into()));
            }
            for &v in path {
                if v >= g.n() {
                    return Err(Error::VertexOutOfRange { vertex: v, n: g.n() });
                }
                if seen[v] {
                    return Err(Error::Precondition(format!("vertex {v} covered twice")));
                }
                seen[v] = true;
            }
            if let Some(w) = path.windows(2).find(|w| !g.has_edge(w[0], w[1])) {
                return Err(Error::Precondition(format!("({}, {}) is not an arc", w[0], w[1])));
            }
        }
        if let Some(v) = seen.iter().position(|&s| !s) {
            return Err(Error::Precondition(format!("vertex {v} not covered")));
        }
        Ok(PathCover { paths })
    }

    pub fn paths(&self) -> &[Vec<usize>] {
        &self.paths
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    /// Vertex counts `p_i` of the paths.
    pub fn sizes(&self) -> Vec<usize> {
        self.paths.iter().map(Vec::len).collect()
    }
}

/// A cover together with an independent set holding one end of each path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GallaiMilgram {
    pub cover: PathCover,
    pub independent_ends: Vec<usize>,
}

fn end(path: &[usize]) -> usize {
    *path.last().expect("paths are non-empty")
}

/// One reduction step. `Err` carries the (independent) set of path ends.
fn reduce(g: &Digraph, mut paths: Vec<Vec<usize>>) -> std::result::Result<Vec<Vec<usize>>, Vec<usize>> {
    let mut ends: Vec<usize> = paths.iter().map(|p| end(p)).collect();
    ends.sort_unstable();
    let arc = ends
        .iter()
        .flat_map(|&a| ends.iter().map(move |&b| (a, b)))
        .find(|&(a, b)| g.has_edge(a, b));
    let Some((a, b)) = arc else {
        return Err(ends);
    };
    let pa = paths.iter().position(|p| end(p) == a).expect("a is an end");
    let pb = paths.iter().position(|p| end(p) == b).expect("b is an end");
    if paths[pb].len() == 1 {
        paths[pa].push(b);
        paths.remove(pb);
        return Ok(paths);
    }
    paths[pb].pop();
    let v = end(&paths[pb]);
    // `paths` now covers G − b with the same number of paths
    let mut smaller = reduce(g, paths)?;
    let host = smaller
        .iter()
        .position(|p| end(p) == v)
        .or_else(|| smaller.iter().position(|p| end(p) == a))
        .expect("reduction keeps v or a as an end");
    smaller[host].push(b);
    Ok(smaller)
}

/// Cover with an independence certificate.
pub fn gallai_milgram(g: &Digraph) -> GallaiMilgram {
    let mut paths: Vec<Vec<usize>> = (0..g.n()).map(|v| vec![v]).collect();
    loop {
        match reduce(g, paths.clone()) {
            Ok(next) => paths = next,
            Err(ends) => {
                paths.sort_by_key(|p| p[0]);
                return GallaiMilgram {
                    cover: PathCover::new(g, paths).expect("reductions preserve cover validity"),
                    independent_ends: ends,
                };
            }
        }
    }
}

/// At most `α(G)` vertex-disjoint directed paths covering `V(G)`.
pub fn gallai_milgram_cover(g: &Digraph) -> PathCover {
    gallai_milgram(g).cover
}

/// `∏ p_i!` over the path sizes.
pub fn cover_factorial_product(cover: &PathCover) -> BigUint {
    let mut acc = BigUint::one();
    for p in cover.sizes() {
        for i in 2..=p {
            acc *= i as u64;
        }
    }
    acc
}

fn ln_factorial(p: usize) -> f64 {
    (2..=p).map(|i| (i as f64).ln()).sum()
}

/// Whether `∏ p_i! ≥ (k/(s·e))^k` with `k = Σ p_i`, compared in the log
/// domain. Requires `s ≥` the number of paths.
pub fn convexity_bound_check(cover: &PathCover, s: usize) -> Result<bool> {
    if s == 0 || cover.len() > s {
        return Err(Error::Precondition(format!(
            "cover has {} paths but s = {s}",
            cover.len()
        )));
    }
    let k: usize = cover.sizes().iter().sum();
    if k == 0 {
        return Ok(true);
    }
    let lhs: f64 = cover.sizes().into_iter().map(ln_factorial).sum();
    let rhs = gallai_threshold_ln(k, s);
    Ok(lhs + 1e-9 * rhs.abs().max(1.0) >= rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digraph::{directed_cycle, random_orientation_gnp, random_tournament};

    #[test]
    fn edgeless_gives_singletons() {
        let g = Digraph::new(5, []).unwrap();
        let gm = gallai_milgram(&g);
        assert_eq!(gm.cover.len(), 5);
        assert_eq!(gm.independent_ends, vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn tournaments_get_hamiltonian_paths() {
        for seed in 0..30 {
            let g = random_tournament(9, seed);
            let cover = gallai_milgram_cover(&g);
            assert_eq!(cover.len(), 1, "seed {seed}");
            assert_eq!(cover.paths()[0].len(), 9);
        }
    }

    #[test]
    fn c3_single_path() {
        let cover = gallai_milgram_cover(&directed_cycle(3));
        assert_eq!(cover.len(), 1);
        assert_eq!(cover.paths()[0].len(), 3);
    }

    #[test]
    fn certificate_is_independent_and_matches_size() {
        for seed in 0..100 {
            let g = random_orientation_gnp(11, 0.3, seed).unwrap();
            let gm = gallai_milgram(&g);
            assert_eq!(gm.independent_ends.len(), gm.cover.len());
            for &a in &gm.independent_ends {
                for &b in &gm.independent_ends {
                    assert!(!g.adjacent(a, b));
                }
            }
        }
    }

    #[test]
    fn cover_validation_rejects_bad_paths() {
        let g = directed_cycle(3);
        assert!(PathCover::new(&g, vec![vec![0, 2, 1]]).is_err());
        assert!(PathCover::new(&g, vec![vec![0, 1]]).is_err());
        assert!(PathCover::new(&g, vec![vec![0, 1], vec![1, 2]]).is_err());
        assert!(PathCover::new(&g, vec![vec![0, 1], vec![], vec![2]]).is_err());
        assert!(PathCover::new(&g, vec![vec![2, 0, 1]]).is_ok());
    }

    #[test]
    fn factorial_products() {
        let g = Digraph::new(5, [(0, 1), (2, 3), (3, 4)]).unwrap();
        let singles = PathCover::new(&g, (0..5).map(|v| vec![v]).collect()).unwrap();
        assert_eq!(cover_factorial_product(&singles), BigUint::from(1u32));
        let two_three = PathCover::new(&g, vec![vec![0, 1], vec![2, 3, 4]]).unwrap();
        assert_eq!(cover_factorial_product(&two_three), BigUint::from(12u32));
        let t = crate::digraph::transitive_tournament(6);
        let ham = PathCover::new(&t, vec![(0..6).collect()]).unwrap();
        assert_eq!(cover_factorial_product(&ham), BigUint::from(720u32));
    }

    #[test]
    fn convexity_examples() {
        let g = Digraph::new(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        let singles = PathCover::new(&g, (0..4).map(|v| vec![v]).collect()).unwrap();
        assert!(convexity_bound_check(&singles, 4).unwrap());
        let one = PathCover::new(&g, vec![vec![0, 1, 2, 3]]).unwrap();
        assert!(convexity_bound_check(&one, 1).unwrap());
        let pairs = PathCover::new(&g, vec![vec![0, 1], vec![2, 3]]).unwrap();
        assert!(convexity_bound_check(&pairs, 2).unwrap());
        assert!(convexity_bound_check(&pairs, 1).is_err());
    }
}
