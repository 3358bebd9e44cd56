use rand::Rng as _;

use super::Digraph;
use crate::error::{Error, Result};
use crate::rng;

/// Orients every pair uniformly at random.
pub fn random_tournament(n: usize, seed: u64) -> Digraph {
    random_orientation_gnp(n, 1.0, seed).expect("p = 1 is in range")
}

/// Keeps each pair independently with probability `p` (Erdős–Rényi), then
/// orients each kept pair uniformly at random.
pub fn random_orientation_gnp(n: usize, p: f64, seed: u64) -> Result<Digraph> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidProbability(p));
    }
    let mut rng = rng::seeded(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            let keep = p >= 1.0 || (p > 0.0 && rng.gen_bool(p));
            if keep {
                edges.push(if rng.gen_bool(0.5) { (u, v) } else { (v, u) });
            }
        }
    }
    Digraph::new(n, edges)
}

/// `T_n`: arcs `(u, v)` for all `u < v`.
pub fn transitive_tournament(n: usize) -> Digraph {
    Digraph::new(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)))).expect("transitive")
}

/// `C_n`: `0 → 1 → … → n-1 → 0`. For `n < 3` this is a path (a 2-cycle
/// would not be an orientation).
pub fn directed_cycle(n: usize) -> Digraph {
    let mut edges: Vec<(usize, usize)> = (1..n).map(|v| (v - 1, v)).collect();
    if n >= 3 {
        edges.push((n - 1, 0));
    }
    Digraph::new(n, edges).expect("cycle")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tournament_orients_all_pairs() {
        let g = random_tournament(5, 11);
        assert_eq!(g.m(), 10);
        assert_eq!(g, random_tournament(5, 11));
    }

    #[test]
    fn gnp_extremes() {
        assert_eq!(random_orientation_gnp(7, 0.0, 3).unwrap().m(), 0);
        assert_eq!(random_orientation_gnp(7, 1.0, 3).unwrap().m(), 21);
        assert_eq!(random_orientation_gnp(3, 1.5, 3), Err(Error::InvalidProbability(1.5)));
    }

    #[test]
    fn cycle_and_transitive() {
        assert!(!directed_cycle(4).is_acyclic());
        assert_eq!(directed_cycle(4).m(), 4);
        assert!(transitive_tournament(6).is_acyclic());
    }
}
