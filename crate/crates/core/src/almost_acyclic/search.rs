use std::collections::BTreeMap;

use rayon::prelude::*;

use super::{measure_alpha, AlphaMeasure};
use crate::digraph::{Digraph, Permutation};
use crate::error::{Error, Result};
use crate::oracles::{self, binomial, for_each_kset, gallai_bound_value, McEstimate, OracleLimits};
use crate::rng;

fn trial_permutation(n: usize, seed: u64, trial: u64) -> Permutation {
    Permutation::from_order(&rng::shuffled(n, &mut rng::stream(seed, trial))).expect("shuffle is a permutation")
}

/// Best permutation found by [`random_perm_search`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermSearch {
    pub best: Permutation,
    pub alpha: AlphaMeasure,
    pub trial: u64,
    pub trials: u64,
    /// `α(G_best) ≤ k` (with an exact α, or an upper bound that already
    /// meets it).
    pub success: bool,
}

/// Samples `trials` uniform permutations and keeps the one minimizing the
/// measured `α(G_π)`; ties go to the earliest trial.
pub fn random_perm_search(
    g: &Digraph,
    k: usize,
    trials: u64,
    seed: u64,
    limits: &OracleLimits,
) -> Result<PermSearch> {
    if trials == 0 {
        return Err(Error::Precondition("trials must be at least 1".into()));
    }
    let n = g.n();
    let (alpha, trial) = (0..trials)
        .into_par_iter()
        .map(|t| {
            let pi = trial_permutation(n, seed, t);
            let sub = g.forward_subgraph(&pi).expect("sizes match");
            (measure_alpha(&sub.underlying(), limits), t)
        })
        .min_by_key(|(a, t)| (a.value, *t))
        .expect("trials >= 1");
    Ok(PermSearch {
        best: trial_permutation(n, seed, trial),
        alpha,
        trial,
        trials,
        success: alpha.value <= k,
    })
}

/// A vertex whose in- and out-degree are both at least `m/(4s) − 1/2`,
/// `m = |V(G)|`; the one maximizing `min(in, out)`, lowest id on ties.
/// Fails with [`Error::NotFound`] when even the best vertex misses the
/// bound, which can only happen if `α(G) > s`.
pub fn high_inout_vertex(g: &Digraph, s: usize) -> Result<usize> {
    if s == 0 {
        return Err(Error::Precondition("s must be at least 1".into()));
    }
    let m = g.n();
    let best = (0..m).max_by_key(|&v| (g.in_degree(v).min(g.out_degree(v)), std::cmp::Reverse(v)));
    let Some(v) = best else {
        return Err(Error::NotFound);
    };
    let d = g.in_degree(v).min(g.out_degree(v));
    // d ≥ m/(4s) − 1/2  ⇔  4s·d + 2s ≥ m
    if 4 * s * d + 2 * s >= m {
        Ok(v)
    } else {
        Err(Error::NotFound)
    }
}

/// Empirical distribution of `α(G_π)` over uniform `π`.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaTail {
    pub histogram: BTreeMap<usize, u64>,
    /// `4·√(n·s)`.
    pub threshold: f64,
    /// Frequency of `α(G_π) > threshold`.
    pub exceed: McEstimate,
}

pub fn alpha_gpi_tail_mc(g: &Digraph, s: usize, trials: u64, seed: u64, limits: &OracleLimits) -> Result<AlphaTail> {
    if trials == 0 {
        return Err(Error::Precondition("trials must be at least 1".into()));
    }
    OracleLimits::guard("alpha of G_pi", g.n(), limits.max_n_exact_chi)?;
    let n = g.n();
    let threshold = 4.0 * ((n * s) as f64).sqrt();
    let alphas: Vec<usize> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let sub = g.forward_subgraph(&trial_permutation(n, seed, t)).expect("sizes match");
            oracles::independence_number_exact(&sub.underlying(), limits).expect("guarded")
        })
        .collect();
    let mut histogram = BTreeMap::new();
    for &a in &alphas {
        *histogram.entry(a).or_insert(0) += 1;
    }
    let hits = alphas.iter().filter(|&&a| a as f64 > threshold).count() as u64;
    Ok(AlphaTail {
        histogram,
        threshold,
        exceed: McEstimate::from_hits(hits, trials),
    })
}

/// Sample mean of a per-trial count with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleMean {
    pub trials: u64,
    pub mean: f64,
    pub std_error: f64,
}

/// Mean number of independent `k`-sets of `G_π` over uniform `π`.
pub fn independent_kset_mc(g: &Digraph, k: usize, trials: u64, seed: u64, limits: &OracleLimits) -> Result<SampleMean> {
    if trials < 2 {
        return Err(Error::Precondition("trials must be at least 2".into()));
    }
    let n = g.n();
    let total = binomial(n, k);
    if n > 64 || total > limits.max_subset_enum {
        return Err(Error::TooLarge {
            what: "independent k-set enumeration",
            size: total,
            limit: limits.max_subset_enum,
        });
    }
    let counts: Vec<u64> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let sub = g.forward_subgraph(&trial_permutation(n, seed, t)).expect("sizes match");
            let adj = sub.underlying().masks().expect("n <= 64");
            let mut count = 0u64;
            for_each_kset(n, k, |set| {
                let mut it = set;
                while it != 0 {
                    let v = it.trailing_zeros() as usize;
                    if adj[v] & set != 0 {
                        return;
                    }
                    it &= it - 1;
                }
                count += 1;
            });
            count
        })
        .collect();
    let tf = trials as f64;
    let mean = counts.iter().map(|&c| c as f64).sum::<f64>() / tf;
    let var = counts.iter().map(|&c| (c as f64 - mean).powi(2)).sum::<f64>() / (tf - 1.0);
    Ok(SampleMean {
        trials,
        mean,
        std_error: (var / tf).sqrt(),
    })
}

/// `C(n, k)·(s·e/k)^k`: the union bound on the expected number of
/// independent `k`-sets of `G_π` when `α(G) ≤ s`.
pub fn union_bound_independent_ksets(n: usize, k: usize, s: usize) -> f64 {
    binomial(n, k) as f64 * gallai_bound_value(k, s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digraph::{directed_cycle, transitive_tournament};

    fn lim() -> OracleLimits {
        OracleLimits::default()
    }

    #[test]
    fn search_transitive_k1() {
        // only the identity makes G_π complete: 1/24 per trial
        let r = random_perm_search(&transitive_tournament(4), 1, 400, 5, &lim()).unwrap();
        assert!(r.success);
        assert_eq!(r.alpha.value, 1);
        assert_eq!(r.best, Permutation::identity(4));
    }

    #[test]
    fn search_edgeless_fails() {
        let g = Digraph::new(5, []).unwrap();
        let r = random_perm_search(&g, 4, 20, 1, &lim()).unwrap();
        assert!(!r.success);
        assert_eq!(r.alpha.value, 5);
    }

    #[test]
    fn search_c3() {
        let r = random_perm_search(&directed_cycle(3), 2, 6, 0, &lim()).unwrap();
        assert!(r.success);
        assert_eq!(r.alpha.value, 2);
        assert_eq!(r.trial, 0);
    }

    #[test]
    fn search_is_deterministic() {
        let g = crate::digraph::random_tournament(9, 4);
        let a = random_perm_search(&g, 2, 50, 77, &lim()).unwrap();
        let b = random_perm_search(&g, 2, 50, 77, &lim()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn inout_examples() {
        for v in 0..3 {
            assert_eq!(directed_cycle(3).in_degree(v), 1);
        }
        assert_eq!(high_inout_vertex(&directed_cycle(3), 1).unwrap(), 0);
        let v = high_inout_vertex(&transitive_tournament(4), 1).unwrap();
        assert!(v == 1 || v == 2);
        assert_eq!(v, 1);
        assert_eq!(high_inout_vertex(&Digraph::new(1, []).unwrap(), 1).unwrap(), 0);
    }

    #[test]
    fn inout_not_found_when_alpha_too_big() {
        // edgeless on 5 vertices, s = 1: threshold 5/4 − 1/2 > 0
        assert_eq!(high_inout_vertex(&Digraph::new(5, []).unwrap(), 1), Err(Error::NotFound));
        assert!(high_inout_vertex(&Digraph::new(5, []).unwrap(), 0).is_err());
    }

    #[test]
    fn tail_trivial_cases() {
        let t = alpha_gpi_tail_mc(&transitive_tournament(10), 1, 200, 3, &lim()).unwrap();
        assert_eq!(t.exceed.hits, 0);
        assert_eq!(t.histogram.values().sum::<u64>(), 200);
        let e = alpha_gpi_tail_mc(&Digraph::new(6, []).unwrap(), 1, 50, 3, &lim()).unwrap();
        assert_eq!(e.histogram.len(), 1);
        assert_eq!(e.histogram[&6], 50);
    }

    #[test]
    fn kset_mc_edgeless_and_complete() {
        let e = independent_kset_mc(&Digraph::new(6, []).unwrap(), 3, 10, 0, &lim()).unwrap();
        assert_eq!(e.mean, 20.0);
        assert_eq!(e.std_error, 0.0);
        let t = independent_kset_mc(&transitive_tournament(6), 2, 100, 0, &lim()).unwrap();
        // a pair is independent in G_π iff it is reversed by π
        assert!((t.mean - 7.5).abs() < 6.0 * t.std_error + 1e-9);
    }

    #[test]
    fn union_bound_value() {
        let v = union_bound_independent_ksets(10, 4, 1);
        assert!((v - 210.0 * (std::f64::consts::E / 4.0).powi(4)).abs() < 1e-9);
    }
}
