//! Exact desk-scale oracles: chromatic number, independence numbers,
//! acyclic k-set counts, `f(G)` and the edgeless-`G_π` probability.
//!
//! Every exact routine is guarded by [`OracleLimits`]; callers that hit a
//! guard fall back to the greedy bounds and must flag the result as
//! inexact.

mod acyclic;
mod coloring;
mod independence;

pub use acyclic::{
    count_acyclic_ksets, edgeless_probability_exact, edgeless_probability_mc, f_exact, gallai_bound_value,
    gallai_threshold_ln, ln_gallai_bound, ln_gallai_bound_real, FExact, McEstimate, Permutations,
};
pub use coloring::{
    chromatic_number_exact, clique_lower_bound, greedy_coloring, k_coloring, Coloring, OrderPolicy,
};
pub use independence::{
    bipartite_independence_number_exact, clique_cover_upper_bound, independence_number_exact,
    maximum_independent_set,
};

pub(crate) use acyclic::for_each_kset;

use crate::error::{Error, Result};

/// Size guards for the exponential oracles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleLimits {
    /// Exact χ and α.
    pub max_n_exact_chi: usize,
    /// Exact `f(G)` (enumerates permutations with pruning).
    pub max_n_exact_fg: usize,
    /// Exact α* (enumerates vertex subsets).
    pub max_n_exact_astar: usize,
    /// Exact permutation-probability computations.
    pub max_perm_enum: usize,
    /// Largest number of k-subsets any single enumeration may visit.
    pub max_subset_enum: u128,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits {
            max_n_exact_chi: 20,
            max_n_exact_fg: 9,
            max_n_exact_astar: 18,
            max_perm_enum: 10,
            max_subset_enum: 5_000_000,
        }
    }
}

impl OracleLimits {
    pub fn validate(&self) -> Result<()> {
        let all_positive = self.max_n_exact_chi > 0
            && self.max_n_exact_fg > 0
            && self.max_n_exact_astar > 0
            && self.max_perm_enum > 0
            && self.max_subset_enum > 0;
        if !all_positive {
            return Err(Error::Precondition("oracle limits must be positive".into()));
        }
        // single-word masks
        if self.max_n_exact_chi > 64 || self.max_n_exact_astar > 24 || self.max_perm_enum > 22 {
            return Err(Error::Precondition(
                "oracle limits exceed supported sizes (chi <= 64, astar <= 24, perm <= 22)".into(),
            ));
        }
        Ok(())
    }

    pub(crate) fn guard(what: &'static str, size: usize, limit: usize) -> Result<()> {
        if size > limit {
            return Err(Error::TooLarge {
                what,
                size: size as u128,
                limit: limit as u128,
            });
        }
        Ok(())
    }
}

/// `C(n, k)` saturating at `u128::MAX`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul((n - i) as u128) {
            Some(x) => x / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(binomial(10, 4), 210);
        assert_eq!(binomial(4, 0), 1);
        assert_eq!(binomial(3, 5), 0);
        assert_eq!(binomial(52, 5), 2_598_960);
    }

    #[test]
    fn limit_validation() {
        assert!(OracleLimits::default().validate().is_ok());
        let bad = OracleLimits {
            max_perm_enum: 0,
            ..OracleLimits::default()
        };
        assert!(bad.validate().is_err());
    }
}
