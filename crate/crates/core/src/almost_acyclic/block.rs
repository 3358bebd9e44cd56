use std::ops::Range;

use rand::seq::SliceRandom;
use rayon::prelude::*;

use super::{measure_alpha, AlphaMeasure};
use crate::digraph::{Digraph, Permutation};
use crate::error::{Error, Result};
use crate::oracles::OracleLimits;
use crate::rng;

/// A base order `σ` cut into `t` contiguous rank intervals, with the
/// against-sets `B(v)` of every vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockPlan {
    pub sigma: Permutation,
    pub q: usize,
    pub blocks: Vec<Range<usize>>,
    /// `x ∈ B(v)` iff the arc between `v` and `x` points against `σ`.
    pub against: Vec<Vec<usize>>,
}

impl BlockPlan {
    /// Uses `t = max(1, round(√(n/q)))` blocks unless `block_count` is
    /// given. Fails if some `|B(v)| > q`.
    pub fn new(g: &Digraph, sigma: Permutation, q: usize, block_count: Option<usize>) -> Result<Self> {
        let n = g.n();
        if sigma.len() != n {
            return Err(Error::SizeMismatch {
                expected: n,
                actual: sigma.len(),
            });
        }
        if q == 0 {
            return Err(Error::Precondition("q must be at least 1".into()));
        }
        let mut against = vec![Vec::new(); n];
        for &(u, v) in g.edges() {
            if sigma.rank(u) > sigma.rank(v) {
                against[u].push(v);
                against[v].push(u);
            }
        }
        for (v, b) in against.iter_mut().enumerate() {
            b.sort_unstable();
            if b.len() > q {
                return Err(Error::Precondition(format!(
                    "vertex {v} has {} arcs against the base order, more than q = {q}",
                    b.len()
                )));
            }
        }
        let t = block_count
            .unwrap_or_else(|| ((n as f64 / q as f64).sqrt().round() as usize).max(1))
            .clamp(1, n.max(1));
        let size = n / t;
        let blocks = (0..t)
            .map(|i| i * size..if i + 1 == t { n } else { (i + 1) * size })
            .collect();
        Ok(BlockPlan {
            sigma,
            q,
            blocks,
            against,
        })
    }

    pub fn t(&self) -> usize {
        self.blocks.len()
    }

    /// Block index of a rank of `σ`.
    pub fn block_of_rank(&self, r: usize) -> usize {
        self.blocks.iter().position(|b| b.contains(&r)).expect("blocks partition the ranks")
    }

    /// `σ` with every block shuffled independently.
    pub fn shuffle(&self, rng: &mut rng::Rng) -> Permutation {
        let mut order = self.sigma.order();
        for b in &self.blocks {
            order[b.clone()].shuffle(rng);
        }
        Permutation::from_order(&order).expect("block shuffles preserve a permutation")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockPermutation {
    pub plan: BlockPlan,
    pub pi: Permutation,
    pub alpha: AlphaMeasure,
    pub retry: u64,
    pub retries: u64,
}

pub fn block_permutation_construct(
    g: &Digraph,
    sigma: &Permutation,
    q: usize,
    retries: u64,
    seed: u64,
    limits: &OracleLimits,
) -> Result<BlockPermutation> {
    let plan = BlockPlan::new(g, sigma.clone(), q, None)?;
    block_permutation_with_plan(g, plan, retries, seed, limits)
}

/// Shuffles within the blocks of `plan` `retries` times and keeps the `π`
/// minimizing the measured `α(G_π)`, earliest retry on ties.
pub fn block_permutation_with_plan(
    g: &Digraph,
    plan: BlockPlan,
    retries: u64,
    seed: u64,
    limits: &OracleLimits,
) -> Result<BlockPermutation> {
    if retries == 0 {
        return Err(Error::Precondition("retries must be at least 1".into()));
    }
    let (alpha, retry) = (0..retries)
        .into_par_iter()
        .map(|r| {
            let pi = plan.shuffle(&mut rng::stream(seed, r));
            let sub = g.forward_subgraph(&pi).expect("sizes match");
            (measure_alpha(&sub.underlying(), limits), r)
        })
        .min_by_key(|(a, r)| (a.value, *r))
        .expect("retries >= 1");
    let pi = plan.shuffle(&mut rng::stream(seed, retry));
    Ok(BlockPermutation {
        plan,
        pi,
        alpha,
        retry,
        retries,
    })
}
