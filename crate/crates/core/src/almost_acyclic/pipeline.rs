use rand::seq::index;

use super::block::block_permutation_construct;
use super::folklore::{folklore_split, greedy_fas_order};
use super::refine::{iterate_reduce, RefineError};
use super::search::random_perm_search;
use super::measure_chi;
use crate::digraph::{Digraph, Permutation, Subgraph};
use crate::error::{Error, Result};
use crate::oracles::{
    self, binomial, clique_cover_upper_bound, clique_lower_bound, count_acyclic_ksets, gallai_threshold_ln, Coloring,
    OracleLimits,
};
use crate::rng;

/// Inputs of [`main_pipeline`].
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineParams {
    /// Bound with `α(G) < s` and `α*(G) < s`.
    pub s: usize,
    /// Target set size; `round(n^{4/9}·s^{14/9})` when unset.
    pub k: Option<usize>,
    /// The folklore branch runs when `s ≥ n^exponent`.
    pub s_threshold_exponent: f64,
    pub folklore_trials: u64,
    pub search_trials: u64,
    pub block_retries: u64,
    /// Uniform k-subsets drawn when the acyclic k-set count is too large to
    /// enumerate.
    pub kset_samples: u64,
    pub seed: u64,
    pub limits: OracleLimits,
}

impl PipelineParams {
    pub fn new(s: usize, seed: u64) -> Self {
        PipelineParams {
            s,
            k: None,
            s_threshold_exponent: 1.0 / 19.0,
            folklore_trials: 32,
            search_trials: 200,
            block_retries: 16,
            kset_samples: 20_000,
            seed,
            limits: OracleLimits::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.s == 0 || self.k == Some(0) {
            return Err(Error::Precondition("s and k must be at least 1".into()));
        }
        if self.folklore_trials == 0 || self.search_trials == 0 || self.block_retries == 0 || self.kset_samples == 0 {
            return Err(Error::Precondition("trial budgets must be at least 1".into()));
        }
        if !(self.s_threshold_exponent.is_finite() && self.s_threshold_exponent > 0.0) {
            return Err(Error::Precondition("threshold exponent must be positive".into()));
        }
        self.limits.validate()
    }
}

/// `round(n^{4/9}·s^{14/9})`, clamped to `1..=n`.
pub fn default_k(n: usize, s: usize) -> usize {
    let k = (n as f64).powf(4.0 / 9.0) * (s as f64).powf(14.0 / 9.0);
    (k.round() as usize).clamp(1, n.max(1))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Folklore,
    FewKsets,
    ExtractThenOrder,
}

impl Branch {
    pub fn as_str(&self) -> &'static str {
        match self {
            Branch::Folklore => "folklore",
            Branch::FewKsets => "few-ksets",
            Branch::ExtractThenOrder => "extract-then-order",
        }
    }
}

/// Number of acyclic `k`-sets, compared with `(k/(s·e))^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct KsetCount {
    pub k: usize,
    pub value: f64,
    pub exact: bool,
    /// 95% interval of a sampled estimate.
    pub interval: Option<(f64, f64)>,
    pub ln_threshold: f64,
    /// The count (the interval's upper end when sampled) is below the
    /// threshold.
    pub below: bool,
}

/// The almost-acyclic subgraph `G''` with the order certifying `q`.
#[derive(Debug, Clone, PartialEq)]
pub struct AlmostAcyclicWitness {
    pub graph: Subgraph,
    pub order: Permutation,
    pub q: usize,
    /// Block-shuffled order of `G''`.
    pub block_pi: Permutation,
    pub blocks: usize,
    pub rounds: usize,
}

/// `q` against the validity window, logged only.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QWindow {
    pub n_prime: usize,
    pub q: usize,
    /// `(n')^{1/3}·s^{−2/3}`.
    pub lower: f64,
    pub meets_lower: bool,
    /// `ln q / ln n'`, below 1 when `q` is a proper power of `n'`.
    pub exponent: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PreconditionCheck {
    pub alpha: Option<usize>,
    pub alpha_star: Option<usize>,
    /// `α < s` and `α* < s`, when both were computed.
    pub holds: Option<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineResult {
    /// Branch that produced the output.
    pub branch: Branch,
    /// Branch selected before any fallback.
    pub intended: Branch,
    pub degraded: Vec<String>,
    pub witness: Permutation,
    /// `G_witness`.
    pub subgraph: Digraph,
    pub coloring: Coloring,
    pub coloring_optimal: bool,
    /// Certified lower bound on `χ(subgraph)`.
    pub lower_bound: usize,
    /// `n/k` for the few-k-sets branch.
    pub branch_bound: Option<f64>,
    pub k: usize,
    pub ksets: Option<KsetCount>,
    pub almost: Option<AlmostAcyclicWitness>,
    pub q_window: Option<QWindow>,
    pub precondition: PreconditionCheck,
}

fn precondition(g: &Digraph, s: usize, limits: &OracleLimits) -> PreconditionCheck {
    let h = g.underlying();
    let alpha = oracles::independence_number_exact(&h, limits).ok();
    let alpha_star = oracles::bipartite_independence_number_exact(&h, limits).ok();
    let holds = match (alpha, alpha_star) {
        (Some(a), Some(b)) => Some(a < s && b < s),
        _ => None,
    };
    PreconditionCheck {
        alpha,
        alpha_star,
        holds,
    }
}

/// Exact χ when in range, else `max(ω, ⌈n/ᾱ⌉)` with `ᾱ` a clique-cover
/// upper bound on `α`.
fn certify(sub: &Digraph, limits: &OracleLimits) -> (Coloring, bool, usize) {
    let h = sub.underlying();
    let chi = measure_chi(&h, limits);
    let lower = if chi.exact {
        chi.value
    } else {
        let a = clique_cover_upper_bound(&h).max(1);
        clique_lower_bound(&h).max(h.n().div_ceil(a))
    };
    (chi.coloring, chi.exact, lower)
}

fn count_ksets(g: &Digraph, k: usize, params: &PipelineParams) -> Result<KsetCount> {
    let n = g.n();
    let ln_threshold = gallai_threshold_ln(k, params.s);
    let total = binomial(n, k);
    if n <= 64 && total <= params.limits.max_subset_enum {
        let c = count_acyclic_ksets(g, k, &params.limits)?;
        return Ok(KsetCount {
            k,
            value: c as f64,
            exact: true,
            interval: None,
            ln_threshold,
            below: (c as f64).ln() < ln_threshold,
        });
    }
    let mut r = rng::stream(rng::child_seed(params.seed, 3), 0);
    let samples = params.kset_samples;
    let mut hits = 0u64;
    for _ in 0..samples {
        let set = index::sample(&mut r, n, k).into_vec();
        if g.induced(&set)?.graph.is_acyclic() {
            hits += 1;
        }
    }
    let est = oracles::McEstimate::from_hits(hits, samples);
    let scale = total as f64;
    let lo = (est.mean - 1.96 * est.std_error).max(0.0) * scale;
    let hi = (est.mean + 1.96 * est.std_error).min(1.0) * scale;
    Ok(KsetCount {
        k,
        value: est.mean * scale,
        exact: false,
        interval: Some((lo, hi)),
        ln_threshold,
        below: hi.ln() < ln_threshold,
    })
}

/// Best split over a greedy feedback-arc order followed by uniform
/// orders; larger χ wins, then more arcs, then the earlier candidate.
fn folklore_branch(g: &Digraph, params: &PipelineParams) -> Result<(Permutation, Digraph)> {
    let n = g.n();
    let seed = rng::child_seed(params.seed, 1);
    let mut best: Option<((usize, usize), Permutation, Digraph)> = None;
    for t in 0..params.folklore_trials {
        let pi = if t == 0 {
            greedy_fas_order(g)
        } else {
            Permutation::from_order(&rng::shuffled(n, &mut rng::stream(seed, t)))?
        };
        let split = folklore_split(g, &pi, &params.limits)?;
        let key = (split.chosen_chi().value, split.chosen_graph().m());
        if best.as_ref().is_none_or(|b| key > b.0) {
            let graph = split.chosen_graph().clone();
            best = Some((key, split.witness, graph));
        }
    }
    let (_, pi, sub) = best.expect("trials >= 1");
    Ok((pi, sub))
}

/// Branch logic: the folklore split when `s ≥ n^exponent`; a permutation
/// search when acyclic `k`-sets are scarce; otherwise extraction of an
/// almost-acyclic subgraph followed by a block permutation. Any failure
/// falls back to the folklore split and is listed in `degraded`.
pub fn main_pipeline(g: &Digraph, params: &PipelineParams) -> Result<PipelineResult> {
    params.validate()?;
    let n = g.n();
    let s = params.s;
    let k = params.k.unwrap_or_else(|| default_k(n, s)).clamp(1, n.max(1));
    let mut result = PipelineResult {
        branch: Branch::Folklore,
        intended: Branch::Folklore,
        degraded: Vec::new(),
        witness: Permutation::identity(n),
        subgraph: g.forward_subgraph(&Permutation::identity(n))?,
        coloring: Coloring::normalized(vec![0; n]),
        coloring_optimal: false,
        lower_bound: 0,
        branch_bound: None,
        k,
        ksets: None,
        almost: None,
        q_window: None,
        precondition: precondition(g, s, &params.limits),
    };

    let mut produced: Option<(Permutation, Digraph)> = None;
    if n > 0 && (s as f64) < (n as f64).powf(params.s_threshold_exponent) {
        match count_ksets(g, k, params) {
            Ok(count) => {
                let below = count.below;
                result.ksets = Some(count);
                if below {
                    result.intended = Branch::FewKsets;
                    let found =
                        random_perm_search(g, k, params.search_trials, rng::child_seed(params.seed, 2), &params.limits)?;
                    if found.success {
                        result.branch = Branch::FewKsets;
                        result.branch_bound = Some(n as f64 / k as f64);
                        let sub = g.forward_subgraph(&found.best)?;
                        produced = Some((found.best, sub));
                    } else {
                        result.degraded.push(format!(
                            "permutation search found alpha {} > k = {k} after {} trials",
                            found.alpha.value, found.trials
                        ));
                    }
                } else {
                    result.intended = Branch::ExtractThenOrder;
                    match extract_then_order(g, k, params) {
                        Ok((pi, witness)) => {
                            result.branch = Branch::ExtractThenOrder;
                            let n_prime = witness.graph.graph.n();
                            let lower = (n_prime as f64).cbrt() * (s as f64).powf(-2.0 / 3.0);
                            result.q_window = Some(QWindow {
                                n_prime,
                                q: witness.q,
                                lower,
                                meets_lower: witness.q as f64 >= lower,
                                exponent: (witness.q.max(1) as f64).ln() / (n_prime.max(2) as f64).ln(),
                            });
                            result.almost = Some(witness);
                            let sub = g.forward_subgraph(&pi)?;
                            produced = Some((pi, sub));
                        }
                        Err(reason) => result.degraded.push(reason),
                    }
                }
            }
            Err(e) => result.degraded.push(format!("acyclic k-set count unavailable: {e}")),
        }
    }
    let (pi, sub) = match produced {
        Some(p) => p,
        None => {
            result.branch = Branch::Folklore;
            folklore_branch(g, params)?
        }
    };
    let (coloring, optimal, lower) = certify(&sub, &params.limits);
    result.witness = pi;
    result.subgraph = sub;
    result.coloring = coloring;
    result.coloring_optimal = optimal;
    result.lower_bound = lower;
    Ok(result)
}

fn extract_then_order(
    g: &Digraph,
    k: usize,
    params: &PipelineParams,
) -> std::result::Result<(Permutation, AlmostAcyclicWitness), String> {
    let reduced = match iterate_reduce(g, k, params.s, &params.limits) {
        Ok(r) => r,
        Err(RefineError::DeadEnd { step, reason, .. }) => return Err(format!("extraction dead end at step {step}: {reason}")),
        Err(RefineError::Invalid(e)) => return Err(format!("extraction unavailable: {e}")),
    };
    let gpp = &reduced.graph;
    if gpp.graph.n() == 0 {
        return Err("extraction left no white vertices".into());
    }
    let blocks = block_permutation_construct(
        &gpp.graph,
        &reduced.order,
        reduced.q.max(1),
        params.block_retries,
        rng::child_seed(params.seed, 4),
        &params.limits,
    )
    .map_err(|e| format!("block permutation failed: {e}"))?;
    let mut order: Vec<usize> = blocks.pi.order().into_iter().map(|v| gpp.parent[v]).collect();
    let mut inside = vec![false; g.n()];
    for &v in &order {
        inside[v] = true;
    }
    order.extend((0..g.n()).filter(|&v| !inside[v]));
    let pi = Permutation::from_order(&order).map_err(|e| e.to_string())?;
    Ok((
        pi,
        AlmostAcyclicWitness {
            graph: reduced.graph.clone(),
            order: reduced.order,
            q: reduced.q,
            block_pi: blocks.pi,
            blocks: blocks.plan.t(),
            rounds: reduced.rounds.len(),
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digraph::{directed_cycle, random_tournament, transitive_tournament};
    use crate::oracles::f_exact;

    fn check(g: &Digraph, r: &PipelineResult) {
        assert!(r.subgraph.is_acyclic());
        assert_eq!(g.forward_subgraph(&r.witness).unwrap(), r.subgraph);
        assert!(r.coloring.is_proper(&r.subgraph.underlying()));
        assert!(r.lower_bound <= r.coloring.num_colors);
    }

    #[test]
    fn default_k_values() {
        assert_eq!(default_k(9, 1), 3);
        assert_eq!(default_k(1, 5), 1);
        assert_eq!(default_k(100, 1), 8);
    }

    #[test]
    fn transitive_input() {
        let g = transitive_tournament(7);
        let r = main_pipeline(&g, &PipelineParams::new(2, 1)).unwrap();
        check(&g, &r);
        assert_eq!(r.lower_bound, 7);
        assert_eq!(r.subgraph, g);
    }

    #[test]
    fn c3_s2() {
        let g = directed_cycle(3);
        let r = main_pipeline(&g, &PipelineParams::new(2, 0)).unwrap();
        check(&g, &r);
        assert_eq!(r.lower_bound, 2);
        assert_eq!(r.subgraph.m(), 2);
        assert_eq!(r.precondition.holds, Some(true));
    }

    #[test]
    fn random_tournament_n9() {
        let g = random_tournament(9, 11);
        let r = main_pipeline(&g, &PipelineParams::new(1, 5)).unwrap();
        check(&g, &r);
        assert!(r.lower_bound >= 3);
        let f = f_exact(&g, &OracleLimits::default()).unwrap().f;
        assert!(r.lower_bound <= f);
    }

    #[test]
    fn extract_branch_runs() {
        let g = random_tournament(12, 3);
        let mut p = PipelineParams::new(1, 9);
        p.k = Some(3);
        let r = main_pipeline(&g, &p).unwrap();
        check(&g, &r);
        assert_eq!(r.intended, Branch::ExtractThenOrder);
        if let Some(w) = &r.almost {
            let induced = g.induced(&w.graph.parent).unwrap().graph;
            assert_eq!(induced, w.graph.graph);
            assert!(induced.max_against_degree(&w.order).unwrap() <= w.q);
        } else {
            assert!(!r.degraded.is_empty());
        }
    }

    #[test]
    fn deterministic() {
        let g = random_tournament(10, 2);
        let p = PipelineParams::new(1, 4);
        assert_eq!(main_pipeline(&g, &p).unwrap(), main_pipeline(&g, &p).unwrap());
    }

    #[test]
    fn rejects_bad_params() {
        let g = directed_cycle(3);
        assert!(main_pipeline(&g, &PipelineParams::new(0, 0)).is_err());
        let mut p = PipelineParams::new(1, 0);
        p.search_trials = 0;
        assert!(main_pipeline(&g, &p).is_err());
    }
}
