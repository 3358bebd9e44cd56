//! Constructions that extract acyclic subgraphs with large chromatic
//! number: the folklore two-sided split, uniform permutation search, block
//! permutations of almost-acyclic orientations, the bin
//! refinement/alignment procedure, and the pipeline tying them together.

mod block;
mod folklore;
mod pipeline;
mod refine;
mod search;

pub use block::{block_permutation_construct, block_permutation_with_plan, BlockPermutation, BlockPlan};
pub use folklore::{folklore_split, greedy_fas_order, FolkloreSplit, Side};
pub use pipeline::{
    default_k, main_pipeline, AlmostAcyclicWitness, Branch, KsetCount, PipelineParams, PipelineResult,
    PreconditionCheck, QWindow,
};
pub use refine::{
    allowed_interval, iterate_reduce, refine_align, BinState, Interval, Phase, ReduceOutcome, RefineError,
    RefineOutcome, RefineTrace, StepRecord,
};
pub use search::{
    alpha_gpi_tail_mc, high_inout_vertex, independent_kset_mc, random_perm_search, union_bound_independent_ksets,
    AlphaTail, PermSearch, SampleMean,
};

use crate::digraph::UndirectedGraph;
use crate::oracles::{self, Coloring, OracleLimits, OrderPolicy};

/// A chromatic number: exact when the oracle was in range, otherwise the
/// size of a greedy coloring (an upper bound).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChiMeasure {
    pub value: usize,
    pub exact: bool,
    pub coloring: Coloring,
}

pub fn measure_chi(h: &UndirectedGraph, limits: &OracleLimits) -> ChiMeasure {
    if h.n() <= limits.max_n_exact_chi {
        if let Ok((value, coloring)) = oracles::chromatic_number_exact(h, limits) {
            return ChiMeasure {
                value,
                exact: true,
                coloring,
            };
        }
    }
    let coloring = oracles::greedy_coloring(h, OrderPolicy::Dsatur);
    ChiMeasure {
        value: coloring.num_colors,
        exact: false,
        coloring,
    }
}

/// An independence number: exact in range, otherwise a clique-cover upper
/// bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AlphaMeasure {
    pub value: usize,
    pub exact: bool,
}

pub fn measure_alpha(h: &UndirectedGraph, limits: &OracleLimits) -> AlphaMeasure {
    if h.n() <= limits.max_n_exact_chi {
        if let Ok(value) = oracles::independence_number_exact(h, limits) {
            return AlphaMeasure { value, exact: true };
        }
    }
    AlphaMeasure {
        value: oracles::clique_cover_upper_bound(h),
        exact: false,
    }
}
