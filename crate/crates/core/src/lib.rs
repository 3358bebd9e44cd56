//! Acyclic subgraphs of orientations with large chromatic number.
//!
//! * [`digraph`]: orientations, permutations, `G_π`, generators, text I/O.
//! * [`oracles`]: exact small-instance χ, α, α*, `f(G)`, acyclic k-set
//!   counts and edgeless-`G_π` probabilities.
//! * [`pathcover`]: Gallai–Milgram path covers.
//! * [`almost_acyclic`]: the folklore split, random permutation search,
//!   block permutations, the bin refinement/alignment procedure, and the
//!   end-to-end pipeline.
//!
//! Logarithms are natural throughout.

pub mod almost_acyclic;
pub mod digraph;
pub mod error;
pub mod oracles;
pub mod pathcover;
pub mod rng;

pub use digraph::{Digraph, OrderedAcyclicSet, Permutation, UndirectedGraph};
pub use error::{Error, Result};
pub use oracles::{Coloring, OracleLimits};
pub use pathcover::PathCover;
