//! Orientations, their underlying graphs, and the permutation-induced
//! acyclic subgraphs `G_π`.

mod generators;
mod io;
mod multipartite;
mod permutation;

pub use generators::{directed_cycle, random_orientation_gnp, random_tournament, transitive_tournament};
pub use io::{read_digraph, write_digraph};
pub use multipartite::{multipartite_bucket_graph, BucketSplit};
pub use permutation::Permutation;

use std::collections::{BTreeSet, BinaryHeap};
use std::cmp::Reverse;

use crate::error::{Error, Result};

/// Words needed for a bit row over `n` vertices.
fn words(n: usize) -> usize {
    n.div_ceil(64).max(1)
}

fn set_bit(row: &mut [u64], v: usize) {
    row[v / 64] |= 1u64 << (v % 64);
}

fn get_bit(row: &[u64], v: usize) -> bool {
    row[v / 64] >> (v % 64) & 1 == 1
}

/// An orientation: a digraph with no self-loops and at most one arc per
/// vertex pair. Vertices are `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Digraph {
    n: usize,
    edges: Vec<(usize, usize)>,
    out_adj: Vec<Vec<usize>>,
    in_adj: Vec<Vec<usize>>,
    out_bits: Vec<Vec<u64>>,
    in_bits: Vec<Vec<u64>>,
}

impl Digraph {
    /// Validates and builds an orientation. Self-loops, anti-parallel pairs
    /// and duplicates are rejected rather than dropped.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let w = words(n);
        let mut out_bits = vec![vec![0u64; w]; n];
        let mut in_bits = vec![vec![0u64; w]; n];
        let mut list = Vec::new();
        for (u, v) in edges {
            for x in [u, v] {
                if x >= n {
                    return Err(Error::VertexOutOfRange { vertex: x, n });
                }
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            if get_bit(&out_bits[u], v) {
                return Err(Error::DuplicateEdge(u, v));
            }
            if get_bit(&out_bits[v], u) {
                return Err(Error::AntiParallel(u, v));
            }
            set_bit(&mut out_bits[u], v);
            set_bit(&mut in_bits[v], u);
            list.push((u, v));
        }
        list.sort_unstable();
        let mut out_adj = vec![Vec::new(); n];
        let mut in_adj = vec![Vec::new(); n];
        for &(u, v) in &list {
            out_adj[u].push(v);
            in_adj[v].push(u);
        }
        for row in &mut in_adj {
            row.sort_unstable();
        }
        Ok(Digraph {
            n,
            edges: list,
            out_adj,
            in_adj,
            out_bits,
            in_bits,
        })
    }

    /// Builds from arcs already known to form an orientation.
    fn from_valid(n: usize, edges: Vec<(usize, usize)>) -> Self {
        Digraph::new(n, edges).expect("edges derived from an orientation")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    /// Arcs in lexicographic order.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn out_neighbors(&self, v: usize) -> &[usize] {
        &self.out_adj[v]
    }

    pub fn in_neighbors(&self, v: usize) -> &[usize] {
        &self.in_adj[v]
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.out_adj[v].len()
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.in_adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && v < self.n && get_bit(&self.out_bits[u], v)
    }

    /// Adjacent in the underlying undirected graph.
    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        self.has_edge(u, v) || self.has_edge(v, u)
    }

    fn check_vertex(&self, v: usize) -> Result<()> {
        if v < self.n {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange { vertex: v, n: self.n })
        }
    }

    /// Out/in adjacency as single-word masks; `None` when `n > 64`.
    pub fn masks(&self) -> Option<DigraphMasks> {
        if self.n > 64 {
            return None;
        }
        Some(DigraphMasks {
            n: self.n,
            out: self.out_bits.iter().map(|r| r[0]).collect(),
            inn: self.in_bits.iter().map(|r| r[0]).collect(),
        })
    }

    pub fn underlying(&self) -> UndirectedGraph {
        UndirectedGraph::from_valid(self.n, self.edges.iter().copied())
    }

    /// Induced subgraph on `vertices` (in the given order), with the map
    /// back to parent vertex ids.
    pub fn induced(&self, vertices: &[usize]) -> Result<Subgraph> {
        let mut local = vec![usize::MAX; self.n];
        for (i, &v) in vertices.iter().enumerate() {
            self.check_vertex(v)?;
            if local[v] != usize::MAX {
                return Err(Error::Precondition(format!("vertex {v} listed twice")));
            }
            local[v] = i;
        }
        let mut edges = Vec::new();
        for &(u, v) in &self.edges {
            if local[u] != usize::MAX && local[v] != usize::MAX {
                edges.push((local[u], local[v]));
            }
        }
        Ok(Subgraph {
            graph: Digraph::from_valid(vertices.len(), edges),
            parent: vertices.to_vec(),
        })
    }

    /// The reverse orientation (every arc flipped).
    pub fn reversed(&self) -> Digraph {
        Digraph::from_valid(self.n, self.edges.iter().map(|&(u, v)| (v, u)).collect())
    }

    /// Returns a topological order (lowest id first among ready vertices)
    /// when the digraph is acyclic.
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        let mut indeg: Vec<usize> = (0..self.n).map(|v| self.in_degree(v)).collect();
        let mut ready: BinaryHeap<Reverse<usize>> =
            (0..self.n).filter(|&v| indeg[v] == 0).map(Reverse).collect();
        let mut order = Vec::with_capacity(self.n);
        while let Some(Reverse(v)) = ready.pop() {
            order.push(v);
            for &x in &self.out_adj[v] {
                indeg[x] -= 1;
                if indeg[x] == 0 {
                    ready.push(Reverse(x));
                }
            }
        }
        (order.len() == self.n).then_some(order)
    }

    pub fn is_acyclic(&self) -> bool {
        self.topological_order().is_some()
    }

    /// `G_π`: arcs `(u, v)` with `π(u) < π(v)`. Always acyclic.
    pub fn forward_subgraph(&self, pi: &Permutation) -> Result<Digraph> {
        self.check_perm(pi)?;
        Ok(Digraph::from_valid(
            self.n,
            self.edges
                .iter()
                .copied()
                .filter(|&(u, v)| pi.rank(u) < pi.rank(v))
                .collect(),
        ))
    }

    /// Number of arcs at `v` oriented against `π`.
    pub fn against_degree(&self, pi: &Permutation, v: usize) -> Result<usize> {
        self.check_perm(pi)?;
        self.check_vertex(v)?;
        let r = pi.rank(v);
        let back_out = self.out_adj[v].iter().filter(|&&x| pi.rank(x) < r).count();
        let back_in = self.in_adj[v].iter().filter(|&&x| pi.rank(x) > r).count();
        Ok(back_out + back_in)
    }

    /// Largest against-degree over all vertices: the `q` certified by `π`.
    pub fn max_against_degree(&self, pi: &Permutation) -> Result<usize> {
        self.check_perm(pi)?;
        Ok(self
            .edges
            .iter()
            .filter(|&&(u, v)| pi.rank(u) > pi.rank(v))
            .fold(vec![0usize; self.n], |mut deg, &(u, v)| {
                deg[u] += 1;
                deg[v] += 1;
                deg
            })
            .into_iter()
            .max()
            .unwrap_or(0))
    }

    fn check_perm(&self, pi: &Permutation) -> Result<()> {
        if pi.len() != self.n {
            return Err(Error::SizeMismatch {
                expected: self.n,
                actual: pi.len(),
            });
        }
        Ok(())
    }

    /// Whether `G[S ∪ W]` admits a topological sort that lists `W` in its
    /// given order, i.e. whether `G[S ∪ W]` plus the chain `w1 → w2 → …`
    /// is acyclic.
    pub fn consistent_topo_exists(&self, free: &[usize], ordered: &OrderedAcyclicSet) -> Result<bool> {
        let mut member = vec![false; self.n];
        for &v in free {
            self.check_vertex(v)?;
            member[v] = true;
        }
        for &w in ordered.vertices() {
            self.check_vertex(w)?;
            if member[w] {
                return Err(Error::Overlap(w));
            }
            member[w] = true;
        }
        let mut succ: Vec<Vec<usize>> = vec![Vec::new(); self.n];
        for &(u, v) in &self.edges {
            if member[u] && member[v] {
                succ[u].push(v);
            }
        }
        for pair in ordered.vertices().windows(2) {
            succ[pair[0]].push(pair[1]);
        }
        Ok(acyclic_lists(&member, &succ))
    }
}

/// Kahn's algorithm over the member vertices of an arbitrary successor
/// relation (parallel arcs and 2-cycles allowed).
fn acyclic_lists(member: &[bool], succ: &[Vec<usize>]) -> bool {
    let mut indeg = vec![0usize; member.len()];
    for (u, row) in succ.iter().enumerate() {
        if member[u] {
            for &v in row {
                indeg[v] += 1;
            }
        }
    }
    let mut stack: Vec<usize> = (0..member.len()).filter(|&v| member[v] && indeg[v] == 0).collect();
    let mut seen = 0;
    while let Some(u) = stack.pop() {
        seen += 1;
        for &v in &succ[u] {
            indeg[v] -= 1;
            if indeg[v] == 0 {
                stack.push(v);
            }
        }
    }
    seen == member.iter().filter(|&&b| b).count()
}

/// Single-word adjacency masks for graphs on at most 64 vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DigraphMasks {
    pub n: usize,
    pub out: Vec<u64>,
    pub inn: Vec<u64>,
}

impl DigraphMasks {
    pub fn full(&self) -> u64 {
        low_mask(self.n)
    }

    /// Whether the subgraph induced on `set` is acyclic (repeated source
    /// removal).
    pub fn is_acyclic_on(&self, set: u64) -> bool {
        let mut rest = set;
        loop {
            if rest == 0 {
                return true;
            }
            let mut sources = 0u64;
            let mut it = rest;
            while it != 0 {
                let v = it.trailing_zeros() as usize;
                it &= it - 1;
                if self.inn[v] & rest == 0 {
                    sources |= 1 << v;
                }
            }
            if sources == 0 {
                return false;
            }
            rest &= !sources;
        }
    }

    /// Acyclicity of `G[set]` plus extra arcs; `extra_in[v]` is the mask of
    /// additional predecessors of `v`.
    pub fn is_acyclic_with(&self, set: u64, extra_in: &[u64]) -> bool {
        let mut rest = set;
        loop {
            if rest == 0 {
                return true;
            }
            let mut sources = 0u64;
            let mut it = rest;
            while it != 0 {
                let v = it.trailing_zeros() as usize;
                it &= it - 1;
                if (self.inn[v] | extra_in[v]) & rest == 0 {
                    sources |= 1 << v;
                }
            }
            if sources == 0 {
                return false;
            }
            rest &= !sources;
        }
    }
}

pub(crate) fn low_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// An induced subgraph together with the parent id of each local vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subgraph {
    pub graph: Digraph,
    pub parent: Vec<usize>,
}

/// A simple undirected graph on `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UndirectedGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<usize>>,
    bits: Vec<Vec<u64>>,
}

impl UndirectedGraph {
    /// Builds a simple graph; pairs are normalized to `(min, max)`,
    /// self-loops and duplicates rejected.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            for x in [u, v] {
                if x >= n {
                    return Err(Error::VertexOutOfRange { vertex: x, n });
                }
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            let key = (u.min(v), u.max(v));
            if !set.insert(key) {
                return Err(Error::DuplicateEdge(key.0, key.1));
            }
        }
        let w = words(n);
        let mut adj = vec![Vec::new(); n];
        let mut bits = vec![vec![0u64; w]; n];
        for &(u, v) in &set {
            adj[u].push(v);
            adj[v].push(u);
            set_bit(&mut bits[u], v);
            set_bit(&mut bits[v], u);
        }
        for row in &mut adj {
            row.sort_unstable();
        }
        Ok(UndirectedGraph {
            n,
            edges: set.into_iter().collect(),
            adj,
            bits,
        })
    }

    fn from_valid(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        UndirectedGraph::new(n, edges).expect("edges derived from a simple graph")
    }

    pub fn empty(n: usize) -> Self {
        UndirectedGraph::from_valid(n, std::iter::empty())
    }

    pub fn complete(n: usize) -> Self {
        UndirectedGraph::from_valid(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    /// Edges as `(min, max)` pairs in lexicographic order.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        u < self.n && v < self.n && get_bit(&self.bits[u], v)
    }

    /// Neighborhood masks; `None` when `n > 64`.
    pub fn masks(&self) -> Option<Vec<u64>> {
        (self.n <= 64).then(|| self.bits.iter().map(|r| r[0]).collect())
    }

    pub fn induced(&self, vertices: &[usize]) -> UndirectedGraph {
        let mut local = vec![usize::MAX; self.n];
        for (i, &v) in vertices.iter().enumerate() {
            local[v] = i;
        }
        UndirectedGraph::from_valid(
            vertices.len(),
            self.edges
                .iter()
                .filter(|&&(u, v)| local[u] != usize::MAX && local[v] != usize::MAX)
                .map(|&(u, v)| (local[u], local[v])),
        )
    }
}

/// Distinct vertices `w1..wi` listed in a topological order of the
/// subgraph they induce.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct OrderedAcyclicSet {
    seq: Vec<usize>,
}

impl OrderedAcyclicSet {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Checks distinctness and that every arc inside the set goes forward.
    pub fn new(g: &Digraph, seq: Vec<usize>) -> Result<Self> {
        let mut pos = vec![usize::MAX; g.n()];
        for (i, &v) in seq.iter().enumerate() {
            g.check_vertex(v)?;
            if pos[v] != usize::MAX {
                return Err(Error::Precondition(format!("vertex {v} repeated in ordered set")));
            }
            pos[v] = i;
        }
        for &(u, v) in g.edges() {
            if pos[u] != usize::MAX && pos[v] != usize::MAX && pos[u] > pos[v] {
                return Err(Error::Precondition(format!(
                    "arc ({u}, {v}) runs backwards in the ordered set"
                )));
            }
        }
        Ok(OrderedAcyclicSet { seq })
    }

    pub fn vertices(&self) -> &[usize] {
        &self.seq
    }

    pub fn len(&self) -> usize {
        self.seq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seq.is_empty()
    }

    /// Inserts `w` after the first `bin` vertices (wall between bins
    /// `bin` and `bin + 1`), re-validating the ordering.
    pub fn insert_at_bin(&self, g: &Digraph, bin: usize, w: usize) -> Result<Self> {
        if bin > self.seq.len() {
            return Err(Error::Precondition(format!(
                "bin {bin} out of range for {} walls",
                self.seq.len()
            )));
        }
        let mut seq = self.seq.clone();
        seq.insert(bin, w);
        OrderedAcyclicSet::new(g, seq)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c3() -> Digraph {
        Digraph::new(3, [(0, 1), (1, 2), (2, 0)]).unwrap()
    }

    #[test]
    fn construction_errors() {
        assert_eq!(Digraph::new(2, [(0, 1), (1, 0)]), Err(Error::AntiParallel(1, 0)));
        assert_eq!(Digraph::new(2, [(1, 1)]), Err(Error::SelfLoop(1)));
        assert_eq!(Digraph::new(2, [(0, 1), (0, 1)]), Err(Error::DuplicateEdge(0, 1)));
        assert_eq!(
            Digraph::new(2, [(0, 2)]),
            Err(Error::VertexOutOfRange { vertex: 2, n: 2 })
        );
    }

    #[test]
    fn adjacency_matches_edges() {
        let g = transitive_tournament(4);
        assert_eq!(g.m(), 6);
        assert_eq!(g.out_neighbors(1), &[2, 3]);
        assert_eq!(g.in_neighbors(3), &[0, 1, 2]);
        assert!(g.has_edge(0, 3) && !g.has_edge(3, 0));
        assert!(g.adjacent(3, 0));
    }

    #[test]
    fn acyclicity() {
        assert!(!c3().is_acyclic());
        assert_eq!(transitive_tournament(4).topological_order(), Some(vec![0, 1, 2, 3]));
        assert_eq!(Digraph::new(1, []).unwrap().topological_order(), Some(vec![0]));
    }

    #[test]
    fn forward_subgraph_examples() {
        let id3 = Permutation::identity(3);
        let f = c3().forward_subgraph(&id3).unwrap();
        assert_eq!(f.edges(), &[(0, 1), (1, 2)]);
        let t4 = transitive_tournament(4);
        assert_eq!(t4.forward_subgraph(&Permutation::identity(4)).unwrap(), t4);
        assert_eq!(t4.forward_subgraph(&Permutation::identity(4).reversed()).unwrap().m(), 0);
        assert!(matches!(
            t4.forward_subgraph(&id3),
            Err(Error::SizeMismatch { expected: 4, actual: 3 })
        ));
    }

    #[test]
    fn against_degree_examples() {
        let t4 = transitive_tournament(4);
        let id4 = Permutation::identity(4);
        for v in 0..4 {
            assert_eq!(t4.against_degree(&id4, v).unwrap(), 0);
        }
        let id3 = Permutation::identity(3);
        assert_eq!(c3().against_degree(&id3, 0).unwrap(), 1);
        assert_eq!(c3().against_degree(&id3, 1).unwrap(), 0);
        assert_eq!(c3().against_degree(&id3, 2).unwrap(), 1);
        assert_eq!(c3().max_against_degree(&id3).unwrap(), 1);
        assert!(c3().against_degree(&id3, 3).is_err());
    }

    #[test]
    fn consistent_topo_examples() {
        let t4 = transitive_tournament(4);
        let w01 = OrderedAcyclicSet::new(&t4, vec![0, 1]).unwrap();
        assert!(t4.consistent_topo_exists(&[2, 3], &w01).unwrap());
        let w1 = OrderedAcyclicSet::new(&t4, vec![1]).unwrap();
        assert!(t4.consistent_topo_exists(&[0], &w1).unwrap());
        assert!(!c3().consistent_topo_exists(&[0, 1, 2], &OrderedAcyclicSet::empty()).unwrap());
        assert_eq!(t4.consistent_topo_exists(&[1], &w1), Err(Error::Overlap(1)));
    }

    #[test]
    fn chain_arcs_can_conflict_with_graph() {
        // 0 and 2 not adjacent; 2 -> 1 -> 0 forces 2 before 0.
        let g = Digraph::new(3, [(2, 1), (1, 0)]).unwrap();
        let w = OrderedAcyclicSet::new(&g, vec![0, 2]).unwrap();
        assert!(!g.consistent_topo_exists(&[1], &w).unwrap());
        assert!(g.consistent_topo_exists(&[], &w).unwrap());
    }

    #[test]
    fn ordered_set_rejects_backward_arc() {
        let t4 = transitive_tournament(4);
        assert!(OrderedAcyclicSet::new(&t4, vec![1, 0]).is_err());
        let w = OrderedAcyclicSet::new(&t4, vec![0, 3]).unwrap();
        assert_eq!(w.insert_at_bin(&t4, 1, 2).unwrap().vertices(), &[0, 2, 3]);
        assert!(w.insert_at_bin(&t4, 0, 2).is_err());
    }

    #[test]
    fn masks_acyclicity() {
        let m = c3().masks().unwrap();
        assert!(!m.is_acyclic_on(0b111));
        assert!(m.is_acyclic_on(0b011));
        let extra = vec![0, 0, 0];
        assert!(m.is_acyclic_with(0b110, &extra));
    }

    #[test]
    fn induced_relabels() {
        let g = transitive_tournament(5);
        let sub = g.induced(&[4, 1, 3]).unwrap();
        assert_eq!(sub.parent, vec![4, 1, 3]);
        assert_eq!(sub.graph.edges(), &[(1, 0), (1, 2), (2, 0)]);
    }
}
