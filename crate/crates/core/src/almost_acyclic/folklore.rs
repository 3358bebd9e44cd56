use super::{measure_chi, ChiMeasure};
use crate::digraph::{Digraph, Permutation};
use crate::error::Result;
use crate::oracles::OracleLimits;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Forward,
    Backward,
}

/// Both acyclic halves `G_π` and `G_{π^rev}` of an order, and the one with
/// the larger chromatic number. Since `χ(G_π)·χ(G_{π^rev}) ≥ χ(G)`, the
/// chosen side has `χ ≥ √χ(G)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FolkloreSplit {
    pub forward: Digraph,
    pub backward: Digraph,
    pub forward_chi: ChiMeasure,
    pub backward_chi: ChiMeasure,
    pub chosen: Side,
    /// `π` or `π^rev`, so that the chosen side is `G_witness`.
    pub witness: Permutation,
}

impl FolkloreSplit {
    pub fn chosen_graph(&self) -> &Digraph {
        match self.chosen {
            Side::Forward => &self.forward,
            Side::Backward => &self.backward,
        }
    }

    pub fn chosen_chi(&self) -> &ChiMeasure {
        match self.chosen {
            Side::Forward => &self.forward_chi,
            Side::Backward => &self.backward_chi,
        }
    }
}

/// Splits `G` along `π`; ties go to the forward side.
pub fn folklore_split(g: &Digraph, pi: &Permutation, limits: &OracleLimits) -> Result<FolkloreSplit> {
    let rev = pi.reversed();
    let forward = g.forward_subgraph(pi)?;
    let backward = g.forward_subgraph(&rev)?;
    let forward_chi = measure_chi(&forward.underlying(), limits);
    let backward_chi = measure_chi(&backward.underlying(), limits);
    let (chosen, witness) = if backward_chi.value > forward_chi.value {
        (Side::Backward, rev)
    } else {
        (Side::Forward, pi.clone())
    };
    Ok(FolkloreSplit {
        forward,
        backward,
        forward_chi,
        backward_chi,
        chosen,
        witness,
    })
}

/// Greedy feedback-arc ordering: sinks go to the back, sources to the
/// front, otherwise the vertex maximizing out-degree minus in-degree moves
/// to the front (lowest id on ties). Acyclic inputs get a topological
/// order.
pub fn greedy_fas_order(g: &Digraph) -> Permutation {
    let n = g.n();
    let mut alive = vec![true; n];
    let mut indeg: Vec<isize> = (0..n).map(|v| g.in_degree(v) as isize).collect();
    let mut outdeg: Vec<isize> = (0..n).map(|v| g.out_degree(v) as isize).collect();
    let mut front = Vec::with_capacity(n);
    let mut back = Vec::new();
    let mut left = n;
    let remove = |v: usize, alive: &mut Vec<bool>, indeg: &mut Vec<isize>, outdeg: &mut Vec<isize>| {
        alive[v] = false;
        for &x in g.out_neighbors(v) {
            indeg[x] -= 1;
        }
        for &x in g.in_neighbors(v) {
            outdeg[x] -= 1;
        }
    };
    while left > 0 {
        if let Some(v) = (0..n).find(|&v| alive[v] && outdeg[v] == 0) {
            back.push(v);
            remove(v, &mut alive, &mut indeg, &mut outdeg);
        } else if let Some(v) = (0..n).find(|&v| alive[v] && indeg[v] == 0) {
            front.push(v);
            remove(v, &mut alive, &mut indeg, &mut outdeg);
        } else {
            let v = (0..n)
                .filter(|&v| alive[v])
                .max_by_key(|&v| (outdeg[v] - indeg[v], std::cmp::Reverse(v)))
                .expect("some vertex is alive");
            front.push(v);
            remove(v, &mut alive, &mut indeg, &mut outdeg);
        }
        left -= 1;
    }
    front.extend(back.into_iter().rev());
    Permutation::from_order(&front).expect("every vertex placed once")
}
