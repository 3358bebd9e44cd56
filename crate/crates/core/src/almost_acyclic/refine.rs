//! Bin refinement and alignment.
//!
//! An ordered acyclic set `W = (w_1, …, w_i)` acts as `i` internal walls
//! separating bins `0..=i`. Every other vertex `v` has an interval of
//! allowed bins `{j..j'}`: `j` is the position of its last in-neighbor in
//! `W` (0 if none) and `j' + 1` the position of its first out-neighbor
//! (`j' = i` if none). The hypergraph `H'_i` holds the `(k−i)`-subsets `S`
//! of `V'_i` such that `G[S ∪ W]` has a topological sort listing `W` in
//! order; `H_i` is obtained by peeling vertices of small degree.
//!
//! Each step inserts one vertex `w` of `V_i` as a new wall inside one of
//! its allowed bins, removes the vertices incompatible with `w`, and turns
//! black any white vertex whose interval grew past `2s` bins. The first
//! `z` steps refine the most crowded bin; later steps align a white vertex
//! incompatible with many others, until none qualifies.

use std::fmt::Write as _;

use super::search::high_inout_vertex;
use crate::digraph::{Digraph, DigraphMasks, Permutation, Subgraph};
use crate::error::{Error, Result};
use crate::oracles::{binomial, for_each_kset, OracleLimits};

/// A non-empty interval `lo..=hi` of allowed bins.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Interval {
    pub lo: usize,
    pub hi: usize,
}

impl Interval {
    pub fn width(&self) -> usize {
        self.hi - self.lo + 1
    }

    pub fn contains(&self, bin: usize) -> bool {
        self.lo <= bin && bin <= self.hi
    }
}

/// Allowed bins of `v` with respect to the walls `walls`, or `None` when an
/// in-neighbor of `v` comes after an out-neighbor.
pub fn allowed_interval(g: &Digraph, walls: &[usize], v: usize) -> Option<Interval> {
    let mut lo = 0;
    let mut first_out = None;
    for (idx, &w) in walls.iter().enumerate() {
        if g.has_edge(w, v) {
            lo = idx + 1;
        }
        if first_out.is_none() && g.has_edge(v, w) {
            first_out = Some(idx + 1);
        }
    }
    let hi = first_out.map_or(walls.len(), |f| f - 1);
    (lo <= hi).then_some(Interval { lo, hi })
}

fn bit(v: usize) -> u64 {
    1u64 << v
}

fn members(mut set: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if set == 0 {
            return None;
        }
        let v = set.trailing_zeros() as usize;
        set &= set - 1;
        Some(v)
    })
}

/// Walls, allowed intervals, colors, the current vertex sets and the
/// maintained counts `X_j` of white vertices of `V_i` allowing bin `j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinState {
    pub walls: Vec<usize>,
    /// `None` for walls and for vertices with no allowed bin.
    pub allowed: Vec<Option<Interval>>,
    pub white: Vec<bool>,
    pub v_current: u64,
    pub v_prime: u64,
    pub x: Vec<usize>,
}

impl BinState {
    fn initial(n: usize) -> Self {
        BinState {
            walls: Vec::new(),
            allowed: vec![Some(Interval { lo: 0, hi: 0 }); n],
            white: vec![true; n],
            v_current: 0,
            v_prime: crate::digraph::low_mask(n),
            x: vec![0],
        }
    }

    pub fn step(&self) -> usize {
        self.walls.len()
    }

    pub fn wall_mask(&self) -> u64 {
        self.walls.iter().fold(0, |m, &w| m | bit(w))
    }

    /// Black vertices outside `W`.
    pub fn blacks(&self) -> usize {
        let walls = self.wall_mask();
        (0..self.white.len()).filter(|&v| !self.white[v] && walls & bit(v) == 0).count()
    }

    fn tracked(&self, v: usize) -> bool {
        self.white[v] && self.v_current & bit(v) != 0
    }

    pub fn recompute_allowed(&self, g: &Digraph) -> Vec<Option<Interval>> {
        let walls = self.wall_mask();
        (0..g.n())
            .map(|v| {
                if walls & bit(v) != 0 {
                    None
                } else {
                    allowed_interval(g, &self.walls, v)
                }
            })
            .collect()
    }

    pub fn recompute_x(&self) -> Vec<usize> {
        let mut x = vec![0; self.step() + 1];
        for v in members(self.v_current) {
            if self.white[v] {
                add(&mut x, self.allowed[v], 1);
            }
        }
        x
    }

    /// Maintained intervals and counts agree with a fresh computation.
    pub fn consistent(&self, g: &Digraph) -> bool {
        self.allowed == self.recompute_allowed(g) && self.x == self.recompute_x()
    }

    /// Chain `w_1 → w_2 → …` as extra predecessor masks.
    fn chain(&self, n: usize) -> Vec<u64> {
        let mut extra = vec![0u64; n];
        for pair in self.walls.windows(2) {
            extra[pair[1]] |= bit(pair[0]);
        }
        extra
    }
}

fn add(x: &mut [usize], iv: Option<Interval>, sign: isize) {
    if let Some(iv) = iv {
        for c in &mut x[iv.lo..=iv.hi] {
            *c = (*c as isize + sign) as usize;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Refine,
    Align,
}

impl Phase {
    pub fn as_str(&self) -> &'static str {
        match self {
            Phase::Refine => "refine",
            Phase::Align => "align",
        }
    }
}

/// One executed step `i → i+1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepRecord {
    pub step: usize,
    pub phase: Phase,
    /// `|V'_i|`.
    pub v_prime: usize,
    /// `|V_i|`.
    pub v_size: usize,
    /// `N'_i`.
    pub n_prime: u128,
    /// `N_i`.
    pub n_peeled: u128,
    /// Minimum degree of `H_i`.
    pub min_degree: u128,
    pub chosen: usize,
    pub bin: usize,
    /// Allowed bins of the chosen vertex before the split.
    pub width: usize,
    /// `d_i(w)`.
    pub degree: u128,
    /// Edges of `H_i` through `w` placeable in the chosen bin.
    pub bin_support: u128,
    /// `N'_{i+1}`.
    pub next_n_prime: u128,
    pub new_black: usize,
    pub blacks: usize,
    /// `|X_{i,p_i}|` for refinement, the incompatibility count for
    /// alignment.
    pub pressure: usize,
    /// `|Y|` for refinement.
    pub y_size: usize,
    /// Vertices removed as incompatible with the chosen vertex.
    pub removed: usize,
    /// Incremental intervals and counts matched a recomputation.
    pub state_ok: bool,
    /// Largest white interval width after the split, over `V'_{i+1}`.
    pub max_white_width: usize,
}

/// Two disjoint `s`-sets with no arc between them, found when a split
/// blackens `2s` or more vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlackeningCertificate {
    pub step: usize,
    pub a: Vec<usize>,
    pub b: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RefineTrace {
    pub n: usize,
    pub k: usize,
    pub s: usize,
    pub z: usize,
    pub epsilon: f64,
    pub clamps: Vec<String>,
    pub steps: Vec<StepRecord>,
    /// `N'_0`, `|V_0|`, `N_0`, min degree of `H_0`.
    pub initial: (u128, usize, u128, u128),
    pub certificates: Vec<BlackeningCertificate>,
    pub halt: String,
    /// Number of steps `t` and `k' = k − t`.
    pub t: usize,
    pub k_prime: usize,
    pub final_v: Vec<usize>,
    pub final_walls: Vec<usize>,
    /// White vertices of `V_t` in output order.
    pub final_order: Vec<usize>,
    pub q: Option<usize>,
}

impl RefineTrace {
    fn new(n: usize, k: usize, s: usize) -> Self {
        let ln_n = (n.max(1) as f64).ln();
        let mut clamps = Vec::new();
        let z_raw = if ln_n > 0.0 { k as f64 / ln_n } else { f64::INFINITY };
        let z = if z_raw.is_finite() { (z_raw.round() as usize).max(1) } else { 1 };
        if !z_raw.is_finite() || z_raw.round() < 1.0 {
            clamps.push(format!("z clamped to 1 from k/ln n = {z_raw:.6}"));
        }
        let eps_raw = ln_n * ln_n / k as f64;
        let epsilon = eps_raw.min(1.0);
        if eps_raw > 1.0 {
            clamps.push(format!("epsilon clamped to 1 from ln^2 n/k = {eps_raw:.6}"));
        }
        RefineTrace {
            n,
            k,
            s,
            z,
            epsilon,
            clamps,
            steps: Vec::new(),
            initial: (0, 0, 0, 0),
            certificates: Vec::new(),
            halt: String::new(),
            t: 0,
            k_prime: k,
            final_v: Vec::new(),
            final_walls: Vec::new(),
            final_order: Vec::new(),
            q: None,
        }
    }

    /// One line per step, then one summary line.
    pub fn to_log(&self) -> String {
        let mut out = String::new();
        let (n0, v0, nn0, d0) = self.initial;
        let _ = writeln!(
            out,
            "init n={} k={} s={} z={} epsilon={:.6} n_prime={n0} v_size={v0} n_peeled={nn0} min_degree={d0}",
            self.n, self.k, self.s, self.z, self.epsilon
        );
        for r in &self.steps {
            let _ = writeln!(
                out,
                "step={} phase={} n_prime={} v_prime={} w={} bin={} blacks={}",
                r.step,
                r.phase.as_str(),
                r.n_prime,
                r.v_prime,
                r.chosen,
                r.bin,
                r.blacks
            );
        }
        for c in &self.clamps {
            let _ = writeln!(out, "clamp {c}");
        }
        let _ = writeln!(
            out,
            "final t={} k_prime={} v_t={} walls={} order={} q={} halt={}",
            self.t,
            self.k_prime,
            join(&self.final_v),
            join(&self.final_walls),
            join(&self.final_order),
            self.q.map_or("-".to_string(), |q| q.to_string()),
            self.halt
        );
        out
    }

    pub fn csv_header() -> &'static str {
        "step,phase,v_prime,v_size,n_prime,n_peeled,min_degree,w,bin,width,degree,bin_support,next_n_prime,new_black,blacks,pressure,y_size,removed,state_ok,max_white_width"
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::csv_header());
        out.push('\n');
        for r in &self.steps {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                r.step,
                r.phase.as_str(),
                r.v_prime,
                r.v_size,
                r.n_prime,
                r.n_peeled,
                r.min_degree,
                r.chosen,
                r.bin,
                r.width,
                r.degree,
                r.bin_support,
                r.next_n_prime,
                r.new_black,
                r.blacks,
                r.pressure,
                r.y_size,
                r.removed,
                r.state_ok,
                r.max_white_width
            );
        }
        out
    }
}

fn join(xs: &[usize]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RefineError {
    #[error(transparent)]
    Invalid(#[from] Error),
    #[error("dead end at step {step}: {reason}")]
    DeadEnd {
        step: usize,
        reason: String,
        trace: Box<RefineTrace>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RefineOutcome {
    pub trace: RefineTrace,
    /// `G[V_t]`.
    pub extracted: Subgraph,
    /// `G[white V_t]`, vertices in increasing parent id.
    pub whites: Subgraph,
    /// Output order on the local ids of `whites`.
    pub order: Permutation,
    pub q: usize,
}

struct Hyper {
    edges: Vec<u64>,
}

impl Hyper {
    fn degree(&self, v: usize) -> u128 {
        self.edges.iter().filter(|&&e| e & bit(v) != 0).count() as u128
    }
}

struct Machine<'a> {
    g: &'a Digraph,
    masks: DigraphMasks,
    k: usize,
    s: usize,
    limits: &'a OracleLimits,
    state: BinState,
    trace: RefineTrace,
}

impl<'a> Machine<'a> {
    /// `H'_i` on the current `V'` and walls.
    fn enumerate(&self) -> Result<Hyper> {
        let size = self.k - self.state.step();
        let verts: Vec<usize> = members(self.state.v_prime).collect();
        let total = binomial(verts.len(), size);
        if total > self.limits.max_subset_enum {
            return Err(Error::TooLarge {
                what: "refinement hypergraph",
                size: total,
                limit: self.limits.max_subset_enum,
            });
        }
        let chain = self.state.chain(self.g.n());
        let walls = self.state.wall_mask();
        let mut edges = Vec::new();
        for_each_kset(verts.len(), size, |local| {
            let set = members(local).fold(0u64, |m, j| m | bit(verts[j]));
            if self.masks.is_acyclic_with(set | walls, &chain) {
                edges.push(set);
            }
        });
        Ok(Hyper { edges })
    }

    /// Peels `H'` down to `H` with minimum degree `≥ N'/|V'|`; sets
    /// `V_i` and returns `(H_i, min degree)`.
    fn peel(&mut self, mut h: Hyper) -> (Hyper, u128) {
        let n_prime = h.edges.len() as u128;
        let denom = self.state.v_prime.count_ones() as u128;
        let mut alive = self.state.v_prime;
        loop {
            let drop: u64 = members(alive)
                .filter(|&v| h.degree(v) * denom < n_prime)
                .fold(0, |m, v| m | bit(v));
            if drop == 0 {
                break;
            }
            alive &= !drop;
            h.edges.retain(|&e| e & drop == 0);
        }
        let gone = self.state.v_prime & !alive;
        for v in members(gone) {
            if self.state.white[v] && self.state.v_current & bit(v) != 0 {
                add(&mut self.state.x, self.state.allowed[v], -1);
            }
        }
        // vertices enter V_i only here, so maintained counts are added
        for v in members(alive & !self.state.v_current) {
            if self.state.white[v] {
                add(&mut self.state.x, self.state.allowed[v], 1);
            }
        }
        self.state.v_current = alive;
        let min_degree = members(alive).map(|v| h.degree(v)).min().unwrap_or(0);
        (h, min_degree)
    }

    /// Edges of `H_i` through `v` that can put `v` in bin `bin`.
    fn support(&self, h: &Hyper, v: usize, bin: usize) -> u128 {
        let mut extra = self.state.chain(self.g.n());
        let walls = &self.state.walls;
        if bin >= 1 {
            extra[v] |= bit(walls[bin - 1]);
        }
        if bin < walls.len() {
            extra[walls[bin]] |= bit(v);
        }
        let wm = self.state.wall_mask();
        h.edges
            .iter()
            .filter(|&&e| e & bit(v) != 0 && self.masks.is_acyclic_with(e | wm, &extra))
            .count() as u128
    }

    /// `p_{i,v}`: the allowed bin with the most associated edges, lowest
    /// bin on ties, with its count.
    fn popular_bin(&self, h: &Hyper, v: usize) -> (usize, u128) {
        let iv = self.state.allowed[v].expect("vertices of V_i have allowed bins");
        let mut best = (iv.lo, 0u128);
        for bin in iv.lo..=iv.hi {
            let c = self.support(h, v, bin);
            if c > best.1 {
                best = (bin, c);
            }
        }
        best
    }

    fn incompatible(&self, x: usize, y: usize) -> bool {
        // arc x → y with every bin of x after every bin of y
        match (self.state.allowed[x], self.state.allowed[y]) {
            (Some(a), Some(b)) => self.g.has_edge(x, y) && a.lo > b.hi,
            _ => false,
        }
    }

    fn incompatible_with(&self, v: usize) -> u64 {
        members(self.state.v_current & !bit(v))
            .filter(|&y| self.incompatible(v, y) || self.incompatible(y, v))
            .fold(0, |m, y| m | bit(y))
    }

    fn dead_end(&self, reason: impl Into<String>) -> RefineError {
        RefineError::DeadEnd {
            step: self.state.step(),
            reason: reason.into(),
            trace: Box::new(self.trace.clone()),
        }
    }

    /// Inserts `w` as a wall inside bin `bin` and updates every maintained
    /// quantity. Returns `(removed, new blacks, state_ok, max white width)`.
    fn split(&mut self, w: usize, bin: usize) -> (usize, usize, bool, usize) {
        let n = self.g.n();
        let removed = self.incompatible_with(w);
        let old = self.state.clone();
        let shift = |iv: Option<Interval>| {
            iv.map(|iv| Interval {
                lo: if iv.lo <= bin { iv.lo } else { iv.lo + 1 },
                hi: if iv.hi < bin { iv.hi } else { iv.hi + 1 },
            })
        };

        let mut x = Vec::with_capacity(old.x.len() + 1);
        x.extend_from_slice(&old.x[..=bin]);
        x.extend_from_slice(&old.x[bin..]);

        let mut allowed = old.allowed.clone();
        #[allow(clippy::needless_range_loop)]
        for v in 0..n {
            if v == w {
                allowed[v] = None;
                continue;
            }
            allowed[v] = shift(old.allowed[v]).and_then(|mut iv| {
                if self.g.has_edge(w, v) {
                    iv.lo = iv.lo.max(bin + 1);
                }
                if self.g.has_edge(v, w) {
                    iv.hi = iv.hi.min(bin);
                }
                (iv.lo <= iv.hi).then_some(iv)
            });
        }

        let v_prime = old.v_current & !bit(w) & !removed;
        for v in members(old.v_current) {
            if !old.tracked(v) {
                continue;
            }
            let shifted = shift(old.allowed[v]);
            if v_prime & bit(v) == 0 {
                add(&mut x, shifted, -1);
            } else if allowed[v] != shifted {
                add(&mut x, shifted, -1);
                add(&mut x, allowed[v], 1);
            }
        }

        let walls_before = old.walls.clone();
        let mut walls = old.walls.clone();
        walls.insert(bin, w);
        let mut white = old.white.clone();
        let problematic: Vec<usize> = members(v_prime)
            .filter(|&v| white[v] && allowed[v].is_some_and(|iv| iv.width() > 2 * self.s))
            .collect();
        for &v in &problematic {
            white[v] = false;
            add(&mut x, allowed[v], -1);
        }
        if problematic.len() >= 2 * self.s {
            if let Some(c) = self.certificate(&problematic, &allowed, &walls_before, w, bin) {
                self.trace.certificates.push(c);
            }
        }

        self.state = BinState {
            walls,
            allowed,
            white,
            // `V'_{i+1}` is tracked through `v_current` until peeling
            v_current: v_prime,
            v_prime,
            x,
        };
        let ok = self.state.consistent(self.g);
        let max_white_width = members(v_prime)
            .filter(|&v| self.state.white[v])
            .filter_map(|v| self.state.allowed[v].map(|iv| iv.width()))
            .max()
            .unwrap_or(0);
        (removed.count_ones() as usize, problematic.len(), ok, max_white_width)
    }

    /// `s` problematic vertices on one side of the new wall, and `w` with
    /// `s − 1` old walls on that side: no arc joins the two sets.
    fn certificate(
        &self,
        problematic: &[usize],
        allowed: &[Option<Interval>],
        walls: &[usize],
        w: usize,
        bin: usize,
    ) -> Option<BlackeningCertificate> {
        let s = self.s;
        let left: Vec<usize> = problematic
            .iter()
            .copied()
            .filter(|&v| allowed[v].is_some_and(|iv| (bin + 1).saturating_sub(iv.lo) > s))
            .collect();
        let right: Vec<usize> = problematic
            .iter()
            .copied()
            .filter(|&v| allowed[v].is_some_and(|iv| iv.hi.saturating_sub(bin) > s))
            .collect();
        let (a, b) = if left.len() >= s {
            // old walls w_bin, w_{bin−1}, … (1-based)
            let b: Vec<usize> = (0..s - 1).map(|d| walls[bin - 1 - d]).collect();
            (left[..s].to_vec(), b)
        } else if right.len() >= s {
            let b: Vec<usize> = (0..s - 1).map(|d| walls[bin + d]).collect();
            (right[..s].to_vec(), b)
        } else {
            return None;
        };
        let mut b = b;
        b.push(w);
        let independent = a.iter().all(|&x| b.iter().all(|&y| x != y && !self.g.adjacent(x, y)));
        independent.then_some(BlackeningCertificate {
            step: self.state.step(),
            a,
            b,
        })
    }
}

/// Runs the refinement/alignment procedure on `G` (at most 64 vertices).
///
/// Steps are capped at `k − 1` so that `k' ≥ 1`; the cap and the desk-scale
/// values of `z` and `ε` are recorded in the trace.
pub fn refine_align(
    g: &Digraph,
    k: usize,
    s: usize,
    limits: &OracleLimits,
) -> std::result::Result<RefineOutcome, RefineError> {
    let n = g.n();
    if k == 0 || s == 0 {
        return Err(Error::Precondition("k and s must be at least 1".into()).into());
    }
    if n < k {
        return Err(Error::Precondition(format!("n = {n} is smaller than k = {k}")).into());
    }
    let masks = g.masks().ok_or(Error::TooLarge {
        what: "refinement on more than 64 vertices",
        size: n as u128,
        limit: 64,
    })?;
    let mut m = Machine {
        g,
        masks,
        k,
        s,
        limits,
        state: BinState::initial(n),
        trace: RefineTrace::new(n, k, s),
    };

    let h0 = m.enumerate()?;
    let n0 = h0.edges.len() as u128;
    if n0 == 0 {
        return Err(Error::Precondition(format!("no acyclic {k}-sets")).into());
    }
    let (mut h, d0) = m.peel(h0);
    m.trace.initial = (n0, m.state.v_current.count_ones() as usize, h.edges.len() as u128, d0);
    let mut n_prime = n0;
    let mut min_degree = d0;
    let step_cap = k - 1;

    loop {
        let i = m.state.step();
        if i == step_cap {
            m.trace.halt = "step cap".into();
            if i < m.trace.z {
                m.trace
                    .clamps
                    .push(format!("step cap k - 1 = {step_cap} reached before z = {}", m.trace.z));
            }
            break;
        }
        let v_prime = m.state.v_prime.count_ones() as usize;
        let v_size = m.state.v_current.count_ones() as usize;
        let phase = if i < m.trace.z { Phase::Refine } else { Phase::Align };

        let (w, bin, pressure, y_size) = match phase {
            Phase::Refine => {
                let x = &m.state.x;
                let p = (0..x.len()).fold(0, |best, j| if x[j] > x[best] { j } else { best });
                if x[p] == 0 {
                    return Err(m.dead_end("no white vertex in V_i"));
                }
                let xp: Vec<usize> = members(m.state.v_current)
                    .filter(|&v| m.state.white[v] && m.state.allowed[v].is_some_and(|iv| iv.contains(p)))
                    .collect();
                let mut by_bin = vec![Vec::new(); i + 1];
                for &v in &xp {
                    by_bin[m.popular_bin(&h, v).0].push(v);
                }
                let p_star = (0..by_bin.len()).fold(0, |best, j| {
                    if by_bin[j].len() > by_bin[best].len() {
                        j
                    } else {
                        best
                    }
                });
                let y = &by_bin[p_star];
                if y.is_empty() {
                    return Err(m.dead_end("Y is empty"));
                }
                let gy = g.induced(y)?;
                let w = match high_inout_vertex(&gy.graph, s) {
                    Ok(local) => gy.parent[local],
                    Err(Error::NotFound) => return Err(m.dead_end("no high in/out-degree vertex in G[Y]")),
                    Err(e) => return Err(e.into()),
                };
                (w, p_star, xp.len(), y.len())
            }
            Phase::Align => {
                let threshold = m.trace.epsilon * v_size as f64;
                let candidate = members(m.state.v_current)
                    .filter(|&v| m.state.white[v])
                    .map(|v| (m.incompatible_with(v).count_ones() as usize, v))
                    .filter(|&(c, _)| c as f64 >= threshold)
                    .max_by_key(|&(c, v)| (c, std::cmp::Reverse(v)));
                let Some((count, w)) = candidate else {
                    m.trace.halt = "no alignment candidate".into();
                    break;
                };
                (w, m.popular_bin(&h, w).0, count, 0)
            }
        };

        let width = m.state.allowed[w].expect("w in V_i").width();
        let degree = h.degree(w);
        let bin_support = m.support(&h, w, bin);
        let (removed, new_black, state_ok, max_white_width) = m.split(w, bin);
        let next = m.enumerate()?;
        let next_n_prime = next.edges.len() as u128;
        m.trace.steps.push(StepRecord {
            step: i,
            phase,
            v_prime,
            v_size,
            n_prime,
            n_peeled: h.edges.len() as u128,
            min_degree,
            chosen: w,
            bin,
            width,
            degree,
            bin_support,
            next_n_prime,
            new_black,
            blacks: m.state.blacks(),
            pressure,
            y_size,
            removed,
            state_ok,
            max_white_width,
        });
        if next_n_prime == 0 {
            return Err(m.dead_end("N' reached 0"));
        }
        n_prime = next_n_prime;
        let (peeled, d) = m.peel(next);
        h = peeled;
        min_degree = d;
        if !m.state.consistent(g) {
            return Err(Error::Precondition("maintained bin counts diverged after peeling".into()).into());
        }
    }

    let st = &m.state;
    let final_v: Vec<usize> = members(st.v_current).collect();
    let mut whites: Vec<usize> = final_v.iter().copied().filter(|&v| st.white[v]).collect();
    let whites_sub = g.induced(&whites)?;
    whites.sort_by_key(|&v| (st.allowed[v].expect("V_t vertices have allowed bins").lo, v));
    let local_of = |v: usize| whites_sub.parent.binary_search(&v).expect("white vertex");
    let order = Permutation::from_order(&whites.iter().map(|&v| local_of(v)).collect::<Vec<_>>())?;
    let q = whites_sub.graph.max_against_degree(&order)?;

    m.trace.t = st.step();
    m.trace.k_prime = k - st.step();
    m.trace.final_walls = st.walls.clone();
    m.trace.final_order = whites;
    m.trace.final_v = final_v.clone();
    m.trace.q = Some(q);
    Ok(RefineOutcome {
        trace: m.trace,
        extracted: g.induced(&final_v)?,
        whites: whites_sub,
        order,
        q,
    })
}

/// Result of repeated extraction.
#[derive(Debug, Clone, PartialEq)]
pub struct ReduceOutcome {
    /// Last white subgraph, with parent ids in the input graph.
    pub graph: Subgraph,
    pub order: Permutation,
    pub q: usize,
    pub k_final: usize,
    pub rounds: Vec<RefineTrace>,
    /// Why rounds stopped before the planned count.
    pub stopped: Option<String>,
    pub planned_rounds: usize,
}

/// Applies [`refine_align`] up to `max(1, round(√ln n))` times, each round
/// continuing on the white vertices of the previous one with `k' = k − t`.
pub fn iterate_reduce(
    g: &Digraph,
    k: usize,
    s: usize,
    limits: &OracleLimits,
) -> std::result::Result<ReduceOutcome, RefineError> {
    let n = g.n();
    if n < k {
        return Err(Error::Precondition(format!("n = {n} is smaller than k = {k}")).into());
    }
    let planned_rounds = ((n.max(1) as f64).ln().sqrt().round() as usize).max(1);
    let first = refine_align(g, k, s, limits)?;
    let compose = |parent: &[usize], sub: &Subgraph| sub.parent.iter().map(|&v| parent[v]).collect::<Vec<_>>();

    let mut rounds = vec![first.trace.clone()];
    let mut current = Subgraph {
        graph: first.whites.graph.clone(),
        parent: first.whites.parent.clone(),
    };
    let mut order = first.order;
    let mut q = first.q;
    let mut k_cur = first.trace.k_prime;
    let mut stopped = None;
    for _ in 1..planned_rounds {
        match refine_align(&current.graph, k_cur, s, limits) {
            Ok(out) => {
                current = Subgraph {
                    parent: compose(&current.parent, &out.whites),
                    graph: out.whites.graph,
                };
                order = out.order;
                q = out.q;
                k_cur = out.trace.k_prime;
                rounds.push(out.trace);
            }
            Err(RefineError::DeadEnd { reason, trace, .. }) => {
                stopped = Some(format!("round {}: {reason}", rounds.len()));
                rounds.push(*trace);
                break;
            }
            Err(RefineError::Invalid(e)) => {
                stopped = Some(format!("round {}: {e}", rounds.len()));
                break;
            }
        }
    }
    Ok(ReduceOutcome {
        graph: current,
        order,
        q,
        k_final: k_cur,
        rounds,
        stopped,
        planned_rounds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digraph::{directed_cycle, random_orientation_gnp, transitive_tournament};
    use crate::oracles::count_acyclic_ksets;

    fn lim() -> OracleLimits {
        OracleLimits::default()
    }

    #[test]
    fn interval_definition() {
        let g = Digraph::new(5, [(0, 3), (3, 1), (2, 3), (4, 0), (1, 4)]).unwrap();
        // walls 0, 1, 2: in-neighbors of 3 are 0 (pos 1) and 2 (pos 3), out 1 (pos 2)
        assert_eq!(allowed_interval(&g, &[0, 1, 2], 3), None);
        assert_eq!(allowed_interval(&g, &[0, 2, 1], 3), Some(Interval { lo: 2, hi: 2 }));
        // 4 has in-neighbor 1 at position 2 but out-neighbor 0 at position 1
        assert_eq!(allowed_interval(&g, &[0, 1], 4), None);
        assert_eq!(allowed_interval(&g, &[1], 4), Some(Interval { lo: 1, hi: 1 }));
        assert_eq!(allowed_interval(&g, &[0], 4), Some(Interval { lo: 0, hi: 0 }));
        assert_eq!(allowed_interval(&g, &[], 2), Some(Interval { lo: 0, hi: 0 }));
        assert_eq!(allowed_interval(&g, &[1, 2], 0), Some(Interval { lo: 0, hi: 2 }));
    }

    #[test]
    fn transitive_t6_k3() {
        let g = transitive_tournament(6);
        let out = refine_align(&g, 3, 1, &lim()).unwrap();
        let tr = &out.trace;
        assert_eq!(tr.z, 2);
        assert_eq!(tr.initial.0, 20);
        assert_eq!(tr.steps.len(), 2);
        let s0 = &tr.steps[0];
        assert_eq!((s0.chosen, s0.bin, s0.next_n_prime), (2, 0, 10));
        assert!(s0.next_n_prime * 2 * s0.v_prime as u128 >= s0.n_prime);
        assert_eq!(s0.bin_support, 10);
        let s1 = &tr.steps[1];
        assert_eq!(s1.chosen, 4);
        assert_eq!(s1.next_n_prime, 4);
        assert_eq!(tr.final_walls, vec![2, 4]);
        assert_eq!(tr.k_prime, 1);
        assert_eq!(out.q, 0);
        assert!(tr.steps.iter().all(|r| r.state_ok));
    }

    #[test]
    fn zero_ksets_is_precondition() {
        let e = refine_align(&directed_cycle(3), 3, 1, &lim()).unwrap_err();
        assert!(matches!(e, RefineError::Invalid(Error::Precondition(_))));
        assert!(refine_align(&directed_cycle(3), 4, 1, &lim()).is_err());
    }

    #[test]
    fn invariants_on_random_orientations() {
        let mut runs = 0;
        for seed in 0..40 {
            let g = random_orientation_gnp(9, 0.6, seed).unwrap();
            let alpha = crate::oracles::independence_number_exact(&g.underlying(), &lim()).unwrap();
            let s = alpha + 1;
            if count_acyclic_ksets(&g, 4, &lim()).unwrap() == 0 {
                continue;
            }
            let out = match refine_align(&g, 4, s, &lim()) {
                Ok(out) => out.trace,
                Err(RefineError::DeadEnd { trace, .. }) => *trace,
                Err(e) => panic!("{e}"),
            };
            runs += 1;
            for r in &out.steps {
                assert!(r.state_ok);
                assert!(r.min_degree * r.v_prime as u128 >= r.n_prime);
                assert!(r.next_n_prime >= r.bin_support);
                assert!(r.bin_support * r.width as u128 >= r.degree);
                assert!(r.max_white_width <= 2 * s);
                assert!(r.blacks <= 2 * s * (r.step + 1));
            }
        }
        assert!(runs > 10);
    }

    #[test]
    fn trace_serializers() {
        let out = refine_align(&transitive_tournament(6), 3, 1, &lim()).unwrap();
        let log = out.trace.to_log();
        assert!(log.contains("step=0 phase=refine n_prime=20 v_prime=6 w=2 bin=0 blacks=0"));
        assert_eq!(log.lines().filter(|l| l.starts_with("step=")).count(), 2);
        let csv = out.trace.to_csv();
        assert_eq!(csv.lines().count(), 3);
        assert_eq!(csv.lines().next().unwrap().split(',').count(), csv.lines().nth(1).unwrap().split(',').count());
    }

    #[test]
    fn reduce_transitive() {
        let g = transitive_tournament(8);
        let r = iterate_reduce(&g, 3, 1, &lim()).unwrap();
        assert_eq!(r.planned_rounds, 1);
        assert_eq!(r.q, 0);
        let single = refine_align(&g, 3, 1, &lim()).unwrap();
        assert_eq!(r.rounds[0], single.trace);
        assert_eq!(r.graph.parent, single.whites.parent);
        assert!(iterate_reduce(&transitive_tournament(2), 3, 1, &lim()).is_err());
    }

    #[test]
    fn reduce_several_rounds() {
        // ln 30 ≈ 3.4, two rounds
        let g = transitive_tournament(30);
        let r = iterate_reduce(&g, 4, 1, &lim()).unwrap();
        assert_eq!(r.planned_rounds, 2);
        for tr in &r.rounds {
            assert_eq!(tr.q, Some(0));
        }
        let sub = g.induced(&r.graph.parent).unwrap();
        assert_eq!(sub.graph, r.graph.graph);
    }
}
