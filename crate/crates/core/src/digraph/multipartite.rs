use super::UndirectedGraph;
use crate::error::{Error, Result};

/// Red/blue split of the complete `n/s`-partite graph whose parts are
/// grouped into `√(n/s)` buckets of `√(n/s)` parts each.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BucketSplit {
    pub part_size: usize,
    pub parts: usize,
    pub buckets: usize,
    /// Pairs in different parts of the same bucket.
    pub blue: UndirectedGraph,
    /// Pairs in different buckets.
    pub red: UndirectedGraph,
}

impl BucketSplit {
    pub fn part_of(&self, v: usize) -> usize {
        v / self.part_size
    }

    pub fn bucket_of(&self, v: usize) -> usize {
        self.part_of(v) / self.buckets
    }
}

/// Vertex `v` lies in part `v / s`; part `p` lies in bucket `p / √(n/s)`.
pub fn multipartite_bucket_graph(n: usize, s: usize) -> Result<BucketSplit> {
    if s == 0 || n == 0 || !n.is_multiple_of(s) {
        return Err(Error::Precondition(format!("part size {s} must divide n = {n}")));
    }
    let parts = n / s;
    let buckets = (parts as f64).sqrt().round() as usize;
    if buckets * buckets != parts {
        return Err(Error::Precondition(format!("n/s = {parts} is not a perfect square")));
    }
    let part = |v: usize| v / s;
    let bucket = |v: usize| part(v) / buckets;
    let mut blue = Vec::new();
    let mut red = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if part(u) == part(v) {
                continue;
            }
            if bucket(u) == bucket(v) {
                blue.push((u, v));
            } else {
                red.push((u, v));
            }
        }
    }
    Ok(BucketSplit {
        part_size: s,
        parts,
        buckets,
        blue: UndirectedGraph::new(n, blue)?,
        red: UndirectedGraph::new(n, red)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn four_one() {
        let b = multipartite_bucket_graph(4, 1).unwrap();
        assert_eq!(b.blue.edges(), &[(0, 1), (2, 3)]);
        assert_eq!(b.red.edges(), &[(0, 2), (0, 3), (1, 2), (1, 3)]);
    }

    #[test]
    fn colors_partition_multipartite_edges() {
        let b = multipartite_bucket_graph(18, 2).unwrap();
        let parts = 9;
        let complete = 18 * 17 / 2 - parts; // minus within-part pairs
        assert_eq!(b.blue.m() + b.red.m(), complete);
        for &e in b.blue.edges() {
            assert!(!b.red.adjacent(e.0, e.1));
        }
    }

    #[test]
    fn preconditions() {
        assert!(multipartite_bucket_graph(10, 3).is_err());
        assert!(multipartite_bucket_graph(8, 1).is_err());
        assert!(multipartite_bucket_graph(8, 0).is_err());
    }
}
