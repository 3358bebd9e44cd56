use crate::error::{Error, Result};

/// A bijection from vertices to ranks `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    rank: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation { rank: (0..n).collect() }
    }

    /// From `rank[v]`, the position of vertex `v`.
    pub fn from_ranks(rank: Vec<usize>) -> Result<Self> {
        let n = rank.len();
        let mut seen = vec![false; n];
        for &r in &rank {
            if r >= n || seen[r] {
                return Err(Error::InvalidPermutation(n));
            }
            seen[r] = true;
        }
        Ok(Permutation { rank })
    }

    /// From a vertex sequence: `order[r]` is the vertex placed at rank `r`.
    pub fn from_order(order: &[usize]) -> Result<Self> {
        let n = order.len();
        let mut rank = vec![usize::MAX; n];
        for (r, &v) in order.iter().enumerate() {
            if v >= n || rank[v] != usize::MAX {
                return Err(Error::InvalidPermutation(n));
            }
            rank[v] = r;
        }
        Ok(Permutation { rank })
    }

    pub fn len(&self) -> usize {
        self.rank.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rank.is_empty()
    }

    pub fn rank(&self, v: usize) -> usize {
        self.rank[v]
    }

    pub fn ranks(&self) -> &[usize] {
        &self.rank
    }

    /// Vertices listed by increasing rank.
    pub fn order(&self) -> Vec<usize> {
        let mut order = vec![0; self.rank.len()];
        for (v, &r) in self.rank.iter().enumerate() {
            order[r] = v;
        }
        order
    }

    /// `π^rev`: the same order read backwards.
    pub fn reversed(&self) -> Self {
        let n = self.rank.len();
        Permutation {
            rank: self.rank.iter().map(|&r| n - 1 - r).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_and_ranks_are_inverse() {
        let p = Permutation::from_order(&[2, 0, 3, 1]).unwrap();
        assert_eq!(p.ranks(), &[1, 3, 0, 2]);
        assert_eq!(p.order(), vec![2, 0, 3, 1]);
        assert_eq!(p.reversed().order(), vec![1, 3, 0, 2]);
        assert_eq!(Permutation::from_ranks(p.ranks().to_vec()).unwrap(), p);
    }

    #[test]
    fn rejects_non_bijections() {
        assert!(Permutation::from_ranks(vec![0, 0]).is_err());
        assert!(Permutation::from_order(&[0, 2]).is_err());
    }
}
