//! Permutations of finite index sets, stored as destination maps.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A bijection on {0, .., d-1} stored as a destination map:
/// applying it moves the entry at `j` to `dest[j]`, i.e. as a matrix it has
/// ones at (dest[j], j).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Permutation {
    dest: Vec<usize>,
}

impl Permutation {
    pub fn new(dest: Vec<usize>) -> Result<Self> {
        let d = dest.len();
        let mut seen = vec![false; d];
        for &x in &dest {
            if x >= d {
                return Err(Error::InvalidPermutation(format!(
                    "index {x} out of range for dimension {d}"
                )));
            }
            if seen[x] {
                return Err(Error::InvalidPermutation(format!("duplicate image {x}")));
            }
            seen[x] = true;
        }
        Ok(Self { dest })
    }

    pub(crate) fn new_unchecked(dest: Vec<usize>) -> Self {
        Self { dest }
    }

    pub fn identity(d: usize) -> Self {
        Self {
            dest: (0..d).collect(),
        }
    }

    pub fn transposition(d: usize, a: usize, b: usize) -> Self {
        let mut dest: Vec<usize> = (0..d).collect();
        dest.swap(a, b);
        Self { dest }
    }

    /// The permutation that sorts a vector, built from the rank order
    /// returned by `sort_descending`: `order[rank]` is the original index of
    /// the rank-th largest entry, so that entry must move to slot `rank`.
    pub fn sorting_from_order(order: &[usize]) -> Self {
        let mut dest = vec![0usize; order.len()];
        for (rank, &orig) in order.iter().enumerate() {
            dest[orig] = rank;
        }
        Self { dest }
    }

    pub fn dim(&self) -> usize {
        self.dest.len()
    }

    pub fn dest(&self) -> &[usize] {
        &self.dest
    }

    pub fn is_identity(&self) -> bool {
        self.dest.iter().enumerate().all(|(i, &x)| i == x)
    }

    /// Apply to a vector: out[dest[j]] = v[j].
    pub fn apply<T: Copy + Default>(&self, v: &[T]) -> Vec<T> {
        let mut out = vec![T::default(); v.len()];
        for (j, &x) in v.iter().enumerate() {
            out[self.dest[j]] = x;
        }
        out
    }

    /// `self` after `first`: (self . first)(v) = self(first(v)).
    pub fn compose(&self, first: &Self) -> Self {
        let dest = first.dest.iter().map(|&mid| self.dest[mid]).collect();
        Self { dest }
    }

    pub fn inverse(&self) -> Self {
        let mut dest = vec![0usize; self.dest.len()];
        for (j, &x) in self.dest.iter().enumerate() {
            dest[x] = j;
        }
        Self { dest }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn apply_and_inverse_round_trip() {
        let p = Permutation::new(vec![2, 0, 1]).unwrap();
        let v = [10.0, 20.0, 30.0];
        let moved = p.apply(&v);
        assert_eq!(moved, vec![20.0, 30.0, 10.0]);
        let back = p.inverse().apply(&moved);
        assert_eq!(back, v.to_vec());
    }

    #[test]
    fn compose_applies_right_factor_first() {
        let tau = Permutation::transposition(3, 0, 1);
        let cycle = Permutation::new(vec![1, 2, 0]).unwrap();
        let combined = cycle.compose(&tau);
        let v = [1.0, 2.0, 3.0];
        assert_eq!(combined.apply(&v), cycle.apply(&tau.apply(&v)));
    }

    #[test]
    fn sorting_permutation_sorts() {
        let v = [0.2, 0.5, 0.3];
        let (sorted, order) = crate::statekit::sort_descending(&v);
        let p = Permutation::sorting_from_order(&order);
        assert_eq!(p.apply(&v), sorted);
    }

    #[test]
    fn rejects_non_bijections() {
        assert!(Permutation::new(vec![0, 0, 1]).is_err());
        assert!(Permutation::new(vec![0, 3, 1]).is_err());
    }
}
