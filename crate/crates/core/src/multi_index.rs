//! Symmetric multi-indices over base directions.

use std::cmp::Ordering;

use crate::bundle::Bundle;

/// A symmetric multi-index: an unordered multiset of base directions, stored
/// as a non-decreasing sequence of 1-based indices. The empty index is the
/// order-zero case (the fibre coordinate itself).
///
/// Ordering is by length first, then lexicographically on the sorted
/// directions; this is the order used everywhere jet variables and contact
/// generators are ranked.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct MultiIndex(Vec<usize>);

impl MultiIndex {
    pub fn empty() -> MultiIndex {
        MultiIndex(Vec::new())
    }

    /// Builds a multi-index from directions in any order.
    pub fn new(mut dirs: Vec<usize>) -> MultiIndex {
        dirs.sort_unstable();
        MultiIndex(dirs)
    }

    pub fn single(lambda: usize) -> MultiIndex {
        MultiIndex(vec![lambda])
    }

    /// Derivative order `|Lambda|`.
    pub fn order(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn dirs(&self) -> &[usize] {
        &self.0
    }

    /// Multiset insertion of one direction.
    pub fn plus(&self, lambda: usize) -> MultiIndex {
        let pos = self.0.partition_point(|&d| d <= lambda);
        let mut dirs = self.0.clone();
        dirs.insert(pos, lambda);
        MultiIndex(dirs)
    }

    /// Multiset merge with another index.
    pub fn merged(&self, other: &MultiIndex) -> MultiIndex {
        let mut dirs = self.0.clone();
        dirs.extend_from_slice(&other.0);
        MultiIndex::new(dirs)
    }

    /// Removes one occurrence of `lambda`, if present.
    pub fn without(&self, lambda: usize) -> Option<MultiIndex> {
        let pos = self.0.iter().position(|&d| d == lambda)?;
        let mut dirs = self.0.clone();
        dirs.remove(pos);
        Some(MultiIndex(dirs))
    }

    pub fn contains(&self, lambda: usize) -> bool {
        self.0.binary_search(&lambda).is_ok()
    }

    /// The distinct directions appearing, each once.
    pub fn distinct_dirs(&self) -> Vec<usize> {
        let mut dirs = self.0.clone();
        dirs.dedup();
        dirs
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub(crate) fn validate(&self, bundle: &Bundle) {
        for &d in &self.0 {
            bundle.check_base(d);
        }
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sorted_on_construction() {
        let idx = MultiIndex::new(vec![3, 1, 2, 1]);
        assert_eq!(idx.dirs(), &[1, 1, 2, 3]);
        assert_eq!(idx.order(), 4);
    }

    #[test]
    fn merge_is_multiset_union() {
        let a = MultiIndex::new(vec![1, 2]);
        let b = MultiIndex::new(vec![1, 3]);
        assert_eq!(a.merged(&b).dirs(), &[1, 1, 2, 3]);
    }

    #[test]
    fn plus_keeps_order() {
        assert_eq!(MultiIndex::new(vec![1, 3]).plus(2).dirs(), &[1, 2, 3]);
        assert_eq!(MultiIndex::empty().plus(2).dirs(), &[2]);
    }

    #[test]
    fn without_removes_one_copy() {
        let idx = MultiIndex::new(vec![1, 1, 2]);
        assert_eq!(idx.without(1).unwrap().dirs(), &[1, 2]);
        assert_eq!(idx.without(3), None);
    }

    #[test]
    fn order_before_lex() {
        // shorter indices sort first, regardless of entries
        assert!(MultiIndex::new(vec![3]) < MultiIndex::new(vec![1, 1]));
        assert!(MultiIndex::new(vec![1, 2]) < MultiIndex::new(vec![1, 3]));
    }
}
