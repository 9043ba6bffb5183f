//! Dimensions of the trivial fibre bundle shared by every value in the crate.

use std::fmt;

/// The trivial bundle `R^{n+m} -> R^n`: `n` base directions `x1..xn` and `m`
/// fibre fields `u1..um`. Every scalar and form carries its bundle, and all
/// binary operations require both operands to live on the same one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bundle {
    base_dim: usize,
    fibre_dim: usize,
}

impl Bundle {
    /// Both dimensions must be at least 1.
    pub fn new(base_dim: usize, fibre_dim: usize) -> Bundle {
        assert!(base_dim >= 1, "base dimension must be at least 1");
        assert!(fibre_dim >= 1, "fibre dimension must be at least 1");
        Bundle {
            base_dim,
            fibre_dim,
        }
    }

    pub fn base_dim(&self) -> usize {
        self.base_dim
    }

    pub fn fibre_dim(&self) -> usize {
        self.fibre_dim
    }

    /// Base indices `1..=n`.
    pub fn base_range(&self) -> std::ops::RangeInclusive<usize> {
        1..=self.base_dim
    }

    /// Fibre indices `1..=m`.
    pub fn fibre_range(&self) -> std::ops::RangeInclusive<usize> {
        1..=self.fibre_dim
    }

    pub(crate) fn check_base(&self, lambda: usize) {
        assert!(
            (1..=self.base_dim).contains(&lambda),
            "base index {lambda} out of range 1..={}",
            self.base_dim
        );
    }

    pub(crate) fn check_fibre(&self, i: usize) {
        assert!(
            (1..=self.fibre_dim).contains(&i),
            "fibre index {i} out of range 1..={}",
            self.fibre_dim
        );
    }

    pub(crate) fn check_same(&self, other: &Bundle) {
        assert!(self == other, "bundle mismatch: {self} vs {other}");
    }
}

impl fmt::Display for Bundle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "R^({}+{}) -> R^{}", self.base_dim, self.fibre_dim, self.base_dim)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        let b = Bundle::new(3, 2);
        assert_eq!(b.base_range().collect::<Vec<_>>(), vec![1, 2, 3]);
        assert_eq!(b.fibre_range().collect::<Vec<_>>(), vec![1, 2]);
    }

    #[test]
    #[should_panic]
    fn zero_base_rejected() {
        Bundle::new(0, 1);
    }

    #[test]
    #[should_panic]
    fn out_of_range_index() {
        Bundle::new(2, 1).check_base(3);
    }
}
