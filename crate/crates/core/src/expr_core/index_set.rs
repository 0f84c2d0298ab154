use std::fmt;

use crate::error::{Error, Result};

/// Largest supported ambient dimension (one bit per index in a `u64`).
pub const MAX_AMBIENT: usize = 64;

/// A subset of `[n] = {1, ..., n}`.
///
/// Elements live in a bit mask (bit `k-1` for element `k`); iteration yields
/// them in increasing order.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IndexSet {
    n: u8,
    mask: u64,
}

fn check_ambient(n: usize) -> Result<()> {
    if n == 0 || n > MAX_AMBIENT {
        return Err(Error::AmbientTooLarge(n));
    }
    Ok(())
}

fn full_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

impl IndexSet {
    pub fn empty(n: usize) -> Result<Self> {
        check_ambient(n)?;
        Ok(IndexSet { n: n as u8, mask: 0 })
    }

    /// Builds a set from arbitrary elements; rejects duplicates and out-of-range values.
    pub fn new(n: usize, elements: &[usize]) -> Result<Self> {
        check_ambient(n)?;
        let mut mask = 0u64;
        for &e in elements {
            if e == 0 || e > n {
                return Err(Error::OutOfRange { index: e, n });
            }
            let bit = 1u64 << (e - 1);
            if mask & bit != 0 {
                return Err(Error::SizeMismatch(format!("duplicate element {e}")));
            }
            mask |= bit;
        }
        Ok(IndexSet { n: n as u8, mask })
    }

    pub fn from_mask(n: usize, mask: u64) -> Result<Self> {
        check_ambient(n)?;
        if mask & !full_mask(n) != 0 {
            return Err(Error::OutOfRange {
                index: 64 - mask.leading_zeros() as usize,
                n,
            });
        }
        Ok(IndexSet { n: n as u8, mask })
    }

    /// The interval `[a, b]` (empty when `a > b`).
    pub fn interval(n: usize, a: usize, b: usize) -> Result<Self> {
        if a > b {
            return Self::empty(n);
        }
        let elems: Vec<usize> = (a..=b).collect();
        Self::new(n, &elems)
    }

    pub fn full(n: usize) -> Result<Self> {
        check_ambient(n)?;
        Ok(IndexSet {
            n: n as u8,
            mask: full_mask(n),
        })
    }

    pub fn ambient(&self) -> usize {
        self.n as usize
    }

    pub fn mask(&self) -> u64 {
        self.mask
    }

    pub fn len(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.mask == 0
    }

    pub fn contains(&self, k: usize) -> bool {
        k >= 1 && k <= self.ambient() && self.mask & (1u64 << (k - 1)) != 0
    }

    pub fn iter(&self) -> IndexSetIter {
        IndexSetIter { rest: self.mask }
    }

    pub fn elements(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn first(&self) -> Option<usize> {
        self.iter().next()
    }

    pub fn last(&self) -> Option<usize> {
        if self.mask == 0 {
            None
        } else {
            Some(64 - self.mask.leading_zeros() as usize)
        }
    }

    fn same_ambient(&self, other: &IndexSet) -> Result<()> {
        if self.n != other.n {
            return Err(Error::AmbientMismatch {
                expected: self.ambient(),
                found: other.ambient(),
            });
        }
        Ok(())
    }

    pub fn union(&self, other: &IndexSet) -> Result<IndexSet> {
        self.same_ambient(other)?;
        Ok(IndexSet {
            n: self.n,
            mask: self.mask | other.mask,
        })
    }

    pub fn intersection(&self, other: &IndexSet) -> Result<IndexSet> {
        self.same_ambient(other)?;
        Ok(IndexSet {
            n: self.n,
            mask: self.mask & other.mask,
        })
    }

    pub fn difference(&self, other: &IndexSet) -> Result<IndexSet> {
        self.same_ambient(other)?;
        Ok(IndexSet {
            n: self.n,
            mask: self.mask & !other.mask,
        })
    }

    pub fn symmetric_difference(&self, other: &IndexSet) -> Result<IndexSet> {
        self.same_ambient(other)?;
        Ok(IndexSet {
            n: self.n,
            mask: self.mask ^ other.mask,
        })
    }

    pub fn complement(&self) -> IndexSet {
        IndexSet {
            n: self.n,
            mask: !self.mask & full_mask(self.ambient()),
        }
    }

    pub fn is_subset(&self, other: &IndexSet) -> bool {
        self.mask & !other.mask == 0
    }

    pub fn is_disjoint(&self, other: &IndexSet) -> bool {
        self.mask & other.mask == 0
    }

    /// Adds one element; errors when it is out of range.
    pub fn with(&self, k: usize) -> Result<IndexSet> {
        if k == 0 || k > self.ambient() {
            return Err(Error::OutOfRange {
                index: k,
                n: self.ambient(),
            });
        }
        Ok(IndexSet {
            n: self.n,
            mask: self.mask | (1u64 << (k - 1)),
        })
    }

    pub fn without(&self, k: usize) -> IndexSet {
        if k == 0 || k > self.ambient() {
            return *self;
        }
        IndexSet {
            n: self.n,
            mask: self.mask & !(1u64 << (k - 1)),
        }
    }

    /// Maps every element `k` to `m + 1 - k` inside a (possibly larger) ambient `m`.
    pub fn reflect_into(&self, m: usize) -> Result<IndexSet> {
        if let Some(k) = self.last().filter(|&k| k > m) {
            return Err(Error::OutOfRange { index: k, n: m });
        }
        let elems: Vec<usize> = self.iter().map(|k| m + 1 - k).collect();
        IndexSet::new(m, &elems)
    }

    /// Same elements, larger ambient.
    pub fn lift(&self, m: usize) -> Result<IndexSet> {
        if let Some(k) = self.last() {
            if k > m {
                return Err(Error::OutOfRange { index: k, n: m });
            }
        }
        IndexSet::from_mask(m, self.mask)
    }

    /// All subsets of `[n]` with exactly `k` elements, in increasing mask order.
    pub fn all_of_size(n: usize, k: usize) -> Result<Vec<IndexSet>> {
        check_ambient(n)?;
        if n > 30 {
            return Err(Error::DimensionTooLarge { n, limit: 30 });
        }
        Ok((0u64..(1u64 << n))
            .filter(|m| m.count_ones() as usize == k)
            .map(|mask| IndexSet { n: n as u8, mask })
            .collect())
    }

    /// All subsets of `[n]`, in increasing mask order.
    pub fn all_subsets(n: usize) -> Result<Vec<IndexSet>> {
        check_ambient(n)?;
        if n > 30 {
            return Err(Error::DimensionTooLarge { n, limit: 30 });
        }
        Ok((0u64..(1u64 << n))
            .map(|mask| IndexSet { n: n as u8, mask })
            .collect())
    }
}

pub struct IndexSetIter {
    rest: u64,
}

impl Iterator for IndexSetIter {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.rest == 0 {
            return None;
        }
        let tz = self.rest.trailing_zeros() as usize;
        self.rest &= self.rest - 1;
        Some(tz + 1)
    }
}

impl fmt::Debug for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, e) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, "}}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_and_iteration() {
        let s = IndexSet::new(6, &[6, 1, 3]).unwrap();
        assert_eq!(s.elements(), vec![1, 3, 6]);
        assert_eq!(s.len(), 3);
        assert!(s.contains(3) && !s.contains(2));
        assert_eq!(s.first(), Some(1));
        assert_eq!(s.last(), Some(6));
        assert_eq!(s.to_string(), "{1,3,6}");
    }

    #[test]
    fn rejects_bad_input() {
        assert!(IndexSet::new(3, &[4]).is_err());
        assert!(IndexSet::new(3, &[0]).is_err());
        assert!(IndexSet::new(3, &[1, 1]).is_err());
        assert!(IndexSet::new(65, &[]).is_err());
        assert!(IndexSet::from_mask(2, 0b100).is_err());
    }

    #[test]
    fn set_algebra() {
        let a = IndexSet::new(5, &[1, 2, 3]).unwrap();
        let b = IndexSet::new(5, &[3, 4]).unwrap();
        assert_eq!(a.union(&b).unwrap().elements(), vec![1, 2, 3, 4]);
        assert_eq!(a.intersection(&b).unwrap().elements(), vec![3]);
        assert_eq!(a.difference(&b).unwrap().elements(), vec![1, 2]);
        assert_eq!(a.symmetric_difference(&b).unwrap().elements(), vec![1, 2, 4]);
        assert_eq!(a.complement().elements(), vec![4, 5]);
        assert!(a.union(&IndexSet::empty(4).unwrap()).is_err());
    }

    #[test]
    fn reflection_into_double_ambient() {
        let q = IndexSet::new(6, &[2, 5]).unwrap();
        assert_eq!(q.reflect_into(12).unwrap().elements(), vec![8, 11]);
    }

    #[test]
    fn full_ambient_64() {
        let s = IndexSet::full(64).unwrap();
        assert_eq!(s.len(), 64);
        assert!(s.complement().is_empty());
    }

    #[test]
    fn subset_enumeration_counts() {
        assert_eq!(IndexSet::all_of_size(5, 2).unwrap().len(), 10);
        assert_eq!(IndexSet::all_subsets(4).unwrap().len(), 16);
    }
}
