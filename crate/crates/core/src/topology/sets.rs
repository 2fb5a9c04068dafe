//! Concrete set algebra for the factor kinds that product machinery can
//! reason about: line-like factors (exact rational interval unions) and
//! discrete-ℕ factors (finite or cofinite sets of naturals).
//!
//! `space.rs` converts descriptors into these and back; the tube-lemma
//! rectangle construction, cube intersections, and product containment
//! checks all run on this algebra.

use crate::qset::QSet;
use std::collections::BTreeSet;

/// A decidable set of naturals: finite, or the complement of a finite set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NatSet {
    Fin(BTreeSet<u64>),
    /// All naturals except the named ones.
    Cofin(BTreeSet<u64>),
}

impl NatSet {
    pub fn empty() -> NatSet {
        NatSet::Fin(BTreeSet::new())
    }

    pub fn full() -> NatSet {
        NatSet::Cofin(BTreeSet::new())
    }

    pub fn from_iter<I: IntoIterator<Item = u64>>(it: I) -> NatSet {
        NatSet::Fin(it.into_iter().collect())
    }

    pub fn contains(&self, n: u64) -> bool {
        match self {
            NatSet::Fin(s) => s.contains(&n),
            NatSet::Cofin(s) => !s.contains(&n),
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, NatSet::Fin(s) if s.is_empty())
    }

    pub fn union(&self, other: &NatSet) -> NatSet {
        match (self, other) {
            (NatSet::Fin(a), NatSet::Fin(b)) => NatSet::Fin(a.union(b).copied().collect()),
            (NatSet::Fin(a), NatSet::Cofin(b)) | (NatSet::Cofin(b), NatSet::Fin(a)) => {
                NatSet::Cofin(b.difference(a).copied().collect())
            }
            (NatSet::Cofin(a), NatSet::Cofin(b)) => {
                NatSet::Cofin(a.intersection(b).copied().collect())
            }
        }
    }

    pub fn intersect(&self, other: &NatSet) -> NatSet {
        match (self, other) {
            (NatSet::Fin(a), NatSet::Fin(b)) => NatSet::Fin(a.intersection(b).copied().collect()),
            (NatSet::Fin(a), NatSet::Cofin(b)) | (NatSet::Cofin(b), NatSet::Fin(a)) => {
                NatSet::Fin(a.difference(b).copied().collect())
            }
            (NatSet::Cofin(a), NatSet::Cofin(b)) => {
                NatSet::Cofin(a.union(b).copied().collect())
            }
        }
    }

    pub fn subtract(&self, other: &NatSet) -> NatSet {
        let flipped = match other {
            NatSet::Fin(s) => NatSet::Cofin(s.clone()),
            NatSet::Cofin(s) => NatSet::Fin(s.clone()),
        };
        self.intersect(&flipped)
    }

    pub fn is_subset_of(&self, other: &NatSet) -> bool {
        self.subtract(other).is_empty()
    }

    /// Least member, if any.
    pub fn sample(&self) -> Option<u64> {
        match self {
            NatSet::Fin(s) => s.iter().next().copied(),
            NatSet::Cofin(s) => (0..).find(|n| !s.contains(n)),
        }
    }
}

/// A factor set: the concrete reading of an open/compact descriptor over a
/// single product factor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FactorSet {
    Line(QSet),
    Nat(NatSet),
    /// OnePoint factor: present or not.
    One(bool),
}

impl FactorSet {
    pub fn is_empty(&self) -> bool {
        match self {
            FactorSet::Line(q) => q.is_empty(),
            FactorSet::Nat(n) => n.is_empty(),
            FactorSet::One(b) => !b,
        }
    }

    pub fn union(&self, other: &FactorSet) -> FactorSet {
        match (self, other) {
            (FactorSet::Line(a), FactorSet::Line(b)) => FactorSet::Line(a.union(b)),
            (FactorSet::Nat(a), FactorSet::Nat(b)) => FactorSet::Nat(a.union(b)),
            (FactorSet::One(a), FactorSet::One(b)) => FactorSet::One(*a || *b),
            _ => panic!("factor kind mismatch"),
        }
    }

    pub fn intersect(&self, other: &FactorSet) -> FactorSet {
        match (self, other) {
            (FactorSet::Line(a), FactorSet::Line(b)) => FactorSet::Line(a.intersect(b)),
            (FactorSet::Nat(a), FactorSet::Nat(b)) => FactorSet::Nat(a.intersect(b)),
            (FactorSet::One(a), FactorSet::One(b)) => FactorSet::One(*a && *b),
            _ => panic!("factor kind mismatch"),
        }
    }

    pub fn subtract(&self, other: &FactorSet) -> FactorSet {
        match (self, other) {
            (FactorSet::Line(a), FactorSet::Line(b)) => FactorSet::Line(a.subtract(b)),
            (FactorSet::Nat(a), FactorSet::Nat(b)) => FactorSet::Nat(a.subtract(b)),
            (FactorSet::One(a), FactorSet::One(b)) => FactorSet::One(*a && !*b),
            _ => panic!("factor kind mismatch"),
        }
    }

    pub fn is_subset_of(&self, other: &FactorSet) -> bool {
        self.subtract(other).is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn natset_algebra_matches_pointwise_semantics() {
        let a = NatSet::from_iter([1, 2, 3]);
        let b = NatSet::Cofin([2, 5].into_iter().collect());
        for n in 0..10 {
            assert_eq!(a.union(&b).contains(n), a.contains(n) || b.contains(n));
            assert_eq!(a.intersect(&b).contains(n), a.contains(n) && b.contains(n));
            assert_eq!(a.subtract(&b).contains(n), a.contains(n) && !b.contains(n));
            assert_eq!(b.subtract(&a).contains(n), b.contains(n) && !a.contains(n));
        }
        assert!(a.subtract(&NatSet::full()).is_empty());
        assert!(!b.is_subset_of(&a));
        assert!(a.subtract(&b).is_subset_of(&a));
    }

    #[test]
    fn cofinite_sample_skips_named_holes() {
        let b = NatSet::Cofin([0, 1, 2].into_iter().collect());
        assert_eq!(b.sample(), Some(3));
        assert_eq!(NatSet::empty().sample(), None);
    }
}
