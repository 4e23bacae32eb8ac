//! Fixed-width node sets.
//!
//! Nodes are addressed by their index in a graph (or model universe), and the
//! index order is the lexicographic order of node names. All exhaustive
//! algorithms in this crate work over sets of at most [`MAX_NODES`] nodes.

use std::fmt;

/// Largest number of nodes a [`NodeSet`] can address.
pub const MAX_NODES: usize = 64;

/// A set of node indices packed into a `u64`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct NodeSet(pub u64);

impl NodeSet {
    pub const EMPTY: NodeSet = NodeSet(0);

    pub fn singleton(i: usize) -> Self {
        debug_assert!(i < MAX_NODES);
        NodeSet(1u64 << i)
    }

    /// The set `{0, .., n-1}`.
    pub fn full(n: usize) -> Self {
        if n >= 64 {
            NodeSet(u64::MAX)
        } else {
            NodeSet((1u64 << n) - 1)
        }
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(it: I) -> Self {
        it.into_iter().fold(NodeSet::EMPTY, |s, i| s.with(i))
    }

    #[inline]
    pub fn bits(self) -> u64 {
        self.0
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    #[inline]
    pub fn contains(self, i: usize) -> bool {
        i < MAX_NODES && self.0 & (1u64 << i) != 0
    }

    #[inline]
    pub fn insert(&mut self, i: usize) {
        self.0 |= 1u64 << i;
    }

    #[inline]
    pub fn remove(&mut self, i: usize) {
        self.0 &= !(1u64 << i);
    }

    #[inline]
    pub fn with(self, i: usize) -> Self {
        NodeSet(self.0 | (1u64 << i))
    }

    #[inline]
    pub fn without(self, i: usize) -> Self {
        NodeSet(self.0 & !(1u64 << i))
    }

    #[inline]
    pub fn union(self, o: NodeSet) -> Self {
        NodeSet(self.0 | o.0)
    }

    #[inline]
    pub fn intersection(self, o: NodeSet) -> Self {
        NodeSet(self.0 & o.0)
    }

    #[inline]
    pub fn minus(self, o: NodeSet) -> Self {
        NodeSet(self.0 & !o.0)
    }

    #[inline]
    pub fn is_subset(self, o: NodeSet) -> bool {
        self.0 & !o.0 == 0
    }

    #[inline]
    pub fn is_disjoint(self, o: NodeSet) -> bool {
        self.0 & o.0 == 0
    }

    /// Smallest index in the set.
    #[inline]
    pub fn min(self) -> Option<usize> {
        if self.0 == 0 {
            None
        } else {
            Some(self.0.trailing_zeros() as usize)
        }
    }

    pub fn iter(self) -> Iter {
        Iter(self.0)
    }

    /// All subsets of `self`, the empty set first and `self` last.
    pub fn subsets(self) -> Subsets {
        Subsets {
            mask: self.0,
            next: Some(0),
        }
    }

    /// Nonempty subsets of `self`.
    pub fn nonempty_subsets(self) -> impl Iterator<Item = NodeSet> {
        self.subsets().skip(1)
    }
}

impl fmt::Debug for NodeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl FromIterator<usize> for NodeSet {
    fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Self {
        NodeSet::from_indices(iter)
    }
}

impl IntoIterator for NodeSet {
    type Item = usize;
    type IntoIter = Iter;
    fn into_iter(self) -> Iter {
        self.iter()
    }
}

/// Iterator over the members of a [`NodeSet`] in increasing order.
#[derive(Clone)]
pub struct Iter(u64);

impl Iterator for Iter {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let i = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(i)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for Iter {}

/// Submask enumeration in increasing numeric order.
#[derive(Clone)]
pub struct Subsets {
    mask: u64,
    next: Option<u64>,
}

impl Iterator for Subsets {
    type Item = NodeSet;

    fn next(&mut self) -> Option<NodeSet> {
        let cur = self.next?;
        self.next = if cur == self.mask {
            None
        } else {
            // next submask above `cur`
            Some((cur.wrapping_sub(self.mask)) & self.mask)
        };
        Some(NodeSet(cur))
    }
}
