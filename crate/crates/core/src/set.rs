//! Fixed-universe bit sets over dense state indices.

use std::fmt;

const WORD: usize = 64;

/// A subset of `{0, .., universe-1}`.
///
/// Equality, ordering and hashing are over the canonical word encoding, so two
/// sets are equal exactly when they have the same universe and members.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateSet {
    universe: usize,
    words: Vec<u64>,
}

impl StateSet {
    pub fn empty(universe: usize) -> Self {
        StateSet {
            universe,
            words: vec![0; universe.div_ceil(WORD)],
        }
    }

    pub fn full(universe: usize) -> Self {
        let mut s = Self::empty(universe);
        for i in 0..universe {
            s.insert(i);
        }
        s
    }

    pub fn singleton(universe: usize, i: usize) -> Self {
        let mut s = Self::empty(universe);
        s.insert(i);
        s
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(universe: usize, it: I) -> Self {
        let mut s = Self::empty(universe);
        for i in it {
            s.insert(i);
        }
        s
    }

    /// Bit `i` of `mask` is state `i`.
    pub fn from_mask(universe: usize, mask: u64) -> Self {
        Self::from_indices(
            universe,
            (0..universe.min(WORD)).filter(|i| mask >> i & 1 == 1),
        )
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn insert(&mut self, i: usize) {
        assert!(
            i < self.universe,
            "index {i} outside universe {}",
            self.universe
        );
        self.words[i / WORD] |= 1 << (i % WORD);
    }

    pub fn remove(&mut self, i: usize) {
        if i < self.universe {
            self.words[i / WORD] &= !(1 << (i % WORD));
        }
    }

    pub fn contains(&self, i: usize) -> bool {
        i < self.universe && self.words[i / WORD] >> (i % WORD) & 1 == 1
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_subset(&self, other: &StateSet) -> bool {
        debug_assert_eq!(self.universe, other.universe);
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }

    pub fn intersects(&self, other: &StateSet) -> bool {
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    pub fn union(&self, other: &StateSet) -> StateSet {
        self.zip_with(other, |a, b| a | b)
    }

    pub fn intersection(&self, other: &StateSet) -> StateSet {
        self.zip_with(other, |a, b| a & b)
    }

    pub fn difference(&self, other: &StateSet) -> StateSet {
        self.zip_with(other, |a, b| a & !b)
    }

    pub fn union_with(&mut self, other: &StateSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    fn zip_with(&self, other: &StateSet, f: impl Fn(u64, u64) -> u64) -> StateSet {
        debug_assert_eq!(self.universe, other.universe);
        StateSet {
            universe: self.universe,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| f(*a, *b))
                .collect(),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.universe).filter(move |i| self.contains(*i))
    }

    pub fn first(&self) -> Option<usize> {
        self.iter().next()
    }

    /// Same members, viewed in a larger (or equal) universe.
    pub fn widen(&self, universe: usize) -> StateSet {
        assert!(universe >= self.universe);
        StateSet::from_indices(universe, self.iter())
    }

    /// Members below `universe`, viewed in that smaller universe.
    pub fn restrict(&self, universe: usize) -> StateSet {
        StateSet::from_indices(universe, self.iter().filter(|i| *i < universe))
    }
}

impl fmt::Debug for StateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_ops_across_word_boundary() {
        let a = StateSet::from_indices(130, [0, 63, 64, 129]);
        let b = StateSet::from_indices(130, [63, 64]);
        assert_eq!(a.len(), 4);
        assert!(b.is_subset(&a));
        assert!(!a.is_subset(&b));
        assert_eq!(a.difference(&b).iter().collect::<Vec<_>>(), vec![0, 129]);
        assert_eq!(a.intersection(&b), b);
        assert!(StateSet::empty(130).is_subset(&b));
        assert_eq!(StateSet::full(130).len(), 130);
    }

    #[test]
    fn widen_and_restrict() {
        let a = StateSet::from_indices(3, [0, 2]);
        let w = a.widen(5);
        assert_eq!(w.universe(), 5);
        assert_eq!(w.restrict(3), a);
        assert_eq!(
            StateSet::from_indices(5, [1, 4]).restrict(3),
            StateSet::singleton(3, 1)
        );
    }

    #[test]
    fn mask_order_matches_bits() {
        assert_eq!(
            StateSet::from_mask(3, 0b101),
            StateSet::from_indices(3, [0, 2])
        );
    }
}
