//! Ultimately periodic sequences of state sets produced by iterating a
//! deterministic set operator.

use std::collections::HashMap;
use std::hash::Hash;

use crate::error::{Error, Result};
use crate::mdp::{pre, Mdp};
use crate::set::StateSet;
use crate::Limits;

/// `items[0..k]` is the prefix, `items[k..k+r]` repeats forever.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lasso<T> {
    pub prefix_len: usize,
    pub period: usize,
    pub items: Vec<T>,
}

impl<T> Lasso<T> {
    /// The `n`-th element of the infinite sequence.
    pub fn at(&self, n: usize) -> &T {
        if n < self.prefix_len {
            &self.items[n]
        } else {
            &self.items[self.prefix_len + (n - self.prefix_len) % self.period]
        }
    }

    pub fn prefix(&self) -> &[T] {
        &self.items[..self.prefix_len]
    }

    pub fn periodic(&self) -> &[T] {
        &self.items[self.prefix_len..]
    }

    /// Smallest index whose item satisfies `pred`; scanning prefix plus one period is exhaustive.
    pub fn first_index(&self, pred: impl FnMut(&T) -> bool) -> Option<usize> {
        self.items.iter().position(pred)
    }
}

/// Iterates `step` from `seed` until an item repeats, hashing every item seen.
pub fn detect<T, F>(seed: T, mut step: F, cap: usize) -> Result<Lasso<T>>
where
    T: Clone + Eq + Hash,
    F: FnMut(&T) -> T,
{
    let mut seen: HashMap<T, usize> = HashMap::new();
    let mut items = Vec::new();
    let mut cur = seed;
    loop {
        if let Some(&first) = seen.get(&cur) {
            return Ok(Lasso {
                prefix_len: first,
                period: items.len() - first,
                items,
            });
        }
        if items.len() >= cap {
            return Err(Error::ResourceCap {
                what: "lasso iterations",
                limit: cap,
            });
        }
        seen.insert(cur.clone(), items.len());
        let next = step(&cur);
        items.push(cur);
        cur = next;
    }
}

/// The sequence `Pre^i(t)`.
pub fn pre_lasso(mdp: &Mdp, t: &StateSet, limits: &Limits) -> Result<Lasso<StateSet>> {
    detect(t.clone(), |s| pre(mdp, s), limits.max_lasso_iterations)
}

/// The sequence `(Pre^i(t), Pre^i(u))`; requires `t ⊆ u`.
pub fn pair_lasso(
    mdp: &Mdp,
    t: &StateSet,
    u: &StateSet,
    limits: &Limits,
) -> Result<Lasso<(StateSet, StateSet)>> {
    if !t.is_subset(u) {
        return Err(Error::Precondition("pair lasso needs t ⊆ u".into()));
    }
    detect(
        (t.clone(), u.clone()),
        |(a, b)| (pre(mdp, a), pre(mdp, b)),
        limits.max_lasso_iterations,
    )
}
