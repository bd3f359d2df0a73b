//! Brute-force reference answers for small models.
//!
//! These search forward over supports or enumerate strategies explicitly and
//! never call the predecessor operator, so agreement with the deciders is a
//! meaningful check.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};

use crate::error::{Error, Result};
use crate::mdp::{ActionId, Distribution, Mdp, StateId};
use crate::rational::Rational;
use crate::set::StateSet;
use crate::Limits;

fn size_guard(mdp: &Mdp, limits: &Limits) -> Result<()> {
    if mdp.num_states() > limits.max_oracle_states {
        return Err(Error::ResourceCap {
            what: "oracle model size",
            limit: limits.max_oracle_states,
        });
    }
    Ok(())
}

/// Every support reachable in one step from `s`, one action per state.
fn successors(mdp: &Mdp, s: &StateSet) -> Vec<StateSet> {
    let members: Vec<StateId> = s.iter().collect();
    let mut out = HashSet::new();
    let mut choice = vec![0usize; members.len()];
    loop {
        let mut next = StateSet::empty(mdp.num_states());
        for (q, a) in members.iter().zip(&choice) {
            next.union_with(mdp.support(*q, *a));
        }
        out.insert(next);
        // odometer over per-state actions
        let mut i = 0;
        while i < choice.len() {
            choice[i] += 1;
            if choice[i] < mdp.num_actions() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
        if i == choice.len() {
            break;
        }
    }
    let mut out: Vec<StateSet> = out.into_iter().collect();
    out.sort();
    out
}

/// Breadth-first search over supports from `{q0}` for one inside `t`.
pub fn oracle_sure_eventually(
    mdp: &Mdp,
    q0: StateId,
    t: &StateSet,
    limits: &Limits,
) -> Result<bool> {
    size_guard(mdp, limits)?;
    let start = StateSet::singleton(mdp.num_states(), q0);
    let mut seen = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    while let Some(s) = queue.pop_front() {
        if s.is_subset(t) {
            return Ok(true);
        }
        for next in successors(mdp, &s) {
            if seen.insert(next.clone()) {
                queue.push_back(next);
            }
        }
    }
    Ok(false)
}

/// Whether supports can stay inside `t` forever from `Supp(mu0)`.
pub fn oracle_always_sum(
    mdp: &Mdp,
    mu0: &Distribution,
    t: &StateSet,
    limits: &Limits,
) -> Result<bool> {
    size_guard(mdp, limits)?;
    let start = mu0.support(mdp.num_states());
    if !start.is_subset(t) {
        return Ok(false);
    }
    let mut graph: BTreeMap<StateSet, Vec<StateSet>> = BTreeMap::new();
    let mut queue = VecDeque::from([start.clone()]);
    while let Some(s) = queue.pop_front() {
        if graph.contains_key(&s) {
            continue;
        }
        let inside: Vec<StateSet> = successors(mdp, &s)
            .into_iter()
            .filter(|n| n.is_subset(t))
            .collect();
        queue.extend(inside.iter().cloned());
        graph.insert(s, inside);
    }
    // drop supports with no way to continue until nothing changes
    let mut alive: HashSet<StateSet> = graph.keys().cloned().collect();
    loop {
        let dead: Vec<StateSet> = alive
            .iter()
            .filter(|s| !graph[*s].iter().any(|n| alive.contains(n)))
            .cloned()
            .collect();
        if dead.is_empty() {
            break;
        }
        for s in dead {
            alive.remove(&s);
        }
    }
    Ok(alive.contains(&start))
}

/// Best mass in `t` at any step up to `horizon` over all pure counting
/// strategies from Dirac `q0`.
pub fn oracle_bounded_counting_sup(
    mdp: &Mdp,
    q0: StateId,
    t: &StateSet,
    horizon: usize,
    limits: &Limits,
) -> Result<Rational> {
    size_guard(mdp, limits)?;
    let mut search = Search {
        mdp,
        t,
        limits,
        budget: limits.enumeration_budget,
        best: Rational::from_integer(0.into()),
        seen: HashMap::new(),
    };
    search.explore(&Distribution::dirac(q0), horizon)?;
    Ok(search.best)
}

/// Depth-first enumeration of one-step successors. A distribution already
/// explored with at least as many steps left cannot raise the maximum.
struct Search<'a> {
    mdp: &'a Mdp,
    t: &'a StateSet,
    limits: &'a Limits,
    budget: usize,
    best: Rational,
    seen: HashMap<Distribution, usize>,
}

impl Search<'_> {
    fn explore(&mut self, dist: &Distribution, left: usize) -> Result<()> {
        if self.seen.get(dist).is_some_and(|done| *done >= left) {
            return Ok(());
        }
        self.seen.insert(dist.clone(), left);
        if self.budget == 0 {
            return Err(Error::ResourceCap {
                what: "strategy enumeration",
                limit: self.limits.enumeration_budget,
            });
        }
        self.budget -= 1;
        let here = dist.mass(self.t);
        if here > self.best {
            self.best = here;
        }
        if left == 0 {
            return Ok(());
        }
        for next in self.successors(dist)? {
            self.explore(&next, left - 1)?;
        }
        Ok(())
    }

    /// Distinct distributions after one step, one action per state in the support.
    fn successors(&self, dist: &Distribution) -> Result<Vec<Distribution>> {
        let mdp = self.mdp;
        let mut out = Vec::new();
        let mut choice: Vec<ActionId> = vec![0; dist.entries().len()];
        loop {
            let mut next: BTreeMap<StateId, Rational> = BTreeMap::new();
            for ((q, p), a) in dist.entries().iter().zip(&choice) {
                for (q2, pq) in mdp.transition(*q, *a).entries() {
                    *next.entry(*q2).or_default() += p * pq;
                }
            }
            let next = Distribution::new(next)?;
            if !out.contains(&next) {
                out.push(next);
            }
            let mut i = 0;
            while i < choice.len() {
                choice[i] += 1;
                if choice[i] < mdp.num_actions() {
                    break;
                }
                choice[i] = 0;
                i += 1;
            }
            if i == choice.len() {
                return Ok(out);
            }
        }
    }
}
