//! One-letter alternating automata with DNF transitions.
//!
//! Over a one-letter alphabet only word lengths matter, so the language from a
//! state is a set of naturals: `n` is accepted from `q` iff `q ∈ acc(n)`.

use crate::error::{Error, Result};
use crate::lasso::{detect, Lasso};
use crate::mdp::{fresh_name, pre, Mdp, StateId};
use crate::rational::{ratio, Rational};
use crate::set::StateSet;
use crate::Limits;

/// `delta[q]` is a disjunction of clauses; each clause is a conjunction of states.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Afa {
    states: Vec<String>,
    delta: Vec<Vec<StateSet>>,
    accepting: StateSet,
}

impl Afa {
    /// Clauses are sorted and deduplicated per state.
    pub fn new(
        states: Vec<String>,
        delta: Vec<Vec<StateSet>>,
        accepting: StateSet,
    ) -> Result<Self> {
        let n = states.len();
        if delta.len() != n {
            return Err(Error::InvalidAutomaton(format!(
                "{} states but {} transition formulas",
                n,
                delta.len()
            )));
        }
        if accepting.universe() != n {
            return Err(Error::InvalidAutomaton(
                "accepting set over the wrong universe".into(),
            ));
        }
        let mut canonical = Vec::with_capacity(n);
        for (q, mut clauses) in delta.into_iter().enumerate() {
            if clauses.is_empty() {
                return Err(Error::InvalidAutomaton(format!(
                    "state `{}` has no clause",
                    states[q]
                )));
            }
            if clauses.iter().any(|c| c.is_empty() || c.universe() != n) {
                return Err(Error::InvalidAutomaton(format!(
                    "state `{}` has an empty or foreign clause",
                    states[q]
                )));
            }
            clauses.sort();
            clauses.dedup();
            canonical.push(clauses);
        }
        Ok(Afa {
            states,
            delta: canonical,
            accepting,
        })
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn state_names(&self) -> &[String] {
        &self.states
    }

    pub fn state_id(&self, name: &str) -> Result<StateId> {
        self.states
            .iter()
            .position(|s| s == name)
            .ok_or_else(|| Error::UnknownState(name.to_string()))
    }

    pub fn clauses(&self, q: StateId) -> &[StateSet] {
        &self.delta[q]
    }

    pub fn accepting(&self) -> &StateSet {
        &self.accepting
    }

    /// `Pre_A(S) = { q | S ⊨ delta(q) }`.
    pub fn pre(&self, s: &StateSet) -> StateSet {
        StateSet::from_indices(
            self.num_states(),
            (0..self.num_states()).filter(|q| self.delta[*q].iter().any(|c| c.is_subset(s))),
        )
    }

    /// Same automaton with states renamed by `perm` (old index -> new index).
    pub fn permute(&self, perm: &[usize]) -> Afa {
        let n = self.num_states();
        let map = |s: &StateSet| StateSet::from_indices(n, s.iter().map(|q| perm[q]));
        let mut states = vec![String::new(); n];
        let mut delta = vec![Vec::new(); n];
        for q in 0..n {
            states[perm[q]] = self.states[q].clone();
            delta[perm[q]] = self.delta[q].iter().map(map).collect();
        }
        Afa::new(states, delta, map(&self.accepting)).expect("permutation preserves validity")
    }

    fn check_state(&self, q: StateId) -> Result<()> {
        if q < self.num_states() {
            Ok(())
        } else {
            Err(Error::UnknownState(format!("#{q}")))
        }
    }
}

/// `Acc_A(n, F)`: states from which the word of length `n` is accepted.
pub fn acc(afa: &Afa, n: usize) -> StateSet {
    let mut cur = afa.accepting.clone();
    for _ in 0..n {
        let next = afa.pre(&cur);
        if next == cur {
            break;
        }
        cur = next;
    }
    cur
}

pub fn acc_lasso(afa: &Afa, limits: &Limits) -> Result<Lasso<StateSet>> {
    detect(
        afa.accepting.clone(),
        |s| afa.pre(s),
        limits.max_lasso_iterations,
    )
}

/// True when the language from `q` is empty.
pub fn emptiness(afa: &Afa, q: StateId, limits: &Limits) -> Result<bool> {
    afa.check_state(q)?;
    Ok(!acc_lasso(afa, limits)?.items.iter().any(|s| s.contains(q)))
}

/// True when the language from `q` is finite.
pub fn finiteness(afa: &Afa, q: StateId, limits: &Limits) -> Result<bool> {
    afa.check_state(q)?;
    Ok(!acc_lasso(afa, limits)?
        .periodic()
        .iter()
        .any(|s| s.contains(q)))
}

/// True when the language is finite from every state.
pub fn universal_finiteness(afa: &Afa, limits: &Limits) -> Result<bool> {
    Ok(acc_lasso(afa, limits)?.items.iter().any(StateSet::is_empty))
}

/// Adds the clause `{q}` to `delta(q)`: empty from `q` iff the result is finite from `q`.
pub fn gadget_emptiness_to_finiteness(afa: &Afa, q: StateId) -> Result<Afa> {
    afa.check_state(q)?;
    let mut delta = afa.delta.clone();
    delta[q].push(StateSet::singleton(afa.num_states(), q));
    Afa::new(afa.states.clone(), delta, afa.accepting.clone())
}

/// The first `n` primes, by trial division.
pub fn first_primes(n: usize) -> Vec<usize> {
    let mut primes: Vec<usize> = Vec::with_capacity(n);
    let mut candidate = 2;
    while primes.len() < n {
        if primes
            .iter()
            .take_while(|p| *p * *p <= candidate)
            .all(|p| candidate % p != 0)
        {
            primes.push(candidate);
        }
        candidate += 1;
    }
    primes
}

/// Layout of the automaton built by [`gadget_emptiness_to_universal_finiteness`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniversalGadget {
    pub afa: Afa,
    /// The entry state `x`.
    pub entry: StateId,
    /// Component `i` holds `c_i_0 .. c_i_{p_i - 1}`.
    pub components: Vec<Vec<StateId>>,
    pub primes: Vec<usize>,
}

impl UniversalGadget {
    /// Product of the component lengths.
    pub fn period(&self) -> usize {
        self.primes.iter().product()
    }
}

/// Reduction from emptiness at `q0` to universal finiteness.
///
/// Original states keep their indices. Every original clause gains the
/// conjunct `x`, and `q0` additionally loops on itself. `x` branches to the
/// heads of `|Q|` cycles of prime lengths `2, 3, 5, ..`; each cycle step also
/// requires `x`. All gadget states except each cycle's last one accept, so `x`
/// is accepted for every length below `p_1 * .. * p_n`, misses that length,
/// reappears once at the length after it and is gone for good afterwards.
/// Gadget states are named `x` and `c_i_j` (component `i` from 1, position `j` from 0).
pub fn gadget_emptiness_to_universal_finiteness(afa: &Afa, q0: StateId) -> Result<UniversalGadget> {
    afa.check_state(q0)?;
    let n = afa.num_states();
    let primes = first_primes(n);
    let total = n + 1 + primes.iter().sum::<usize>();

    let mut states = afa.states.clone();
    let entry = n;
    states.push(fresh_name("x", &afa.states));
    let mut components = Vec::with_capacity(primes.len());
    for (i, p) in primes.iter().enumerate() {
        let ids: Vec<StateId> = (states.len()..states.len() + p).collect();
        for j in 0..*p {
            let name = fresh_name(&format!("c_{}_{}", i + 1, j), &afa.states);
            states.push(name);
        }
        components.push(ids);
    }

    let widen = |s: &StateSet| s.widen(total);
    let mut delta: Vec<Vec<StateSet>> = Vec::with_capacity(total);
    for q in 0..n {
        let mut clauses: Vec<StateSet> = afa.delta[q]
            .iter()
            .map(|c| {
                let mut c = widen(c);
                c.insert(entry);
                c
            })
            .collect();
        if q == q0 {
            clauses.push(StateSet::singleton(total, q0));
        }
        delta.push(clauses);
    }
    delta.push(
        components
            .iter()
            .map(|c| StateSet::singleton(total, c[0]))
            .collect(),
    );
    for comp in &components {
        for j in 0..comp.len() {
            let next = comp[(j + 1) % comp.len()];
            delta.push(vec![StateSet::from_indices(total, [entry, next])]);
        }
    }

    let mut accepting = widen(&afa.accepting);
    accepting.insert(entry);
    for comp in &components {
        for c in &comp[..comp.len() - 1] {
            accepting.insert(*c);
        }
    }
    Ok(UniversalGadget {
        afa: Afa::new(states, delta, accepting)?,
        entry,
        components,
        primes,
    })
}

/// Pads clause lists to a common length by repeating each state's last clause,
/// then action `a_k` is uniform over the `k`-th clause.
pub fn afa_to_mdp(afa: &Afa) -> Mdp {
    let n = afa.num_states();
    let m = afa.delta.iter().map(Vec::len).max().unwrap_or(1);
    let rows = afa
        .delta
        .iter()
        .map(|clauses| {
            (0..m)
                .map(|k| {
                    let clause = &clauses[k.min(clauses.len() - 1)];
                    let w: Rational = ratio(1, clause.len() as i64);
                    clause.iter().map(|q| (q, w.clone())).collect()
                })
                .collect()
        })
        .collect();
    let actions = (1..=m).map(|k| format!("a{k}")).collect();
    debug_assert_eq!(afa.states.len(), n);
    Mdp::new(afa.states.clone(), actions, rows).expect("uniform clause rows are valid")
}

/// `delta(q) = OR over actions of AND over post(q, a)`, accepting `t`.
pub fn mdp_to_afa(mdp: &Mdp, t: &StateSet) -> Afa {
    let delta = (0..mdp.num_states())
        .map(|q| {
            (0..mdp.num_actions())
                .map(|a| mdp.support(q, a).clone())
                .collect()
        })
        .collect();
    Afa::new(mdp.state_names().to_vec(), delta, t.clone()).expect("supports are nonempty clauses")
}

/// `pre` through the MDP view, used to state the conversion identity.
pub fn mdp_pre_sequence(mdp: &Mdp, t: &StateSet, len: usize) -> Vec<StateSet> {
    let mut out = Vec::with_capacity(len);
    let mut cur = t.clone();
    for _ in 0..len {
        let next = pre(mdp, &cur);
        out.push(cur);
        cur = next;
    }
    out
}
