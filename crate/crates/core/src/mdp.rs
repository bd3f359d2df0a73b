//! Markov decision processes with exact rational transition rows, and the
//! predecessor operator over their alternating graph.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{format_fraction, Rational};
use crate::set::StateSet;

pub type StateId = usize;
pub type ActionId = usize;

/// A probability distribution over states, stored sparsely.
///
/// Entries are sorted by state, strictly positive and sum to exactly one.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Distribution {
    entries: Vec<(StateId, Rational)>,
}

impl Distribution {
    /// Merges repeated states and drops zero weights.
    pub fn new<I: IntoIterator<Item = (StateId, Rational)>>(entries: I) -> Result<Self> {
        let mut merged: BTreeMap<StateId, Rational> = BTreeMap::new();
        for (q, p) in entries {
            if p.is_negative() {
                return Err(Error::InvalidDistribution(format!(
                    "negative weight {} on state {q}",
                    format_fraction(&p)
                )));
            }
            *merged.entry(q).or_insert_with(Rational::zero) += p;
        }
        let entries: Vec<_> = merged.into_iter().filter(|(_, p)| !p.is_zero()).collect();
        let total: Rational = entries.iter().map(|(_, p)| p).sum();
        if !total.is_one() {
            return Err(Error::InvalidDistribution(format!(
                "mass {} instead of 1",
                format_fraction(&total)
            )));
        }
        Ok(Distribution { entries })
    }

    pub fn dirac(q: StateId) -> Self {
        Distribution {
            entries: vec![(q, Rational::one())],
        }
    }

    /// Uniform over a nonempty set.
    pub fn uniform(set: &StateSet) -> Result<Self> {
        let n = set.len();
        if n == 0 {
            return Err(Error::InvalidDistribution(
                "uniform over the empty set".into(),
            ));
        }
        let w = Rational::new(1.into(), (n as i64).into());
        Ok(Distribution {
            entries: set.iter().map(|q| (q, w.clone())).collect(),
        })
    }

    /// Builds from masses already known to be positive and to sum to one.
    pub(crate) fn from_sorted_unchecked(entries: Vec<(StateId, Rational)>) -> Self {
        debug_assert!(entries.windows(2).all(|w| w[0].0 < w[1].0));
        Distribution { entries }
    }

    pub fn entries(&self) -> &[(StateId, Rational)] {
        &self.entries
    }

    pub fn get(&self, q: StateId) -> Rational {
        self.entries
            .binary_search_by_key(&q, |(s, _)| *s)
            .map(|i| self.entries[i].1.clone())
            .unwrap_or_else(|_| Rational::zero())
    }

    /// `sum_T`.
    pub fn mass(&self, set: &StateSet) -> Rational {
        self.entries
            .iter()
            .filter(|(q, _)| set.contains(*q))
            .map(|(_, p)| p)
            .sum()
    }

    /// `max_T`.
    pub fn max_over(&self, set: &StateSet) -> Rational {
        self.entries
            .iter()
            .filter(|(q, _)| set.contains(*q))
            .map(|(_, p)| p.clone())
            .max()
            .unwrap_or_else(Rational::zero)
    }

    pub fn support(&self, universe: usize) -> StateSet {
        StateSet::from_indices(universe, self.entries.iter().map(|(q, _)| *q))
    }

    pub fn as_dirac(&self) -> Option<StateId> {
        match self.entries.as_slice() {
            [(q, _)] => Some(*q),
            _ => None,
        }
    }

    pub fn max_state(&self) -> Option<StateId> {
        self.entries.last().map(|(q, _)| *q)
    }

    pub fn total(&self) -> Rational {
        self.entries.iter().map(|(_, p)| p).sum()
    }
}

/// A model diagnostic from [`validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    NoStates,
    NoActions,
    DuplicateName(String),
    MissingRow {
        state: String,
        action: String,
    },
    EmptySupport {
        state: String,
        action: String,
    },
    NonPositive {
        state: String,
        action: String,
        target: String,
    },
    Dangling {
        state: String,
        action: String,
        target: usize,
    },
    RowMass {
        state: String,
        action: String,
        mass: Rational,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoStates => write!(f, "empty state set"),
            Violation::NoActions => write!(f, "empty action set"),
            Violation::DuplicateName(n) => write!(f, "duplicate name `{n}`"),
            Violation::MissingRow { state, action } => {
                write!(f, "no transition row for ({state}, {action})")
            }
            Violation::EmptySupport { state, action } => {
                write!(f, "empty support for ({state}, {action})")
            }
            Violation::NonPositive {
                state,
                action,
                target,
            } => {
                write!(
                    f,
                    "non-positive probability ({state}, {action}) -> {target}"
                )
            }
            Violation::Dangling {
                state,
                action,
                target,
            } => {
                write!(f, "({state}, {action}) refers to unknown state #{target}")
            }
            Violation::RowMass {
                state,
                action,
                mass,
            } => {
                write!(f, "({state}, {action}): row mass {}", format_fraction(mass))
            }
        }
    }
}

/// An unchecked model: `rows[state][action]` lists `(successor, probability)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MdpDraft {
    pub states: Vec<String>,
    pub actions: Vec<String>,
    pub rows: Vec<Vec<Vec<(usize, Rational)>>>,
}

pub fn validate(draft: &MdpDraft) -> Vec<Violation> {
    let mut out = Vec::new();
    if draft.states.is_empty() {
        out.push(Violation::NoStates);
    }
    if draft.actions.is_empty() {
        out.push(Violation::NoActions);
    }
    for names in [&draft.states, &draft.actions] {
        let mut seen = std::collections::BTreeSet::new();
        for n in names.iter() {
            if !seen.insert(n) {
                out.push(Violation::DuplicateName(n.clone()));
            }
        }
    }
    let n = draft.states.len();
    for (q, state) in draft.states.iter().enumerate() {
        for (a, action) in draft.actions.iter().enumerate() {
            let Some(row) = draft.rows.get(q).and_then(|r| r.get(a)) else {
                out.push(Violation::MissingRow {
                    state: state.clone(),
                    action: action.clone(),
                });
                continue;
            };
            if row.is_empty() {
                out.push(Violation::EmptySupport {
                    state: state.clone(),
                    action: action.clone(),
                });
                continue;
            }
            let mut mass = Rational::zero();
            for (t, p) in row {
                if *t >= n {
                    out.push(Violation::Dangling {
                        state: state.clone(),
                        action: action.clone(),
                        target: *t,
                    });
                } else if !p.is_positive() {
                    out.push(Violation::NonPositive {
                        state: state.clone(),
                        action: action.clone(),
                        target: draft.states[*t].clone(),
                    });
                }
                mass += p;
            }
            if !mass.is_one() {
                out.push(Violation::RowMass {
                    state: state.clone(),
                    action: action.clone(),
                    mass,
                });
            }
        }
    }
    out
}

/// `M = <Q, A, delta>` with display names for states and actions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mdp {
    states: Vec<String>,
    actions: Vec<String>,
    rows: Vec<Vec<Distribution>>,
    supports: Vec<Vec<StateSet>>,
}

impl Mdp {
    pub fn new(
        states: Vec<String>,
        actions: Vec<String>,
        rows: Vec<Vec<Vec<(usize, Rational)>>>,
    ) -> Result<Self> {
        Self::from_draft(MdpDraft {
            states,
            actions,
            rows,
        })
    }

    pub fn from_draft(draft: MdpDraft) -> Result<Self> {
        let violations = validate(&draft);
        if !violations.is_empty() {
            return Err(Error::InvalidModel(violations));
        }
        let n = draft.states.len();
        let rows: Vec<Vec<Distribution>> = draft
            .rows
            .into_iter()
            .map(|per_action| {
                per_action
                    .into_iter()
                    .map(|row| Distribution::new(row).expect("validated row"))
                    .collect()
            })
            .collect();
        let supports = rows
            .iter()
            .map(|per_action| per_action.iter().map(|d| d.support(n)).collect())
            .collect();
        Ok(Mdp {
            states: draft.states,
            actions: draft.actions,
            rows,
            supports,
        })
    }

    pub fn to_draft(&self) -> MdpDraft {
        MdpDraft {
            states: self.states.clone(),
            actions: self.actions.clone(),
            rows: self
                .rows
                .iter()
                .map(|r| r.iter().map(|d| d.entries().to_vec()).collect())
                .collect(),
        }
    }

    /// Always empty for a constructed model; kept for symmetry with drafts.
    pub fn validate(&self) -> Vec<Violation> {
        validate(&self.to_draft())
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn num_actions(&self) -> usize {
        self.actions.len()
    }

    pub fn state_names(&self) -> &[String] {
        &self.states
    }

    pub fn action_names(&self) -> &[String] {
        &self.actions
    }

    pub fn state_name(&self, q: StateId) -> &str {
        &self.states[q]
    }

    pub fn action_name(&self, a: ActionId) -> &str {
        &self.actions[a]
    }

    pub fn state_id(&self, name: &str) -> Result<StateId> {
        self.states
            .iter()
            .position(|s| s == name)
            .ok_or_else(|| Error::UnknownState(name.to_string()))
    }

    pub fn action_id(&self, name: &str) -> Result<ActionId> {
        self.actions
            .iter()
            .position(|s| s == name)
            .ok_or_else(|| Error::UnknownAction(name.to_string()))
    }

    pub fn state_set<S: AsRef<str>>(&self, names: &[S]) -> Result<StateSet> {
        let mut set = self.empty_set();
        for n in names {
            set.insert(self.state_id(n.as_ref())?);
        }
        Ok(set)
    }

    pub fn set_names(&self, set: &StateSet) -> Vec<String> {
        set.iter().map(|q| self.states[q].clone()).collect()
    }

    pub fn empty_set(&self) -> StateSet {
        StateSet::empty(self.num_states())
    }

    pub fn full_set(&self) -> StateSet {
        StateSet::full(self.num_states())
    }

    pub fn transition(&self, q: StateId, a: ActionId) -> &Distribution {
        &self.rows[q][a]
    }

    /// `post(q, a) = Supp(delta(q, a))`, unchecked indices.
    pub fn support(&self, q: StateId, a: ActionId) -> &StateSet {
        &self.supports[q][a]
    }

    pub fn is_absorbing(&self, q: StateId) -> bool {
        (0..self.num_actions()).all(|a| self.rows[q][a].as_dirac() == Some(q))
    }

    /// Lowest action whose whole support lies in `target`.
    pub fn safe_action(&self, q: StateId, target: &StateSet) -> Option<ActionId> {
        (0..self.num_actions()).find(|a| self.supports[q][*a].is_subset(target))
    }

    /// Rejects distributions that mention states outside the model.
    pub(crate) fn check_distribution(&self, mu: &Distribution) -> Result<()> {
        match mu.max_state() {
            Some(q) if q >= self.num_states() => Err(Error::InvalidDistribution(format!(
                "state #{q} outside the model"
            ))),
            _ => Ok(()),
        }
    }
}

pub fn post(mdp: &Mdp, q: StateId, a: ActionId) -> Result<StateSet> {
    if q >= mdp.num_states() {
        return Err(Error::UnknownState(format!("#{q}")));
    }
    if a >= mdp.num_actions() {
        return Err(Error::UnknownAction(format!("#{a}")));
    }
    Ok(mdp.support(q, a).clone())
}

/// `Pre(S) = { q | exists a: post(q, a) ⊆ S }`.
pub fn pre(mdp: &Mdp, s: &StateSet) -> StateSet {
    StateSet::from_indices(
        mdp.num_states(),
        (0..mdp.num_states()).filter(|q| mdp.safe_action(*q, s).is_some()),
    )
}

pub fn pre_k(mdp: &Mdp, s: &StateSet, k: usize) -> StateSet {
    let mut cur = s.clone();
    for _ in 0..k {
        let next = pre(mdp, &cur);
        if next == cur {
            break;
        }
        cur = next;
    }
    cur
}

/// Picks a name based on `base` that is not in `taken`.
pub(crate) fn fresh_name(base: &str, taken: &[String]) -> String {
    let mut name = base.to_string();
    while taken.contains(&name) {
        name.push('\'');
    }
    name
}

/// Copy of `mdp` with a fresh last state whose every action leads to `mu0`.
pub fn add_initial_state(mdp: &Mdp, mu0: &Distribution) -> Result<(Mdp, StateId)> {
    mdp.check_distribution(mu0)?;
    let mut draft = mdp.to_draft();
    let fresh = draft.states.len();
    draft.states.push(fresh_name("init", &draft.states));
    draft
        .rows
        .push(vec![mu0.entries().to_vec(); draft.actions.len()]);
    Ok((Mdp::from_draft(draft)?, fresh))
}

/// Where each original state lives in the output of [`twin_duplicate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwinLayout {
    pub kept: StateId,
    pub copies: Vec<Vec<StateId>>,
}

impl TwinLayout {
    pub fn new(num_states: usize, kept: StateId) -> Self {
        let mut next = 0;
        let copies = (0..num_states)
            .map(|s| {
                let width = if s == kept { 1 } else { 2 };
                let ids = (next..next + width).collect();
                next += width;
                ids
            })
            .collect();
        TwinLayout { kept, copies }
    }

    pub fn num_states(&self) -> usize {
        self.copies.iter().map(Vec::len).sum()
    }

    /// Splits the mass of every duplicated state evenly between its copies.
    pub fn lift(&self, mu: &Distribution) -> Distribution {
        let half = Rational::new(1.into(), 2.into());
        let mut entries = Vec::new();
        for (s, p) in mu.entries() {
            match self.copies[*s].as_slice() {
                [only] => entries.push((*only, p.clone())),
                copies => {
                    for c in copies {
                        entries.push((*c, p * &half));
                    }
                }
            }
        }
        Distribution::from_sorted_unchecked(entries)
    }
}

/// Duplicates every state except `kept`, halving probabilities into copies.
pub fn twin_duplicate(mdp: &Mdp, kept: StateId) -> Result<Mdp> {
    if kept >= mdp.num_states() {
        return Err(Error::UnknownState(format!("#{kept}")));
    }
    let layout = TwinLayout::new(mdp.num_states(), kept);
    let mut states = Vec::with_capacity(layout.num_states());
    for (s, name) in mdp.state_names().iter().enumerate() {
        if s == kept {
            states.push(name.clone());
        } else {
            for i in 1..=2 {
                let candidate = format!("{name}_{i}");
                let unique = fresh_name(&candidate, mdp.state_names());
                states.push(unique);
            }
        }
    }
    let mut rows = vec![Vec::new(); layout.num_states()];
    for s in 0..mdp.num_states() {
        let per_action: Vec<Vec<(usize, Rational)>> = (0..mdp.num_actions())
            .map(|a| layout.lift(mdp.transition(s, a)).entries().to_vec())
            .collect();
        for c in &layout.copies[s] {
            rows[*c] = per_action.clone();
        }
    }
    Mdp::new(states, mdp.action_names().to_vec(), rows)
}
