//! Deciders for always and eventually synchronizing objectives.

use std::fmt;

use crate::error::{Error, Result};
use crate::lasso::{pair_lasso, pre_lasso};
use crate::mdp::{add_initial_state, pre, ActionId, Distribution, Mdp, StateId};
use crate::set::StateSet;
use crate::Limits;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SyncFunction {
    Sum,
    Max,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Objective {
    Always,
    Eventually,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    Sure,
    Almost,
    Limit,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::Sure, Mode::Almost, Mode::Limit];
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Sure => "sure",
            Mode::Almost => "almost",
            Mode::Limit => "limit",
        })
    }
}

/// `sum_T` or `max_T` over a nonempty target.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TargetSpec {
    pub function: SyncFunction,
    pub target: StateSet,
}

impl TargetSpec {
    pub fn new(function: SyncFunction, target: StateSet) -> Result<Self> {
        if target.is_empty() {
            return Err(Error::EmptyTarget);
        }
        Ok(TargetSpec { function, target })
    }

    pub fn sum(target: StateSet) -> Result<Self> {
        Self::new(SyncFunction::Sum, target)
    }

    pub fn max(target: StateSet) -> Result<Self> {
        Self::new(SyncFunction::Max, target)
    }
}

/// Why a limit-sure instance is winning.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LimitWitness {
    /// Already sure winning at this horizon.
    Sure { horizon: usize },
    /// Reachability of `target × {0}` in the product over the periodic part
    /// of the pair lasso, entered at `position`.
    Periodic {
        prefix_len: usize,
        period: usize,
        target: StateSet,
        support: StateSet,
        position: usize,
    },
}

/// Answers per winning mode; `None` when a mode was not requested.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Verdict {
    pub sure: Option<bool>,
    pub almost_sure: Option<bool>,
    pub limit_sure: Option<bool>,
    pub sure_witness: Option<usize>,
    pub almost_witness: Option<StateSet>,
    pub limit_witness: Option<LimitWitness>,
    pub diagnostics: Vec<String>,
}

impl Verdict {
    pub fn get(&self, mode: Mode) -> Option<bool> {
        match mode {
            Mode::Sure => self.sure,
            Mode::Almost => self.almost_sure,
            Mode::Limit => self.limit_sure,
        }
    }

    /// All three answers, when all were computed.
    pub fn triple(&self) -> Option<(bool, bool, bool)> {
        Some((self.sure?, self.almost_sure?, self.limit_sure?))
    }

    /// `sure ⇒ almost ⇒ limit` over the computed modes.
    pub fn is_monotone(&self) -> bool {
        let computed: Vec<bool> = Mode::ALL.iter().filter_map(|m| self.get(*m)).collect();
        computed.windows(2).all(|w| !w[0] || w[1])
    }

    fn set(&mut self, mode: Mode, value: bool) {
        match mode {
            Mode::Sure => self.sure = Some(value),
            Mode::Almost => self.almost_sure = Some(value),
            Mode::Limit => self.limit_sure = Some(value),
        }
    }
}

/// Greatest fixpoint of `W = T ∩ Pre(W)`.
pub fn safety_region(mdp: &Mdp, t: &StateSet) -> StateSet {
    let mut w = t.clone();
    loop {
        let next = t.intersection(&pre(mdp, &w));
        if next == w {
            return w;
        }
        w = next;
    }
}

pub fn decide_always_sum(mdp: &Mdp, mu0: &Distribution, t: &StateSet) -> Result<bool> {
    mdp.check_distribution(mu0)?;
    Ok(mu0
        .support(mdp.num_states())
        .is_subset(&safety_region(mdp, t)))
}

/// States of `t` that can stay in `t` forever along probability-one edges.
pub fn dirac_safety_region(mdp: &Mdp, t: &StateSet) -> StateSet {
    let mut w = t.clone();
    loop {
        let next = StateSet::from_indices(
            mdp.num_states(),
            w.iter().filter(|q| {
                (0..mdp.num_actions()).any(|a| {
                    mdp.transition(*q, a)
                        .as_dirac()
                        .is_some_and(|s| w.contains(s))
                })
            }),
        );
        if next == w {
            return w;
        }
        w = next;
    }
}

/// False for every non-Dirac `mu0`.
pub fn decide_always_max(mdp: &Mdp, mu0: &Distribution, t: &StateSet) -> Result<bool> {
    mdp.check_distribution(mu0)?;
    Ok(mu0
        .as_dirac()
        .is_some_and(|q0| dirac_safety_region(mdp, t).contains(q0)))
}

/// Smallest `n` with `q0 ∈ Pre^n(t)`, if any.
pub fn decide_sure_eventually(
    mdp: &Mdp,
    q0: StateId,
    t: &StateSet,
    limits: &Limits,
) -> Result<Option<usize>> {
    check_state(mdp, q0)?;
    Ok(pre_lasso(mdp, t, limits)?.first_index(|s| s.contains(q0)))
}

fn check_state(mdp: &Mdp, q: StateId) -> Result<()> {
    if q < mdp.num_states() {
        Ok(())
    } else {
        Err(Error::UnknownState(format!("#{q}")))
    }
}

/// The MDP over `Q × {0..r} ∪ {sink}` that only lets Z-safe actions through.
///
/// Position `i` stands for the `i`-th set of the periodic part; moving one
/// step decrements the position modulo `r`.
#[derive(Clone, Debug)]
pub struct ProductMdp {
    pub mdp: Mdp,
    pub base_states: usize,
    pub period: usize,
    pub sink: StateId,
    /// `(R_i, Z_i)` for each position.
    pub layers: Vec<(StateSet, StateSet)>,
}

impl ProductMdp {
    pub fn index(&self, q: StateId, position: usize) -> StateId {
        position * self.base_states + q
    }

    /// `(q, position)` of a non-sink product state.
    pub fn origin(&self, s: StateId) -> Option<(StateId, usize)> {
        (s != self.sink).then(|| (s % self.base_states, s / self.base_states))
    }

    pub fn previous(&self, position: usize) -> usize {
        (position + self.period - 1) % self.period
    }

    /// `{(q, position) | q ∈ set}`.
    pub fn layer_set(&self, set: &StateSet, position: usize) -> StateSet {
        StateSet::from_indices(
            self.mdp.num_states(),
            set.iter().map(|q| self.index(q, position)),
        )
    }
}

/// Actions whose support lies in the support set of the previous position.
pub fn z_safe_actions(mdp: &Mdp, z_sequence: &[StateSet], q: StateId, i: usize) -> Vec<ActionId> {
    let r = z_sequence.len();
    if !z_sequence[i].contains(q) {
        return Vec::new();
    }
    let prev = &z_sequence[(i + r - 1) % r];
    (0..mdp.num_actions())
        .filter(|a| mdp.support(q, *a).is_subset(prev))
        .collect()
}

/// Builds the product from the periodic part of a pair lasso.
pub fn build_product(mdp: &Mdp, periodic: &[(StateSet, StateSet)]) -> Result<ProductMdp> {
    let r = periodic.len();
    if r == 0 {
        return Err(Error::Precondition("empty periodic part".into()));
    }
    for i in 0..r {
        let (rt, zt) = &periodic[i];
        let (rn, zn) = &periodic[(i + 1) % r];
        if pre(mdp, rt) != *rn || pre(mdp, zt) != *zn {
            return Err(Error::Precondition(format!(
                "periodic part is not closed under pre at position {i}"
            )));
        }
    }
    let n = mdp.num_states();
    let sink = n * r;
    let z_sequence: Vec<StateSet> = periodic.iter().map(|(_, z)| z.clone()).collect();
    let mut states = Vec::with_capacity(sink + 1);
    for i in 0..r {
        for q in 0..n {
            states.push(format!("{}@{}", mdp.state_name(q), i));
        }
    }
    states.push(crate::mdp::fresh_name("sink", &states));
    let to_sink = vec![(sink, crate::rational::one())];
    let mut rows = Vec::with_capacity(sink + 1);
    for i in 0..r {
        let prev = (i + r - 1) % r;
        for q in 0..n {
            let safe = z_safe_actions(mdp, &z_sequence, q, i);
            rows.push(
                (0..mdp.num_actions())
                    .map(|a| {
                        if safe.contains(&a) {
                            mdp.transition(q, a)
                                .entries()
                                .iter()
                                .map(|(s, p)| (prev * n + s, p.clone()))
                                .collect()
                        } else {
                            to_sink.clone()
                        }
                    })
                    .collect(),
            );
        }
    }
    rows.push(vec![to_sink; mdp.num_actions()]);
    Ok(ProductMdp {
        mdp: Mdp::new(states, mdp.action_names().to_vec(), rows)?,
        base_states: n,
        period: r,
        sink,
        layers: periodic.to_vec(),
    })
}

/// Almost-sure reachability region with a memoryless witness strategy.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReachRegion {
    pub region: StateSet,
    /// Defined on the region.
    pub strategy: Vec<Option<ActionId>>,
}

/// States from which `goal` is reached with probability one.
///
/// Repeatedly shrinks a candidate set to the states that can reach `goal`
/// using actions that never leave the candidate set.
pub fn almost_sure_reach(mdp: &Mdp, goal: &StateSet) -> ReachRegion {
    let n = mdp.num_states();
    let mut w = StateSet::full(n);
    loop {
        let mut attr = goal.intersection(&w);
        let mut strategy: Vec<Option<ActionId>> = vec![None; n];
        loop {
            let layer: Vec<(StateId, ActionId)> = w
                .difference(&attr)
                .iter()
                .filter_map(|q| {
                    (0..mdp.num_actions())
                        .find(|a| {
                            let s = mdp.support(q, *a);
                            s.is_subset(&w) && s.intersects(&attr)
                        })
                        .map(|a| (q, a))
                })
                .collect();
            if layer.is_empty() {
                break;
            }
            for (q, a) in layer {
                attr.insert(q);
                strategy[q] = Some(a);
            }
        }
        if attr == w {
            for q in goal.intersection(&w).iter() {
                strategy[q] = Some(mdp.safe_action(q, &w).unwrap_or(0));
            }
            return ReachRegion {
                region: w,
                strategy,
            };
        }
        w = attr;
    }
}

/// Limit-sure eventually synchronizing in `t` with every support inside `u`.
pub fn decide_limit_sure_with_support(
    mdp: &Mdp,
    q0: StateId,
    t: &StateSet,
    u: &StateSet,
    limits: &Limits,
) -> Result<Option<LimitWitness>> {
    check_state(mdp, q0)?;
    if !t.is_subset(u) {
        return Err(Error::Precondition(
            "target must lie inside the support set".into(),
        ));
    }
    if let Some(horizon) = decide_sure_eventually(mdp, q0, t, limits)? {
        return Ok(Some(LimitWitness::Sure { horizon }));
    }
    let lasso = pair_lasso(mdp, t, u, limits)?;
    let product = build_product(mdp, lasso.periodic())?;
    let (r_set, z_set) = lasso.items[lasso.prefix_len].clone();
    let goal = product.layer_set(&r_set, 0);
    let region = almost_sure_reach(&product.mdp, &goal).region;
    Ok((0..product.period)
        .find(|pos| region.contains(product.index(q0, *pos)))
        .map(|position| LimitWitness::Periodic {
            prefix_len: lasso.prefix_len,
            period: lasso.period,
            target: r_set,
            support: z_set,
            position,
        }))
}

pub fn decide_limit_sure(
    mdp: &Mdp,
    q0: StateId,
    t: &StateSet,
    limits: &Limits,
) -> Result<Option<LimitWitness>> {
    decide_limit_sure_with_support(mdp, q0, t, &mdp.full_set(), limits)
}

/// First support set `U` in increasing bitmask order witnessing almost-sure
/// winning: sure synchronization into `U`, then limit-sure synchronization
/// in `t ∩ U` from the uniform distribution on `U` with supports in `U`.
pub fn decide_almost_sure(
    mdp: &Mdp,
    q0: StateId,
    t: &StateSet,
    limits: &Limits,
) -> Result<Option<StateSet>> {
    check_state(mdp, q0)?;
    let n = mdp.num_states();
    if n > limits.max_subset_states || n >= 64 {
        return Err(Error::ResourceCap {
            what: "support subsets",
            limit: limits.max_subset_states,
        });
    }
    for mask in 1u64..(1 << n) {
        let u = StateSet::from_mask(n, mask);
        if let Some(found) = almost_sure_candidate(mdp, q0, t, &u, limits)? {
            return Ok(Some(found));
        }
    }
    Ok(None)
}

/// Tests one candidate support set for [`decide_almost_sure`].
pub fn almost_sure_candidate(
    mdp: &Mdp,
    q0: StateId,
    t: &StateSet,
    u: &StateSet,
    limits: &Limits,
) -> Result<Option<StateSet>> {
    let tu = t.intersection(u);
    if tu.is_empty() || decide_sure_eventually(mdp, q0, u, limits)?.is_none() {
        return Ok(None);
    }
    let (wide, init) = add_initial_state(mdp, &Distribution::uniform(u)?)?;
    let size = wide.num_states();
    let lim = decide_limit_sure_with_support(&wide, init, &tu.widen(size), &u.widen(size), limits)?;
    Ok(lim.map(|_| u.clone()))
}

/// Every mode of `objective` for `spec` from `mu0`.
pub fn classify(
    mdp: &Mdp,
    mu0: &Distribution,
    spec: &TargetSpec,
    objective: Objective,
    limits: &Limits,
) -> Result<Verdict> {
    decide(mdp, mu0, spec, objective, &Mode::ALL, limits)
}

/// The requested modes only.
pub fn decide(
    mdp: &Mdp,
    mu0: &Distribution,
    spec: &TargetSpec,
    objective: Objective,
    modes: &[Mode],
    limits: &Limits,
) -> Result<Verdict> {
    mdp.check_distribution(mu0)?;
    if spec.target.universe() != mdp.num_states() {
        return Err(Error::Precondition(
            "target set over the wrong universe".into(),
        ));
    }
    match objective {
        Objective::Always => decide_always(mdp, mu0, spec, modes),
        Objective::Eventually => match spec.function {
            SyncFunction::Sum => eventually_from(mdp, mu0, &spec.target, modes, limits),
            SyncFunction::Max => eventually_max(mdp, mu0, &spec.target, modes, limits),
        },
    }
}

fn decide_always(
    mdp: &Mdp,
    mu0: &Distribution,
    spec: &TargetSpec,
    modes: &[Mode],
) -> Result<Verdict> {
    let mut v = Verdict::default();
    let win = match spec.function {
        SyncFunction::Sum => decide_always_sum(mdp, mu0, &spec.target)?,
        SyncFunction::Max => {
            if mu0.as_dirac().is_none() {
                v.diagnostics
                    .push("always max from a non-Dirac initial distribution is losing".into());
            }
            decide_always_max(mdp, mu0, &spec.target)?
        }
    };
    for m in modes {
        v.set(*m, win);
    }
    Ok(v)
}

fn eventually_max(
    mdp: &Mdp,
    mu0: &Distribution,
    t: &StateSet,
    modes: &[Mode],
    limits: &Limits,
) -> Result<Verdict> {
    let mut v = Verdict::default();
    for m in modes {
        v.set(*m, false);
    }
    for q in t.iter() {
        let single = StateSet::singleton(mdp.num_states(), q);
        let open: Vec<Mode> = modes
            .iter()
            .copied()
            .filter(|m| v.get(*m) != Some(true))
            .collect();
        if open.is_empty() {
            break;
        }
        let sub = eventually_from(mdp, mu0, &single, &open, limits)?;
        for m in open {
            if sub.get(m) == Some(true) {
                v.set(m, true);
                v.diagnostics.push(format!(
                    "{m} witnessed by the single target state {}",
                    mdp.state_name(q)
                ));
                match m {
                    Mode::Sure => v.sure_witness = sub.sure_witness,
                    Mode::Almost => v.almost_witness = sub.almost_witness.clone(),
                    Mode::Limit => v.limit_witness = sub.limit_witness.clone(),
                }
            }
        }
        v.diagnostics.extend(sub.diagnostics);
    }
    v.diagnostics.dedup();
    Ok(v)
}

/// Eventually `sum_t` from an arbitrary initial distribution.
fn eventually_from(
    mdp: &Mdp,
    mu0: &Distribution,
    t: &StateSet,
    modes: &[Mode],
    limits: &Limits,
) -> Result<Verdict> {
    if let Some(q0) = mu0.as_dirac() {
        return eventually_dirac(mdp, q0, t, modes, limits);
    }
    let n = mdp.num_states();
    let (wide, init) = add_initial_state(mdp, mu0)?;
    let mut v = eventually_dirac(&wide, init, &t.widen(n + 1), modes, limits)?;
    v.sure_witness = v.sure_witness.map(|h| h - 1);
    v.almost_witness = v.almost_witness.map(|u| u.restrict(n));
    v.limit_witness = v.limit_witness.map(|w| match w {
        LimitWitness::Sure { horizon } => LimitWitness::Sure {
            horizon: horizon - 1,
        },
        LimitWitness::Periodic {
            prefix_len,
            period,
            target,
            support,
            position,
        } => LimitWitness::Periodic {
            prefix_len,
            period,
            target: target.restrict(n),
            support: support.restrict(n),
            position,
        },
    });
    v.diagnostics
        .push("non-Dirac initial distribution decided through a fresh initial state; witnesses projected back".into());
    Ok(v)
}

fn eventually_dirac(
    mdp: &Mdp,
    q0: StateId,
    t: &StateSet,
    modes: &[Mode],
    limits: &Limits,
) -> Result<Verdict> {
    let mut v = Verdict::default();
    for mode in modes {
        match mode {
            Mode::Sure => {
                let h = decide_sure_eventually(mdp, q0, t, limits)?;
                v.sure = Some(h.is_some());
                v.sure_witness = h;
            }
            Mode::Almost => {
                let u = decide_almost_sure(mdp, q0, t, limits)?;
                v.almost_sure = Some(u.is_some());
                v.almost_witness = u;
            }
            Mode::Limit => {
                let w = decide_limit_sure(mdp, q0, t, limits)?;
                v.limit_sure = Some(w.is_some());
                v.limit_witness = w;
            }
        }
    }
    Ok(v)
}
