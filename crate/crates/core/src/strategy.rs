//! Finite-memory strategies, exact symbolic outcomes and witness synthesis.

use std::collections::BTreeMap;

use crate::decide::{
    almost_sure_reach, build_product, decide_almost_sure, decide_limit_sure_with_support,
    decide_sure_eventually, safety_region, LimitWitness, Objective, SyncFunction, TargetSpec,
};
use crate::error::{Error, Result};
use crate::lasso::{pair_lasso, pre_lasso};
use crate::mdp::{add_initial_state, ActionId, Distribution, Mdp, StateId};
use crate::rational::{one, one_minus_pow2, Rational};
use crate::set::StateSet;
use crate::Limits;

/// A strategy with memory.
///
/// In mode `m` at state `q` the next action is drawn from `next_move[m][q]`
/// (a distribution over action indices); after action `a` leads to `q'` the
/// mode becomes `update[m][a][q']`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transducer {
    pub num_states: usize,
    pub num_actions: usize,
    pub initial_mode: usize,
    pub update: Vec<Vec<Vec<usize>>>,
    pub next_move: Vec<Vec<Distribution>>,
}

impl Transducer {
    pub fn new(
        num_states: usize,
        num_actions: usize,
        initial_mode: usize,
        update: Vec<Vec<Vec<usize>>>,
        next_move: Vec<Vec<Distribution>>,
    ) -> Result<Self> {
        let modes = next_move.len();
        let bad = |msg: String| Err(Error::Precondition(format!("malformed transducer: {msg}")));
        if modes == 0 || initial_mode >= modes || update.len() != modes {
            return bad("mode tables disagree".into());
        }
        for m in 0..modes {
            if next_move[m].len() != num_states {
                return bad(format!("mode {m} has {} move rows", next_move[m].len()));
            }
            if next_move[m]
                .iter()
                .any(|d| d.max_state().is_some_and(|a| a >= num_actions))
            {
                return bad(format!("mode {m} plays an unknown action"));
            }
            if update[m].len() != num_actions
                || update[m]
                    .iter()
                    .any(|row| row.len() != num_states || row.iter().any(|x| *x >= modes))
            {
                return bad(format!("mode {m} has a malformed update table"));
            }
        }
        Ok(Transducer {
            num_states,
            num_actions,
            initial_mode,
            update,
            next_move,
        })
    }

    /// Mode `i` plays `rows[i][q]` and moves to mode `i + 1`; the last mode repeats.
    pub fn from_counting(num_actions: usize, rows: &[Vec<ActionId>]) -> Result<Self> {
        let modes = rows.len();
        if modes == 0 {
            return Err(Error::Precondition(
                "counting strategy needs at least one row".into(),
            ));
        }
        let num_states = rows[0].len();
        let next_move = rows
            .iter()
            .map(|row| row.iter().map(|a| Distribution::dirac(*a)).collect())
            .collect();
        let update = (0..modes)
            .map(|m| vec![vec![(m + 1).min(modes - 1); num_states]; num_actions])
            .collect();
        Self::new(num_states, num_actions, 0, update, next_move)
    }

    /// A single mode playing `row[q]` forever.
    pub fn memoryless(num_actions: usize, row: Vec<ActionId>) -> Result<Self> {
        Self::from_counting(num_actions, &[row])
    }

    pub fn num_modes(&self) -> usize {
        self.next_move.len()
    }

    /// The per-step action table for steps `0..horizon`, if this is a pure
    /// strategy whose mode depends only on the step count.
    pub fn counting_rows(&self, horizon: usize) -> Option<Vec<Vec<ActionId>>> {
        let mut mode = self.initial_mode;
        let mut rows = Vec::with_capacity(horizon);
        for _ in 0..horizon {
            let row: Option<Vec<ActionId>> = self.next_move[mode]
                .iter()
                .map(Distribution::as_dirac)
                .collect();
            rows.push(row?);
            let next = self.update[mode][0][0];
            if self.update[mode].iter().flatten().any(|m| *m != next) {
                return None;
            }
            mode = next;
        }
        Some(rows)
    }

    fn check_compatible(&self, mdp: &Mdp) -> Result<()> {
        if self.num_states != mdp.num_states() || self.num_actions != mdp.num_actions() {
            return Err(Error::Precondition(format!(
                "strategy is for {} states and {} actions, model has {} and {}",
                self.num_states,
                self.num_actions,
                mdp.num_states(),
                mdp.num_actions()
            )));
        }
        Ok(())
    }
}

/// The distributions `M_0 = mu0, M_1, ..` induced by a strategy.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolicOutcome {
    pub steps: Vec<Distribution>,
}

impl SymbolicOutcome {
    pub fn value(&self, step: usize, spec: &TargetSpec) -> Rational {
        match spec.function {
            SyncFunction::Sum => self.steps[step].mass(&spec.target),
            SyncFunction::Max => self.steps[step].max_over(&spec.target),
        }
    }
}

/// Exact forward propagation of the joint (mode, state) distribution.
pub fn symbolic_outcome(
    mdp: &Mdp,
    mu0: &Distribution,
    strat: &Transducer,
    horizon: usize,
) -> Result<SymbolicOutcome> {
    strat.check_compatible(mdp)?;
    mdp.check_distribution(mu0)?;
    let mut joint: BTreeMap<(usize, StateId), Rational> = mu0
        .entries()
        .iter()
        .map(|(q, p)| ((strat.initial_mode, *q), p.clone()))
        .collect();
    let mut steps = vec![mu0.clone()];
    for _ in 0..horizon {
        let mut next: BTreeMap<(usize, StateId), Rational> = BTreeMap::new();
        for ((m, q), p) in &joint {
            for (a, pa) in strat.next_move[*m][*q].entries() {
                for (q2, pq) in mdp.transition(*q, *a).entries() {
                    let m2 = strat.update[*m][*a][*q2];
                    *next.entry((m2, *q2)).or_default() += p * pa * pq;
                }
            }
        }
        joint = next;
        steps.push(project(&joint));
    }
    Ok(SymbolicOutcome { steps })
}

fn project(joint: &BTreeMap<(usize, StateId), Rational>) -> Distribution {
    let mut by_state: BTreeMap<StateId, Rational> = BTreeMap::new();
    for ((_, q), p) in joint {
        *by_state.entry(*q).or_default() += p;
    }
    Distribution::new(by_state).expect("propagation conserves mass")
}

/// Eventually: the first step whose value reaches `p`. Always: whether every
/// computed step does, with the first violating step when not.
pub fn validate_sync(
    outcome: &SymbolicOutcome,
    spec: &TargetSpec,
    p: &Rational,
    objective: Objective,
) -> (bool, Option<usize>) {
    let mut meets = (0..outcome.steps.len()).map(|i| (i, outcome.value(i, spec) >= *p));
    match objective {
        Objective::Eventually => {
            let hit = meets.find(|(_, ok)| *ok).map(|(i, _)| i);
            (hit.is_some(), hit)
        }
        Objective::Always => match meets.find(|(_, ok)| !*ok) {
            Some((i, _)) => (false, Some(i)),
            None => (true, None),
        },
    }
}

/// A strategy together with the step it is validated at.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub transducer: Transducer,
    pub horizon: usize,
    /// Mass in the target at `horizon`.
    pub mass: Rational,
}

/// Counting strategy reaching `t` with mass exactly one at the minimal horizon.
pub fn synth_sure_eventually(
    mdp: &Mdp,
    q0: StateId,
    t: &StateSet,
    limits: &Limits,
) -> Result<Witness> {
    let n = decide_sure_eventually(mdp, q0, t, limits)?
        .ok_or_else(|| Error::NotWinning(format!("{} is not sure winning", mdp.state_name(q0))))?;
    let lasso = pre_lasso(mdp, t, limits)?;
    let rows: Vec<Vec<ActionId>> = (0..=n)
        .map(|i| {
            (0..mdp.num_states())
                .map(|q| {
                    if i == n || !lasso.at(n - i).contains(q) {
                        0
                    } else {
                        mdp.safe_action(q, lasso.at(n - i - 1)).unwrap_or(0)
                    }
                })
                .collect()
        })
        .collect();
    finish(mdp, q0, rows, n, t, None, |mass| *mass == one())
}

/// Memoryless strategy keeping the support inside the safety region of `t`.
pub fn synth_always_sum(mdp: &Mdp, mu0: &Distribution, t: &StateSet) -> Result<Transducer> {
    let w = safety_region(mdp, t);
    if !mu0.support(mdp.num_states()).is_subset(&w) {
        return Err(Error::NotWinning(
            "initial support leaves the safety region".into(),
        ));
    }
    let row = (0..mdp.num_states())
        .map(|q| mdp.safe_action(q, &w).unwrap_or(0))
        .collect();
    Transducer::memoryless(mdp.num_actions(), row)
}

/// Validates a counting table from Dirac `q0` and cuts it at the first step
/// meeting the contract.
fn finish(
    mdp: &Mdp,
    q0: StateId,
    mut rows: Vec<Vec<ActionId>>,
    horizon: usize,
    t: &StateSet,
    u: Option<&StateSet>,
    enough: impl Fn(&Rational) -> bool,
) -> Result<Witness> {
    rows.truncate(horizon);
    rows.push(vec![0; mdp.num_states()]);
    let full = Transducer::from_counting(mdp.num_actions(), &rows)?;
    let outcome = symbolic_outcome(mdp, &Distribution::dirac(q0), &full, horizon)?;
    let first = outcome
        .steps
        .iter()
        .position(|d| enough(&d.mass(t)) && u.is_none_or(|u| d.mass(u) == one()))
        .ok_or_else(|| {
            Error::Precondition(format!(
                "synthesized strategy failed validation by step {horizon}"
            ))
        })?;
    rows.truncate(first);
    rows.push(vec![0; mdp.num_states()]);
    Ok(Witness {
        transducer: Transducer::from_counting(mdp.num_actions(), &rows)?,
        horizon: first,
        mass: outcome.steps[first].mass(t),
    })
}

/// Counting strategy reaching mass at least `1 - epsilon` in `t` at some step
/// where the whole support lies in `u`.
///
/// Mimics the almost-sure reachability strategy of the product, switching to
/// actions that stay on the target sequence once a state is on it, until the
/// target of the periodic part holds enough mass; then walks the prefix of
/// the lasso down to `t`.
pub fn synth_limit_sure(
    mdp: &Mdp,
    q0: StateId,
    t: &StateSet,
    u: &StateSet,
    epsilon: &Rational,
    limits: &Limits,
) -> Result<Witness> {
    if *epsilon <= Rational::from_integer(0.into()) {
        return Err(Error::Precondition("epsilon must be positive".into()));
    }
    let witness = decide_limit_sure_with_support(mdp, q0, t, u, limits)?.ok_or_else(|| {
        Error::NotWinning(format!("{} is not limit-sure winning", mdp.state_name(q0)))
    })?;
    let start = match witness {
        LimitWitness::Sure { .. } => return synth_sure_eventually(mdp, q0, t, limits),
        LimitWitness::Periodic { position, .. } => position,
    };
    let lasso = pair_lasso(mdp, t, u, limits)?;
    let k = lasso.prefix_len;
    let product = build_product(mdp, lasso.periodic())?;
    let r = product.period;
    let goal_r = &product.layers[0].0;
    let alpha = almost_sure_reach(&product.mdp, &product.layer_set(goal_r, 0)).strategy;
    let need = one() - epsilon;

    let mut rows: Vec<Vec<ActionId>> = Vec::new();
    let mut dist = Distribution::dirac(q0);
    let mut step = 0;
    loop {
        let pos = (start + r * (step / r + 1) - step % r) % r;
        if pos == 0 && dist.mass(goal_r) >= need {
            break;
        }
        if step >= limits.max_sim_steps {
            return Err(Error::ResourceCap {
                what: "simulation steps",
                limit: limits.max_sim_steps,
            });
        }
        let on_target = &product.layers[pos].0;
        let next_target = &product.layers[product.previous(pos)].0;
        let row: Vec<ActionId> = (0..mdp.num_states())
            .map(|q| {
                let safe = on_target
                    .contains(q)
                    .then(|| mdp.safe_action(q, next_target))
                    .flatten();
                safe.or(alpha[product.index(q, pos)]).unwrap_or(0)
            })
            .collect();
        dist = advance(mdp, &dist, &row);
        rows.push(row);
        step += 1;
    }
    let m = step;
    for j in 0..k {
        let row = (0..mdp.num_states())
            .map(|q| {
                let (tj, _) = &lasso.items[k - j];
                let (t_next, u_next) = &lasso.items[k - j - 1];
                let target = if tj.contains(q) { t_next } else { u_next };
                mdp.safe_action(q, target).unwrap_or(0)
            })
            .collect();
        rows.push(row);
    }
    finish(mdp, q0, rows, m + k, t, Some(u), |mass| *mass >= need)
}

/// One step of a counting strategy from a distribution.
fn advance(mdp: &Mdp, dist: &Distribution, row: &[ActionId]) -> Distribution {
    let mut next: BTreeMap<StateId, Rational> = BTreeMap::new();
    for (q, p) in dist.entries() {
        for (q2, pq) in mdp.transition(*q, row[*q]).entries() {
            *next.entry(*q2).or_default() += p * pq;
        }
    }
    Distribution::new(next).expect("propagation conserves mass")
}

/// One stage of an almost-sure schedule, played from where the previous one ended.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Segment {
    pub epsilon: Rational,
    pub rows: Vec<Vec<ActionId>>,
    /// Mass in the target after the segment's last row.
    pub peak: Rational,
}

impl Segment {
    pub fn horizon(&self) -> usize {
        self.rows.len()
    }
}

/// Finite prefix of an infinite-memory almost-sure strategy: a sure phase
/// into the support set, then one segment per `epsilon_i = 2^-i`. Further
/// segments follow the same rule from the distribution reached.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EpsilonSchedule {
    pub num_actions: usize,
    pub support: StateSet,
    pub entry: Vec<Vec<ActionId>>,
    pub segments: Vec<Segment>,
}

impl EpsilonSchedule {
    pub fn peaks(&self) -> Vec<Rational> {
        self.segments.iter().map(|s| s.peak.clone()).collect()
    }

    /// Steps at which each segment ends in the concatenated play.
    pub fn peak_steps(&self) -> Vec<usize> {
        let mut at = self.entry.len();
        self.segments
            .iter()
            .map(|s| {
                at += s.horizon();
                at
            })
            .collect()
    }

    pub fn total_horizon(&self) -> usize {
        self.entry.len() + self.segments.iter().map(Segment::horizon).sum::<usize>()
    }

    /// The whole schedule as one counting transducer.
    pub fn to_transducer(&self) -> Result<Transducer> {
        let width = self.support.universe();
        let mut rows: Vec<Vec<ActionId>> = self.entry.clone();
        for s in &self.segments {
            rows.extend(s.rows.iter().cloned());
        }
        rows.push(vec![0; width]);
        Transducer::from_counting(self.num_actions, &rows)
    }
}

/// Materializes `depth` segments of an almost-sure eventually synchronizing strategy.
pub fn synth_almost_sure_schedule(
    mdp: &Mdp,
    q0: StateId,
    t: &StateSet,
    depth: usize,
    limits: &Limits,
) -> Result<EpsilonSchedule> {
    let n = mdp.num_states();
    if decide_sure_eventually(mdp, q0, t, limits)?.is_some() {
        let sure = synth_sure_eventually(mdp, q0, t, limits)?;
        let rows = sure
            .transducer
            .counting_rows(sure.horizon)
            .expect("counting strategy");
        return Ok(EpsilonSchedule {
            num_actions: mdp.num_actions(),
            support: t.clone(),
            entry: Vec::new(),
            segments: vec![Segment {
                epsilon: one() - one_minus_pow2(depth.max(1) as u32),
                rows,
                peak: sure.mass,
            }],
        });
    }
    let u = decide_almost_sure(mdp, q0, t, limits)?.ok_or_else(|| {
        Error::NotWinning(format!("{} is not almost-sure winning", mdp.state_name(q0)))
    })?;
    let tu = t.intersection(&u);
    let entry_witness = synth_sure_eventually(mdp, q0, &u, limits)?;
    let entry = entry_witness
        .transducer
        .counting_rows(entry_witness.horizon)
        .expect("counting strategy");
    let mut dist = advance_all(mdp, &Distribution::dirac(q0), &entry);
    let mut segments = Vec::with_capacity(depth);
    for i in 1..=depth {
        let epsilon = one() - one_minus_pow2(i as u32);
        let (wide, init) = add_initial_state(mdp, &dist)?;
        let w = synth_limit_sure(
            &wide,
            init,
            &tu.widen(n + 1),
            &u.widen(n + 1),
            &epsilon,
            limits,
        )?;
        let rows: Vec<Vec<ActionId>> = w
            .transducer
            .counting_rows(w.horizon)
            .expect("counting strategy")
            .into_iter()
            .skip(1)
            .map(|row| row[..n].to_vec())
            .collect();
        dist = advance_all(mdp, &dist, &rows);
        segments.push(Segment {
            epsilon,
            rows,
            peak: dist.mass(t),
        });
    }
    Ok(EpsilonSchedule {
        num_actions: mdp.num_actions(),
        support: u,
        entry,
        segments,
    })
}

fn advance_all(mdp: &Mdp, dist: &Distribution, rows: &[Vec<ActionId>]) -> Distribution {
    rows.iter()
        .fold(dist.clone(), |d, row| advance(mdp, &d, row))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{gen_fig1, gen_fig5, gen_mn};
    use crate::rational::ratio;

    fn lim() -> Limits {
        Limits::default()
    }

    fn set(m: &Mdp, names: &[&str]) -> StateSet {
        m.state_set(names).unwrap()
    }

    fn always(m: &Mdp, a: ActionId) -> Transducer {
        Transducer::memoryless(m.num_actions(), vec![a; m.num_states()]).unwrap()
    }

    /// Plays `word[i]` at step `i` everywhere, then the last letter forever.
    fn word(m: &Mdp, word: &[ActionId]) -> Transducer {
        let rows: Vec<_> = word.iter().map(|a| vec![*a; m.num_states()]).collect();
        Transducer::from_counting(m.num_actions(), &rows).unwrap()
    }

    #[test]
    fn horizon_zero_is_the_initial_distribution() {
        let m = gen_fig1();
        let mu = Distribution::uniform(&set(&m, &["q0", "q1"])).unwrap();
        let out = symbolic_outcome(&m, &mu, &always(&m, 0), 0).unwrap();
        assert_eq!(out.steps, vec![mu]);
    }

    #[test]
    fn always_a_fills_q1() {
        let m = gen_fig1();
        let out = symbolic_outcome(&m, &Distribution::dirac(0), &always(&m, 0), 12).unwrap();
        for (k, d) in out.steps.iter().enumerate() {
            assert_eq!(d.get(1), one_minus_pow2(k as u32));
            assert_eq!(d.total(), one());
        }
    }

    #[test]
    fn validate_sync_cases() {
        let m = gen_fig1();
        let out = symbolic_outcome(&m, &Distribution::dirac(0), &word(&m, &[0, 0, 1]), 4).unwrap();
        let q2 = TargetSpec::sum(set(&m, &["q2"])).unwrap();
        assert_eq!(out.steps[3].get(2), ratio(3, 4));
        assert_eq!(
            validate_sync(&out, &q2, &ratio(3, 4), Objective::Eventually),
            (true, Some(3))
        );
        assert_eq!(
            validate_sync(&out, &q2, &ratio(0, 1), Objective::Eventually),
            (true, Some(0))
        );
        assert_eq!(
            validate_sync(&out, &q2, &ratio(7, 8), Objective::Eventually),
            (false, None)
        );
        assert_eq!(
            validate_sync(&out, &q2, &ratio(1, 2), Objective::Always),
            (false, Some(0))
        );

        let q3 = TargetSpec::sum(set(&m, &["q3"])).unwrap();
        let abs = symbolic_outcome(&m, &Distribution::dirac(3), &always(&m, 0), 5).unwrap();
        assert_eq!(
            validate_sync(&abs, &q3, &one(), Objective::Always),
            (true, None)
        );
    }

    #[test]
    fn joint_modes_are_tracked() {
        // mode 0 plays a, then b forever: the q0 self-loop mass must switch too
        let m = gen_fig1();
        let out = symbolic_outcome(&m, &Distribution::dirac(0), &word(&m, &[0, 1]), 3).unwrap();
        assert_eq!(out.steps[2].get(2), ratio(1, 2));
        assert_eq!(out.steps[3].get(2), ratio(1, 4));
    }

    #[test]
    fn counting_rows_round_trip() {
        let rows = vec![vec![0, 1], vec![1, 1], vec![0, 0]];
        let t = Transducer::from_counting(2, &rows).unwrap();
        assert_eq!(t.counting_rows(3).unwrap(), rows);
        assert_eq!(t.counting_rows(5).unwrap()[4], vec![0, 0]);
    }

    #[test]
    fn malformed_transducers_are_rejected() {
        let d = Distribution::dirac(5);
        assert!(Transducer::new(1, 2, 0, vec![vec![vec![0]; 2]], vec![vec![d]]).is_err());
        assert!(Transducer::new(
            1,
            2,
            1,
            vec![vec![vec![0]; 2]],
            vec![vec![Distribution::dirac(0)]]
        )
        .is_err());
    }

    #[test]
    fn sure_strategy_cases() {
        let m = gen_fig1();
        let w = synth_sure_eventually(&m, 1, &set(&m, &["q1"]), &lim()).unwrap();
        assert_eq!((w.horizon, w.transducer.num_modes()), (0, 1));
        let w = synth_sure_eventually(&m, 2, &set(&m, &["q3"]), &lim()).unwrap();
        assert_eq!((w.horizon, w.transducer.num_modes(), w.mass), (1, 2, one()));
        assert!(matches!(
            synth_sure_eventually(&m, 0, &set(&m, &["q1"]), &lim()),
            Err(Error::NotWinning(_))
        ));
    }

    #[test]
    fn mn2_sure_strategy_plays_a_six_times() {
        let m = gen_mn(2);
        let w = synth_sure_eventually(&m, 0, &set(&m, &["q_T"]), &lim()).unwrap();
        assert_eq!(
            (w.horizon, w.transducer.num_modes(), w.mass.clone()),
            (7, 8, one())
        );
        let rows = w.transducer.counting_rows(7).unwrap();
        let out = symbolic_outcome(&m, &Distribution::dirac(0), &w.transducer, 7).unwrap();
        for (i, row) in rows.iter().enumerate() {
            let played: Vec<ActionId> = out.steps[i]
                .entries()
                .iter()
                .map(|(q, _)| row[*q])
                .collect();
            let expected = if i == 6 { 1 } else { 0 };
            assert!(
                played.iter().all(|a| *a == expected),
                "step {i}: {played:?}"
            );
        }
        let out = symbolic_outcome(&m, &Distribution::dirac(0), &w.transducer, 7).unwrap();
        assert_eq!(out.steps[7].as_dirac(), m.state_id("q_T").ok());
    }

    #[test]
    fn limit_sure_fig1() {
        let m = gen_fig1();
        let w = synth_limit_sure(
            &m,
            0,
            &set(&m, &["q2"]),
            &m.full_set(),
            &ratio(1, 8),
            &lim(),
        )
        .unwrap();
        assert_eq!((w.horizon, w.mass.clone()), (4, ratio(7, 8)));
        let rows = w.transducer.counting_rows(4).unwrap();
        let seen: Vec<ActionId> = vec![rows[0][0], rows[1][1], rows[2][1], rows[3][1]];
        assert_eq!(seen, vec![0, 0, 0, 1]);
    }

    #[test]
    fn limit_sure_refuses_losing_instances() {
        let m = gen_fig5();
        let q2 = set(&m, &["q2"]);
        let err = synth_limit_sure(&m, 0, &q2, &set(&m, &["q0", "q2"]), &ratio(1, 4), &lim())
            .unwrap_err();
        assert!(matches!(err, Error::NotWinning(_)));
        let w = synth_limit_sure(&m, 0, &q2, &m.full_set(), &ratio(1, 4), &lim()).unwrap();
        assert!(w.mass >= ratio(3, 4));
    }

    #[test]
    fn limit_sure_epsilons() {
        let m = gen_fig5();
        let q1 = set(&m, &["q1"]);
        for e in [4, 16, 64] {
            let w = synth_limit_sure(&m, 0, &q1, &m.full_set(), &ratio(1, e), &lim()).unwrap();
            assert!(w.mass >= one() - ratio(1, e));
        }
    }

    #[test]
    fn schedule_fig1_q1() {
        let m = gen_fig1();
        let s = synth_almost_sure_schedule(&m, 0, &set(&m, &["q1"]), 3, &lim()).unwrap();
        assert_eq!(s.support, set(&m, &["q0", "q1"]));
        assert_eq!(s.peaks(), vec![ratio(1, 2), ratio(3, 4), ratio(7, 8)]);
        let t = s.to_transducer().unwrap();
        let out = symbolic_outcome(&m, &Distribution::dirac(0), &t, s.total_horizon()).unwrap();
        for (step, peak) in s.peak_steps().into_iter().zip(s.peaks()) {
            assert_eq!(out.steps[step].get(1), peak);
        }
    }

    #[test]
    fn schedule_fig5_peaks_reach_the_bounds() {
        let m = gen_fig5();
        let s = synth_almost_sure_schedule(&m, 0, &set(&m, &["q2"]), 3, &lim()).unwrap();
        assert_eq!(s.segments.len(), 3);
        for (i, p) in s.peaks().iter().enumerate() {
            assert!(*p >= one_minus_pow2(i as u32 + 1));
        }
    }

    #[test]
    fn schedule_for_sure_instance_is_one_segment() {
        let m = gen_fig1();
        let s = synth_almost_sure_schedule(&m, 2, &set(&m, &["q3"]), 3, &lim()).unwrap();
        assert_eq!(s.segments.len(), 1);
        assert_eq!(s.peaks(), vec![one()]);
        assert!(matches!(
            synth_almost_sure_schedule(&m, 0, &set(&m, &["q2"]), 2, &lim()),
            Err(Error::NotWinning(_))
        ));
    }

    #[test]
    fn always_strategy_stays_safe() {
        let m = gen_fig1();
        let t = set(&m, &["q0", "q1"]);
        let s = synth_always_sum(&m, &Distribution::dirac(0), &t).unwrap();
        let out = symbolic_outcome(&m, &Distribution::dirac(0), &s, 10).unwrap();
        let spec = TargetSpec::sum(t).unwrap();
        assert_eq!(
            validate_sync(&out, &spec, &one(), Objective::Always),
            (true, None)
        );
    }
}
