//! Example models, hardness-reduction constructions and seeded random instances.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::afa::{first_primes, Afa};
use crate::error::{Error, Result};
use crate::mdp::{fresh_name, Mdp, StateId};
use crate::rational::{ratio, Rational};
use crate::set::StateSet;

type Rows = Vec<Vec<Vec<(usize, Rational)>>>;

fn names<const N: usize>(xs: [&str; N]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

fn det(q: usize) -> Vec<(usize, Rational)> {
    vec![(q, ratio(1, 1))]
}

fn coin(a: usize, b: usize) -> Vec<(usize, Rational)> {
    vec![(a, ratio(1, 2)), (b, ratio(1, 2))]
}

/// Four states; `q0` splits evenly between itself and `q1` on every action,
/// `q1` loops on `a` and moves to `q2` on `b`, `q2` moves to the absorbing `q3`.
pub fn gen_fig1() -> Mdp {
    Mdp::new(
        names(["q0", "q1", "q2", "q3"]),
        names(["a", "b"]),
        vec![
            vec![coin(0, 1), coin(0, 1)],
            vec![det(1), det(2)],
            vec![det(3), det(3)],
            vec![det(3), det(3)],
        ],
    )
    .expect("static model")
}

/// Like [`gen_fig1`] but `q2` returns to `q0` on both actions.
pub fn gen_fig5() -> Mdp {
    Mdp::new(
        names(["q0", "q1", "q2"]),
        names(["a", "b"]),
        vec![
            vec![coin(0, 1), coin(0, 1)],
            vec![det(1), det(2)],
            vec![det(0), det(0)],
        ],
    )
    .expect("static model")
}

/// The family whose sure-synchronizing strategies need memory `p_1 * .. * p_n`.
///
/// `q0` moves uniformly to the first state `q_i_1` of `n` cycles of prime
/// lengths. Action `a` advances a cycle, `b` leaves it: to `q_T` from the last
/// cycle state, to `q_bot` elsewhere. `q_T` falls into the absorbing `q_bot`.
pub fn gen_mn(n: usize) -> Mdp {
    assert!(n >= 1, "gen_mn needs at least one component");
    let primes = first_primes(n);
    let mut states = vec!["q0".to_string()];
    let mut starts = Vec::new();
    for (i, p) in primes.iter().enumerate() {
        starts.push(states.len());
        for j in 1..=*p {
            states.push(format!("q_{}_{}", i + 1, j));
        }
    }
    let q_t = states.len();
    let q_bot = q_t + 1;
    states.push("q_T".into());
    states.push("q_bot".into());

    let share = ratio(1, n as i64);
    let split: Vec<_> = starts.iter().map(|s| (*s, share.clone())).collect();
    let mut rows: Rows = vec![vec![split.clone(), split]];
    for (start, p) in starts.iter().zip(&primes) {
        for j in 0..*p {
            let next = start + (j + 1) % p;
            let on_b = if j + 1 == *p { q_t } else { q_bot };
            rows.push(vec![det(next), det(on_b)]);
        }
    }
    rows.push(vec![det(q_bot), det(q_bot)]);
    rows.push(vec![det(q_bot), det(q_bot)]);
    Mdp::new(states, names(["a", "b"]), rows).expect("generated model")
}

/// Copy of `mdp` with a new action `#`, a target `p_hat` reachable only by
/// `#` from `q_hat`, and an absorbing sink reached by `#` from every other state.
pub fn gen_almost_hardness(mdp: &Mdp, q_hat: StateId) -> Result<(Mdp, StateId)> {
    if q_hat >= mdp.num_states() {
        return Err(Error::UnknownState(format!("#{q_hat}")));
    }
    let mut draft = mdp.to_draft();
    let n = mdp.num_states();
    let (p_hat, sink) = (n, n + 1);
    let p_name = fresh_name("p_hat", &draft.states);
    draft.states.push(p_name);
    let sink_name = fresh_name("sink", &draft.states);
    draft.states.push(sink_name);
    let sharp = fresh_name("#", &draft.actions);
    draft.actions.push(sharp);
    for (q, row) in draft.rows.iter_mut().enumerate() {
        row.push(det(if q == q_hat { p_hat } else { sink }));
    }
    let all = draft.actions.len();
    draft.rows.push(vec![det(sink); all]);
    draft.rows.push(vec![det(sink); all]);
    Ok((Mdp::from_draft(draft)?, p_hat))
}

/// Copy of `mdp` with a new state `q_init` that loops on every old action and
/// spreads uniformly over the old states on a new action `#`; `#` from any old
/// state returns to `q_init`.
pub fn gen_limit_hardness(mdp: &Mdp) -> Result<(Mdp, StateId)> {
    let mut draft = mdp.to_draft();
    let n = mdp.num_states();
    let q_init = n;
    let name = fresh_name("q_init", &draft.states);
    draft.states.push(name);
    let sharp = fresh_name("#", &draft.actions);
    draft.actions.push(sharp);
    for row in draft.rows.iter_mut() {
        row.push(det(q_init));
    }
    let mut init_row = vec![det(q_init); mdp.num_actions()];
    init_row.push((0..n).map(|q| (q, ratio(1, n as i64))).collect());
    draft.rows.push(init_row);
    Ok((Mdp::from_draft(draft)?, q_init))
}

/// Parameters of a seeded random instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InstanceSpec {
    pub seed: u64,
    pub state_count: usize,
    pub action_count: usize,
    /// Probability that a given state enters a support (or clause).
    pub density: Rational,
}

impl InstanceSpec {
    pub fn new(seed: u64, state_count: usize, action_count: usize, density: Rational) -> Self {
        InstanceSpec {
            seed,
            state_count,
            action_count,
            density,
        }
    }

    fn check(&self) -> Result<(u32, u32)> {
        if self.state_count == 0 || self.action_count == 0 {
            return Err(Error::Precondition(
                "instances need at least one state and one action".into(),
            ));
        }
        let num: u32 = self.density.numer().try_into().ok().unwrap_or(u32::MAX);
        let den: u32 = self.density.denom().try_into().ok().unwrap_or(u32::MAX);
        if num > den {
            return Err(Error::Precondition("density must lie in [0, 1]".into()));
        }
        Ok((num, den))
    }
}

fn random_subset(rng: &mut ChaCha8Rng, n: usize, (num, den): (u32, u32)) -> StateSet {
    let mut s = StateSet::from_indices(n, (0..n).filter(|_| num > 0 && rng.random_ratio(num, den)));
    if s.is_empty() {
        s.insert(rng.random_range(0..n));
    }
    s
}

/// Seed-deterministic valid MDP with small integer weights normalized exactly
/// (denominators stay at most 64).
pub fn random_mdp(spec: &InstanceSpec) -> Result<Mdp> {
    let density = spec.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = spec.state_count;
    let mut rows: Rows = Vec::with_capacity(n);
    for _ in 0..n {
        let mut per_action = Vec::with_capacity(spec.action_count);
        for _ in 0..spec.action_count {
            let support = random_subset(&mut rng, n, density);
            let cap = (64 / support.len()).clamp(1, 4) as i64;
            let weights: Vec<(usize, i64)> = support
                .iter()
                .map(|q| (q, rng.random_range(1..=cap)))
                .collect();
            let total: i64 = weights.iter().map(|(_, w)| w).sum();
            per_action.push(
                weights
                    .into_iter()
                    .map(|(q, w)| (q, ratio(w, total)))
                    .collect(),
            );
        }
        rows.push(per_action);
    }
    let states = (0..n).map(|i| format!("s{i}")).collect();
    let actions = (0..spec.action_count).map(|i| format!("a{i}")).collect();
    Mdp::new(states, actions, rows)
}

/// Seed-deterministic automaton: each state gets between one and
/// `action_count` clauses; roughly a third of the states accept.
pub fn random_afa(spec: &InstanceSpec) -> Result<Afa> {
    let density = spec.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = spec.state_count;
    let delta = (0..n)
        .map(|_| {
            let clauses = rng.random_range(1..=spec.action_count);
            (0..clauses)
                .map(|_| random_subset(&mut rng, n, density))
                .collect()
        })
        .collect();
    let accepting = StateSet::from_indices(n, (0..n).filter(|_| rng.random_ratio(1, 3)));
    let states = (0..n).map(|i| format!("s{i}")).collect();
    Afa::new(states, delta, accepting)
}

/// Same supports as `mdp`, fresh positive weights drawn from `seed`.
pub fn reweight(mdp: &Mdp, seed: u64) -> Mdp {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draft = mdp.to_draft();
    for row in draft.rows.iter_mut().flatten() {
        let weights: Vec<i64> = row.iter().map(|_| rng.random_range(1..=9)).collect();
        let total: i64 = weights.iter().sum();
        for ((_, p), w) in row.iter_mut().zip(weights) {
            *p = ratio(w, total);
        }
    }
    Mdp::from_draft(draft).expect("reweighting keeps rows valid")
}
