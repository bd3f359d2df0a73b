use std::collections::{HashSet, VecDeque};

use proptest::prelude::*;

use syncmdp::afa::{
    acc, acc_lasso, afa_to_mdp, emptiness, finiteness, gadget_emptiness_to_finiteness,
    gadget_emptiness_to_universal_finiteness, mdp_to_afa, universal_finiteness, Afa,
};
use syncmdp::decide::{build_product, decide_limit_sure, decide_sure_eventually, z_safe_actions};
use syncmdp::format::{model_to_json, parse_model};
use syncmdp::gen::{gen_mn, random_afa, random_mdp, reweight, InstanceSpec};
use syncmdp::lasso::{pair_lasso, pre_lasso};
use syncmdp::mdp::{add_initial_state, pre, pre_k, twin_duplicate, TwinLayout};
use syncmdp::oracle::{oracle_always_sum, oracle_bounded_counting_sup, oracle_sure_eventually};
use syncmdp::rational::ratio;
use syncmdp::strategy::{symbolic_outcome, synth_limit_sure, synth_sure_eventually, Transducer};
use syncmdp::{
    classify, Distribution, Limits, Mdp, Objective, Rational, StateSet, SyncFunction, TargetSpec,
};

fn lim() -> Limits {
    Limits::default()
}

fn model(seed: u64, states: usize, actions: usize, density: i64) -> Mdp {
    random_mdp(&InstanceSpec::new(seed, states, actions, ratio(density, 3))).unwrap()
}

fn automaton(seed: u64, states: usize, clauses: usize) -> Afa {
    random_afa(&InstanceSpec::new(seed, states, clauses, ratio(1, 2))).unwrap()
}

fn subset(n: usize, mask: u64) -> StateSet {
    let s = StateSet::from_mask(n, mask & ((1 << n) - 1));
    if s.is_empty() {
        StateSet::singleton(n, 0)
    } else {
        s
    }
}

fn initial(n: usize, mask: u64, dirac: bool) -> Distribution {
    if dirac {
        Distribution::dirac(subset(n, mask).first().unwrap())
    } else {
        Distribution::uniform(&subset(n, mask)).unwrap()
    }
}

fn rows(n: usize, actions: usize, horizon: usize, seed: u64) -> Vec<Vec<usize>> {
    (0..horizon)
        .map(|i| {
            (0..n)
                .map(|q| ((seed >> ((i * n + q) % 60)) as usize + i + q) % actions)
                .collect()
        })
        .collect()
}

fn one() -> Rational {
    ratio(1, 1)
}

prop_compose! {
    fn small_mdp(max_states: usize, max_actions: usize)
        (seed in any::<u64>(), n in 1..=max_states, m in 1..=max_actions, d in 1..=3i64) -> Mdp {
        model(seed, n, m, d)
    }
}

prop_compose! {
    fn small_afa(max_states: usize)
        (seed in any::<u64>(), n in 1..=max_states, k in 1..=3usize) -> Afa {
        automaton(seed, n, k)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn pre_is_monotone(m in small_mdp(6, 3), a in any::<u64>(), b in any::<u64>()) {
        let n = m.num_states();
        let small = subset(n, a & b);
        let big = subset(n, a).union(&small);
        prop_assert!(pre(&m, &small).is_subset(&pre(&m, &big)));
    }

    #[test]
    fn pre_k_matches_naive_loop(m in small_mdp(5, 3), mask in any::<u64>(), k in 0..=50usize) {
        let t = subset(m.num_states(), mask);
        let mut s = t.clone();
        for _ in 0..k {
            s = pre(&m, &s);
        }
        prop_assert_eq!(pre_k(&m, &t, k), s);
    }

    #[test]
    fn pre_lasso_is_periodic(m in small_mdp(5, 3), mask in any::<u64>()) {
        let t = subset(m.num_states(), mask);
        let lasso = pre_lasso(&m, &t, &lim()).unwrap();
        let last = lasso.items.last().unwrap();
        prop_assert_eq!(&pre(&m, last), &lasso.items[lasso.prefix_len]);
        for i in 0..2 * lasso.items.len() {
            prop_assert_eq!(lasso.at(i), &pre_k(&m, &t, i));
        }
    }

    #[test]
    fn pair_lasso_components_are_nested(m in small_mdp(5, 3), a in any::<u64>(), b in any::<u64>()) {
        let n = m.num_states();
        let t = subset(n, a);
        let u = subset(n, b).union(&t);
        let lasso = pair_lasso(&m, &t, &u, &lim()).unwrap();
        prop_assert!(lasso.items.iter().all(|(r, z)| r.is_subset(z)));
    }

    #[test]
    fn twin_rows_are_distributions(m in small_mdp(5, 3), kept in any::<usize>()) {
        let kept = kept % m.num_states();
        let twin = twin_duplicate(&m, kept).unwrap();
        prop_assert_eq!(twin.num_states(), 2 * m.num_states() - 1);
        for q in 0..twin.num_states() {
            for a in 0..twin.num_actions() {
                prop_assert_eq!(twin.transition(q, a).total(), one());
            }
        }
    }

    #[test]
    fn added_initial_state_shifts_outcome(
        m in small_mdp(4, 3), mask in any::<u64>(), dirac in any::<bool>(), seed in any::<u64>(),
    ) {
        let n = m.num_states();
        let mu0 = initial(n, mask, dirac);
        let (wide, init) = add_initial_state(&m, &mu0).unwrap();
        let plan = rows(n, m.num_actions(), 6, seed);
        let original = Transducer::from_counting(m.num_actions(), &plan).unwrap();
        let mut lifted_rows = vec![vec![0; n + 1]];
        lifted_rows.extend(plan.iter().map(|r| {
            let mut r = r.clone();
            r.push(0);
            r
        }));
        let lifted = Transducer::from_counting(m.num_actions(), &lifted_rows).unwrap();
        let a = symbolic_outcome(&m, &mu0, &original, 6).unwrap();
        let b = symbolic_outcome(&wide, &Distribution::dirac(init), &lifted, 7).unwrap();
        for k in 0..=6 {
            for q in 0..n {
                prop_assert_eq!(a.steps[k].get(q), b.steps[k + 1].get(q));
            }
            prop_assert_eq!(b.steps[k + 1].get(init), ratio(0, 1));
        }
    }

    #[test]
    fn afa_to_mdp_preserves_acceptance(a in small_afa(5)) {
        let m = afa_to_mdp(&a);
        for k in 0..=40 {
            prop_assert_eq!(acc(&a, k), pre_k(&m, a.accepting(), k));
        }
    }

    #[test]
    fn mdp_to_afa_preserves_pre(m in small_mdp(5, 3), mask in any::<u64>()) {
        let t = subset(m.num_states(), mask);
        let a = mdp_to_afa(&m, &t);
        for k in 0..=40 {
            prop_assert_eq!(acc(&a, k), pre_k(&m, &t, k));
        }
    }

    #[test]
    fn language_answers_ignore_renaming(a in small_afa(5), shuffle in Just((0..5usize).collect::<Vec<_>>()).prop_shuffle()) {
        let n = a.num_states();
        let perm: Vec<usize> = {
            let mut kept: Vec<usize> = shuffle.into_iter().filter(|i| *i < n).collect();
            kept.truncate(n);
            kept
        };
        let b = a.permute(&perm);
        for (q, p) in perm.iter().enumerate() {
            prop_assert_eq!(emptiness(&a, q, &lim()).unwrap(), emptiness(&b, *p, &lim()).unwrap());
            prop_assert_eq!(finiteness(&a, q, &lim()).unwrap(), finiteness(&b, *p, &lim()).unwrap());
        }
        prop_assert_eq!(universal_finiteness(&a, &lim()).unwrap(), universal_finiteness(&b, &lim()).unwrap());
    }

    #[test]
    fn self_loop_gadget_is_upward_closed(a in small_afa(4), q in any::<usize>()) {
        let q = q % a.num_states();
        let b = gadget_emptiness_to_finiteness(&a, q).unwrap();
        let accepted: Vec<bool> = (0..=40).map(|k| acc(&b, k).contains(q)).collect();
        prop_assert!(accepted.windows(2).all(|w| !w[0] || w[1]));
        let empty = emptiness(&a, q, &lim()).unwrap();
        prop_assert_eq!(empty, emptiness(&b, q, &lim()).unwrap());
        prop_assert_eq!(empty, finiteness(&b, q, &lim()).unwrap());
    }

    #[test]
    fn sure_oracle_agrees(m in small_mdp(4, 2), mask in any::<u64>(), q0 in any::<usize>()) {
        let q0 = q0 % m.num_states();
        let t = subset(m.num_states(), mask);
        prop_assert_eq!(
            decide_sure_eventually(&m, q0, &t, &lim()).unwrap().is_some(),
            oracle_sure_eventually(&m, q0, &t, &lim()).unwrap()
        );
    }

    #[test]
    fn always_sum_oracle_agrees(m in small_mdp(4, 3), a in any::<u64>(), b in any::<u64>(), dirac in any::<bool>()) {
        let n = m.num_states();
        let mu0 = initial(n, b, dirac);
        let t = subset(n, a);
        let spec = TargetSpec::sum(t.clone()).unwrap();
        let v = classify(&m, &mu0, &spec, Objective::Always, &lim()).unwrap();
        prop_assert_eq!(v.sure, Some(oracle_always_sum(&m, &mu0, &t, &lim()).unwrap()));
    }

    #[test]
    fn transition_bodies_round_trip(m in small_mdp(5, 3), mask in any::<u64>()) {
        let mu0 = initial(m.num_states(), mask, false);
        let text = model_to_json(&m, Some(&mu0));
        let file = parse_model(&text).unwrap();
        prop_assert_eq!(&file.mdp, &m);
        prop_assert_eq!(file.initial, Some(mu0));
    }

    #[test]
    fn outcomes_conserve_mass(m in small_mdp(5, 3), mask in any::<u64>(), seed in any::<u64>()) {
        let n = m.num_states();
        let strat = Transducer::from_counting(m.num_actions(), &rows(n, m.num_actions(), 8, seed)).unwrap();
        let out = symbolic_outcome(&m, &initial(n, mask, false), &strat, 12).unwrap();
        prop_assert!(out.steps.iter().all(|d| d.total() == one()));
    }

    #[test]
    fn product_moves_one_position_back(m in small_mdp(4, 3), a in any::<u64>(), b in any::<u64>()) {
        let n = m.num_states();
        let t = subset(n, a);
        let u = subset(n, b).union(&t);
        let lasso = pair_lasso(&m, &t, &u, &lim()).unwrap();
        let product = build_product(&m, lasso.periodic()).unwrap();
        let zs: Vec<StateSet> = lasso.periodic().iter().map(|(_, z)| z.clone()).collect();
        for s in 0..product.mdp.num_states() {
            let Some((q, i)) = product.origin(s) else { continue };
            let safe = z_safe_actions(&m, &zs, q, i);
            for act in 0..m.num_actions() {
                let row = product.mdp.transition(s, act);
                if safe.contains(&act) {
                    prop_assert_eq!(row.entries().len(), m.transition(q, act).entries().len());
                    for (s2, p) in row.entries() {
                        let (q2, j) = product.origin(*s2).unwrap();
                        prop_assert_eq!(j, product.previous(i));
                        prop_assert_eq!(p, &m.transition(q, act).get(q2));
                    }
                } else {
                    prop_assert_eq!(row.as_dirac(), Some(product.sink));
                }
            }
        }
    }

    #[test]
    fn sure_witness_is_exact(m in small_mdp(5, 3), mask in any::<u64>(), q0 in any::<usize>()) {
        let q0 = q0 % m.num_states();
        let t = subset(m.num_states(), mask);
        if let Some(n) = decide_sure_eventually(&m, q0, &t, &lim()).unwrap() {
            let w = synth_sure_eventually(&m, q0, &t, &lim()).unwrap();
            prop_assert_eq!(w.horizon, n);
            prop_assert!(w.transducer.counting_rows(n).is_some());
            let out = symbolic_outcome(&m, &Distribution::dirac(q0), &w.transducer, n).unwrap();
            prop_assert_eq!(out.steps[n].mass(&t), one());
        }
    }

    #[test]
    fn twin_max_matches_singleton_sum(m in small_mdp(3, 2), kept in any::<usize>(), mask in any::<u64>(), dirac in any::<bool>()) {
        let n = m.num_states();
        let kept = kept % n;
        let mu0 = initial(n, mask, dirac);
        let twin = twin_duplicate(&m, kept).unwrap();
        let layout = TwinLayout::new(n, kept);
        let sum = TargetSpec::sum(StateSet::singleton(n, kept)).unwrap();
        let max = TargetSpec::max(twin.full_set()).unwrap();
        let a = classify(&m, &mu0, &sum, Objective::Eventually, &lim()).unwrap();
        let b = classify(&twin, &layout.lift(&mu0), &max, Objective::Eventually, &lim()).unwrap();
        prop_assert_eq!(a.triple(), b.triple());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn classify_is_monotone_and_always_collapses(
        m in small_mdp(5, 3), a in any::<u64>(), b in any::<u64>(), dirac in any::<bool>(),
        max in any::<bool>(), always in any::<bool>(),
    ) {
        let n = m.num_states();
        let function = if max { SyncFunction::Max } else { SyncFunction::Sum };
        let objective = if always { Objective::Always } else { Objective::Eventually };
        let spec = TargetSpec::new(function, subset(n, a)).unwrap();
        let v = classify(&m, &initial(n, b, dirac), &spec, objective, &lim()).unwrap();
        prop_assert!(v.is_monotone());
        let (s, al, l) = v.triple().unwrap();
        if always {
            prop_assert!(s == al && al == l);
        }
    }

    #[test]
    fn larger_targets_win_more(m in small_mdp(5, 3), a in any::<u64>(), b in any::<u64>(), c in any::<u64>(), always in any::<bool>()) {
        let n = m.num_states();
        let t = subset(n, a);
        let bigger = t.union(&subset(n, b));
        let mu0 = initial(n, c, true);
        let objective = if always { Objective::Always } else { Objective::Eventually };
        let small = classify(&m, &mu0, &TargetSpec::sum(t).unwrap(), objective, &lim()).unwrap();
        let large = classify(&m, &mu0, &TargetSpec::sum(bigger).unwrap(), objective, &lim()).unwrap();
        let (s1, a1, l1) = small.triple().unwrap();
        let (s2, a2, l2) = large.triple().unwrap();
        prop_assert!((!s1 || s2) && (!a1 || a2) && (!l1 || l2));
    }

    #[test]
    fn verdicts_depend_on_supports_only(
        m in small_mdp(4, 3), a in any::<u64>(), b in any::<u64>(), seed in any::<u64>(),
        max in any::<bool>(), always in any::<bool>(),
    ) {
        let n = m.num_states();
        let function = if max { SyncFunction::Max } else { SyncFunction::Sum };
        let objective = if always { Objective::Always } else { Objective::Eventually };
        let spec = TargetSpec::new(function, subset(n, a)).unwrap();
        let mu0 = initial(n, b, false);
        let v = classify(&m, &mu0, &spec, objective, &lim()).unwrap();
        let w = classify(&reweight(&m, seed), &mu0, &spec, objective, &lim()).unwrap();
        prop_assert_eq!(v, w);
    }

    #[test]
    fn limit_sure_witnesses_validate(m in small_mdp(4, 3), mask in any::<u64>(), q0 in any::<usize>()) {
        let n = m.num_states();
        let q0 = q0 % n;
        let t = subset(n, mask);
        if decide_limit_sure(&m, q0, &t, &lim()).unwrap().is_some() {
            for den in [4, 16, 64] {
                let eps = ratio(1, den);
                let w = synth_limit_sure(&m, q0, &t, &m.full_set(), &eps, &lim()).unwrap();
                let out = symbolic_outcome(&m, &Distribution::dirac(q0), &w.transducer, w.horizon).unwrap();
                prop_assert!(out.steps[w.horizon].mass(&t) >= one() - &eps);
                prop_assert_eq!(out.steps[w.horizon].mass(&t), w.mass.clone());
                prop_assert!(w.transducer.counting_rows(w.horizon).is_some());
            }
        }
    }

    #[test]
    fn reachable_transducer_modes_are_total(m in small_mdp(4, 3), mask in any::<u64>(), q0 in any::<usize>()) {
        let n = m.num_states();
        let q0 = q0 % n;
        let t = subset(n, mask);
        if decide_limit_sure(&m, q0, &t, &lim()).unwrap().is_none() {
            return Ok(());
        }
        let w = synth_limit_sure(&m, q0, &t, &m.full_set(), &ratio(1, 16), &lim()).unwrap();
        let tr = &w.transducer;
        let mut seen = HashSet::from([(tr.initial_mode, q0)]);
        let mut queue = VecDeque::from([(tr.initial_mode, q0)]);
        while let Some((mode, q)) = queue.pop_front() {
            let moves = &tr.next_move[mode][q];
            prop_assert_eq!(moves.total(), one());
            for (act, _) in moves.entries() {
                prop_assert!(*act < m.num_actions());
                for (q2, _) in m.transition(q, *act).entries() {
                    let next = (tr.update[mode][*act][*q2], *q2);
                    if seen.insert(next) {
                        queue.push_back(next);
                    }
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn universal_gadget_entry_pattern(a in small_afa(3), q in any::<usize>()) {
        let q = q % a.num_states();
        let g = gadget_emptiness_to_universal_finiteness(&a, q).unwrap();
        let p = g.period();
        let accepted: Vec<usize> = (0..p + 10).filter(|i| acc(&g.afa, *i).contains(g.entry)).collect();
        let mut want: Vec<usize> = (0..p).collect();
        want.push(p + 1);
        prop_assert_eq!(accepted, want);
        prop_assert_eq!(emptiness(&a, q, &lim()).unwrap(), universal_finiteness(&g.afa, &lim()).unwrap());
        prop_assert!(acc_lasso(&g.afa, &lim()).is_ok());
    }

    #[test]
    fn counting_sup_is_consistent(m in small_mdp(3, 2), mask in any::<u64>(), q0 in any::<usize>()) {
        let n = m.num_states();
        let q0 = q0 % n;
        let t = subset(n, mask);
        let sup = oracle_bounded_counting_sup(&m, q0, &t, 5, &lim()).unwrap();
        let sure = decide_sure_eventually(&m, q0, &t, &lim()).unwrap();
        prop_assert_eq!(sup == one(), sure.is_some_and(|h| h <= 5));
        let bound = ratio(63, 64);
        match decide_limit_sure(&m, q0, &t, &lim()).unwrap() {
            None => prop_assert!(sup <= bound),
            Some(_) => {
                let w = synth_limit_sure(&m, q0, &t, &m.full_set(), &ratio(1, 64), &lim()).unwrap();
                if w.horizon <= 5 {
                    prop_assert!(sup >= bound);
                }
            }
        }
    }
}

/// `q0 ∈ Pre^n({q_T})` by direct support inspection.
fn first_sure_step(m: &Mdp) -> usize {
    let q0 = m.state_id("q0").unwrap();
    let mut s = m.state_set(&["q_T"]).unwrap();
    for n in 0.. {
        if s.contains(q0) {
            return n;
        }
        let mut next = m.empty_set();
        for q in 0..m.num_states() {
            if (0..m.num_actions()).any(|a| {
                m.transition(q, a)
                    .entries()
                    .iter()
                    .all(|(r, _)| s.contains(*r))
            }) {
                next.insert(q);
            }
        }
        s = next;
    }
    unreachable!()
}

#[test]
fn mn_horizon_is_one_plus_primorial() {
    for (n, primorial) in [(1, 2), (2, 6), (3, 30)] {
        let m = gen_mn(n);
        assert_eq!(first_sure_step(&m), 1 + primorial);
        let t = m.state_set(&["q_T"]).unwrap();
        assert_eq!(
            decide_sure_eventually(&m, 0, &t, &lim()).unwrap(),
            Some(1 + primorial)
        );
    }
}
