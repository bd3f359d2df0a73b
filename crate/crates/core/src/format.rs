//! JSON and CSV formats. Probabilities are always `"num/den"` strings.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::afa::Afa;
use crate::decide::{LimitWitness, Mode, Verdict};
use crate::error::{Error, Result};
use crate::mdp::{validate, Distribution, Mdp, MdpDraft, Violation};
use crate::rational::{format_fraction, parse_fraction, Rational};
use crate::set::StateSet;
use crate::strategy::{EpsilonSchedule, SymbolicOutcome, Transducer};

type Row = BTreeMap<String, String>;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelJson {
    states: Vec<String>,
    actions: Vec<String>,
    transitions: BTreeMap<String, BTreeMap<String, Row>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    initial: Option<Row>,
}

/// A parsed model file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelFile {
    pub mdp: Mdp,
    pub initial: Option<Distribution>,
}

fn parse_err(e: serde_json::Error) -> Error {
    Error::Parse(e.to_string())
}

fn index_of(names: &[String], name: &str, state: bool) -> Result<usize> {
    names.iter().position(|n| n == name).ok_or_else(|| {
        if state {
            Error::UnknownState(name.to_string())
        } else {
            Error::UnknownAction(name.to_string())
        }
    })
}

fn parse_row(states: &[String], row: &Row) -> Result<Vec<(usize, Rational)>> {
    row.iter()
        .map(|(s, p)| Ok((index_of(states, s, true)?, parse_fraction(p)?)))
        .collect()
}

fn render_row(mdp_states: &[String], d: &Distribution) -> Row {
    d.entries()
        .iter()
        .map(|(q, p)| (mdp_states[*q].clone(), format_fraction(p)))
        .collect()
}

pub fn parse_model(text: &str) -> Result<ModelFile> {
    let raw: ModelJson = serde_json::from_str(text).map_err(parse_err)?;
    for s in raw.transitions.keys() {
        index_of(&raw.states, s, true)?;
    }
    let mut missing = Vec::new();
    let mut rows = Vec::with_capacity(raw.states.len());
    for s in &raw.states {
        let per_action = raw.transitions.get(s);
        if let Some(per_action) = per_action {
            for a in per_action.keys() {
                index_of(&raw.actions, a, false)?;
            }
        }
        let mut out = Vec::with_capacity(raw.actions.len());
        for a in &raw.actions {
            match per_action.and_then(|m| m.get(a)) {
                Some(row) => out.push(parse_row(&raw.states, row)?),
                None => {
                    missing.push((s.clone(), a.clone()));
                    out.push(Vec::new());
                }
            }
        }
        rows.push(out);
    }
    let draft = MdpDraft {
        states: raw.states,
        actions: raw.actions,
        rows,
    };
    let violations: Vec<Violation> = validate(&draft)
        .into_iter()
        .map(|v| match v {
            Violation::EmptySupport { state, action }
                if missing.contains(&(state.clone(), action.clone())) =>
            {
                Violation::MissingRow { state, action }
            }
            v => v,
        })
        .collect();
    if !violations.is_empty() {
        return Err(Error::InvalidModel(violations));
    }
    let mdp = Mdp::from_draft(draft)?;
    let initial = raw
        .initial
        .map(|row| Distribution::new(parse_row(mdp.state_names(), &row)?))
        .transpose()?;
    Ok(ModelFile { mdp, initial })
}

pub fn model_to_json(mdp: &Mdp, initial: Option<&Distribution>) -> String {
    let states = mdp.state_names();
    let transitions = (0..mdp.num_states())
        .map(|q| {
            let per_action = (0..mdp.num_actions())
                .map(|a| {
                    (
                        mdp.action_name(a).to_string(),
                        render_row(states, mdp.transition(q, a)),
                    )
                })
                .collect();
            (states[q].clone(), per_action)
        })
        .collect();
    let raw = ModelJson {
        states: states.to_vec(),
        actions: mdp.action_names().to_vec(),
        transitions,
        initial: initial.map(|d| render_row(states, d)),
    };
    serde_json::to_string_pretty(&raw).expect("plain data serializes")
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AfaJson {
    states: Vec<String>,
    accepting: Vec<String>,
    delta: BTreeMap<String, Vec<Vec<String>>>,
}

fn names_to_set(names: &[String], members: &[String]) -> Result<StateSet> {
    let idx: Result<Vec<usize>> = members.iter().map(|m| index_of(names, m, true)).collect();
    Ok(StateSet::from_indices(names.len(), idx?))
}

fn set_to_names(names: &[String], set: &StateSet) -> Vec<String> {
    set.iter().map(|q| names[q].clone()).collect()
}

pub fn parse_afa(text: &str) -> Result<Afa> {
    let raw: AfaJson = serde_json::from_str(text).map_err(parse_err)?;
    for s in raw.delta.keys() {
        index_of(&raw.states, s, true)?;
    }
    let delta = raw
        .states
        .iter()
        .map(|s| {
            raw.delta
                .get(s)
                .map(|clauses| {
                    clauses
                        .iter()
                        .map(|c| names_to_set(&raw.states, c))
                        .collect()
                })
                .unwrap_or_else(|| Ok(Vec::new()))
        })
        .collect::<Result<Vec<Vec<StateSet>>>>()?;
    let accepting = names_to_set(&raw.states, &raw.accepting)?;
    Afa::new(raw.states, delta, accepting)
}

pub fn afa_to_json(afa: &Afa) -> String {
    let names = afa.state_names();
    let raw = AfaJson {
        states: names.to_vec(),
        accepting: set_to_names(names, afa.accepting()),
        delta: (0..afa.num_states())
            .map(|q| {
                let clauses = afa
                    .clauses(q)
                    .iter()
                    .map(|c| set_to_names(names, c))
                    .collect();
                (names[q].clone(), clauses)
            })
            .collect(),
    };
    serde_json::to_string_pretty(&raw).expect("plain data serializes")
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StrategyJson {
    states: Vec<String>,
    actions: Vec<String>,
    initial_mode: usize,
    /// Per mode: state -> action -> probability.
    next_move: Vec<BTreeMap<String, Row>>,
    /// Per mode: action -> successor state -> mode.
    update: Vec<BTreeMap<String, BTreeMap<String, usize>>>,
}

fn strategy_json(mdp: &Mdp, t: &Transducer) -> StrategyJson {
    let actions = mdp.action_names();
    let states = mdp.state_names();
    StrategyJson {
        states: states.to_vec(),
        actions: actions.to_vec(),
        initial_mode: t.initial_mode,
        next_move: t
            .next_move
            .iter()
            .map(|per_state| {
                per_state
                    .iter()
                    .enumerate()
                    .map(|(q, d)| (states[q].clone(), render_row(actions, d)))
                    .collect()
            })
            .collect(),
        update: t
            .update
            .iter()
            .map(|per_action| {
                per_action
                    .iter()
                    .enumerate()
                    .map(|(a, per_state)| {
                        let row = per_state
                            .iter()
                            .enumerate()
                            .map(|(q, m)| (states[q].clone(), *m))
                            .collect();
                        (actions[a].clone(), row)
                    })
                    .collect()
            })
            .collect(),
    }
}

pub fn strategy_to_json(mdp: &Mdp, t: &Transducer) -> String {
    serde_json::to_string_pretty(&strategy_json(mdp, t)).expect("plain data serializes")
}

fn strategy_from_raw(mdp: &Mdp, raw: StrategyJson) -> Result<Transducer> {
    if raw.states != mdp.state_names() || raw.actions != mdp.action_names() {
        return Err(Error::Precondition(
            "strategy was written for a different model".into(),
        ));
    }
    let states = mdp.state_names();
    let actions = mdp.action_names();
    let next_move = raw
        .next_move
        .iter()
        .map(|per_state| {
            states
                .iter()
                .map(|s| {
                    let row = per_state
                        .get(s)
                        .ok_or_else(|| Error::Parse(format!("no move for state `{s}`")))?;
                    Distribution::new(parse_row(actions, row)?)
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let update = raw
        .update
        .iter()
        .map(|per_action| {
            actions
                .iter()
                .map(|a| {
                    let row = per_action
                        .get(a)
                        .ok_or_else(|| Error::Parse(format!("no update for action `{a}`")))?;
                    states
                        .iter()
                        .map(|s| {
                            row.get(s)
                                .copied()
                                .ok_or_else(|| Error::Parse(format!("no update for state `{s}`")))
                        })
                        .collect::<Result<Vec<usize>>>()
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Transducer::new(
        mdp.num_states(),
        mdp.num_actions(),
        raw.initial_mode,
        update,
        next_move,
    )
}

/// Reads a strategy file; a schedule file is accepted too and yields its
/// concatenated strategy.
pub fn parse_strategy(mdp: &Mdp, text: &str) -> Result<Transducer> {
    let value: Value = serde_json::from_str(text).map_err(parse_err)?;
    let inner = match value.get("strategy") {
        Some(s) => s.clone(),
        None => value,
    };
    let raw: StrategyJson = serde_json::from_value(inner).map_err(parse_err)?;
    strategy_from_raw(mdp, raw)
}

pub fn schedule_to_json(mdp: &Mdp, schedule: &EpsilonSchedule) -> Result<String> {
    let segments: Vec<Value> = schedule
        .segments
        .iter()
        .zip(schedule.peak_steps())
        .map(|(s, at)| {
            json!({
                "epsilon": format_fraction(&s.epsilon),
                "horizon": s.horizon(),
                "peak": format_fraction(&s.peak),
                "peak_step": at,
            })
        })
        .collect();
    let doc = json!({
        "support": mdp.set_names(&schedule.support),
        "entry_horizon": schedule.entry.len(),
        "segments": segments,
        "continuation": "segment i targets epsilon 2^-i from the distribution the previous segment ends in",
        "strategy": serde_json::to_value(strategy_json(mdp, &schedule.to_transducer()?)).expect("plain data"),
    });
    Ok(serde_json::to_string_pretty(&doc).expect("plain data serializes"))
}

/// `step,state,mass,total` rows over each step's support.
pub fn trace_csv(mdp: &Mdp, outcome: &SymbolicOutcome) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["step", "state", "mass", "total"])
        .expect("in-memory write");
    for (step, d) in outcome.steps.iter().enumerate() {
        let total = format_fraction(&d.total());
        for (q, p) in d.entries() {
            w.write_record([
                step.to_string(),
                mdp.state_name(*q).to_string(),
                format_fraction(p),
                total.clone(),
            ])
            .expect("in-memory write");
        }
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 names")
}

/// Canonical verdict document: sorted keys, fraction strings, witness names.
pub fn verdict_json(mdp: &Mdp, verdict: &Verdict) -> Value {
    let mut doc = serde_json::Map::new();
    let mut witnesses = serde_json::Map::new();
    for mode in Mode::ALL {
        if let Some(b) = verdict.get(mode) {
            doc.insert(mode.to_string(), Value::Bool(b));
        }
    }
    if let Some(n) = verdict.sure_witness {
        witnesses.insert("sure_horizon".into(), json!(n));
    }
    if let Some(u) = &verdict.almost_witness {
        witnesses.insert("almost_support".into(), json!(mdp.set_names(u)));
    }
    if let Some(w) = &verdict.limit_witness {
        let v = match w {
            LimitWitness::Sure { horizon } => json!({"kind": "sure", "horizon": horizon}),
            LimitWitness::Periodic {
                prefix_len,
                period,
                target,
                support,
                position,
            } => json!({
                "kind": "periodic",
                "prefix_len": prefix_len,
                "period": period,
                "target": mdp.set_names(target),
                "support": mdp.set_names(support),
                "position": position,
            }),
        };
        witnesses.insert("limit".into(), v);
    }
    doc.insert("witnesses".into(), Value::Object(witnesses));
    doc.insert("diagnostics".into(), json!(verdict.diagnostics));
    Value::Object(doc)
}
