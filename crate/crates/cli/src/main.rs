use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use syncmdp::afa::{emptiness, finiteness, universal_finiteness};
use syncmdp::decide::{decide, Mode, Objective, SyncFunction, TargetSpec};
use syncmdp::format::{
    model_to_json, parse_afa, parse_model, parse_strategy, schedule_to_json, strategy_to_json,
    trace_csv, verdict_json, ModelFile,
};
use syncmdp::gen::{
    gen_almost_hardness, gen_fig1, gen_fig5, gen_limit_hardness, gen_mn, random_mdp, InstanceSpec,
};
use syncmdp::rational::{format_fraction, parse_fraction};
use syncmdp::strategy::{
    symbolic_outcome, synth_almost_sure_schedule, synth_always_sum, synth_limit_sure,
    synth_sure_eventually, Witness,
};
use syncmdp::{Distribution, Error, Limits, Mdp, StateSet};

#[derive(Parser)]
#[command(
    name = "syncmdp",
    version,
    about = "Synchronizing objectives in Markov decision processes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide winning modes for a synchronizing objective.
    Decide(DecideArgs),
    /// Build a witness strategy.
    Synthesize(SynthArgs),
    /// Write the symbolic outcome of a strategy as CSV.
    Simulate(SimArgs),
    /// Language questions on a one-letter alternating automaton.
    Afa(AfaArgs),
    /// Write a generated model.
    Gen(GenArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ObjectiveArg {
    Always,
    Eventually,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Sure,
    Almost,
    Limit,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum FunctionArg {
    Sum,
    Max,
}

#[derive(Args)]
struct Problem {
    model: PathBuf,
    #[arg(long, value_enum, default_value = "eventually")]
    objective: ObjectiveArg,
    #[arg(long, value_enum, default_value = "sum")]
    function: FunctionArg,
    /// Comma-separated target states.
    #[arg(long)]
    target: String,
    /// A state name or `q=num/den,..`; defaults to the model's initial distribution.
    #[arg(long)]
    from: Option<String>,
}

#[derive(Args)]
struct DecideArgs {
    #[command(flatten)]
    problem: Problem,
    #[arg(long, value_enum, default_value = "all")]
    mode: ModeArg,
}

#[derive(Args)]
struct SynthArgs {
    #[command(flatten)]
    problem: Problem,
    #[arg(long, value_enum)]
    mode: ModeArg,
    #[arg(long, default_value = "1/8")]
    epsilon: String,
    /// Support states for limit-sure synthesis; all states when omitted.
    #[arg(long)]
    support: Option<String>,
    /// Number of epsilon segments for almost-sure schedules.
    #[arg(long, default_value_t = 3)]
    depth: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimArgs {
    model: PathBuf,
    strategy: PathBuf,
    #[arg(long)]
    steps: usize,
    #[arg(long)]
    from: Option<String>,
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum AfaQuestion {
    Empty,
    Finite,
    Unifinite,
}

#[derive(Args)]
struct AfaArgs {
    file: PathBuf,
    #[arg(value_enum)]
    question: AfaQuestion,
    #[arg(long)]
    state: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Fig1,
    Fig5,
    Mn,
    AlmostHard,
    LimitHard,
    Random,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    family: Family,
    #[arg(long, default_value_t = 2)]
    n: usize,
    /// Source model for the reduction families.
    #[arg(long)]
    model: Option<PathBuf>,
    /// Distinguished state of the source model (almost-hard).
    #[arg(long)]
    state: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 3)]
    states: usize,
    #[arg(long, default_value_t = 2)]
    actions: usize,
    #[arg(long, default_value = "1/2")]
    density: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Lib(Error),
    Input(String),
    Inconsistent(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Lib(Error::ResourceCap { .. }) => 3,
            Failure::Lib(Error::NotWinning(_)) => 4,
            Failure::Lib(_) | Failure::Input(_) => 2,
            Failure::Inconsistent(_) => 1,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Lib(e) => e.to_string(),
            Failure::Input(m) => m.clone(),
            Failure::Inconsistent(m) => format!("internal consistency check failed: {m}"),
        }
    }
}

type CliResult<T> = Result<T, Failure>;

/// Prints to stdout; a closed pipe is not an error.
fn emit(text: &str) {
    let mut out = io::stdout().lock();
    let _ = out.write_all(text.as_bytes()).and_then(|_| out.flush());
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn write_or_print(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Input(format!("{}: {e}", p.display()))),
        None => {
            emit(&format!("{text}\n"));
            Ok(())
        }
    }
}

fn load_model(path: &Path) -> CliResult<ModelFile> {
    Ok(parse_model(&read(path)?)?)
}

fn parse_set(mdp: &Mdp, list: &str) -> CliResult<StateSet> {
    let names: Vec<&str> = list
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect();
    Ok(mdp.state_set(&names)?)
}

fn initial(file: &ModelFile, from: Option<&str>) -> CliResult<Distribution> {
    match from {
        Some(spec) if spec.contains('=') => {
            let entries = spec
                .split(',')
                .map(|part| {
                    let (s, p) = part.split_once('=').ok_or_else(|| {
                        Failure::Input(format!("malformed distribution entry `{part}`"))
                    })?;
                    Ok((file.mdp.state_id(s.trim())?, parse_fraction(p)?))
                })
                .collect::<CliResult<Vec<_>>>()?;
            Ok(Distribution::new(entries)?)
        }
        Some(state) => Ok(Distribution::dirac(file.mdp.state_id(state.trim())?)),
        None => file.initial.clone().ok_or_else(|| {
            Failure::Input("no --from given and the model has no initial distribution".into())
        }),
    }
}

fn problem(p: &Problem) -> CliResult<(ModelFile, Distribution, TargetSpec, Objective)> {
    let file = load_model(&p.model)?;
    let mu0 = initial(&file, p.from.as_deref())?;
    let function = match p.function {
        FunctionArg::Sum => SyncFunction::Sum,
        FunctionArg::Max => SyncFunction::Max,
    };
    let spec = TargetSpec::new(function, parse_set(&file.mdp, &p.target)?)?;
    let objective = match p.objective {
        ObjectiveArg::Always => Objective::Always,
        ObjectiveArg::Eventually => Objective::Eventually,
    };
    Ok((file, mu0, spec, objective))
}

fn modes(arg: ModeArg) -> Vec<Mode> {
    match arg {
        ModeArg::Sure => vec![Mode::Sure],
        ModeArg::Almost => vec![Mode::Almost],
        ModeArg::Limit => vec![Mode::Limit],
        ModeArg::All => Mode::ALL.to_vec(),
    }
}

fn cmd_decide(args: &DecideArgs) -> CliResult<()> {
    let (file, mu0, spec, objective) = problem(&args.problem)?;
    let verdict = decide(
        &file.mdp,
        &mu0,
        &spec,
        objective,
        &modes(args.mode),
        &Limits::default(),
    )?;
    if !verdict.is_monotone() {
        return Err(Failure::Inconsistent(format!(
            "sure={:?} almost={:?} limit={:?}",
            verdict.sure, verdict.almost_sure, verdict.limit_sure
        )));
    }
    let doc = verdict_json(&file.mdp, &verdict);
    emit(&format!(
        "{}\n",
        serde_json::to_string(&doc).expect("json value")
    ));
    Ok(())
}

fn report(fields: serde_json::Value) {
    emit(&format!(
        "{}\n",
        serde_json::to_string(&fields).expect("json value")
    ));
}

fn cmd_synthesize(args: &SynthArgs) -> CliResult<()> {
    let (file, mu0, spec, objective) = problem(&args.problem)?;
    let mdp = &file.mdp;
    let limits = Limits::default();
    if let Objective::Always = objective {
        if spec.function != SyncFunction::Sum {
            return Err(Failure::Input(
                "always synthesis supports sum targets only".into(),
            ));
        }
        let t = synth_always_sum(mdp, &mu0, &spec.target)?;
        write_or_print(args.out.as_deref(), &strategy_to_json(mdp, &t))?;
        report(serde_json::json!({"mode": "always", "modes": t.num_modes()}));
        return Ok(());
    }
    let q0 = mu0
        .as_dirac()
        .ok_or_else(|| Failure::Input("synthesis needs a single initial state".into()))?;
    // a max target is met through one of its states
    let targets: Vec<StateSet> = match spec.function {
        SyncFunction::Sum => vec![spec.target.clone()],
        SyncFunction::Max => spec
            .target
            .iter()
            .map(|q| StateSet::singleton(mdp.num_states(), q))
            .collect(),
    };
    let mut last_err = None;
    for t in &targets {
        let attempt = synth_one(args, mdp, q0, t, &limits);
        match attempt {
            Err(Failure::Lib(Error::NotWinning(m))) => {
                last_err = Some(Failure::Lib(Error::NotWinning(m)))
            }
            other => return other,
        }
    }
    Err(last_err.expect("target is nonempty"))
}

fn witness_report(mode: &str, w: &Witness) {
    report(serde_json::json!({
        "mode": mode,
        "step": w.horizon,
        "mass": format_fraction(&w.mass),
        "modes": w.transducer.num_modes(),
    }));
}

fn synth_one(
    args: &SynthArgs,
    mdp: &Mdp,
    q0: usize,
    t: &StateSet,
    limits: &Limits,
) -> CliResult<()> {
    match args.mode {
        ModeArg::Sure => {
            let w = synth_sure_eventually(mdp, q0, t, limits)?;
            write_or_print(args.out.as_deref(), &strategy_to_json(mdp, &w.transducer))?;
            witness_report("sure", &w);
        }
        ModeArg::Limit => {
            let u = match &args.support {
                Some(list) => parse_set(mdp, list)?,
                None => mdp.full_set(),
            };
            let eps = parse_fraction(&args.epsilon)?;
            let w = synth_limit_sure(mdp, q0, t, &u, &eps, limits)?;
            write_or_print(args.out.as_deref(), &strategy_to_json(mdp, &w.transducer))?;
            witness_report("limit", &w);
        }
        ModeArg::Almost => {
            let s = synth_almost_sure_schedule(mdp, q0, t, args.depth, limits)?;
            write_or_print(args.out.as_deref(), &schedule_to_json(mdp, &s)?)?;
            let peaks: Vec<String> = s.peaks().iter().map(format_fraction).collect();
            report(serde_json::json!({
                "mode": "almost",
                "support": mdp.set_names(&s.support),
                "peaks": peaks,
                "peak_steps": s.peak_steps(),
            }));
        }
        ModeArg::All => {
            return Err(Failure::Input(
                "synthesis needs one of sure, almost, limit".into(),
            ))
        }
    }
    Ok(())
}

fn cmd_simulate(args: &SimArgs) -> CliResult<()> {
    let file = load_model(&args.model)?;
    let strat = parse_strategy(&file.mdp, &read(&args.strategy)?)?;
    let mu0 = initial(&file, args.from.as_deref())?;
    let outcome = symbolic_outcome(&file.mdp, &mu0, &strat, args.steps)?;
    let csv = trace_csv(&file.mdp, &outcome);
    match &args.trace {
        Some(p) => fs::write(p, csv).map_err(|e| Failure::Input(format!("{}: {e}", p.display()))),
        None => {
            emit(&csv);
            Ok(())
        }
    }
}

fn cmd_afa(args: &AfaArgs) -> CliResult<()> {
    let afa = parse_afa(&read(&args.file)?)?;
    let limits = Limits::default();
    let state = || -> CliResult<usize> {
        let name = args
            .state
            .as_deref()
            .ok_or_else(|| Failure::Input("--state is required for this question".into()))?;
        Ok(afa.state_id(name)?)
    };
    let doc = match args.question {
        AfaQuestion::Empty => serde_json::json!({"empty": emptiness(&afa, state()?, &limits)?}),
        AfaQuestion::Finite => serde_json::json!({"finite": finiteness(&afa, state()?, &limits)?}),
        AfaQuestion::Unifinite => {
            serde_json::json!({"universally_finite": universal_finiteness(&afa, &limits)?})
        }
    };
    emit(&format!(
        "{}\n",
        serde_json::to_string(&doc).expect("json value")
    ));
    Ok(())
}

fn cmd_gen(args: &GenArgs) -> CliResult<()> {
    let source = || -> CliResult<Mdp> {
        let path = args
            .model
            .as_deref()
            .ok_or_else(|| Failure::Input("--model is required for this family".into()))?;
        Ok(load_model(path)?.mdp)
    };
    let (mdp, initial) = match args.family {
        Family::Fig1 => (gen_fig1(), Some(0)),
        Family::Fig5 => (gen_fig5(), Some(0)),
        Family::Mn => {
            if args.n == 0 {
                return Err(Failure::Input("--n must be at least 1".into()));
            }
            (gen_mn(args.n), Some(0))
        }
        Family::AlmostHard => {
            let m = source()?;
            let name = args
                .state
                .as_deref()
                .ok_or_else(|| Failure::Input("--state is required for almost-hard".into()))?;
            let (n, p_hat) = gen_almost_hardness(&m, m.state_id(name)?)?;
            (n, Some(p_hat))
        }
        Family::LimitHard => {
            let (n, q_init) = gen_limit_hardness(&source()?)?;
            (n, Some(q_init))
        }
        Family::Random => {
            let spec = InstanceSpec::new(
                args.seed,
                args.states,
                args.actions,
                parse_fraction(&args.density)?,
            );
            (random_mdp(&spec)?, None)
        }
    };
    let init = initial.map(Distribution::dirac);
    write_or_print(args.out.as_deref(), &model_to_json(&mdp, init.as_ref()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Decide(a) => cmd_decide(a),
        Command::Synthesize(a) => cmd_synthesize(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Afa(a) => cmd_afa(a),
        Command::Gen(a) => cmd_gen(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("syncmdp: {}", f.message());
            ExitCode::from(f.exit_code())
        }
    }
}
