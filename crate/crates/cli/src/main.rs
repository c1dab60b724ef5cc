use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use pags_core::logic::{char_formula_state, logic_preorder, parse_formula, EvalOptions, Evaluator, Formula};
use pags_core::model::{parse_model, GameStructure};
use pags_core::oracle::{brute_eval, brute_lift, brute_sim, BruteGrids};
use pags_core::prob::{lift_check, parse_distribution, parse_relation, Distribution, Relation};
use pags_core::sim::{a_simulation, exists_pi2_check, pa_simulation, QuantStrategy, SimReport};
use pags_core::{Player, StateId};

mod report;

use report::CommandResult;

#[derive(Parser)]
#[command(name = "pags", version, about = "Simulation and logic checks for probabilistic game structures")]
struct Cli {
    /// Print the result as JSON
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check whether one distribution lifts to another under a relation
    Lift(LiftArgs),
    /// Compute the probabilistic alternating simulation preorder
    Sim(SimArgs),
    /// Compute the alternating simulation of a deterministic model
    Asim(ModelArg),
    /// Evaluate a formula at a distribution
    Eval(EvalArgs),
    /// Print the characteristic formula of a state
    Charform(CharformArgs),
    /// Evaluate the characteristic formula of one state at another
    Preorder(PreorderArgs),
    /// Brute-force reference implementations
    #[command(subcommand)]
    Oracle(OracleCommand),
}

#[derive(Subcommand)]
enum OracleCommand {
    /// Lifting by integer max-flow
    Lift(LiftArgs),
    /// Simulation with every quantifier enumerated on a grid
    Sim(OracleSimArgs),
    /// Formula evaluation by grid enumeration
    Eval(OracleEvalArgs),
}

#[derive(Args)]
struct ModelArg {
    #[arg(long)]
    model: PathBuf,
}

#[derive(Args)]
struct LiftArgs {
    #[arg(long)]
    model: PathBuf,
    /// Relation file, one `s t` pair per line
    #[arg(long)]
    relation: PathBuf,
    #[arg(long)]
    delta: String,
    #[arg(long)]
    theta: String,
}

#[derive(Args)]
struct SimArgs {
    #[arg(long)]
    model: PathBuf,
    /// pure, grid=K or smt=DIR
    #[arg(long, value_parser = parse_mode)]
    mode: QuantStrategy,
    /// Report on a single pair `s,t`
    #[arg(long)]
    pair: Option<String>,
    /// Print every approximant and the responses found
    #[arg(long)]
    trace: bool,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct FormulaSource {
    #[arg(long)]
    formula: Option<String>,
    /// File holding one formula; `#` lines are comments
    #[arg(long)]
    formula_file: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    model: PathBuf,
    /// Distribution such as `s0:1/2,s1:1/2`
    #[arg(long)]
    dist: String,
    #[command(flatten)]
    source: FormulaSource,
    #[arg(long, default_value_t = 4)]
    unfold: usize,
    /// Denominator of the player-1 lottery grid
    #[arg(long, default_value_t = 2)]
    grid: u32,
    /// Denominator of per-state split fractions
    #[arg(long, default_value_t = 6)]
    split_denom: u32,
    /// Certify verdicts (on by default; `--certify=false` turns it off)
    #[arg(long, num_args = 0..=1, default_value_t = true, default_missing_value = "true", require_equals = true)]
    certify: bool,
}

#[derive(Args)]
struct CharformArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    state: String,
    #[arg(long)]
    depth: usize,
    #[arg(long)]
    grid: u32,
}

#[derive(Args)]
struct PreorderArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    from: String,
    #[arg(long)]
    to: String,
    #[arg(long)]
    depth: usize,
    #[arg(long)]
    grid: u32,
}

#[derive(Args)]
struct OracleSimArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    grid: u32,
    #[arg(long)]
    pair: Option<String>,
}

#[derive(Args)]
struct OracleEvalArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    dist: String,
    #[command(flatten)]
    source: FormulaSource,
    #[arg(long, default_value_t = 4)]
    pi1: u32,
    #[arg(long, default_value_t = 4)]
    pi2: u32,
    #[arg(long, default_value_t = 12)]
    split: u32,
    #[arg(long, default_value_t = 4)]
    unfold: usize,
}

fn parse_mode(text: &str) -> Result<QuantStrategy, String> {
    if text == "pure" {
        return Ok(QuantStrategy::Pure);
    }
    if let Some(k) = text.strip_prefix("grid=") {
        let k: u32 = k.parse().map_err(|_| format!("bad grid resolution `{k}`"))?;
        if k == 0 {
            return Err("grid resolution must be at least 1".to_string());
        }
        return Ok(QuantStrategy::Grid(k));
    }
    if let Some(dir) = text.strip_prefix("smt=") {
        if dir.is_empty() {
            return Err("smt mode needs a directory".to_string());
        }
        return Ok(QuantStrategy::SmtExport(PathBuf::from(dir)));
    }
    Err(format!("unknown mode `{text}`, expected pure, grid=K or smt=DIR"))
}

fn read(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_model(path: &Path) -> Result<GameStructure, String> {
    parse_model(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_formula(src: &FormulaSource) -> Result<Formula, String> {
    let text = match (&src.formula, &src.formula_file) {
        (Some(f), None) => f.clone(),
        (None, Some(p)) => read(p)?
            .lines()
            .filter(|l| !l.trim_start().starts_with('#'))
            .collect::<Vec<_>>()
            .join("\n"),
        _ => return Err("give exactly one of --formula and --formula-file".to_string()),
    };
    parse_formula(text.trim()).map_err(|e| e.to_string())
}

fn parse_pair(g: &GameStructure, text: &str) -> Result<(StateId, StateId), String> {
    let (s, t) = text
        .split_once(',')
        .ok_or_else(|| format!("expected `s,t`, found `{text}`"))?;
    let s = g.state_id(s.trim()).map_err(|e| e.to_string())?;
    let t = g.state_id(t.trim()).map_err(|e| e.to_string())?;
    Ok((s, t))
}

fn dist(g: &GameStructure, text: &str) -> Result<Distribution, String> {
    parse_distribution(g, text).map_err(|e| e.to_string())
}

fn lift_inputs(a: &LiftArgs) -> Result<(GameStructure, Relation, Distribution, Distribution), String> {
    let g = load_model(&a.model)?;
    let r = parse_relation(&g, &read(&a.relation)?).map_err(|e| format!("{}: {e}", a.relation.display()))?;
    let d = dist(&g, &a.delta)?;
    let th = dist(&g, &a.theta)?;
    Ok((g, r, d, th))
}

fn cmd_lift(a: &LiftArgs) -> Result<CommandResult, String> {
    let (g, r, d, th) = lift_inputs(a)?;
    Ok(match lift_check(&d, &th, &r) {
        Some(w) => CommandResult::new("feasible", true, "lp").witness(w.render(&g)),
        None => CommandResult::new("infeasible", true, "lp"),
    })
}

fn render_pairs(g: &GameStructure, r: &Relation) -> String {
    r.iter()
        .map(|(s, t)| format!("({},{})", g.state_name(s), g.state_name(t)))
        .collect::<Vec<_>>()
        .join(" ")
}

fn responses(g: &GameStructure, rep: &SimReport, s: StateId, t: StateId) -> Vec<String> {
    rep.witnesses
        .get(&(s, t))
        .into_iter()
        .flatten()
        .map(|(l1, l2)| {
            format!(
                "{} {}: player 1 plays {} answered by {}",
                g.state_name(s),
                g.state_name(t),
                l1.render(g, Player::One),
                l2.render(g, Player::One)
            )
        })
        .collect()
}

/// Why `(s, t)` left the relation: the round it was removed in and a
/// player-1 lottery with no answer.
fn removal(g: &GameStructure, rep: &SimReport, s: StateId, t: StateId) -> Vec<String> {
    if g.label(s) != g.label(t) {
        return vec!["labels differ".to_string()];
    }
    let round = rep
        .chain
        .windows(2)
        .position(|w| w[0].contains(s, t) && !w[1].contains(s, t))
        .unwrap_or(rep.chain.len() - 1);
    let mut out = vec![format!("removed in round {}", round + 1)];
    let prev = &rep.chain[round];
    if let Some(tests) = rep.strategy.test_set(g.acts1.len()) {
        for l in tests {
            if let Ok(None) = exists_pi2_check(g, s, t, &l, prev) {
                out.push(format!(
                    "player 1 plays {} at {} with no answer at {}",
                    l.render(g, Player::One),
                    g.state_name(s),
                    g.state_name(t)
                ));
                break;
            }
        }
    }
    out
}

fn cmd_sim(a: &SimArgs) -> Result<CommandResult, String> {
    let g = load_model(&a.model)?;
    let pair = a.pair.as_deref().map(|p| parse_pair(&g, p)).transpose()?;
    let rep = pa_simulation(&g, &a.mode).map_err(|e| e.to_string())?;
    let mode = a.mode.to_string();
    let exact = !matches!(a.mode, QuantStrategy::SmtExport(_));
    let mut lines = Vec::new();
    if a.trace {
        for (i, r) in rep.chain.iter().enumerate() {
            lines.push(format!("round {i}: {}", render_pairs(&g, r)));
        }
    }
    let res = match pair {
        Some((s, t)) => {
            if rep.deferred.contains(&(s, t)) {
                if let QuantStrategy::SmtExport(dir) = &a.mode {
                    let file = dir.join(format!("{}_{}.smt2", g.state_name(s), g.state_name(t)));
                    lines.push(format!("script {}", file.display()));
                }
                CommandResult::new("deferred", false, mode)
            } else if rep.relation.contains(s, t) {
                lines.extend(responses(&g, &rep, s, t));
                CommandResult::new("related", exact, mode)
            } else {
                lines.extend(removal(&g, &rep, s, t));
                CommandResult::new("unrelated", exact, mode)
            }
        }
        None => {
            lines.extend(rep.relation.render(&g));
            if a.trace {
                for (s, t) in rep.relation.iter() {
                    lines.extend(responses(&g, &rep, s, t));
                }
            }
            let result = if rep.deferred.is_empty() { "relation" } else { "deferred" };
            CommandResult::new(result, exact && rep.deferred.is_empty(), mode)
        }
    };
    Ok(res.witness(lines).bound(rep.iterations))
}

fn cmd_asim(a: &ModelArg) -> Result<CommandResult, String> {
    let g = load_model(&a.model)?;
    let r = a_simulation(&g).map_err(|e| e.to_string())?;
    Ok(CommandResult::new("relation", true, "asim").witness(r.render(&g)))
}

fn cmd_eval(a: &EvalArgs) -> Result<CommandResult, String> {
    let g = load_model(&a.model)?;
    let d = dist(&g, &a.dist)?;
    let phi = load_formula(&a.source)?;
    let opts = EvalOptions {
        unfold: a.unfold,
        grid: a.grid,
        split_denom: a.split_denom,
        certify: a.certify,
        ..EvalOptions::default()
    };
    let r = Evaluator::new(&g, opts)
        .and_then(|mut ev| ev.eval(&d, &phi))
        .map_err(|e| e.to_string())?;
    let mode = format!("grid={} split-denom={} unfold={}", a.grid, a.split_denom, a.unfold);
    Ok(CommandResult::new(r.verdict.to_string(), r.certified, mode)
        .witness(r.render(&g))
        .bound(r.bound_used))
}

fn cmd_charform(a: &CharformArgs) -> Result<CommandResult, String> {
    let g = load_model(&a.model)?;
    if a.grid == 0 {
        return Err("grid resolution must be at least 1".to_string());
    }
    let s = g.state_id(&a.state).map_err(|e| e.to_string())?;
    let phi = char_formula_state(&g, s, a.depth, a.grid);
    let mode = format!("depth={} grid={}", a.depth, a.grid);
    Ok(CommandResult::new("formula", true, mode).witness(vec![phi.to_string()]))
}

fn cmd_preorder(a: &PreorderArgs) -> Result<CommandResult, String> {
    let g = load_model(&a.model)?;
    let s = g.state_id(&a.from).map_err(|e| e.to_string())?;
    let t = g.state_id(&a.to).map_err(|e| e.to_string())?;
    let r = logic_preorder(&g, s, t, a.depth, a.grid, &EvalOptions::default()).map_err(|e| e.to_string())?;
    let mode = format!("depth={} grid={}", a.depth, a.grid);
    Ok(CommandResult::new(r.verdict.to_string(), r.certified, mode)
        .witness(r.render(&g))
        .bound(r.bound_used))
}

fn cmd_oracle(c: &OracleCommand) -> Result<CommandResult, String> {
    match c {
        OracleCommand::Lift(a) => {
            let (_, r, d, th) = lift_inputs(a)?;
            let ok = brute_lift(&d, &th, &r, None).map_err(|e| e.to_string())?;
            Ok(CommandResult::new(if ok { "feasible" } else { "infeasible" }, true, "max-flow"))
        }
        OracleCommand::Sim(a) => {
            let g = load_model(&a.model)?;
            let pair = a.pair.as_deref().map(|p| parse_pair(&g, p)).transpose()?;
            let r = brute_sim(&g, a.grid).map_err(|e| e.to_string())?;
            let mode = format!("brute grid={}", a.grid);
            Ok(match pair {
                Some((s, t)) if r.contains(s, t) => CommandResult::new("related", false, mode),
                Some(_) => CommandResult::new("unrelated", false, mode),
                None => CommandResult::new("relation", false, mode).witness(r.render(&g)),
            })
        }
        OracleCommand::Eval(a) => {
            let g = load_model(&a.model)?;
            let d = dist(&g, &a.dist)?;
            let phi = load_formula(&a.source)?;
            let grids = BruteGrids {
                pi1: a.pi1,
                pi2: a.pi2,
                split: a.split,
                unfold: a.unfold,
                ..BruteGrids::default()
            };
            let r = brute_eval(&g, &d, &phi, &grids).map_err(|e| e.to_string())?;
            let mode = format!("brute pi1={} pi2={} split={} unfold={}", a.pi1, a.pi2, a.split, a.unfold);
            Ok(CommandResult::new(r.verdict.to_string(), r.certified, mode).witness(r.render(&g)))
        }
    }
}

fn run(cli: &Cli) -> Result<CommandResult, String> {
    match &cli.command {
        Command::Lift(a) => cmd_lift(a),
        Command::Sim(a) => cmd_sim(a),
        Command::Asim(a) => cmd_asim(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Charform(a) => cmd_charform(a),
        Command::Preorder(a) => cmd_preorder(a),
        Command::Oracle(c) => cmd_oracle(c),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(3),
            };
        }
    };
    match run(&cli) {
        Ok(res) => {
            let out = if cli.json { res.to_json() } else { res.to_text() };
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(out.as_bytes());
            let _ = stdout.flush();
            ExitCode::from(res.exit_code())
        }
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
