//! The `rmlkit` command line.
//!
//! Every subcommand answers on stdout, in plain text or (with `--json`) as a
//! single JSON document. Exit codes:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | answered (positive where the answer is boolean) |
//! | 1 | negative answer: `check` false, `refine`/`bisim` fails, `valid` invalid, `sat` unsatisfiable, `equiv` not equivalent, `witness` none, `exec` not executable, `synth-action` not a refinement |
//! | 2 | input error (unreadable file, bad JSON, bad formula, bad flags) |
//! | 3 | reduction budget exceeded |
//!
//! In `--batch FILE` mode the formula argument is replaced by the lines of
//! FILE (blank lines and lines starting with `#` are skipped). Lines are
//! decided independently, across `--jobs` workers, and reported in input
//! order, one `LINE: answer` row each (models and traces only with
//! `--json`); the exit code is the largest code of any line.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use rmlkit::actions::{product, synthesize_action, ActionError, PointedActionModel};
use rmlkit::bq::{alpha_normalize, translate};
use rmlkit::decision::{rml_equivalent_with_budget, rml_satisfiable_with_budget, rml_valid_with_budget, Validity, Verdict};
use rmlkit::kripke::{check_bisimulation, check_refinement, contract, PointedModel, RefinementCheck};
use rmlkit::modelcheck::{enumerate_refinements, evaluate_rml_with_budget, EnumerateError, EvalError};
use rmlkit::par::{self, Exec};
use rmlkit::reduction::{
    default_budget, reduce_with_budget, synthesize_group_witness_with_budget, ReduceError,
};
use rmlkit::syntax::{parse_with_agents, print, Agent, Formula};

#[derive(Parser)]
#[command(name = "rmlkit", version, about = "Refinement modal logic on finite Kripke models")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Emit one JSON document on stdout.
    #[arg(long, global = true)]
    json: bool,
    /// Print result models as Graphviz text.
    #[arg(long, global = true)]
    dot: bool,
    /// Node budget for reduction (default: RMLKIT_MAX_NODES or 1000000).
    #[arg(long, global = true, value_name = "N")]
    max_nodes: Option<usize>,
    /// Worker threads for batch mode.
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,
    /// Read one formula per line from FILE.
    #[arg(long, global = true, value_name = "FILE")]
    batch: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse and pretty-print a formula.
    Parse { formula: Option<String> },
    /// Evaluate a formula at the point of a model.
    Check { model: PathBuf, formula: Option<String> },
    /// Decide whether RIGHT is a refinement of LEFT for the given agents.
    Refine {
        left: PathBuf,
        right: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        agents: Vec<String>,
    },
    /// Decide bisimilarity of two pointed models.
    Bisim { left: PathBuf, right: PathBuf },
    /// Bisimulation contraction of the generated submodel.
    Contract { model: PathBuf },
    /// Rewrite a formula into an equivalent quantifier-free one.
    Reduce {
        formula: Option<String>,
        #[arg(long)]
        trace: bool,
    },
    /// Decide validity.
    Valid { formula: Option<String> },
    /// Decide satisfiability.
    Sat { formula: Option<String> },
    /// Decide equivalence of two formulas.
    Equiv { left: String, right: String },
    /// Build a refinement for AGENTS (comma separated) satisfying FORMULA.
    Witness { model: PathBuf, agents: String, formula: String },
    /// Execute an action model at a model.
    Exec { model: PathBuf, action: PathBuf },
    /// Build an action model whose product with LEFT is bisimilar to RIGHT.
    SynthAction { left: PathBuf, right: PathBuf },
    /// Translate into the bisimulation quantifier language.
    TranslateBq { formula: Option<String> },
    /// List pairwise non-bisimilar AGENT-refinements of a bounded unravelling.
    Enumerate {
        model: PathBuf,
        agent: String,
        #[arg(long, default_value_t = 2)]
        depth: usize,
        #[arg(long, default_value_t = 1)]
        dup: usize,
        #[arg(long, default_value_t = 100)]
        max: usize,
    },
}

/// A finished answer: exit code plus both renderings.
#[derive(Debug)]
struct Answer {
    code: i32,
    text: String,
    json: Value,
}

impl Answer {
    fn yes(text: impl Into<String>, json: Value) -> Answer {
        Answer { code: 0, text: text.into(), json }
    }

    fn no(text: impl Into<String>, json: Value) -> Answer {
        Answer { code: 1, text: text.into(), json }
    }
}

#[derive(Debug)]
enum Failure {
    Input(String),
    Budget(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Input(_) => 2,
            Failure::Budget(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Budget(m) => m,
        }
    }
}

impl From<ReduceError> for Failure {
    fn from(e: ReduceError) -> Failure {
        match e {
            ReduceError::BudgetExceeded { .. } => Failure::Budget(e.to_string()),
            ReduceError::Shape(_) => Failure::Input(e.to_string()),
        }
    }
}

impl From<EvalError> for Failure {
    fn from(e: EvalError) -> Failure {
        match e {
            EvalError::Reduce(r) => r.into(),
            other => Failure::Input(other.to_string()),
        }
    }
}

impl From<ActionError> for Failure {
    fn from(e: ActionError) -> Failure {
        match e {
            ActionError::Eval(inner) => inner.into(),
            other => Failure::Input(other.to_string()),
        }
    }
}

type Outcome = Result<Answer, Failure>;

struct Ctx {
    json: bool,
    dot: bool,
    budget: usize,
}

impl Ctx {
    fn model_text(&self, m: &PointedModel) -> String {
        if self.dot {
            m.to_dot().trim_end().to_string()
        } else {
            pretty(&m.to_json())
        }
    }
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}

fn read_file(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load_model(path: &Path) -> Result<PointedModel, Failure> {
    PointedModel::from_json(&read_file(path)?).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load_action(path: &Path) -> Result<PointedActionModel, Failure> {
    PointedActionModel::from_json(&read_file(path)?).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

/// Formula text from the argument, or from a file when it starts with `@`.
fn formula_text(arg: &str) -> Result<String, Failure> {
    match arg.strip_prefix('@') {
        Some(path) => Ok(read_file(Path::new(path))?.trim().to_string()),
        None => Ok(arg.to_string()),
    }
}

fn parse_in(text: &str, universe: &BTreeSet<Agent>) -> Result<Formula, Failure> {
    parse_with_agents(text, universe).map_err(|e| Failure::Input(format!("formula: {e}")))
}

fn model_agents(models: &[&PointedModel]) -> BTreeSet<Agent> {
    models.iter().flat_map(|m| m.model.agents().cloned()).collect()
}

fn agent_list(text: &str) -> Result<Vec<Agent>, Failure> {
    let agents: Vec<Agent> = text.split(',').map(str::trim).filter(|s| !s.is_empty()).map(Agent::new).collect();
    if agents.is_empty() {
        return Err(Failure::Input("no agents given".into()));
    }
    Ok(agents)
}

fn relation_answer(c: RefinementCheck) -> Answer {
    let witness = c.witness.as_ref().map(|w| w.to_json());
    let distinguisher = c.distinguisher.as_ref().map(print);
    let json = json!({ "holds": c.holds, "witness": witness, "distinguisher": distinguisher });
    if c.holds {
        let w = witness.map(|w| format!("\n{}", pretty(&w))).unwrap_or_default();
        Answer::yes(format!("holds{w}"), json)
    } else {
        let d = distinguisher.map(|d| format!("\ndistinguisher: {d}")).unwrap_or_default();
        Answer::no(format!("fails{d}"), json)
    }
}

/// One formula-shaped query; shared by single and batch mode.
#[derive(Clone, Copy)]
enum Query<'a> {
    Parse,
    Check(&'a PointedModel),
    Reduce { trace: bool },
    Valid,
    Sat,
    TranslateBq,
}

fn answer_formula(ctx: &Ctx, q: Query, text: &str) -> Outcome {
    let universe = match q {
        Query::Check(m) => model_agents(&[m]),
        _ => BTreeSet::new(),
    };
    let f = parse_in(text, &universe)?;
    match q {
        Query::Parse => Ok(Answer::yes(print(&f), json!({ "formula": print(&f), "size": f.size() }))),
        Query::Check(m) => {
            let v = evaluate_rml_with_budget(m, &f, ctx.budget)?;
            let json = json!({ "formula": print(&f), "result": v });
            Ok(if v { Answer::yes("true", json) } else { Answer::no("false", json) })
        }
        Query::Reduce { trace } => {
            let (r, steps) = reduce_with_budget(&f, ctx.budget)?;
            let mut text = String::new();
            if trace {
                for s in &steps.steps {
                    text.push_str(&format!("{}: {} => {}\n", s.rule, s.before, s.after));
                }
            }
            text.push_str(&print(&r));
            let mut json = json!({ "formula": print(&f), "reduced": print(&r), "size": r.size() });
            if trace {
                json["trace"] = steps.to_json();
            }
            Ok(Answer::yes(text, json))
        }
        Query::Valid => match rml_valid_with_budget(&f, ctx.budget)? {
            Validity::Valid => Ok(Answer::yes("valid", json!({ "formula": print(&f), "valid": true }))),
            Validity::Invalid { countermodel } => Ok(Answer::no(
                format!("invalid\n{}", ctx.model_text(&countermodel)),
                json!({ "formula": print(&f), "valid": false, "countermodel": countermodel.to_json() }),
            )),
        },
        Query::Sat => match rml_satisfiable_with_budget(&f, ctx.budget)? {
            Verdict::Satisfiable(m) => Ok(Answer::yes(
                format!("satisfiable\n{}", ctx.model_text(&m)),
                json!({ "formula": print(&f), "satisfiable": true, "model": m.to_json() }),
            )),
            Verdict::Unsatisfiable => {
                Ok(Answer::no("unsatisfiable", json!({ "formula": print(&f), "satisfiable": false })))
            }
        },
        Query::TranslateBq => {
            let t = translate(&f);
            Ok(Answer::yes(
                t.to_string(),
                json!({ "formula": print(&f), "translation": t.to_string(), "normalized": alpha_normalize(&t).to_string() }),
            ))
        }
    }
}

fn dispatch(ctx: &Ctx, cmd: &Cmd) -> Outcome {
    let single = |q: Query, formula: &Option<String>| -> Outcome {
        let Some(arg) = formula else {
            return Err(Failure::Input("missing FORMULA (or pass --batch FILE)".into()));
        };
        answer_formula(ctx, q, &formula_text(arg)?)
    };
    match cmd {
        Cmd::Parse { formula } => single(Query::Parse, formula),
        Cmd::Check { model, formula } => single(Query::Check(&load_model(model)?), formula),
        Cmd::Reduce { formula, trace } => single(Query::Reduce { trace: *trace }, formula),
        Cmd::Valid { formula } => single(Query::Valid, formula),
        Cmd::Sat { formula } => single(Query::Sat, formula),
        Cmd::TranslateBq { formula } => single(Query::TranslateBq, formula),
        Cmd::Refine { left, right, agents } => {
            let (m, n) = (load_model(left)?, load_model(right)?);
            let b: BTreeSet<Agent> = agents.iter().map(Agent::new).collect();
            Ok(relation_answer(check_refinement(&m, &n, &b)))
        }
        Cmd::Bisim { left, right } => {
            let (m, n) = (load_model(left)?, load_model(right)?);
            Ok(relation_answer(check_bisimulation(&m, &n, None)))
        }
        Cmd::Contract { model } => {
            let m = load_model(model)?;
            let c = contract(&m);
            Ok(Answer::yes(ctx.model_text(&c), json!({ "states": c.model.len(), "model": c.to_json() })))
        }
        Cmd::Equiv { left, right } => {
            let f = parse_in(&formula_text(left)?, &BTreeSet::new())?;
            let g = parse_in(&formula_text(right)?, &BTreeSet::new())?;
            let mut json = json!({ "left": print(&f), "right": print(&g) });
            match rml_equivalent_with_budget(&f, &g, ctx.budget)? {
                Validity::Valid => {
                    json["equivalent"] = json!(true);
                    Ok(Answer::yes("equivalent", json))
                }
                Validity::Invalid { countermodel } => {
                    json["equivalent"] = json!(false);
                    json["countermodel"] = countermodel.to_json();
                    Ok(Answer::no(format!("not equivalent\n{}", ctx.model_text(&countermodel)), json))
                }
            }
        }
        Cmd::Witness { model, agents, formula } => {
            let m = load_model(model)?;
            let group = agent_list(agents)?;
            let mut universe = model_agents(&[&m]);
            universe.extend(group.iter().cloned());
            let psi = parse_in(&formula_text(formula)?, &universe)?;
            match synthesize_group_witness_with_budget(&m, &group, &psi, ctx.budget)? {
                Some(w) => Ok(Answer::yes(ctx.model_text(&w), json!({ "exists": true, "model": w.to_json() }))),
                None => Ok(Answer::no("none", json!({ "exists": false, "model": null }))),
            }
        }
        Cmd::Exec { model, action } => {
            let (m, act) = (load_model(model)?, load_action(action)?);
            match product(&m, &act)? {
                Some(out) => Ok(Answer::yes(ctx.model_text(&out), json!({ "executable": true, "model": out.to_json() }))),
                None => Ok(Answer::no("not executable", json!({ "executable": false, "model": null }))),
            }
        }
        Cmd::SynthAction { left, right } => {
            let (m, n) = (load_model(left)?, load_model(right)?);
            match synthesize_action(&m, &n) {
                Ok(act) => Ok(Answer::yes(pretty(&act.to_json()), json!({ "exists": true, "action": act.to_json() }))),
                Err(ActionError::NotARefinement) => {
                    Ok(Answer::no("not a refinement", json!({ "exists": false, "action": null })))
                }
                Err(e) => Err(e.into()),
            }
        }
        Cmd::Enumerate { model, agent, depth, dup, max } => {
            let m = load_model(model)?;
            let stream = enumerate_refinements(&m, &Agent::new(agent), *depth, *dup, *max).map_err(|e| match e {
                EnumerateError::ZeroDup => Failure::Input(e.to_string()),
                _ => Failure::Budget(e.to_string()),
            })?;
            let models: Vec<PointedModel> = stream.collect();
            let text = models
                .iter()
                .map(|n| if ctx.dot { n.to_dot().trim_end().to_string() } else { n.to_json().to_string() })
                .collect::<Vec<_>>()
                .join("\n");
            let json = json!({ "count": models.len(), "models": models.iter().map(PointedModel::to_json).collect::<Vec<_>>() });
            Ok(Answer::yes(text, json))
        }
    }
}

fn batch_query<'a>(cmd: &Cmd, model: &'a Option<PointedModel>) -> Option<Query<'a>> {
    Some(match cmd {
        Cmd::Parse { .. } => Query::Parse,
        Cmd::Check { .. } => Query::Check(model.as_ref()?),
        Cmd::Reduce { trace, .. } => Query::Reduce { trace: *trace },
        Cmd::Valid { .. } => Query::Valid,
        Cmd::Sat { .. } => Query::Sat,
        Cmd::TranslateBq { .. } => Query::TranslateBq,
        _ => return None,
    })
}

fn run_batch(ctx: &Ctx, cli: &Cli, path: &Path, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    let model = match &cli.cmd {
        Cmd::Check { model, .. } => Some(load_model(model)?),
        _ => None,
    };
    let query = batch_query(&cli.cmd, &model)
        .ok_or_else(|| Failure::Input("--batch applies to parse, check, reduce, valid, sat and translate-bq".into()))?;
    let text = read_file(path)?;
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .collect();
    let results = par::with_threads(cli.jobs, || {
        par::map(Exec::Parallel, &lines, |(_, l)| answer_formula(ctx, query, l))
    });
    let mut code = 0;
    let mut docs = Vec::new();
    for ((line, _), res) in lines.iter().zip(results) {
        match res {
            Ok(a) => {
                code = code.max(a.code);
                if ctx.json {
                    let mut doc = json!({ "line": line, "exit": a.code });
                    doc["answer"] = a.json;
                    docs.push(doc);
                } else {
                    // Models and traces are only in the JSON rendering.
                    let _ = writeln!(out, "{line}: {}", a.text.lines().next().unwrap_or(""));
                }
            }
            Err(f) => {
                code = code.max(f.code());
                let _ = writeln!(err, "line {line}: {}", f.message());
                if ctx.json {
                    docs.push(json!({ "line": line, "exit": f.code(), "error": f.message() }));
                }
            }
        }
    }
    if ctx.json {
        let _ = writeln!(out, "{}", pretty(&Value::Array(docs)));
    }
    Ok(code)
}

/// Runs the command line `args` (including the program name) and returns
/// the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let msg = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{msg}");
                return 2;
            }
            let _ = write!(out, "{msg}");
            return 0;
        }
    };
    let ctx = Ctx {
        json: cli.json,
        dot: cli.dot,
        budget: cli.max_nodes.unwrap_or_else(default_budget),
    };
    let result = match &cli.batch {
        Some(path) => run_batch(&ctx, &cli, path, out, err),
        None => dispatch(&ctx, &cli.cmd).map(|a| {
            let shown = if ctx.json { pretty(&a.json) } else { a.text };
            let _ = writeln!(out, "{shown}");
            a.code
        }),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message());
            if ctx.json {
                let _ = writeln!(out, "{}", pretty(&json!({ "error": f.message(), "exit": f.code() })));
            }
            f.code()
        }
    }
}
