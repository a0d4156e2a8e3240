//! The `ntltl` command line. [`run`] is the whole program; `main` only wires
//! it to the process streams.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use ntltl::admissibility::{admissibility_consequences_check, check_refutation};
use ntltl::decide::{
    bounded_nt_refutation, check_certificate, decide_uniform_satisfiable, decide_uniform_theorem, lasso_search_caps,
    lemma_size_bound, uniform_search_caps, LassoCaps,
};
use ntltl::frames::vote;
use ntltl::io::{AdmissibilityFile, CertificateFile, FrameFile, ModelFile, VerdictFile};
use ntltl::knowledge::{eval_knowledge, KnowledgeQuery};
use ntltl::normalform::to_reduced_normal_form;
use ntltl::semantics::{eval_nt, first_frame_refutation, rule_refutation_world, truth_table};
use ntltl::syntax::{expand_derived, parse_formula, parse_rule, DerivedOp, Formula, Rule};
use ntltl::{Countermodel, Limits, Model, Target};

#[derive(Parser, Debug)]
#[command(name = "ntltl", version, about = "Non-transitive linear temporal logic toolkit")]
struct Cli {
    /// Worker threads for enumeration (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Cap on enumerated Boolean atoms (letters times worlds).
    #[arg(long, global = true, env = "ITL_MAX_ATOMS")]
    max_atoms: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the canonical form of a formula or rule.
    Parse { text: String },
    /// Evaluate a formula (or a knowledge operator applied to it) in a model.
    Eval(EvalArgs),
    /// Theoremhood under uniform intransitivity m.
    Decide(UniformArgs),
    /// Satisfiability under uniform intransitivity m.
    Sat(UniformArgs),
    /// Search finite lasso frames for a countermodel.
    Refute(RefuteArgs),
    /// Reduced normal form of a rule.
    Rnf {
        #[arg(long)]
        rule: String,
    },
    /// Validity of a rule in a model or in a frame.
    RuleValid(RuleValidArgs),
    /// Screens and bounded substitution search for admissibility.
    Admissible {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        rule: String,
        #[arg(long, default_value_t = 1)]
        depth: usize,
        #[arg(long)]
        max_tuples: Option<usize>,
    },
    /// The finite model size bound for n letters and l disjuncts.
    Bound {
        #[arg(long)]
        letters: u64,
        #[arg(long)]
        disjuncts: u64,
    },
    /// Expand a derived operator.
    Expand {
        #[command(flatten)]
        op: OpArgs,
        #[arg(long)]
        formula: String,
    },
    /// Majority vote of a multi-agent model file.
    Vote {
        #[arg(long)]
        model: PathBuf,
    },
    /// Re-check the certificates in a verdict or admissibility report.
    #[command(hide = true)]
    Verify { file: PathBuf },
}

#[derive(Args, Debug)]
struct OpArgs {
    /// box, diamond, box-iter, diamond-iter, next-iter, k-past, k1-past,
    /// k2-past, k-discovered, k-rigid, k-since, k-consensus
    #[arg(long)]
    op: String,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    /// Trigger formula of k-since.
    #[arg(long)]
    trigger: Option<String>,
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    formula: String,
    /// World to evaluate at; all worlds when absent.
    #[arg(long)]
    world: Option<usize>,
    #[arg(long)]
    agent: Option<String>,
    /// Knowledge operator applied to the formula.
    #[arg(long)]
    op: Option<String>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    trigger: Option<String>,
}

#[derive(Args, Debug)]
struct UniformArgs {
    #[arg(long)]
    m: usize,
    #[arg(long)]
    formula: String,
}

#[derive(Args, Debug)]
struct RefuteArgs {
    #[arg(long, conflicts_with = "rule", required_unless_present = "rule")]
    formula: Option<String>,
    #[arg(long)]
    rule: Option<String>,
    #[arg(long, env = "ITL_MAX_WORLDS")]
    max_worlds: Option<usize>,
    /// Defaults to the world cap.
    #[arg(long)]
    max_reach: Option<usize>,
}

#[derive(Args, Debug)]
struct RuleValidArgs {
    #[arg(long, conflicts_with = "frame", required_unless_present = "frame")]
    model: Option<PathBuf>,
    #[arg(long)]
    frame: Option<PathBuf>,
    #[arg(long)]
    rule: String,
}

/// Failure of a command: usage errors exit with 2, bad input with 1.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Input(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Input(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Input(m) => m,
        }
    }
}

fn input<E: std::fmt::Display>(context: &str) -> impl FnOnce(E) -> Failure + '_ {
    move |e| Failure::Input(format!("{context}: {e}"))
}

fn formula(text: &str) -> Result<Formula, Failure> {
    parse_formula(text).map_err(input("formula"))
}

fn rule(text: &str) -> Result<Rule, Failure> {
    parse_rule(text).map_err(input("rule"))
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn model_file(path: &Path) -> Result<ModelFile, Failure> {
    serde_json::from_str(&read(path)?).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn derived_op(name: &str, k: Option<usize>, trigger: Option<&str>) -> Result<DerivedOp, Failure> {
    let need_k = || k.ok_or_else(|| Failure::Usage(format!("--op {name} needs --k")));
    Ok(match name {
        "box" => DerivedOp::Box,
        "diamond" => DerivedOp::Diamond,
        "box-iter" => DerivedOp::BoxIter(need_k()?),
        "diamond-iter" => DerivedOp::DiamondIter(need_k()?),
        "next-iter" => DerivedOp::NextIter(need_k()?),
        "k-past" => DerivedOp::KPast,
        "k1-past" => DerivedOp::K1Past,
        "k2-past" => DerivedOp::K2Past(need_k()?),
        "k-discovered" => DerivedOp::KDiscovered,
        "k-rigid" => DerivedOp::KRigid,
        "k-since" => {
            let t = trigger.ok_or_else(|| Failure::Usage("--op k-since needs --trigger".into()))?;
            DerivedOp::KSince(formula(t)?)
        }
        "k-consensus" => DerivedOp::KConsensus,
        other => return Err(Failure::Usage(format!("unknown operator {other}"))),
    })
}

fn pretty(value: &impl serde::Serialize) -> String {
    serde_json::to_string_pretty(value).expect("output types serialize")
}

fn countermodel_json(model: Model, world: usize, target: Target) -> serde_json::Value {
    serde_json::to_value(CertificateFile::of(&Countermodel { model, world, target })).expect("certificates serialize")
}

/// Output text and exit status of a successful command.
fn execute(cli: Cli) -> Result<(String, i32), Failure> {
    let mut limits = Limits::default();
    if let Some(a) = cli.max_atoms {
        limits.max_atoms = a;
    }
    let text = match cli.command {
        Command::Parse { text } => {
            if text.contains('/') {
                rule(&text)?.to_string()
            } else {
                formula(&text)?.to_string()
            }
        }
        Command::Eval(args) => eval_command(args)?,
        Command::Decide(args) => {
            let f = formula(&args.formula)?;
            let v = decide_uniform_theorem(&f, args.m, &limits).map_err(|e| Failure::Usage(e.to_string()))?;
            pretty(&VerdictFile::of(&v, Some(uniform_search_caps(&f, args.m, &limits))))
        }
        Command::Sat(args) => {
            let f = formula(&args.formula)?;
            let v = decide_uniform_satisfiable(&f, args.m, &limits).map_err(|e| Failure::Usage(e.to_string()))?;
            pretty(&VerdictFile::of(&v, Some(uniform_search_caps(&f, args.m, &limits))))
        }
        Command::Refute(args) => {
            let target = match (&args.formula, &args.rule) {
                (Some(f), None) => Target::Formula(formula(f)?),
                (None, Some(r)) => Target::Rule(rule(r)?),
                _ => return Err(Failure::Usage("give exactly one of --formula and --rule".into())),
            };
            let max_worlds = args.max_worlds.unwrap_or(limits.max_worlds);
            let caps = LassoCaps {
                max_worlds,
                max_reach: args.max_reach.unwrap_or(max_worlds),
            };
            if caps.max_worlds == 0 || caps.max_reach == 0 {
                return Err(Failure::Usage("caps must be positive".into()));
            }
            let v = bounded_nt_refutation(&target, caps, &limits);
            pretty(&VerdictFile::of(&v, Some(lasso_search_caps(&target, caps, &limits))))
        }
        Command::Rnf { rule: text } => {
            let r = rule(&text)?;
            let nf = to_reduced_normal_form(&r, limits.max_atoms).map_err(input("rnf"))?;
            let variables: Vec<_> = nf
                .sources()
                .iter()
                .enumerate()
                .map(|(i, f)| json!({"name": ntltl::normalform::variable_name(i), "source": f.to_string()}))
                .collect();
            pretty(&json!({
                "rule": r.to_string(),
                "variables": variables,
                "disjuncts": nf.disjunct_count(),
                "rnf": nf.render().to_string(),
            }))
        }
        Command::RuleValid(args) => {
            let r = rule(&args.rule)?;
            let counterexample = match (&args.model, &args.frame) {
                (Some(path), None) => {
                    let model = model_file(path)?.to_model().map_err(input("model"))?;
                    rule_refutation_world(&model, &r)
                        .map_err(input("evaluation"))?
                        .map(|world| countermodel_json(model, world, Target::Rule(r.clone())))
                }
                (None, Some(path)) => {
                    let file: FrameFile = serde_json::from_str(&read(path)?)
                        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
                    let frame = file.to_frame().map_err(input("frame"))?;
                    first_frame_refutation(&frame, &r, limits.max_atoms)
                        .map_err(input("evaluation"))?
                        .map(|(valuation, world)| {
                            let model = Model::new(frame, valuation).expect("refuting valuations fit the frame");
                            countermodel_json(model, world, Target::Rule(r.clone()))
                        })
                }
                _ => return Err(Failure::Usage("give exactly one of --model and --frame".into())),
            };
            pretty(&json!({"valid": counterexample.is_none(), "counterexample": counterexample}))
        }
        Command::Admissible {
            m,
            rule: text,
            depth,
            max_tuples,
        } => {
            if let Some(t) = max_tuples {
                limits.max_tuples = t;
            }
            let r = rule(&text)?;
            let report =
                admissibility_consequences_check(&r, m, depth, &limits).map_err(|e| Failure::Usage(e.to_string()))?;
            pretty(&AdmissibilityFile::of(&r, m, &report))
        }
        Command::Bound { letters, disjuncts } => {
            if letters == 0 || disjuncts == 0 {
                return Err(Failure::Usage("--letters and --disjuncts must be positive".into()));
            }
            lemma_size_bound(letters, disjuncts).to_string()
        }
        Command::Expand { op, formula: text } => {
            let f = formula(&text)?;
            let op_value = derived_op(&op.op, op.k, op.trigger.as_deref())?;
            expand_derived(&op_value, &[f], op.m)
                .map_err(|e| Failure::Usage(e.to_string()))?
                .to_string()
        }
        Command::Vote { model } => {
            let mam = model_file(&model)?.to_agents().map_err(input("model"))?;
            pretty(&ModelFile::of_model(&vote(&mam)))
        }
        Command::Verify { file } => {
            let text = read(&file)?;
            let value: serde_json::Value = serde_json::from_str(&text).map_err(input("verify"))?;
            let valid = if value.get("verdict").is_some() {
                let v: VerdictFile = serde_json::from_value(value).map_err(input("verify"))?;
                let verdict = v.to_verdict().map_err(input("verify"))?;
                check_certificate(&verdict).map_err(input("verify"))?
            } else {
                let a: AdmissibilityFile = serde_json::from_value(value).map_err(input("verify"))?;
                let (r, report) = a.to_refutation().map_err(input("verify"))?;
                check_refutation(&r, &report, a.m, &limits)
            };
            return Ok((pretty(&json!({ "valid": valid })), if valid { 0 } else { 1 }));
        }
    };
    Ok((text, 0))
}

fn eval_command(args: EvalArgs) -> Result<String, Failure> {
    let f = formula(&args.formula)?;
    let file = model_file(&args.model)?;
    if let Some(name) = &args.op {
        let op = derived_op(name, args.k, args.trigger.as_deref())?;
        let world = args.world.unwrap_or(0);
        let mut query = KnowledgeQuery::new(op, f, world);
        query.agent = args.agent.clone();
        let value = if file.valuations.len() == 1 && args.agent.is_none() {
            let model = file.to_model().map_err(input("model"))?;
            eval_knowledge(&model, &query, args.m)
        } else {
            let mam = file.to_agents().map_err(input("model"))?;
            eval_knowledge(&mam, &query, args.m)
        }
        .map_err(input("evaluation"))?;
        return Ok(pretty(&json!({"world": world, "value": value})));
    }
    let model = match (&args.agent, file.valuations.len()) {
        (None, 1) => file.to_model().map_err(input("model"))?,
        (None, _) => vote(&file.to_agents().map_err(input("model"))?),
        (Some(name), _) => file
            .to_agents()
            .map_err(input("model"))?
            .agent_model(name)
            .ok_or_else(|| Failure::Input(format!("no agent named {name}")))?,
    };
    Ok(match args.world {
        Some(a) => {
            let value = eval_nt(&model, a, &f).map_err(input("evaluation"))?;
            pretty(&json!({"world": a, "value": value}))
        }
        None => pretty(&json!({ "table": truth_table(&model, &f) })),
    })
}

/// Runs the command line `args` (program name first) and returns the exit
/// status. Machine output goes to `out`, diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{rendered}")
            } else {
                write!(err, "{rendered}")
            };
            return code;
        }
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            let _ = writeln!(err, "error: --jobs must be positive");
            return 2;
        }
        builder = builder.num_threads(jobs);
    }
    let pool = match builder.build() {
        Ok(pool) => pool,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return 1;
        }
    };
    match pool.install(|| execute(cli)) {
        Ok((text, code)) => {
            if writeln!(out, "{text}").is_err() {
                return 1;
            }
            if code != 0 {
                let _ = writeln!(err, "error: certificate rejected");
            }
            code
        }
        Err(failure) => {
            let _ = writeln!(err, "error: {}", failure.message());
            failure.code()
        }
    }
}
