//! `musat`: satisfiability checking and model building for coalgebraic
//! mu-calculi from the command line.
//!
//! Exit codes: 0 for decided runs (the verdict goes to stdout), 1 for input
//! errors, 2 for resource exhaustion, 3 for internal errors (a SAT verdict
//! whose extracted model failed re-checking is never printed as SAT).

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand};

use musat_core::formula::Formula;
use musat_core::model::{holds_at_root, Coalgebra};
use musat_core::omega::{dump_dpa, dump_npa};
use musat_core::onestep::{self, OneStepInstance, OneStepOutcome, OneStepWitness, OsLiteral};
use musat_core::solver::{decide_with_tableau, SolveError};
use musat_core::tableau::{ExpansionOrder, RunConfig};
use musat_core::{LogicKind, ModalOp, Verdict};

const EXIT_INPUT: u8 = 1;
const EXIT_RESOURCE: u8 = 2;
const EXIT_INTERNAL: u8 = 3;

#[derive(Parser)]
#[command(
    name = "musat",
    version,
    about = "Satisfiability checker and model builder for coalgebraic mu-calculi"
)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
    #[command(flatten)]
    solve: SolveArgs,
}

#[derive(Subcommand)]
enum Command {
    /// Decide satisfiability of a formula (the default subcommand).
    Solve(SolveArgs),
    /// Solve a single one-step instance given as JSON (debugging aid).
    Onestep(OnestepArgs),
    /// Run a directory of formula files with expected verdicts in headers.
    Corpus(CorpusArgs),
    /// Check a model (JSON) against a formula.
    Modelcheck(ModelcheckArgs),
}

#[derive(Args, Clone, Default)]
struct SolveArgs {
    /// Logic: kripke, graded, probabilistic, presburger, poly-probabilistic.
    #[arg(long)]
    logic: Option<String>,
    /// Formula text; mutually exclusive with --file.
    #[arg(long)]
    formula: Option<String>,
    /// Read the formula from a file.
    #[arg(long)]
    file: Option<PathBuf>,
    /// Propagate every N expansions (0 = only after full expansion).
    #[arg(long = "propagate-every", default_value_t = 16)]
    propagate_every: usize,
    /// Expansion order: fifo, dfs, prestate-first.
    #[arg(long, default_value = "fifo")]
    order: String,
    #[arg(long = "node-cap", default_value_t = 100_000)]
    node_cap: usize,
    #[arg(long = "time-cap-ms")]
    time_cap_ms: Option<u64>,
    /// Write the extracted model as JSON (SAT runs only).
    #[arg(long = "model-json")]
    model_json: Option<PathBuf>,
    /// Write the extracted model in DOT format (SAT runs only).
    #[arg(long = "model-dot")]
    model_dot: Option<PathBuf>,
    /// Write run statistics as JSON.
    #[arg(long = "stats-json")]
    stats_json: Option<PathBuf>,
    /// Dump the tracking automaton and the reached determinized fragment.
    #[arg(long = "dump-automata")]
    dump_automata: Option<PathBuf>,
    /// Bisection depth for polynomial one-step instances.
    #[arg(long = "poly-depth", default_value_t = 26)]
    poly_depth: usize,
}

#[derive(Args)]
struct OnestepArgs {
    /// Instance as inline JSON; see --help for the schema.
    #[arg(
        value_name = "JSON",
        long_help = "Instance schema: {\"logic\": \"graded\", \"literals\": [\"<5> a\", \"[3] b\"], \
                     \"successors\": [[\"a\"], [\"a\", \"b\"]]}\nLiteral arguments must be atoms."
    )]
    instance: Option<String>,
    /// Read the instance JSON from a file instead.
    #[arg(long)]
    file: Option<PathBuf>,
    #[arg(long = "poly-depth", default_value_t = 26)]
    poly_depth: usize,
}

#[derive(Args)]
struct CorpusArgs {
    /// Directory of .mu files with `% logic:` and `% expect:` headers.
    directory: PathBuf,
    #[arg(long = "node-cap", default_value_t = 100_000)]
    node_cap: usize,
    /// Per-formula time cap.
    #[arg(long = "time-cap-ms", default_value_t = 60_000)]
    time_cap_ms: u64,
}

#[derive(Args)]
struct ModelcheckArgs {
    /// Model file (JSON, as produced by --model-json).
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    formula: Option<String>,
    #[arg(long)]
    file: Option<PathBuf>,
    /// Defaults to the logic recorded in the model file.
    #[arg(long)]
    logic: Option<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Some(Command::Solve(args)) => run_solve(args),
        None => run_solve(cli.solve),
        Some(Command::Onestep(args)) => run_onestep(args),
        Some(Command::Corpus(args)) => run_corpus(args),
        Some(Command::Modelcheck(args)) => run_modelcheck(args),
    }
}

fn input_error(msg: &str) -> ExitCode {
    eprintln!("musat: {msg}");
    ExitCode::from(EXIT_INPUT)
}

fn parse_logic(s: Option<&str>) -> Result<LogicKind, String> {
    let name = s.ok_or("missing --logic")?;
    LogicKind::parse(name).ok_or_else(|| format!("unknown logic '{name}'"))
}

fn read_formula_source(
    formula: &Option<String>,
    file: &Option<PathBuf>,
) -> Result<String, String> {
    match (formula, file) {
        (Some(f), None) => Ok(f.clone()),
        (None, Some(path)) => std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read {}: {e}", path.display())),
        (Some(_), Some(_)) => Err("exactly one of --formula/--file, not both".into()),
        (None, None) => Err("one of --formula or --file is required".into()),
    }
}

fn build_config(args: &SolveArgs, kind: LogicKind) -> Result<RunConfig, String> {
    let order = match args.order.as_str() {
        "fifo" => ExpansionOrder::Fifo,
        "dfs" => ExpansionOrder::Dfs,
        "prestate-first" => ExpansionOrder::PrestateFirst,
        other => return Err(format!("unknown expansion order '{other}'")),
    };
    if args.node_cap == 0 {
        return Err("--node-cap must be positive".into());
    }
    let mut cfg = RunConfig {
        kind,
        propagation_interval: args.propagate_every,
        order,
        node_cap: args.node_cap,
        time_cap: args.time_cap_ms.map(Duration::from_millis),
        ..RunConfig::default()
    };
    cfg.solve.poly_depth = args.poly_depth;
    Ok(cfg)
}

fn run_solve(args: SolveArgs) -> ExitCode {
    let kind = match parse_logic(args.logic.as_deref()) {
        Ok(k) => k,
        Err(e) => return input_error(&e),
    };
    let text = match read_formula_source(&args.formula, &args.file) {
        Ok(t) => t,
        Err(e) => return input_error(&e),
    };
    let formula = match musat_core::parse(&text, kind) {
        Ok(f) => f,
        Err(e) => return input_error(&format!("{e}")),
    };
    let cfg = match build_config(&args, kind) {
        Ok(c) => c,
        Err(e) => return input_error(&e),
    };
    match decide_with_tableau(&formula, cfg) {
        Ok((outcome, tableau)) => {
            if let Some(path) = &args.dump_automata {
                let mut dump = dump_npa(tableau.npa());
                dump.push('\n');
                dump.push_str(&dump_dpa(tableau.dpa()));
                if let Err(e) = std::fs::write(path, dump) {
                    return input_error(&format!("cannot write {}: {e}", path.display()));
                }
            }
            if let Some(path) = &args.stats_json {
                let stats = serde_json::to_string_pretty(&outcome.stats).expect("stats json");
                if let Err(e) = std::fs::write(path, stats) {
                    return input_error(&format!("cannot write {}: {e}", path.display()));
                }
            }
            if let Some(model) = &outcome.model {
                if let Some(path) = &args.model_json {
                    if let Err(e) = std::fs::write(path, model.to_json()) {
                        return input_error(&format!("cannot write {}: {e}", path.display()));
                    }
                }
                if let Some(path) = &args.model_dot {
                    if let Err(e) = std::fs::write(path, model.to_dot()) {
                        return input_error(&format!("cannot write {}: {e}", path.display()));
                    }
                }
            }
            match outcome.verdict {
                Verdict::Sat => println!("SAT"),
                Verdict::Unsat => println!("UNSAT"),
            }
            ExitCode::SUCCESS
        }
        Err(SolveError::Parse(e)) => input_error(&format!("{e}")),
        Err(SolveError::Resource(e)) => {
            eprintln!("musat: resource limit: {e}");
            ExitCode::from(EXIT_RESOURCE)
        }
        Err(SolveError::Verification(e)) => {
            eprintln!("musat: {e}");
            ExitCode::from(EXIT_INTERNAL)
        }
    }
}

#[derive(serde::Deserialize)]
struct OnestepJson {
    logic: String,
    #[serde(default)]
    literals: Vec<String>,
    #[serde(default)]
    successors: Vec<Vec<String>>,
}

/// Builds the abstract instance from the JSON document: literal arguments
/// and successor entries are atom names, mapped to argument indices.
fn parse_onestep_doc(doc: &str) -> Result<(LogicKind, OneStepInstance), String> {
    let parsed: OnestepJson = serde_json::from_str(doc).map_err(|e| format!("bad JSON: {e}"))?;
    let kind = LogicKind::parse(&parsed.logic).ok_or_else(|| format!("unknown logic '{}'", parsed.logic))?;
    let mut vars: BTreeMap<String, usize> = BTreeMap::new();
    let var_of = |name: &str, vars: &mut BTreeMap<String, usize>| -> usize {
        let next = vars.len();
        *vars.entry(name.to_string()).or_insert(next)
    };
    let mut literals = Vec::new();
    for text in &parsed.literals {
        let f = musat_core::parse(text, kind).map_err(|e| format!("bad literal '{text}': {e}"))?;
        let lit = match &f {
            Formula::Top => OsLiteral::True,
            Formula::Bot => OsLiteral::False,
            Formula::Atom(a, pol) => OsLiteral::Atom(a.clone(), *pol),
            Formula::Modal(op, args) => {
                let mut arg_vars = Vec::new();
                for a in args {
                    match a {
                        Formula::Atom(name, true) => {
                            arg_vars.push(var_of(name, &mut vars));
                        }
                        other => {
                            return Err(format!(
                                "literal argument must be a plain atom, got '{other}'"
                            ))
                        }
                    }
                }
                match op {
                    ModalOp::Dia => OsLiteral::Dia(arg_vars[0]),
                    ModalOp::Box => OsLiteral::Box(arg_vars[0]),
                    ModalOp::GDia(k) => OsLiteral::GDia(*k, arg_vars[0]),
                    ModalOp::GBox(k) => OsLiteral::GBox(*k, arg_vars[0]),
                    ModalOp::PDia(p) => OsLiteral::PDia(p.clone(), arg_vars[0]),
                    ModalOp::PBox(p) => OsLiteral::PBox(p.clone(), arg_vars[0]),
                    ModalOp::LSum(c, b) => {
                        OsLiteral::LSum(c.iter().copied().zip(arg_vars).collect(), *b)
                    }
                    ModalOp::MSum(c, b) => {
                        OsLiteral::MSum(c.iter().copied().zip(arg_vars).collect(), *b)
                    }
                    ModalOp::PolyL(p, b) => OsLiteral::PolyL(p.clone(), b.clone(), arg_vars),
                    ModalOp::PolyM(p, b) => OsLiteral::PolyM(p.clone(), b.clone(), arg_vars),
                }
            }
            other => return Err(format!("'{other}' is not a modal literal")),
        };
        literals.push(lit);
    }
    let successors = parsed
        .successors
        .iter()
        .map(|names| names.iter().map(|n| var_of(n, &mut vars)).collect())
        .collect();
    Ok((kind, OneStepInstance { literals, successors }))
}

fn run_onestep(args: OnestepArgs) -> ExitCode {
    let doc = match (&args.instance, &args.file) {
        (Some(d), None) => d.clone(),
        (None, Some(path)) => match std::fs::read_to_string(path) {
            Ok(d) => d,
            Err(e) => return input_error(&format!("cannot read {}: {e}", path.display())),
        },
        _ => return input_error("provide the instance inline or via --file"),
    };
    let (kind, inst) = match parse_onestep_doc(&doc) {
        Ok(x) => x,
        Err(e) => return input_error(&e),
    };
    let mut cfg = musat_core::onestep::SolveConfig::default();
    cfg.poly_depth = args.poly_depth;
    match onestep::solve(kind, &inst, &cfg) {
        Ok(OneStepOutcome::Sat(witness)) => {
            let rendered = match &witness {
                OneStepWitness::Subset(s) => serde_json::json!({"kind": "subset", "chosen": s}),
                OneStepWitness::Multiset(w) => serde_json::json!({"kind": "multiset", "weights": w}),
                OneStepWitness::Distribution(d) => serde_json::json!({
                    "kind": "distribution",
                    "probs": d.iter().map(musat_core::logic::rat_str).collect::<Vec<_>>(),
                }),
            };
            println!("{}", serde_json::json!({"result": "sat", "witness": rendered}));
            ExitCode::SUCCESS
        }
        Ok(OneStepOutcome::Unsat { depth_limited }) => {
            println!(
                "{}",
                serde_json::json!({"result": "unsat", "depth_limited": depth_limited})
            );
            ExitCode::SUCCESS
        }
        Err(e) => input_error(&format!("{e}")),
    }
}

struct CorpusEntry {
    name: String,
    kind: LogicKind,
    expect: Verdict,
    formula: Formula,
}

fn parse_corpus_file(path: &Path) -> Result<CorpusEntry, String> {
    let text =
        std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let mut logic = None;
    let mut expect = None;
    let mut body = String::new();
    for line in text.lines() {
        let trimmed = line.trim();
        if let Some(rest) = trimmed.strip_prefix('%') {
            let rest = rest.trim();
            if let Some(v) = rest.strip_prefix("logic:") {
                logic = Some(v.trim().to_string());
            } else if let Some(v) = rest.strip_prefix("expect:") {
                expect = Some(v.trim().to_uppercase());
            }
            continue;
        }
        body.push_str(line);
        body.push('\n');
    }
    let kind = parse_logic(logic.as_deref())?;
    let expect = match expect.as_deref() {
        Some("SAT") => Verdict::Sat,
        Some("UNSAT") => Verdict::Unsat,
        other => return Err(format!("bad or missing expect header: {:?}", other)),
    };
    let formula = musat_core::parse(body.trim(), kind).map_err(|e| format!("{e}"))?;
    let name = path.file_name().unwrap_or_default().to_string_lossy().into_owned();
    Ok(CorpusEntry { name, kind, expect, formula })
}

fn collect_mu_files(dir: &Path, out: &mut Vec<PathBuf>) -> std::io::Result<()> {
    for entry in std::fs::read_dir(dir)? {
        let path = entry?.path();
        if path.is_dir() {
            collect_mu_files(&path, out)?;
        } else if path.extension().is_some_and(|x| x == "mu") {
            out.push(path);
        }
    }
    Ok(())
}

fn run_corpus(args: CorpusArgs) -> ExitCode {
    let mut paths: Vec<PathBuf> = Vec::new();
    if let Err(e) = collect_mu_files(&args.directory, &mut paths) {
        return input_error(&format!("cannot read {}: {e}", args.directory.display()));
    }
    paths.sort();
    let mut failures = 0usize;
    let mut ran = 0usize;
    let total_start = Instant::now();
    for path in &paths {
        let entry = match parse_corpus_file(path) {
            Ok(e) => e,
            Err(msg) => {
                eprintln!("ERROR  {}: {msg}", path.display());
                failures += 1;
                continue;
            }
        };
        let cfg = RunConfig {
            kind: entry.kind,
            node_cap: args.node_cap,
            time_cap: Some(Duration::from_millis(args.time_cap_ms)),
            ..RunConfig::default()
        };
        let start = Instant::now();
        match decide_with_tableau(&entry.formula, cfg) {
            Ok((outcome, _)) => {
                ran += 1;
                let took = start.elapsed().as_millis();
                if outcome.verdict == entry.expect {
                    println!(
                        "ok     {:<40} {:<6} {:>6} ms",
                        entry.name,
                        verdict_str(outcome.verdict),
                        took
                    );
                } else {
                    failures += 1;
                    println!(
                        "WRONG  {:<40} expected {} got {}",
                        entry.name,
                        verdict_str(entry.expect),
                        verdict_str(outcome.verdict)
                    );
                }
            }
            Err(e) => {
                failures += 1;
                eprintln!("ERROR  {}: {e}", entry.name);
            }
        }
    }
    println!(
        "corpus: {} ok, {} failed, {} total, {} ms",
        ran.saturating_sub(failures),
        failures,
        paths.len(),
        total_start.elapsed().as_millis()
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_INPUT)
    }
}

fn verdict_str(v: Verdict) -> &'static str {
    match v {
        Verdict::Sat => "SAT",
        Verdict::Unsat => "UNSAT",
    }
}

fn run_modelcheck(args: ModelcheckArgs) -> ExitCode {
    let text = match std::fs::read_to_string(&args.model) {
        Ok(t) => t,
        Err(e) => return input_error(&format!("cannot read {}: {e}", args.model.display())),
    };
    let model = match Coalgebra::from_json(&text) {
        Ok(m) => m,
        Err(e) => return input_error(&format!("{e}")),
    };
    let kind = match args.logic.as_deref() {
        Some(name) => match LogicKind::parse(name) {
            Some(k) => k,
            None => return input_error(&format!("unknown logic '{name}'")),
        },
        None => match &model {
            Coalgebra::Kripke { .. } => LogicKind::Kripke,
            Coalgebra::Multigraph { .. } => LogicKind::Graded,
            Coalgebra::Markov { .. } => LogicKind::Probabilistic,
        },
    };
    let src = match read_formula_source(&args.formula, &args.file) {
        Ok(t) => t,
        Err(e) => return input_error(&e),
    };
    let formula = match musat_core::parse(&src, kind) {
        Ok(f) => f,
        Err(e) => return input_error(&format!("{e}")),
    };
    match holds_at_root(&model, &formula) {
        Ok(true) => {
            println!("HOLDS");
            ExitCode::SUCCESS
        }
        Ok(false) => {
            println!("FAILS");
            ExitCode::SUCCESS
        }
        Err(e) => input_error(&format!("{e}")),
    }
}
