//! `mumall`: check proof scripts, compute with fixed-point definitions,
//! classify and transform formulas, evaluate them at bounded depth.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mumall::compute::{certify, search, Order, Outcome, SearchStrategy, DEFAULT_FUEL};
use mumall::semantics::{eval_bounded, eval_unpolarized, sequent_formula, Truth};
use mumall::stdlib;
use mumall::syntax::{parse, parse_formula, AnyFormula, Printer, SourceFile};
use mumall::term::term_to_numeral;
use mumall::{check, checker::check_with, Formula, Mode, RuleSet, Sequent, Term, UFormula};
use rayon::prelude::*;
use serde_json::{json, Value};

const DEFAULT_EVAL_FUEL: u64 = 50;
const DEFAULT_QBOUND: u64 = 8;

#[derive(Parser)]
#[command(name = "mumall", version, about = "Proof checker and interpreter for linear logic with fixed points")]
struct Cli {
    /// Also write a machine-readable report to this file.
    #[arg(long, global = true, value_name = "PATH")]
    json: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check every proof in a file.
    Check {
        file: PathBuf,
        /// Check in this mode instead of each proof's declared one.
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        /// Require purely positive coinduction invariants.
        #[arg(long)]
        sigma1: bool,
    },
    /// Run a query by proof search.
    Compute {
        file: PathBuf,
        #[arg(long)]
        query: String,
        /// Maximum number of transitions (default: MUMALL_FUEL or 1000000).
        #[arg(long)]
        fuel: Option<u64>,
        /// dfs, iddfs or random:SEED.
        #[arg(long, default_value = "iddfs", value_parser = parse_strategy)]
        strategy: Order,
        /// Write the successful computation, one transition per line.
        #[arg(long, value_name = "PATH")]
        trace: Option<PathBuf>,
        /// Print a core-mode proof of the result and check it.
        #[arg(long)]
        certify: bool,
    },
    /// Print the hierarchy class of a theorem or definition.
    Classify {
        file: PathBuf,
        #[arg(long)]
        formula: String,
    },
    /// Print the dual (negation) of a formula.
    Dual(Transform),
    /// Polarize an unpolarized formula with a choice vector.
    Polarize {
        #[command(flatten)]
        input: Transform,
        /// One bit per connective in pre-order, 1 for the positive choice.
        #[arg(long)]
        pol: String,
    },
    /// Forget the polarity of a formula.
    Depolarize(Transform),
    /// Replace the exponentials by their fixed-point definitions.
    ExpandExp(Transform),
    /// Evaluate a closed theorem at bounded depth.
    Eval {
        file: PathBuf,
        #[arg(long)]
        formula: String,
        /// Unfolding budget per path (default: MUMALL_FUEL or 50).
        #[arg(long)]
        fuel: Option<u64>,
        /// Numerals tried for each quantifier.
        #[arg(long, default_value_t = DEFAULT_QBOUND)]
        qbound: u64,
        /// Choice vector for an unpolarized theorem of several formulas.
        #[arg(long)]
        pol: Option<String>,
    },
    /// Check the shipped corpus and run the soundness sweep over it.
    Corpus {
        #[arg(long, default_value_t = DEFAULT_EVAL_FUEL)]
        fuel: u64,
        #[arg(long, default_value_t = DEFAULT_QBOUND)]
        qbound: u64,
    },
}

#[derive(Args)]
struct Transform {
    /// Source file for `--formula` and for definitions used in `--expr`.
    file: Option<PathBuf>,
    /// A theorem of the file.
    #[arg(long, conflicts_with = "expr", required_unless_present = "expr")]
    formula: Option<String>,
    /// A formula given inline.
    #[arg(long)]
    expr: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Core,
    #[value(name = "core+")]
    CorePlus,
    Mulk,
    #[value(name = "mulk+")]
    MulkPlus,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Core => Mode::Core,
            ModeArg::CorePlus => Mode::CorePlusAdmissible,
            ModeArg::Mulk => Mode::MuLK,
            ModeArg::MulkPlus => Mode::MuLKPlus,
        }
    }
}

fn parse_strategy(s: &str) -> Result<Order, String> {
    match s {
        "dfs" => Ok(Order::Dfs),
        "iddfs" => Ok(Order::IterativeDeepening),
        _ => match s.strip_prefix("random:") {
            Some(seed) => seed.parse().map(Order::RandomizedDfs).map_err(|e| format!("bad seed {seed:?}: {e}")),
            None => Err(format!("unknown strategy {s:?}; expected dfs, iddfs or random:SEED")),
        },
    }
}

fn parse_bits(s: &str) -> Result<Vec<bool>, Failure> {
    s.chars()
        .filter(|c| !c.is_whitespace() && *c != ',')
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => Err(Failure::usage(format!("polarization bits must be 0 or 1, found {c:?}"))),
        })
        .collect()
}

/// Why a command stopped early, with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }
    fn failed(message: impl Into<String>) -> Self {
        Failure { code: 1, message: message.into() }
    }
}

/// What a command printed and what goes into the JSON report.
struct Done {
    code: u8,
    report: Value,
}

impl Done {
    fn ok(report: Value) -> Self {
        Done { code: 0, report }
    }
}

fn env_fuel() -> Result<Option<u64>, Failure> {
    match std::env::var("MUMALL_FUEL") {
        Ok(v) => v.trim().parse().map(Some).map_err(|_| Failure::usage(format!("MUMALL_FUEL={v:?} is not a number"))),
        Err(_) => Ok(None),
    }
}

fn load(path: &Path) -> Result<SourceFile, Failure> {
    let src = fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    parse(&src).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

/// Exact name first, then with dashes read as underscores.
fn lookup<'a, T>(name: &str, find: impl Fn(&str) -> Option<T> + 'a) -> Option<T> {
    find(name).or_else(|| find(&name.replace('-', "_")))
}

fn theorem<'a>(f: &'a SourceFile, name: &str) -> Result<(String, &'a [AnyFormula]), Failure> {
    lookup(name, |n| f.theorem(n).map(|t| (n.to_string(), t)))
        .ok_or_else(|| Failure::usage(format!("no theorem named {name}")))
}

fn single<'a>(name: &str, fs: &'a [AnyFormula]) -> Result<&'a AnyFormula, Failure> {
    match fs {
        [f] => Ok(f),
        _ => Err(Failure::usage(format!("{name} is a sequent of {} formulas, not a single formula", fs.len()))),
    }
}

fn write(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn show_term(t: &Term) -> String {
    term_to_numeral(t).map_or_else(|| Printer::new().term(t), |n| n.to_string())
}

fn run_check(file: &Path, mode: Option<ModeArg>, sigma1: bool) -> Result<Done, Failure> {
    let f = load(file)?;
    let mut results = Vec::new();
    let mut failed = 0;
    for (name, header, tree) in f.proofs() {
        let mut rules = match mode {
            Some(m) => RuleSet { mode: m.into(), ..header.rules },
            None => header.rules,
        };
        if sigma1 {
            rules = rules.with_sigma1();
        }
        let goal = match f.goal(name, header.polarization.as_deref()) {
            Ok(g) => g,
            Err(e) => {
                failed += 1;
                println!("{name}: FAIL {e}");
                results.push(json!({ "name": name.to_string(), "accepted": false, "error": e.to_string() }));
                continue;
            }
        };
        let r = check_with(tree, &goal, rules, &f.constructors).named(name);
        if r.accepted {
            println!("{name}: ok [{}] {} nodes", rules.mode.keyword(), r.nodes_checked);
        } else {
            failed += 1;
            let why = r.failure.as_ref().map_or_else(String::new, |e| e.to_string());
            println!("{name}: FAIL [{}] {why}", rules.mode.keyword());
        }
        results.push(serde_json::to_value(&r).expect("report serializes"));
    }
    if results.is_empty() {
        println!("no proofs in {}", file.display());
    }
    Ok(Done { code: u8::from(failed > 0), report: json!({ "command": "check", "proofs": results }) })
}

fn run_compute(
    file: &Path,
    query: &str,
    fuel: Option<u64>,
    order: Order,
    trace: Option<&Path>,
    want_cert: bool,
) -> Result<Done, Failure> {
    let f = load(file)?;
    let (qname, (pname, args)) = lookup(query, |n| f.query(n).map(|q| (n.to_string(), q)))
        .ok_or_else(|| Failure::usage(format!("no query named {query}")))?;
    let pred = f
        .definitions
        .get(pname)
        .cloned()
        .or_else(|| stdlib::definitions().get(pname).cloned())
        .ok_or_else(|| Failure::usage(format!("query {qname} uses undefined {pname}")))?;
    let fuel = fuel.or(env_fuel()?).unwrap_or(DEFAULT_FUEL);
    let strategy = SearchStrategy::new(order, fuel);
    let outcome = search(&pred, args, &strategy).map_err(|e| Failure::usage(e.to_string()))?;
    let (value, steps) = match outcome {
        Outcome::Success { value, trace } => (value, trace),
        Outcome::Failure => {
            println!("FAIL");
            return Ok(Done { code: 1, report: json!({ "command": "compute", "query": qname, "outcome": "fail" }) });
        }
        Outcome::FuelExhausted => {
            println!("EXHAUSTED");
            return Ok(Done {
                code: 1,
                report: json!({ "command": "compute", "query": qname, "outcome": "exhausted", "fuel": fuel }),
            });
        }
    };
    println!("{}", show_term(&value));
    if let Some(path) = trace {
        let lines: Vec<String> = steps.iter().map(|s| s.to_string()).collect();
        write(path, &(lines.join("\n") + "\n"))?;
    }
    let mut report = json!({
        "command": "compute",
        "query": qname,
        "outcome": "success",
        "value": show_term(&value),
        "steps": steps.len(),
    });
    if want_cert {
        let cert = certify(&pred, args, &value, &strategy).map_err(|e| Failure::failed(e.to_string()))?;
        let r = check(&cert.proof, &cert.goal, RuleSet::new(Mode::Core));
        let printer = f.printer();
        let [goal] = cert.goal.formulas.as_slice() else { unreachable!("existence goal is one formula") };
        let name = format!("{qname}_certificate");
        println!("theorem {name} : {}", printer.formula(goal));
        println!("proof {name} [core] {{\n{}}}", printer.proof(&cert.proof));
        println!("# certificate {}", if r.accepted { "accepted" } else { "REJECTED" });
        report["certificate"] = json!({ "accepted": r.accepted, "nodes": cert.proof.size() });
        if !r.accepted {
            return Ok(Done { code: 1, report });
        }
    }
    Ok(Done::ok(report))
}

fn run_classify(file: &Path, name: &str) -> Result<Done, Failure> {
    let f = load(file)?;
    let formula = match f.theorem(name).or_else(|| f.theorem(&name.replace('-', "_"))) {
        Some(fs) => match single(name, fs)? {
            AnyFormula::Polarized(p) => p.clone(),
            AnyFormula::Unpolarized(_) => {
                return Err(Failure::usage(format!("{name} is unpolarized; polarize it first")));
            }
        },
        None => {
            let p = lookup(name, |n| f.definitions.get(n).cloned())
                .ok_or_else(|| Failure::usage(format!("no theorem or definition named {name}")))?;
            // a definition is classified as the fixed point applied to variables
            let args: Vec<Term> = (0..p.arity()).map(|i| Term::var(&format!("x{i}"))).collect();
            p.apply(&args).map_err(|e| Failure::usage(e.to_string()))?
        }
    };
    let class = formula.classify().map_err(|e| Failure::failed(e.to_string()))?;
    println!("{class}");
    Ok(Done::ok(json!({ "command": "classify", "name": name, "class": class.to_string() })))
}

fn transform_input(t: &Transform) -> Result<(SourceFile, AnyFormula), Failure> {
    let f = match &t.file {
        Some(p) => load(p)?,
        // inline formulas see the shipped definitions by default
        None => parse(stdlib::PRELUDE).expect("the prelude parses"),
    };
    let any = match (&t.formula, &t.expr) {
        (Some(name), _) => {
            let (n, fs) = theorem(&f, name)?;
            single(&n, fs)?.clone()
        }
        (None, Some(text)) => {
            parse_formula(text, &f.definitions, &f.constructors).map_err(|e| Failure::usage(format!("--expr: {e}")))?
        }
        (None, None) => return Err(Failure::usage("give --formula NAME or --expr TEXT")),
    };
    Ok((f, any))
}

fn polarized(any: AnyFormula, what: &str) -> Result<Formula, Failure> {
    match any {
        AnyFormula::Polarized(p) => Ok(p),
        AnyFormula::Unpolarized(_) => Err(Failure::usage(format!("{what} needs a polarized formula"))),
    }
}

fn run_transform(command: &str, t: &Transform, pol: Option<&str>) -> Result<Done, Failure> {
    let (f, any) = transform_input(t)?;
    let p = f.printer();
    let out = match command {
        "dual" => match any {
            AnyFormula::Polarized(x) => p.formula(&x.dual()),
            AnyFormula::Unpolarized(u) => p.uformula(&u.dual()),
        },
        "polarize" => {
            let AnyFormula::Unpolarized(u) = any else {
                return Err(Failure::usage("polarize needs an unpolarized formula"));
            };
            let bits = parse_bits(pol.unwrap_or_default())?;
            let x = f.translate(&u).polarize(&bits).map_err(|e| Failure::usage(e.to_string()))?;
            p.formula(&x)
        }
        "depolarize" => p.uformula(&UFormula::depolarize(&polarized(any, command)?)),
        "expand-exp" => p.formula(&polarized(any, command)?.expand_exponentials()),
        _ => unreachable!("transform commands are fixed"),
    };
    println!("{out}");
    Ok(Done::ok(json!({ "command": command, "result": out })))
}

fn run_eval(file: &Path, name: &str, fuel: Option<u64>, qbound: u64, pol: Option<&str>) -> Result<Done, Failure> {
    let f = load(file)?;
    let (n, fs) = theorem(&f, name)?;
    let fuel = fuel.or(env_fuel()?).unwrap_or(DEFAULT_EVAL_FUEL);
    let fuel = u32::try_from(fuel).map_err(|_| Failure::usage(format!("fuel {fuel} is too large")))?;
    let bits = pol.map(parse_bits).transpose()?;
    let truth = match (fs, &bits) {
        ([AnyFormula::Unpolarized(u)], None) => {
            if let Some(x) = u.free_vars().first() {
                return Err(Failure::usage(format!("{n} has the free variable {x}; give --pol to evaluate its closure")));
            }
            eval_unpolarized(&f.translate(u), fuel, qbound)
        }
        _ => {
            let goal: Sequent = f.goal(&n, bits.as_deref()).map_err(|e| Failure::usage(e.to_string()))?;
            eval_bounded(&sequent_formula(&goal), fuel, qbound)
        }
    }
    .map_err(|e| Failure::failed(e.to_string()))?;
    let label = match truth {
        Truth::True => "True",
        Truth::False => "False",
        Truth::Unknown => "Unknown",
    };
    println!("{label}");
    Ok(Done::ok(json!({ "command": "eval", "name": n, "fuel": fuel, "qbound": qbound, "truth": truth })))
}

fn run_corpus(fuel: u64, qbound: u64) -> Result<Done, Failure> {
    let proofs = stdlib::shipped_proofs().map_err(|e| Failure::failed(e.to_string()))?;
    let mut reports: Vec<_> = proofs.par_iter().map(|p| (p.name.to_string(), p.file, p.check())).collect();
    reports.sort_by(|a, b| a.0.cmp(&b.0));
    let mut failed = 0;
    for (name, file, r) in &reports {
        if r.accepted {
            println!("{name}: ok ({file})");
        } else {
            failed += 1;
            let why = r.failure.as_ref().map_or_else(String::new, |e| e.to_string());
            println!("{name}: FAIL ({file}) {why}");
        }
    }
    let fuel = u32::try_from(fuel).map_err(|_| Failure::usage(format!("fuel {fuel} is too large")))?;
    let sweep = stdlib::corpus_sweep(fuel, qbound).map_err(|e| Failure::failed(e.to_string()))?;
    let mut entries = sweep.entries.clone();
    entries.sort_by(|a, b| a.name.cmp(&b.name));
    for e in &entries {
        println!("sweep {}: {:?}", e.name, e.truth);
    }
    println!(
        "{} proofs, {failed} rejected; sweep: {} true, {} unknown, {} false",
        reports.len(),
        sweep.true_count,
        sweep.unknown_count,
        sweep.false_count
    );
    let checks: Vec<Value> = reports.iter().map(|(_, _, r)| serde_json::to_value(r).expect("report serializes")).collect();
    let code = u8::from(failed > 0 || !sweep.ok());
    Ok(Done { code, report: json!({ "command": "corpus", "proofs": checks, "sweep": sweep }) })
}

fn run(cli: &Cli) -> Result<Done, Failure> {
    match &cli.command {
        Command::Check { file, mode, sigma1 } => run_check(file, *mode, *sigma1),
        Command::Compute { file, query, fuel, strategy, trace, certify } => {
            run_compute(file, query, *fuel, *strategy, trace.as_deref(), *certify)
        }
        Command::Classify { file, formula } => run_classify(file, formula),
        Command::Dual(t) => run_transform("dual", t, None),
        Command::Polarize { input, pol } => run_transform("polarize", input, Some(pol)),
        Command::Depolarize(t) => run_transform("depolarize", t, None),
        Command::ExpandExp(t) => run_transform("expand-exp", t, None),
        Command::Eval { file, formula, fuel, qbound, pol } => run_eval(file, formula, *fuel, *qbound, pol.as_deref()),
        Command::Corpus { fuel, qbound } => run_corpus(*fuel, *qbound),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (code, report) = match run(&cli) {
        Ok(d) => (d.code, d.report),
        Err(e) => {
            eprintln!("error: {}", e.message);
            (e.code, json!({ "error": e.message, "exit": e.code }))
        }
    };
    if let Some(path) = &cli.json {
        let text = serde_json::to_string_pretty(&report).expect("report serializes");
        if let Err(e) = fs::write(path, text + "\n") {
            eprintln!("error: {}: {e}", path.display());
            return ExitCode::from(2);
        }
    }
    ExitCode::from(code)
}
