//! `ddrs`: command-line front end for the rewriting workbench.
//!
//! Exit codes: 0 the property holds, 1 it fails with a counterexample, 2 unknown within
//! budget, 64 usage error.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ddrs_core::catalog::{builtin_system, import_trs, parse_term_for, RewriteSystem, SystemId, Variant};
use ddrs_core::confluence::{check_confluence_with, complete, CompletionResult, ConfluenceVerdict, JoinBudget};
use ddrs_core::fixtures::replay_all;
use ddrs_core::oracle::{check_ground, default_strategies, GroundReport};
use ddrs_core::rewrite::{normalize, NormalizeOutcome, Strategy, DEFAULT_MAX_STEPS};
use ddrs_core::termination::{
    assess_termination, prove_termination_rto, search_loops, LoopWitness, TerminationOptions, TerminationVerdict, WeightAssignment,
};
use ddrs_core::oracle::enumerate_ground_terms;
use ddrs_core::tree::DEFAULT_TREE_BUDGET;
use ddrs_core::{export_trs, Term};

const EXIT_HOLDS: u8 = 0;
const EXIT_FAILS: u8 = 1;
const EXIT_UNKNOWN: u8 = 2;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(name = "ddrs", version, about = "Rewriting workbench for integer datatype rewrite systems")]
struct Cli {
    /// Worker threads for parallel analyses (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Format {
    Human,
    Json,
}

#[derive(Args, Clone)]
struct Target {
    /// Built-in system, e.g. N_bud, Z_dub, Z_r.
    #[arg(long, required_unless_present = "from_file", conflicts_with = "from_file")]
    system: Option<String>,
    /// edited or unedited.
    #[arg(long, default_value = "edited")]
    variant: String,
    /// Read the rules from a rule file instead of the catalog.
    #[arg(long)]
    from_file: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct Output {
    #[arg(long, value_enum, default_value = "human")]
    format: Format,
    /// Write the report to FILE instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct Rewriting {
    #[command(flatten)]
    target: Target,
    /// Term to rewrite; may start with `-`
    #[arg(long, allow_hyphen_values = true)]
    term: String,
    /// innermost, outermost, random[:SEED] or breadth.
    #[arg(long, default_value = "innermost")]
    strategy: String,
    /// Seed for the random strategy.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = DEFAULT_MAX_STEPS)]
    max_steps: usize,
    #[command(flatten)]
    output: Output,
}

#[derive(Subcommand)]
enum Command {
    /// List the built-in systems.
    Systems {
        #[command(flatten)]
        output: Output,
    },
    /// Print the rules of a system.
    Show {
        #[command(flatten)]
        target: Target,
        #[command(flatten)]
        output: Output,
    },
    /// Rewrite a term to normal form.
    Normalize(Rewriting),
    /// Rewrite a term and print every step.
    Trace(Rewriting),
    /// Critical pairs and a confluence verdict.
    Confluence {
        #[command(flatten)]
        target: Target,
        /// Breadth-first join depth when termination is not established.
        #[arg(long, default_value_t = JoinBudget::default().depth)]
        depth: usize,
        #[arg(long, default_value_t = DEFAULT_MAX_STEPS)]
        max_steps: usize,
        /// Weights for the termination proof: natural (alias table7), default, graded, or a file of symbol=nat lines.
        #[arg(long, default_value = "default")]
        weights: String,
        /// Treat the system as terminating instead of proving it.
        #[arg(long)]
        assume_terminating: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Tree-ordering proof, falling back to loop search.
    Termination {
        #[command(flatten)]
        target: Target,
        /// natural (alias table7), default, graded, or a file of symbol=nat lines.
        #[arg(long, default_value = "default")]
        weights: String,
        /// Tree search budget in expansions per rule.
        #[arg(long, default_value_t = DEFAULT_TREE_BUDGET)]
        expansions: usize,
        /// Largest ground seed for the loop search.
        #[arg(long, default_value_t = 4)]
        size: usize,
        /// Reduction-graph nodes explored per seed.
        #[arg(long, default_value_t = 500)]
        depth: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Search reduction graphs for cycles.
    Loops {
        #[command(flatten)]
        target: Target,
        /// Seed terms; without any, all ground terms up to --size are tried.
        #[arg(long, allow_hyphen_values = true)]
        term: Vec<String>,
        #[arg(long, default_value_t = 4)]
        size: usize,
        /// Reduction-graph nodes explored per seed.
        #[arg(long, default_value_t = 10_000)]
        depth: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Compare normal forms of all ground terms with exact integer values.
    GroundCheck {
        #[command(flatten)]
        target: Target,
        #[arg(long, default_value_t = 4)]
        size: usize,
        /// Strategy to use; repeatable. Default: innermost, outermost, random:1..3.
        #[arg(long)]
        strategy: Vec<String>,
        #[arg(long, default_value_t = DEFAULT_MAX_STEPS)]
        max_steps: usize,
        /// Also write the failures as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[command(flatten)]
        output: Output,
    },
    /// Bounded Knuth-Bendix completion.
    Complete {
        #[command(flatten)]
        target: Target,
        #[arg(long, default_value = "default")]
        weights: String,
        #[arg(long, default_value_t = 25)]
        max_iter: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Write a system in the rule-file format.
    Export {
        #[command(flatten)]
        target: Target,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Replay the known loops, counterexamples, joins and tree derivations.
    Fixtures {
        #[command(flatten)]
        output: Output,
    },
}

/// A failure that is the caller's fault.
struct Usage(String);

impl<E: std::fmt::Display> From<E> for Usage {
    fn from(e: E) -> Self {
        Usage(e.to_string())
    }
}

struct Report {
    text: String,
    code: u8,
}

fn load(t: &Target) -> Result<RewriteSystem, Usage> {
    if let Some(path) = &t.from_file {
        let text = std::fs::read_to_string(path).map_err(|e| Usage(format!("{}: {e}", path.display())))?;
        let name = path.file_stem().map_or("imported".into(), |s| s.to_string_lossy().into_owned());
        return Ok(import_trs(&text, &name)?);
    }
    let id: SystemId = t.system.as_deref().unwrap_or_default().parse()?;
    let variant: Variant = t.variant.parse()?;
    Ok(builtin_system(id, variant)?)
}

fn weights(spec: &str) -> Result<WeightAssignment, Usage> {
    if let Some(w) = WeightAssignment::named(spec) {
        return Ok(w);
    }
    let text = std::fs::read_to_string(spec).map_err(|e| Usage(format!("weights `{spec}`: not a built-in name and not readable ({e})")))?;
    Ok(WeightAssignment::parse(&text)?)
}

fn strategy(name: &str, seed: Option<u64>) -> Result<Strategy, Usage> {
    let s: Strategy = name.parse().map_err(Usage)?;
    Ok(match (s, seed) {
        (Strategy::RandomSeeded(_), Some(k)) => Strategy::RandomSeeded(k),
        (s, _) => s,
    })
}

fn json(v: &impl serde::Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable report");
    s.push('\n');
    s
}

/// Round-trips through `Value` so object keys come out sorted.
fn sorted_json(v: &impl serde::Serialize) -> String {
    json(&serde_json::to_value(v).expect("serializable report"))
}

fn emit(out: &Output, human: impl FnOnce() -> String, machine: impl FnOnce() -> String) -> String {
    match out.format {
        Format::Human => human(),
        Format::Json => machine(),
    }
}

fn run_systems(output: &Output) -> Report {
    let rows: Vec<serde_json::Value> = SystemId::ALL
        .iter()
        .map(|&id| {
            let edited = builtin_system(id, Variant::Edited).expect("built-in").rules().len();
            let unedited = id.has_unedited().then(|| builtin_system(id, Variant::Unedited).expect("built-in").rules().len());
            serde_json::json!({"system": id.name(), "description": id.description(), "rules": edited, "unedited_rules": unedited})
        })
        .collect();
    let text = emit(
        output,
        || {
            let mut s = String::new();
            for r in &rows {
                let un = r["unedited_rules"].as_u64().map_or(String::new(), |n| format!(" (unedited: {n})"));
                let _ = writeln!(s, "{:<6} {:>4} rules{un:<16} {}", r["system"].as_str().unwrap_or(""), r["rules"], r["description"].as_str().unwrap_or(""));
            }
            s
        },
        || json(&rows),
    );
    Report { text, code: EXIT_HOLDS }
}

fn run_show(target: &Target, output: &Output) -> Result<Report, Usage> {
    let sys = load(target)?;
    let text = emit(
        output,
        || {
            let mut s = format!("{}: {} rules\n", sys.label(), sys.rules().len());
            for r in sys.rules() {
                let _ = writeln!(s, "{r}");
            }
            s
        },
        || sorted_json(&serde_json::json!({"system": sys.name, "variant": sys.variant, "rules": sys.rules()})),
    );
    Ok(Report { text, code: EXIT_HOLDS })
}

fn outcome_code(o: &NormalizeOutcome) -> u8 {
    match o {
        NormalizeOutcome::NormalForm { .. } => EXIT_HOLDS,
        NormalizeOutcome::Cycle { .. } => EXIT_FAILS,
        NormalizeOutcome::StepLimit { .. } => EXIT_UNKNOWN,
    }
}

fn outcome_line(o: &NormalizeOutcome) -> String {
    match o {
        NormalizeOutcome::NormalForm { term, .. } => term.to_string(),
        NormalizeOutcome::Cycle { trace, cycle_start } => {
            format!("cycle: step {} returns to the term after step {cycle_start} ({})", trace.len(), trace.last())
        }
        NormalizeOutcome::StepLimit { trace } => format!("step limit after {} steps at {}", trace.len(), trace.last()),
    }
}

fn run_rewriting(a: &Rewriting, full: bool) -> Result<Report, Usage> {
    let sys = load(&a.target)?;
    let t = parse_term_for(&sys, &a.term).map_err(Usage)?;
    let strat = strategy(&a.strategy, a.seed)?;
    let o = normalize(&sys, &t, strat, a.max_steps);
    let text = emit(
        &a.output,
        || if full { format!("{}{}\n", o.trace(), outcome_line(&o)) } else { format!("{}\n", outcome_line(&o)) },
        || {
            if full {
                json(&o.trace().to_json())
            } else {
                sorted_json(&serde_json::json!({
                    "term": t.to_string(),
                    "strategy": strat.to_string(),
                    "outcome": o.kind().to_string(),
                    "normal_form": o.normal_form().map(Term::to_string),
                    "steps": o.trace().len(),
                }))
            }
        },
    );
    Ok(Report { text, code: outcome_code(&o) })
}

fn run_confluence(target: &Target, depth: usize, max_steps: usize, w: &str, assume: bool, output: &Output) -> Result<Report, Usage> {
    if depth == 0 {
        return Err(Usage("--depth must be at least 1".into()));
    }
    let sys = load(target)?;
    let terminating = assume || prove_termination_rto(&sys, &weights(w)?, DEFAULT_TREE_BUDGET)?.is_proven();
    let report = check_confluence_with(&sys, terminating, JoinBudget { depth, max_steps, ..JoinBudget::default() });
    let code = match report.verdict {
        ConfluenceVerdict::Confluent { .. } => EXIT_HOLDS,
        ConfluenceVerdict::NonConfluent { .. } => EXIT_FAILS,
        ConfluenceVerdict::Unknown { .. } => EXIT_UNKNOWN,
    };
    let text = emit(output, || format!("{}: {report}", sys.label()), || json(&report.to_json(&sys)));
    Ok(Report { text, code })
}

fn verdict_code(v: &TerminationVerdict) -> u8 {
    match v {
        TerminationVerdict::ProvenRto { .. } => EXIT_HOLDS,
        TerminationVerdict::DisprovenLoop { .. } => EXIT_FAILS,
        TerminationVerdict::Unknown { .. } => EXIT_UNKNOWN,
    }
}

fn run_termination(target: &Target, w: &str, expansions: usize, size: usize, nodes: usize, output: &Output) -> Result<Report, Usage> {
    let sys = load(target)?;
    let opts = TerminationOptions { tree_budget: expansions, loop_size: size, loop_nodes: nodes };
    let v = assess_termination(&sys, &weights(w)?, &opts)?;
    let text = emit(
        output,
        || format!("{}: {v}", sys.label()),
        || sorted_json(&serde_json::json!({"system": sys.name, "variant": sys.variant, "weights": w, "result": v})),
    );
    Ok(Report { text, code: verdict_code(&v) })
}

fn witness_text(w: &LoopWitness) -> String {
    let (trace, start) = w.full_trace();
    format!("loop of period {} from {} via [{}]\n{trace}(cycle starts at step {start})\n", w.period(), w.seed, w.cycle_rules().join(", "))
}

fn run_loops(target: &Target, terms: &[String], size: usize, nodes: usize, output: &Output) -> Result<Report, Usage> {
    let sys = load(target)?;
    let search = if terms.is_empty() {
        search_loops(&sys, enumerate_ground_terms(sys.signature(), size), nodes)
    } else {
        let seeds = terms.iter().map(|s| parse_term_for(&sys, s).map_err(Usage)).collect::<Result<Vec<_>, _>>()?;
        search_loops(&sys, seeds, nodes)
    };
    let code = if search.witness.is_some() { EXIT_FAILS } else { EXIT_UNKNOWN };
    let text = emit(
        output,
        || match &search.witness {
            Some(w) => format!("{}: {}", sys.label(), witness_text(w)),
            None => format!(
                "{}: no loop among {} seeds ({} not fully explored within {nodes} nodes)\n",
                sys.label(),
                search.seeds_tried,
                search.incomplete_seeds
            ),
        },
        || {
            sorted_json(&serde_json::json!({
                "system": sys.name,
                "variant": sys.variant,
                "seeds_tried": search.seeds_tried,
                "incomplete_seeds": search.incomplete_seeds,
                "loop": search.witness.as_ref().map(|w| serde_json::json!({
                    "seed": w.seed.to_string(),
                    "period": w.period(),
                    "rules": w.cycle_rules(),
                    "prefix": w.prefix.to_json(),
                    "cycle": w.cycle.to_json(),
                })),
            }))
        },
    );
    Ok(Report { text, code })
}

fn write_csv(path: &PathBuf, report: &GroundReport) -> Result<(), Usage> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["term", "strategy", "outcome", "got", "expected"])?;
    for f in &report.failures {
        w.write_record([f.term.as_str(), &f.strategy, &f.outcome.to_string(), f.got.as_deref().unwrap_or(""), &f.expected])?;
    }
    w.flush()?;
    Ok(())
}

fn run_ground(target: &Target, size: usize, strategies: &[String], max_steps: usize, csv: Option<&PathBuf>, output: &Output) -> Result<Report, Usage> {
    let sys = load(target)?;
    let strats = if strategies.is_empty() {
        default_strategies()
    } else {
        strategies.iter().map(|s| strategy(s, None)).collect::<Result<_, _>>()?
    };
    let report = check_ground(&sys, size, &strats, max_steps);
    if let Some(path) = csv {
        write_csv(path, &report)?;
    }
    let text = emit(
        output,
        || {
            let mut s = format!(
                "{}: {} ground terms of size <= {} under [{}] as {}: {} failures\n",
                sys.label(),
                report.terms_checked,
                report.size_bound,
                report.strategies.join(", "),
                report.representation,
                report.failures.len()
            );
            for f in &report.failures {
                let _ = writeln!(s, "  {} [{}] {}: got {}, expected {}", f.term, f.strategy, f.outcome, f.got.as_deref().unwrap_or("-"), f.expected);
            }
            s
        },
        || sorted_json(&report),
    );
    Ok(Report { text, code: if report.is_clean() { EXIT_HOLDS } else { EXIT_FAILS } })
}

fn run_complete(target: &Target, w: &str, max_iter: usize, output: &Output) -> Result<Report, Usage> {
    if max_iter == 0 {
        return Err(Usage("--max-iter must be at least 1".into()));
    }
    let sys = load(target)?;
    let r = complete(&sys, &weights(w)?, max_iter)?;
    let code = if matches!(r, CompletionResult::Completed { .. }) { EXIT_HOLDS } else { EXIT_UNKNOWN };
    let text = emit(output, || format!("{}: {r}", sys.label()), || sorted_json(&r));
    Ok(Report { text, code })
}

fn run_fixtures(output: &Output) -> Report {
    let checks = replay_all();
    let failed = checks.iter().filter(|c| !c.passed).count();
    let text = emit(
        output,
        || {
            let mut s = String::new();
            for c in &checks {
                let _ = writeln!(s, "{c}");
            }
            let _ = writeln!(s, "{} fixtures, {failed} failed", checks.len());
            s
        },
        || sorted_json(&checks),
    );
    Report { text, code: if failed == 0 { EXIT_HOLDS } else { EXIT_FAILS } }
}

fn deliver(report: Report, out: Option<&PathBuf>) -> Result<u8, Usage> {
    match out {
        Some(path) => std::fs::write(path, &report.text).map_err(|e| Usage(format!("{}: {e}", path.display())))?,
        None => print!("{}", report.text),
    }
    Ok(report.code)
}

fn run(cli: Cli) -> Result<u8, Usage> {
    if let Some(n) = cli.jobs {
        rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global()?;
    }
    match &cli.command {
        Command::Systems { output } => deliver(run_systems(output), output.out.as_ref()),
        Command::Show { target, output } => deliver(run_show(target, output)?, output.out.as_ref()),
        Command::Normalize(a) => deliver(run_rewriting(a, false)?, a.output.out.as_ref()),
        Command::Trace(a) => deliver(run_rewriting(a, true)?, a.output.out.as_ref()),
        Command::Confluence { target, depth, max_steps, weights, assume_terminating, output } => {
            deliver(run_confluence(target, *depth, *max_steps, weights, *assume_terminating, output)?, output.out.as_ref())
        }
        Command::Termination { target, weights, expansions, size, depth, output } => {
            deliver(run_termination(target, weights, *expansions, *size, *depth, output)?, output.out.as_ref())
        }
        Command::Loops { target, term, size, depth, output } => deliver(run_loops(target, term, *size, *depth, output)?, output.out.as_ref()),
        Command::GroundCheck { target, size, strategy, max_steps, csv, output } => {
            deliver(run_ground(target, *size, strategy, *max_steps, csv.as_ref(), output)?, output.out.as_ref())
        }
        Command::Complete { target, weights, max_iter, output } => deliver(run_complete(target, weights, *max_iter, output)?, output.out.as_ref()),
        Command::Export { target, out } => {
            let sys = load(target)?;
            deliver(Report { text: export_trs(&sys), code: EXIT_HOLDS }, out.as_ref())
        }
        Command::Fixtures { output } => deliver(run_fixtures(output), output.out.as_ref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { EXIT_HOLDS });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Usage(msg)) => {
            eprintln!("ddrs: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
