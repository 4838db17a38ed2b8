use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use alciota::bench::{self, BenchConfig};
use alciota::bisim::{max_bisim, BisimLogic};
use alciota::generator::{self, GenParams};
use alciota::semantics::{parse_interpretation, print_interpretation};
use alciota::syntax::{parse_concept, parse_ontology, print_concept, Concept, Logic, Ontology};
use alciota::tableau::{prove, ProverConfig, ProverError, Verdict};
use alciota::translate::{self, Internalization, Var};

const EXIT_USAGE: u8 = 64;
const EXIT_INTERNAL: u8 = 70;

macro_rules! out {
    ($($arg:tt)*) => {
        writeln!(io::stdout(), $($arg)*)?
    };
}

/// Satisfiability prover for ALC with local and global definite descriptions.
#[derive(Parser)]
#[command(name = "alciota", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide satisfiability. Exit status: 0 sat, 1 unsat, 2 timeout or error.
    Prove(ProveArgs),
    /// Print the elements of a model in the extension of a concept.
    Eval(EvalArgs),
    /// Print the maximal bisimulation between two models as "d e" lines, or EMPTY.
    Bisim(BisimArgs),
    /// Translate a concept or ontology.
    ///
    /// The fo2 mode prints first-order formulas in ASCII: "~" negation,
    /// "&" conjunction, "|" disjunction, "->" implication, "x = y"
    /// equality, "exists y (...)" and "forall y (...)" quantifiers,
    /// and "true"/"false".
    Translate(TranslateArgs),
    /// Generate random concepts, or a dataset directory with a manifest.
    Generate(GenerateArgs),
    /// Time the prover over generated datasets.
    Bench(BenchArgs),
}

#[derive(Args)]
struct ProveArgs {
    /// Concept file, or the concept itself.
    concept: String,
    #[arg(long, default_value = "alci")]
    logic: Logic,
    #[arg(long)]
    ontology: Option<PathBuf>,
    /// For example "10s" or "500ms".
    #[arg(long, value_parser = humantime::parse_duration)]
    timeout: Option<Duration>,
    /// Disable both cut rules (incomplete).
    #[arg(long)]
    no_cut: bool,
    /// Write the model of a satisfiable input to this file.
    #[arg(long)]
    emit_model: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    concept: String,
    model: PathBuf,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct BisimArgs {
    #[arg(long, default_value = "alc")]
    logic: BisimLogic,
    left: PathBuf,
    right: PathBuf,
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Exp,
    Poly,
    InternalizeL,
    InternalizeG,
    Fo2,
    Counter,
}

#[derive(Args)]
struct TranslateArgs {
    #[arg(long, value_enum)]
    mode: Mode,
    /// Concept file, or the concept itself. Not used by the counter mode.
    concept: Option<String>,
    /// Ontology for poly (translated) and internalization (TBox source).
    #[arg(long)]
    ontology: Option<PathBuf>,
    #[arg(long, default_value = "x")]
    var: Var,
    /// Counter width.
    #[arg(long)]
    n: Option<usize>,
}

#[derive(Args)]
struct GenerateArgs {
    /// Atom occurrences, a number or an inclusive range such as 10..200.
    #[arg(long, default_value = "10..200", value_parser = parse_range)]
    atoms: (usize, usize),
    #[arg(long, default_value_t = 0.0)]
    gd_frac: f64,
    #[arg(long, default_value_t = 0.0)]
    ld_frac: f64,
    #[arg(long, default_value_t = 0.3)]
    exists_frac: f64,
    #[arg(long, default_value_t = 0.5)]
    distinct_frac: f64,
    #[arg(long, default_value_t = 0.5)]
    neg_prob: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    count: usize,
    /// Write concept files and manifest.csv here instead of printing.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Dataset directories written by `generate --out`.
    datasets: Vec<PathBuf>,
    /// Generate the six GD/LD comparison datasets under --out and bench them.
    #[arg(long)]
    table: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 150)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 5)]
    runs: usize,
    #[arg(long, default_value = "10s", value_parser = humantime::parse_duration)]
    timeout: Duration,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Keep concepts of the form (not (some r C)) in the averages.
    #[arg(long)]
    no_exclude: bool,
    #[arg(long, default_value = "alci")]
    logic: Logic,
    /// Write all rows to this CSV file.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Print reports, including per-run times, as JSON.
    #[arg(long)]
    json: bool,
}

fn parse_range(s: &str) -> Result<(usize, usize), String> {
    let parse = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("'{t}': {e}"));
    match s.split_once("..") {
        Some((a, b)) => Ok((parse(a)?, parse(b.trim_start_matches('='))?)),
        None => {
            let n = parse(s)?;
            Ok((n, n))
        }
    }
}

/// Errors caused by the caller's input rather than by the tool.
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))
}

/// A concept given inline or as the path of a file holding it.
fn load_concept(arg: &str) -> Result<Concept> {
    let path = Path::new(arg);
    let (text, origin) = if path.is_file() {
        (read_file(path)?, path.display().to_string())
    } else {
        (arg.to_string(), "concept".to_string())
    };
    parse_concept(&text).map_err(|e| usage(format!("{origin}: {e}")))
}

fn load_ontology(path: &Path) -> Result<Ontology> {
    parse_ontology(&read_file(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn load_model(path: &Path) -> Result<alciota::semantics::Interpretation> {
    parse_interpretation(&read_file(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn cmd_prove(a: ProveArgs) -> Result<u8> {
    let concept = load_concept(&a.concept)?;
    let ontology = a.ontology.as_deref().map(load_ontology).transpose()?;
    let cfg = ProverConfig { logic: a.logic, enable_cut: !a.no_cut, timeout: a.timeout, ..ProverConfig::default() };
    let result = match prove(&concept, ontology.as_ref(), &cfg) {
        Ok(r) => r,
        Err(e @ ProverError::Timeout(_)) => {
            if a.json {
                out!("{}", serde_json::json!({ "verdict": "timeout", "error": e.to_string() }));
            } else {
                out!("timeout");
            }
            eprintln!("alciota: {e}");
            return Ok(2);
        }
        Err(e) => {
            eprintln!("alciota: {e}");
            return Ok(2);
        }
    };
    if let (Some(path), Some(model)) = (&a.emit_model, &result.model) {
        fs::write(path, print_interpretation(model)).with_context(|| format!("writing {}", path.display()))?;
    }
    if a.json {
        let root = result.root_element.zip(result.model.as_ref()).map(|(d, m)| m.element_name(d).to_string());
        let out = serde_json::json!({
            "verdict": result.verdict.to_string(),
            "root": root,
            "model": result.model.as_ref().map(print_interpretation),
            "stats": {
                "rule_applications": result.stats.rule_applications.iter()
                    .map(|(r, n)| (r.name().to_string(), *n)).collect::<std::collections::BTreeMap<_, _>>(),
                "branches": result.stats.branches,
                "closed_branches": result.stats.closed_branches,
                "max_individuals": result.stats.max_individuals,
                "wall_time_ms": result.stats.wall_time.as_secs_f64() * 1e3,
            },
        });
        out!("{}", serde_json::to_string_pretty(&out)?);
    } else {
        out!("{}", result.verdict);
    }
    Ok(match result.verdict {
        Verdict::Sat => 0,
        Verdict::Unsat => 1,
    })
}

fn cmd_eval(a: EvalArgs) -> Result<u8> {
    let concept = load_concept(&a.concept)?;
    let model = load_model(&a.model)?;
    let names: Vec<&str> = model.eval(&concept).ones().map(|d| model.element_name(d)).collect();
    if a.json {
        out!("{}", serde_json::to_string(&names)?);
    } else {
        out!("{}", names.join(" "));
    }
    Ok(0)
}

fn cmd_bisim(a: BisimArgs) -> Result<u8> {
    let left = load_model(&a.left)?;
    let right = load_model(&a.right)?;
    let z = max_bisim(a.logic, &left, &right);
    let pairs = z.named_pairs(&left, &right);
    if a.json {
        out!("{}", serde_json::to_string(&pairs)?);
    } else if pairs.is_empty() {
        out!("EMPTY");
    } else {
        for (d, e) in pairs {
            out!("{d} {e}");
        }
    }
    Ok(0)
}

fn tr<T>(r: Result<T, translate::TranslateError>) -> Result<T> {
    r.map_err(|e| usage(e.to_string()))
}

fn cmd_translate(a: TranslateArgs) -> Result<u8> {
    let concept = || -> Result<Concept> {
        match &a.concept {
            Some(c) => load_concept(c),
            None => Err(usage("this mode needs a concept")),
        }
    };
    let ontology = a.ontology.as_deref().map(load_ontology).transpose()?;
    match a.mode {
        Mode::Exp => out!("{}", print_concept(&tr(translate::local_to_global_exp(&concept()?))?.concept)),
        Mode::Poly => match (&a.concept, &ontology) {
            (None, Some(o)) => print!("{}", tr(translate::local_to_global_poly(o))?),
            (Some(_), o) => {
                let empty = Ontology::default();
                let (c, o, _) = tr(translate::local_to_global_poly_with(&concept()?, o.as_ref().unwrap_or(&empty)))?;
                out!("{}", print_concept(&c));
                print!("{o}");
            }
            (None, None) => return Err(usage("poly needs a concept or --ontology")),
        },
        Mode::InternalizeL | Mode::InternalizeG => {
            let tbox = match &ontology {
                Some(o) if !o.abox.is_empty() => return Err(usage("internalization takes a TBox only")),
                Some(o) => o.tbox.clone(),
                None => Vec::new(),
            };
            let target =
                if matches!(a.mode, Mode::InternalizeL) { Internalization::Local } else { Internalization::Global };
            out!("{}", print_concept(&tr(translate::internalize_tbox(&concept()?, &tbox, target))?.concept));
        }
        Mode::Fo2 => out!("{}", translate::standard_translation(&concept()?, a.var)),
        Mode::Counter => {
            let n = a.n.ok_or_else(|| usage("counter needs --n"))?;
            out!("{}", print_concept(&tr(translate::counter_concept(n))?));
        }
    }
    Ok(0)
}

fn cmd_generate(a: GenerateArgs) -> Result<u8> {
    let params = GenParams {
        atom_occurrences: a.atoms,
        distinct_atom_fraction: a.distinct_frac,
        exists_fraction: a.exists_frac,
        gd_fraction: a.gd_frac,
        ld_fraction: a.ld_frac,
        negation_probability: a.neg_prob,
        seed: a.seed,
        ..GenParams::default()
    };
    params.validate().map_err(|e| usage(e.to_string()))?;
    match &a.out {
        Some(dir) => {
            let reports = generator::generate_dataset(&params, a.count, a.seed, dir)?;
            eprintln!("wrote {} concepts to {}", reports.len(), dir.display());
        }
        None => {
            let reports = generator::generate_many(&params, a.count, a.seed).map_err(|e| usage(e.to_string()))?;
            let mut out = io::stdout().lock();
            for r in reports {
                writeln!(out, "{}", print_concept(&r.concept))?;
            }
        }
    }
    Ok(0)
}

fn cmd_bench(a: BenchArgs) -> Result<u8> {
    let cfg = BenchConfig {
        runs: a.runs,
        timeout: a.timeout,
        exclude_trivial: !a.no_exclude,
        workers: a.workers,
        logic: a.logic,
    };
    if a.runs == 0 || a.workers == 0 || a.timeout.is_zero() {
        return Err(usage("--runs, --workers and --timeout must be positive"));
    }
    let reports = if a.table {
        let root = a.out.as_deref().ok_or_else(|| usage("--table needs --out"))?;
        bench::table_run(root, a.count, a.seed, &cfg)?
    } else {
        if a.datasets.is_empty() {
            return Err(usage("no dataset directories given"));
        }
        a.datasets.iter().map(|d| bench::bench_dataset(d, &cfg)).collect::<Result<Vec<_>, _>>()?
    };
    if let Some(path) = &a.csv {
        let rows: Vec<_> = reports.iter().flat_map(|r| r.rows.iter().cloned()).collect();
        let file = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
        bench::write_csv(file, &rows)?;
    }
    if a.json {
        out!("{}", serde_json::to_string_pretty(&reports)?);
    } else {
        let summaries: Vec<_> = reports.iter().map(|r| r.summary.clone()).collect();
        write!(io::stdout(), "{}", bench::format_summaries(&summaries))?;
    }
    Ok(0)
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Prove(a) => cmd_prove(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Bisim(a) => cmd_bisim(a),
        Command::Translate(a) => cmd_translate(a),
        Command::Generate(a) => cmd_generate(a),
        Command::Bench(a) => cmd_bench(a),
    }
}

fn is_broken_pipe(e: &anyhow::Error) -> bool {
    e.chain().any(|c| c.downcast_ref::<io::Error>().is_some_and(|io| io.kind() == io::ErrorKind::BrokenPipe))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let is_prove = matches!(cli.command, Command::Prove(_));
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) if is_broken_pipe(&e) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("alciota: {e:#}");
            if is_prove {
                ExitCode::from(2)
            } else if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::from(EXIT_INTERNAL)
            }
        }
    }
}
