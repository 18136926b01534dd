//! Command-line front end. `run` is the whole program minus process exit, so
//! tests can drive it in-process.
//!
//! Exit codes: 0 success (or statement holds), 1 statement fails or
//! verification disagrees, 2 usage or input error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::bench::run_bench;
use crate::dag::Dag;
use crate::error::Error;
use crate::generate::{small_corpus, Family, DEFAULT_SEED};
use crate::io::{parse_graph, parse_json};
use crate::oracle::{check_numeric_with, NumericConfig, NumericReport};
use crate::par::Execution;
use crate::requisite::{relevant_variables, requisite_parameters};
use crate::separation::{
    dsep_set_with, is_dseparated_with, Engine, IndependenceStatement, SeparationQuery, SweepOptions,
};
use crate::verify::{check_corpus, AgreementConfig, AgreementReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILS: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "dsep", version, about = "d-separation queries on DAGs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print every node d-separated from J given L.
    #[command(visible_alias = "separated")]
    Dsep(QueryArgs),
    /// Check the statement I(J, L, K): prints HOLDS (exit 0) or FAILS (exit 1).
    Check(CheckArgs),
    /// Print the tables and the variables a query P(x_J | x_L) depends on.
    Requisite(QueryArgs),
    /// Cross-check all engines, the trail oracle and the moral baseline.
    Verify(VerifyArgs),
    /// Time the engines on generated graph families.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct GraphArgs {
    /// Graph file (text edge list, or JSON with --json).
    pub graph: PathBuf,
    /// Read the graph as JSON.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct EngineArgs {
    /// Use the linear-time class-expansion engine.
    #[arg(long, conflicts_with = "faithful")]
    pub fast: bool,
    /// Use the link-labeling engine (default).
    #[arg(long)]
    pub faithful: bool,
}

impl EngineArgs {
    fn engine(&self) -> Engine {
        if self.fast {
            Engine::Fast
        } else {
            Engine::Faithful
        }
    }
}

#[derive(Debug, Args)]
pub struct QueryArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    /// Query nodes, comma-separated.
    #[arg(long = "j", value_delimiter = ',', required = true)]
    pub j: Vec<String>,
    /// Conditioning nodes, comma-separated.
    #[arg(long = "l", value_delimiter = ',')]
    pub l: Vec<String>,
    #[command(flatten)]
    pub engine: EngineArgs,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[command(flatten)]
    pub query: QueryArgs,
    /// Target nodes, comma-separated.
    #[arg(long = "k", value_delimiter = ',', required = true)]
    pub k: Vec<String>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Graph file to verify.
    #[arg(required_unless_present = "random", conflicts_with = "random")]
    pub graph: Option<PathBuf>,
    /// Read the graph as JSON.
    #[arg(long)]
    pub json: bool,
    /// Generate random graphs instead: at most NODES nodes, from SEED.
    #[arg(long, num_args = 2, value_names = ["NODES", "SEED"])]
    pub random: Option<Vec<u64>>,
    /// Number of random graphs.
    #[arg(long, default_value_t = 200)]
    pub dags: usize,
    /// Also test separations against exact distributions.
    #[arg(long)]
    pub numeric: bool,
    /// Random networks per triple for --numeric.
    #[arg(long, default_value_t = 5)]
    pub trials: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Tolerance for numeric independence.
    #[arg(long, default_value_t = crate::oracle::numeric::SOUNDNESS_TOLERANCE)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, value_enum, default_value_t = Family::Chain)]
    pub family: Family,
    /// Edge counts, comma-separated and ascending.
    #[arg(long, value_delimiter = ',', default_values_t = [10_000usize, 100_000, 1_000_000])]
    pub sizes: Vec<usize>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Runs per measurement; the fastest is reported.
    #[arg(long, default_value_t = 3)]
    pub repeats: usize,
}

/// A failure that ends the command with exit code 2.
#[derive(Debug)]
struct InputError(String);

impl<E: std::fmt::Display> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

type Outcome = Result<i32, InputError>;

fn names(list: &[String]) -> Vec<&str> {
    list.iter().map(|s| s.trim()).filter(|s| !s.is_empty()).collect()
}

fn load(path: &Path, json: bool) -> Result<Dag, InputError> {
    let text = std::fs::read_to_string(path).map_err(|e| InputError(format!("{}: {e}", path.display())))?;
    let parsed = if json { parse_json(&text) } else { parse_graph(&text) };
    parsed.map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn query(dag: &Dag, args: &QueryArgs) -> Result<SeparationQuery, Error> {
    SeparationQuery::from_names(dag, &names(&args.j), &names(&args.l))
}

fn cmd_dsep(args: &QueryArgs, out: &mut dyn Write) -> Outcome {
    let dag = load(&args.graph.graph, args.graph.json)?;
    let q = query(&dag, args)?;
    let separated = dsep_set_with(&dag, &q, args.engine.engine())?;
    writeln!(out, "{}", dag.format_set(&separated))?;
    Ok(EXIT_OK)
}

fn cmd_check(args: &CheckArgs, out: &mut dyn Write) -> Outcome {
    let dag = load(&args.query.graph.graph, args.query.graph.json)?;
    let s = IndependenceStatement::from_names(&dag, &names(&args.query.j), &names(&args.query.l), &names(&args.k))?;
    let options = SweepOptions {
        engine: args.query.engine.engine(),
        early_stop: true,
    };
    if is_dseparated_with(&dag, &s, options)? {
        writeln!(out, "HOLDS")?;
        Ok(EXIT_OK)
    } else {
        writeln!(out, "FAILS")?;
        Ok(EXIT_FAILS)
    }
}

fn cmd_requisite(args: &QueryArgs, out: &mut dyn Write) -> Outcome {
    let dag = load(&args.graph.graph, args.graph.json)?;
    let q = query(&dag, args)?;
    let params = requisite_parameters(&dag, &q)?;
    let vars = relevant_variables(&dag, &q)?;
    let primed: Vec<String> = params.iter().map(|v| format!("{}'", dag.name(v))).collect();
    writeln!(out, "parameters: {}", primed.join(" "))?;
    writeln!(out, "variables: {}", dag.format_set(&vars))?;
    Ok(EXIT_OK)
}

fn cmd_verify(args: &VerifyArgs, out: &mut dyn Write) -> Outcome {
    let dags = match (&args.graph, &args.random) {
        (Some(path), _) => vec![load(path, args.json)?],
        (None, Some(pair)) => {
            let (nodes, seed) = (pair[0] as usize, pair[1]);
            if nodes < 2 {
                return Err(InputError("--random needs at least 2 nodes".into()));
            }
            small_corpus(args.dags, nodes, seed)
        }
        (None, None) => return Err(InputError("give a graph file or --random NODES SEED".into())),
    };
    let config = AgreementConfig {
        seed: args.seed,
        ..AgreementConfig::default()
    };
    let agreement: AgreementReport = check_corpus(&dags, &config, Execution::Parallel)?;
    write!(out, "{agreement}")?;
    let mut ok = agreement.all_agree();
    if args.numeric {
        let numeric = NumericConfig {
            trials: args.trials,
            seed: args.seed,
            tolerance: args.tol,
            ..NumericConfig::default()
        };
        let mut total = NumericReport::default();
        let mut skipped = 0;
        for dag in &dags {
            match check_numeric_with(dag, &numeric) {
                Ok(r) => total.merge(r),
                Err(Error::OracleScaleExceeded { .. }) => skipped += 1,
                Err(e) => return Err(e.into()),
            }
        }
        if skipped > 0 {
            writeln!(out, "numeric check skipped for {skipped} oversized graph(s)")?;
        }
        write!(out, "{total}")?;
        ok &= total.is_sound() && total.persistent_misses.is_empty();
    }
    writeln!(out, "{}", if ok { "AGREE" } else { "DISAGREE" })?;
    Ok(if ok { EXIT_OK } else { EXIT_FAILS })
}

fn cmd_bench(args: &BenchArgs, out: &mut dyn Write) -> Outcome {
    if args.sizes.windows(2).any(|w| w[0] > w[1]) {
        return Err(InputError("--sizes must be ascending".into()));
    }
    let report = run_bench(args.family, &args.sizes, args.seed, args.repeats)?;
    write!(out, "{report}")?;
    Ok(EXIT_OK)
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let target: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    let outcome = match &cli.command {
        Command::Dsep(a) => cmd_dsep(a, out),
        Command::Check(a) => cmd_check(a, out),
        Command::Requisite(a) => cmd_requisite(a, out),
        Command::Verify(a) => cmd_verify(a, out),
        Command::Bench(a) => cmd_bench(a, out),
    };
    match outcome {
        Ok(code) => code,
        Err(InputError(message)) => {
            let _ = writeln!(err, "error: {message}");
            EXIT_INPUT
        }
    }
}
