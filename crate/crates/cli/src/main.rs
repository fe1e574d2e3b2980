//! `wkb`: decide bounded-cost satisfiability, optimal cost and query
//! entailment over weighted knowledge bases.

mod report;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::{Arc, Mutex};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use wkb_core::bench::graph::{gen_3col, gen_independent_set, goal_query, Graph};
use wkb_core::bench::lexmax::{gen_lexmax, TwoTwoFormula};
use wkb_core::bench::oracle::{OracleTable, DEFAULT_ORACLE_BUDGET};
use wkb_core::bench::random::{random_wkb_from_seed, RandomKbParams};
use wkb_core::bench::BenchError;
use wkb_core::kb::{validate, ExtendedCost, Query, WeightedKB};
use wkb_core::reason::{Engine, ReasonError, Reasoner, Semantics};
use wkb_core::search::{default_anon_cap, SearchError, SearchOptions, TraceSink};
use wkb_core::text::{parse_query, parse_wkb, serialize_query, serialize_wkb};

use report::Report;

#[derive(Parser)]
#[command(name = "wkb", version, about = "Reasoning with weighted knowledge bases")]
struct Cli {
    #[command(flatten)]
    opts: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalOpts {
    /// Knowledge base file
    #[arg(long, global = true)]
    kb: Option<PathBuf>,
    /// Anonymous elements searched beyond the named individuals
    #[arg(long, global = true, env = "WKB_ANON_BOUND")]
    anon_bound: Option<usize>,
    /// Solver decisions allowed per search
    #[arg(long, global = true)]
    budget_nodes: Option<u64>,
    #[arg(long, global = true, value_enum, default_value_t = EngineArg::Search)]
    engine: EngineArg,
    /// Print JSON (the default)
    #[arg(long, global = true, conflicts_with = "plain")]
    json: bool,
    /// Print human-readable text
    #[arg(long, global = true)]
    plain: bool,
    /// Seed for `gen random`
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write one line per solver decision to this file (`-` for stderr)
    #[arg(long, global = true)]
    trace: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum EngineArg {
    Search,
    Configs,
}

#[derive(Clone, Copy, ValueEnum)]
enum SemanticsArg {
    Certain,
    Possible,
    CertainOpt,
    PossibleOpt,
}

#[derive(Subcommand)]
enum Command {
    /// Is there an interpretation of cost at most k?
    CheckSat {
        #[arg(long)]
        k: ExtendedCost,
    },
    /// Optimal cost
    Opt,
    /// Entailment of a Boolean query
    Entail(QueryArgs),
    /// Answers of a query over the KB's individuals
    Answers(QueryArgs),
    /// Check identifiers, weights and duplicates
    Validate,
    /// Emit a generated KB
    #[command(subcommand)]
    Gen(GenCommand),
    /// Brute-force ground truth over a small domain
    #[command(subcommand)]
    Oracle(OracleCommand),
}

#[derive(Args)]
struct QueryArgs {
    #[arg(long, value_enum)]
    semantics: SemanticsArg,
    /// Cost bound for the bounded semantics
    #[arg(long)]
    k: Option<ExtendedCost>,
    /// Query file
    #[arg(long)]
    query: PathBuf,
}

#[derive(Subcommand)]
enum GenCommand {
    /// 3-colorability reduction (3-satisfiable iff the graph is 3-colorable)
    #[command(name = "3col")]
    ThreeCol {
        #[arg(long)]
        graph: PathBuf,
    },
    /// Maximum independent set reduction for one vertex
    IndependentSet {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        vertex: usize,
    },
    /// Lexicographic-maximum reduction for variable x_k
    Lexmax {
        #[arg(long)]
        formula: PathBuf,
        #[arg(long)]
        k: usize,
    },
    /// A random tiny KB
    Random,
}

#[derive(Subcommand)]
enum OracleCommand {
    Bcs {
        #[arg(long)]
        k: ExtendedCost,
    },
    Opt,
    Entail(QueryArgs),
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Budget(String),
    Other(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Budget(_) => 4,
            CliError::Other(_) => 2,
        }
    }
}

impl From<ReasonError> for CliError {
    fn from(e: ReasonError) -> Self {
        match e {
            ReasonError::Search(SearchError::BudgetExhausted(_)) => CliError::Budget(e.to_string()),
            ReasonError::UnknownQueryIndividual(_) | ReasonError::NotBoolean | ReasonError::InfiniteK => {
                CliError::Usage(e.to_string())
            }
            e => CliError::Other(e.to_string()),
        }
    }
}

impl From<BenchError> for CliError {
    fn from(e: BenchError) -> Self {
        match e {
            BenchError::BudgetExceeded(_) => CliError::Budget(e.to_string()),
            e => CliError::Usage(e.to_string()),
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn load_kb(opts: &GlobalOpts) -> Result<WeightedKB, CliError> {
    let path = opts.kb.as_deref().ok_or_else(|| CliError::Usage("--kb is required".into()))?;
    parse_wkb(&read(path)?).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn load_query(path: &Path) -> Result<Query, CliError> {
    parse_query(&read(path)?).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn semantics(args: &QueryArgs) -> Result<Semantics, CliError> {
    let k = || args.k.clone().ok_or_else(|| CliError::Usage("--k is required for bounded semantics".into()));
    Ok(match args.semantics {
        SemanticsArg::Certain => Semantics::CertainBounded(k()?),
        SemanticsArg::Possible => Semantics::PossibleBounded(k()?),
        SemanticsArg::CertainOpt => Semantics::CertainOpt,
        SemanticsArg::PossibleOpt => Semantics::PossibleOpt,
    })
}

fn reasoner(opts: &GlobalOpts) -> Result<Reasoner, CliError> {
    let trace: Option<TraceSink> = match &opts.trace {
        None => None,
        Some(p) if p.as_os_str() == "-" => Some(Arc::new(Mutex::new(Box::new(io::stderr())))),
        Some(p) => {
            let f = fs::File::create(p).map_err(|e| CliError::Usage(format!("{}: {e}", p.display())))?;
            Some(Arc::new(Mutex::new(Box::new(io::BufWriter::new(f)))))
        }
    };
    let mut r = Reasoner::new(SearchOptions { node_budget: opts.budget_nodes, trace, ..SearchOptions::default() });
    r.anon_cap = opts.anon_bound.unwrap_or_else(default_anon_cap);
    Ok(r)
}

fn engine(opts: &GlobalOpts) -> Engine {
    match opts.engine {
        EngineArg::Search => Engine::Search,
        EngineArg::Configs => Engine::Configurations,
    }
}

fn run(cli: &Cli) -> Result<Report, CliError> {
    let opts = &cli.opts;
    let start = Instant::now();
    let mut report = match &cli.command {
        Command::CheckSat { k } => {
            let kb = load_kb(opts)?;
            let mut r = reasoner(opts)?;
            let v = match engine(opts) {
                Engine::Search => r.bcs(&kb, k)?,
                Engine::Configurations => r.bcs_via_configurations(&kb, k)?,
            };
            Report::decision("check-sat", None, Some(k.clone()), v, r.stats().nodes)
        }
        Command::Opt => {
            let kb = load_kb(opts)?;
            let mut r = reasoner(opts)?;
            let (opt, complete) = match engine(opts) {
                Engine::Search => r.optimal_cost(&kb)?,
                Engine::Configurations => r.optimal_cost_via_configurations(&kb)?,
            };
            Report::opt(opt, complete, r.stats().nodes)
        }
        Command::Entail(args) => {
            let kb = load_kb(opts)?;
            let q = load_query(&args.query)?;
            let sem = semantics(args)?;
            let mut r = reasoner(opts)?;
            let v = r.entails_with(&kb, &q, &sem, engine(opts))?;
            let k = match &sem {
                Semantics::CertainBounded(k) | Semantics::PossibleBounded(k) => Some(k.clone()),
                _ => None,
            };
            Report::decision("entail", Some(sem.to_string()), k, v, r.stats().nodes)
        }
        Command::Answers(args) => {
            let kb = load_kb(opts)?;
            let q = load_query(&args.query)?;
            let sem = semantics(args)?;
            let mut r = reasoner(opts)?;
            let table = r.answer_table(&kb, &q, &sem, engine(opts))?;
            Report::answers(sem.to_string(), table, r.stats().nodes)
        }
        Command::Validate => {
            let kb = load_kb(opts)?;
            Report::validation(validate(&kb).iter().map(ToString::to_string).collect())
        }
        Command::Gen(g) => Report::generated(generate(g, opts)?),
        Command::Oracle(o) => oracle(o, opts)?,
    };
    report.millis = start.elapsed().as_millis();
    Ok(report)
}

fn generate(g: &GenCommand, opts: &GlobalOpts) -> Result<String, CliError> {
    let load_graph = |p: &Path| Graph::parse(&read(p)?).map_err(CliError::from);
    let with_query = |kb: &WeightedKB, q: &Query| format!("# query: {}\n{}", serialize_query(q), serialize_wkb(kb));
    Ok(match g {
        GenCommand::ThreeCol { graph } => {
            let (kb, k) = gen_3col(&load_graph(graph)?);
            format!("# check-sat --k {k}\n{}", serialize_wkb(&kb))
        }
        GenCommand::IndependentSet { graph, vertex } => {
            let kb = gen_independent_set(&load_graph(graph)?, *vertex)?;
            with_query(&kb, &goal_query(*vertex))
        }
        GenCommand::Lexmax { formula, k } => {
            let phi = TwoTwoFormula::parse(&read(formula)?)?;
            let (kb, q) = gen_lexmax(&phi, *k)?;
            with_query(&kb, &q)
        }
        GenCommand::Random => serialize_wkb(&random_wkb_from_seed(&RandomKbParams::default(), opts.seed)),
    })
}

fn oracle(o: &OracleCommand, opts: &GlobalOpts) -> Result<Report, CliError> {
    let kb = load_kb(opts)?;
    let anon = opts.anon_bound.unwrap_or(1);
    Ok(match o {
        OracleCommand::Bcs { k } => {
            let t = OracleTable::build(&kb, &[], anon, DEFAULT_ORACLE_BUDGET)?;
            Report::oracle("check-sat", None, Some(k.clone()), t.bcs(k), None)
        }
        OracleCommand::Opt => {
            let t = OracleTable::build(&kb, &[], anon, DEFAULT_ORACLE_BUDGET)?;
            let opt = t.opt();
            Report::oracle("opt", None, None, opt.is_finite(), Some(opt))
        }
        OracleCommand::Entail(args) => {
            let q = load_query(&args.query)?;
            let sem = semantics(args)?;
            let t = OracleTable::build(&kb, std::slice::from_ref(&q), anon, DEFAULT_ORACLE_BUDGET)?;
            Report::oracle("entail", Some(sem.to_string()), args.k.clone(), t.entails(0, &sem), Some(t.opt()))
        }
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(report) => {
            let text = if cli.opts.plain { report.to_plain() } else { report.to_json() };
            let mut out = io::stdout().lock();
            let _ = writeln!(out, "{}", text.trim_end());
            ExitCode::from(report.exit_code())
        }
        Err(e) => {
            let msg = match &e {
                CliError::Usage(m) | CliError::Budget(m) | CliError::Other(m) => m,
            };
            eprintln!("wkb: {msg}");
            ExitCode::from(e.exit_code())
        }
    }
}
