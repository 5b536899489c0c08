//! `kctrace` command line: compile CNF to circuits, query and compare
//! circuits, check language membership, and benchmark the three compilers.

mod bench;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use anyhow::{bail, Context, Result};
use clap::{ArgGroup, Args, CommandFactory, Parser, Subcommand, ValueEnum};
use kctrace::cnf::{parse_dimacs, Literal, Term};
use kctrace::compiler::{compile, CompileConfig, Heuristic, VarOrder};
use kctrace::lang_check::{check, check_decision_dnnf, Language};
use kctrace::nnf::{parse_nnf, Circuit};
use kctrace::queries::{
    condition_circuit, entails_clause, enumerate_models, is_consistent, is_implicant, is_valid, model_count,
    prob_equiv, DEFAULT_ROUNDS,
};

#[derive(Parser)]
#[command(
    name = "kctrace",
    version,
    about = "Knowledge compilation from exhaustive DPLL traces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compile a DIMACS CNF into an .nnf circuit
    Compile(CompileArgs),
    /// Answer a query about an .nnf circuit
    Query(QueryArgs),
    /// Test two circuits for equivalence probabilistically
    Eq(EqArgs),
    /// Check that a circuit belongs to a language
    Check(CheckArgs),
    /// Compile every .cnf file of a directory with all three compilers
    Bench(bench::BenchArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Lang {
    Fbdd,
    Obdd,
    Ddnnf,
}

impl From<Lang> for Language {
    fn from(l: Lang) -> Self {
        match l {
            Lang::Fbdd => Language::Fbdd,
            Lang::Obdd => Language::Obdd,
            Lang::Ddnnf => Language::DecisionDnnf,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum HeuristicArg {
    Maxocc,
    Minidx,
}

#[derive(Args)]
struct CompileArgs {
    #[arg(long, value_enum)]
    lang: Lang,
    /// Variable order file (required for obdd)
    #[arg(long, required_if_eq("lang", "obdd"))]
    order: Option<PathBuf>,
    #[arg(long)]
    no_cache: bool,
    #[arg(long)]
    no_up: bool,
    #[arg(long, value_enum, default_value = "maxocc")]
    heuristic: HeuristicArg,
    /// Wall-clock limit in seconds
    #[arg(long)]
    time_limit: Option<f64>,
    /// Maximum number of stored nodes
    #[arg(long)]
    node_limit: Option<usize>,
    input: PathBuf,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
#[command(group(ArgGroup::new("query").required(true).args(
    ["sat", "valid", "count", "entails", "implicant", "enumerate", "condition"]
)))]
struct QueryArgs {
    #[arg(long)]
    sat: bool,
    #[arg(long)]
    valid: bool,
    #[arg(long)]
    count: bool,
    /// Clause as signed DIMACS literals, e.g. "1 -2"
    #[arg(long, value_name = "LITERALS", allow_hyphen_values = true)]
    entails: Option<String>,
    /// Term as signed DIMACS literals
    #[arg(long, value_name = "LITERALS", allow_hyphen_values = true)]
    implicant: Option<String>,
    #[arg(long)]
    enumerate: bool,
    /// Stop after this many terms
    #[arg(long, requires = "enumerate")]
    limit: Option<usize>,
    /// Term to condition on; the result is written as .nnf
    #[arg(long, value_name = "LITERALS", allow_hyphen_values = true)]
    condition: Option<String>,
    circuit: PathBuf,
    /// Number of variables the circuit is interpreted over
    #[arg(long)]
    universe: Option<u32>,
    #[arg(short, long, requires = "condition")]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct EqArgs {
    a: PathBuf,
    b: PathBuf,
    #[arg(long, default_value_t = DEFAULT_ROUNDS)]
    rounds: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long, value_enum)]
    language: Lang,
    /// Variable order file for obdd; recovered from the circuit if omitted
    #[arg(long)]
    order: Option<PathBuf>,
    circuit: PathBuf,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn read_order(path: &Path) -> Result<VarOrder> {
    VarOrder::parse(&read(path)?).with_context(|| format!("in {}", path.display()))
}

fn read_circuit(path: &Path) -> Result<Circuit> {
    parse_nnf(&read(path)?).with_context(|| format!("in {}", path.display()))
}

fn parse_literals(text: &str) -> Result<Vec<Literal>> {
    text.split_whitespace()
        .map(|tok| {
            let code: i32 = tok.parse().with_context(|| format!("bad literal {tok:?}"))?;
            Literal::from_dimacs(code).with_context(|| format!("bad literal {tok:?}"))
        })
        .collect()
}

fn cmd_compile(args: CompileArgs) -> Result<()> {
    let text = read(&args.input)?;
    let delta = parse_dimacs(&text)
        .with_context(|| format!("in {}", args.input.display()))?
        .cnf;
    let mut cfg = match args.lang {
        Lang::Fbdd => CompileConfig::free(),
        Lang::Obdd => CompileConfig::ordered(read_order(args.order.as_deref().expect("required by clap"))?),
        Lang::Ddnnf => CompileConfig::decomposed(),
    };
    cfg = cfg
        .caching(!args.no_cache)
        .unit_propagation(!args.no_up)
        .heuristic(match args.heuristic {
            HeuristicArg::Maxocc => Heuristic::MaxOccurrence,
            HeuristicArg::Minidx => Heuristic::MinIndex,
        });
    if let Some(secs) = args.time_limit {
        cfg = cfg.time_limit(Duration::from_secs_f64(secs));
    }
    if let Some(n) = args.node_limit {
        cfg = cfg.node_limit(n);
    }
    let start = Instant::now();
    let run = compile(&delta, &cfg)?;
    let elapsed = start.elapsed();
    if let Some(out) = &args.output {
        fs::write(out, run.circuit.serialize()).with_context(|| format!("cannot write {}", out.display()))?;
    }
    println!("{} time={:.3}", run.circuit.stats(), elapsed.as_secs_f64());
    Ok(())
}

fn cmd_query(args: QueryArgs) -> Result<()> {
    let mut circuit = read_circuit(&args.circuit)?;
    if let Some(n) = args.universe {
        circuit = Circuit::new(circuit.shared_store().clone(), circuit.root(), n);
    }
    if let Some(w) = check_decision_dnnf(&circuit).witness {
        bail!("circuit is not a decision-DNNF: witness={w}");
    }
    if args.sat {
        println!("{}", is_consistent(&circuit));
    } else if args.valid {
        println!("{}", is_valid(&circuit)?);
    } else if args.count {
        println!("{}", model_count(&circuit)?);
    } else if let Some(text) = &args.entails {
        println!("{}", entails_clause(&circuit, &parse_literals(text)?));
    } else if let Some(text) = &args.implicant {
        let answer = match Term::new(parse_literals(text)?) {
            Some(t) => is_implicant(&t, &circuit)?,
            None => true,
        };
        println!("{answer}");
    } else if args.enumerate {
        let limit = args.limit.unwrap_or(usize::MAX);
        for t in enumerate_models(&circuit)?.take(limit) {
            println!("{t}");
        }
    } else if let Some(text) = &args.condition {
        let t = Term::new(parse_literals(text)?).context("conditioning term is inconsistent")?;
        let d = condition_circuit(&circuit, &t);
        let nnf = d.serialize();
        match &args.output {
            Some(out) => {
                fs::write(out, nnf).with_context(|| format!("cannot write {}", out.display()))?;
                println!("{} universe={}", d.stats(), d.universe());
            }
            None => print!("{nnf}"),
        }
    }
    Ok(())
}

fn cmd_eq(args: EqArgs) -> Result<()> {
    let a = read_circuit(&args.a)?;
    let b = read_circuit(&args.b)?;
    println!("{}", prob_equiv(&a, &b, args.seed, args.rounds)?);
    Ok(())
}

fn cmd_check(args: CheckArgs) -> Result<()> {
    let circuit = read_circuit(&args.circuit)?;
    let order = match (&args.order, args.language) {
        (Some(path), Lang::Obdd) => Some(read_order(path)?),
        (Some(_), _) => Cli::command()
            .error(
                clap::error::ErrorKind::ArgumentConflict,
                "--order applies to --language obdd only",
            )
            .exit(),
        (None, _) => None,
    };
    let report = check(&circuit, args.language.into(), order.as_ref());
    println!("{report}");
    if let (true, Some(order), Lang::Obdd) = (report.verdict(), &report.order, args.language) {
        println!("order={order}");
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Compile(args) => {
            if args.order.is_some() && args.lang != Lang::Obdd {
                Cli::command()
                    .error(
                        clap::error::ErrorKind::ArgumentConflict,
                        "--order applies to --lang obdd only",
                    )
                    .exit();
            }
            cmd_compile(args)
        }
        Command::Query(args) => cmd_query(args),
        Command::Eq(args) => cmd_eq(args),
        Command::Check(args) => cmd_check(args),
        Command::Bench(args) => bench::run(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
