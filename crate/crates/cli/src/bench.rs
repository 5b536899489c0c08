//! Benchmark harness: every `.cnf` file of a directory is compiled to OBDD,
//! FBDD and decision-DNNF, and one CSV row is written per instance.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::Args;
use kctrace::cnf::{parse_dimacs, Cnf};
use kctrace::compiler::{compile, CompileConfig, CompileError, VarOrder};
use kctrace::queries::model_count;

pub const HEADER: [&str; 9] = [
    "instance",
    "models",
    "obdd_size",
    "obdd_time",
    "fbdd_size",
    "fbdd_time",
    "ddnnf_size",
    "ddnnf_time",
    "status",
];

#[derive(Args)]
pub struct BenchArgs {
    /// Directory of .cnf files; an optional same-stem .ord file sets the OBDD order
    dir: PathBuf,
    /// Per-compilation wall-clock limit in seconds
    #[arg(long, env = "KCTRACE_TIME_LIMIT", default_value_t = 900.0)]
    time_limit: f64,
    /// Per-compilation limit on stored nodes, reported as memout
    #[arg(long, env = "KCTRACE_NODE_LIMIT")]
    node_limit: Option<usize>,
    /// Instances compiled in parallel
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// CSV destination (stdout if omitted)
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Status {
    Ok,
    Timeout,
    Memout,
}

impl Status {
    fn as_str(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Timeout => "timeout",
            Status::Memout => "memout",
        }
    }
}

/// Outcome of one compiler on one instance.
enum Run {
    Done { models: String, edges: usize, secs: f64 },
    Failed(Status),
}

struct Record {
    instance: String,
    runs: Vec<Run>,
}

impl Record {
    fn status(&self) -> Status {
        let failed = |s| self.runs.iter().any(|r| matches!(r, Run::Failed(x) if *x == s));
        if failed(Status::Timeout) {
            Status::Timeout
        } else if failed(Status::Memout) {
            Status::Memout
        } else {
            Status::Ok
        }
    }

    fn counts(&self) -> Vec<&str> {
        self.runs
            .iter()
            .filter_map(|r| match r {
                Run::Done { models, .. } => Some(models.as_str()),
                Run::Failed(_) => None,
            })
            .collect()
    }

    fn row(&self) -> Vec<String> {
        let mut row = vec![
            self.instance.clone(),
            self.counts().first().map_or("-".into(), |c| c.to_string()),
        ];
        for r in &self.runs {
            match r {
                Run::Done { edges, secs, .. } => {
                    row.push(edges.to_string());
                    row.push(format!("{secs:.3}"));
                }
                Run::Failed(_) => row.extend(["-".to_string(), "-".to_string()]),
            }
        }
        row.push(self.status().as_str().into());
        row
    }
}

fn order_for(path: &Path, n: u32) -> Result<VarOrder> {
    let ord = path.with_extension("ord");
    if !ord.is_file() {
        return Ok(VarOrder::natural(n));
    }
    let text = fs::read_to_string(&ord).with_context(|| format!("cannot read {}", ord.display()))?;
    VarOrder::parse(&text).with_context(|| format!("in {}", ord.display()))
}

fn run_one(delta: &Cnf, cfg: &CompileConfig) -> Result<Run> {
    match compile(delta, cfg) {
        Ok(c) => Ok(Run::Done {
            models: model_count(&c.circuit)?.to_string(),
            edges: c.circuit.stats().edges,
            secs: c.elapsed.as_secs_f64(),
        }),
        Err(CompileError::Timeout) => Ok(Run::Failed(Status::Timeout)),
        Err(CompileError::NodeLimit(_)) => Ok(Run::Failed(Status::Memout)),
        Err(e) => Err(e.into()),
    }
}

fn bench_instance(path: &Path, args: &BenchArgs) -> Result<Record> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let delta = parse_dimacs(&text)
        .with_context(|| format!("in {}", path.display()))?
        .cnf;
    let limit = |cfg: CompileConfig| {
        let cfg = cfg.time_limit(Duration::from_secs_f64(args.time_limit));
        match args.node_limit {
            Some(n) => cfg.node_limit(n),
            None => cfg,
        }
    };
    let configs = [
        limit(CompileConfig::ordered(order_for(path, delta.num_vars())?)),
        limit(CompileConfig::free()),
        limit(CompileConfig::decomposed()),
    ];
    let mut runs = Vec::with_capacity(configs.len());
    for cfg in &configs {
        log::info!("{}: compiling to {}", path.display(), cfg.mode);
        runs.push(run_one(&delta, cfg)?);
    }
    let instance = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    Ok(Record { instance, runs })
}

fn instances(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("cannot read directory {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "cnf") && p.is_file())
        .collect();
    paths.sort();
    Ok(paths)
}

pub fn run(args: BenchArgs) -> Result<()> {
    let paths = instances(&args.dir)?;
    let slots: Vec<Mutex<Option<Record>>> = paths.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    std::thread::scope(|s| {
        for _ in 0..args.jobs.max(1) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(path) = paths.get(i) else { break };
                match bench_instance(path, &args) {
                    Ok(rec) => *slots[i].lock().expect("unpoisoned") = Some(rec),
                    Err(e) => log::warn!("skipping {}: {e:#}", path.display()),
                }
            });
        }
    });
    let records: Vec<Record> = slots
        .into_iter()
        .filter_map(|m| m.into_inner().expect("unpoisoned"))
        .collect();

    let sink: Box<dyn Write> = match &args.output {
        Some(p) => Box::new(fs::File::create(p).with_context(|| format!("cannot create {}", p.display()))?),
        None => Box::new(io::stdout().lock()),
    };
    let mut out = csv::Writer::from_writer(sink);
    out.write_record(HEADER)?;
    let mut disagreeing = Vec::new();
    for rec in &records {
        out.write_record(rec.row())?;
        let counts = rec.counts();
        if counts.windows(2).any(|w| w[0] != w[1]) {
            disagreeing.push(format!("{} ({})", rec.instance, counts.join(" vs ")));
        }
    }
    out.flush()?;
    if !disagreeing.is_empty() {
        bail!("model counts disagree across compilers: {}", disagreeing.join(", "));
    }
    Ok(())
}
