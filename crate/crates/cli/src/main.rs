use std::fs::{self, OpenOptions};
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use krboot::constructions::{
    disjoint_chain, greedy_chain, k4_chain, path_graph, random_chain, RandomChainConfig,
    RandomChainOutcome, DEFAULT_DEGREE_CAP_COEFF, DEFAULT_EPSILON,
};
use krboot::engine::{check_clique_growth, check_diameter_halving, SCHEMA_VERSION};
use krboot::search::{exact_max_time, sampled_max_time, SearchResult};
use krboot::verify::verify_chain;
use krboot::{run_with, Chain, ChainGraph, Graph, RunOptions, RunReport};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Core(#[from] krboot::Error),
    #[error("{path}: {source}")]
    File { path: PathBuf, source: io::Error },
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("thread pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

type CliResult<T> = Result<T, CliError>;

/// What a successful command reports back: exit 0, or 1 when the checked
/// property failed.
enum Status {
    Ok,
    Failed,
}

#[derive(Parser)]
#[command(name = "krboot", version, about = "K_r-bootstrap percolation toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Io {
    /// Input file; standard input if omitted.
    #[arg(long, short)]
    input: Option<PathBuf>,
    /// Output file; standard output if omitted.
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Leave the timestamp out of the report.
    #[arg(long)]
    no_timestamp: bool,
}

#[derive(Args, Clone, Copy)]
struct Jobs {
    /// Worker threads; 0 lets the runtime decide.
    #[arg(long, env = "KRBOOT_JOBS", default_value_t = 0)]
    jobs: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Run the process on an edge list or chain JSON.
    Run {
        /// Clique size; defaults to the chain's own for chain input.
        #[arg(long)]
        r: Option<usize>,
        #[arg(long)]
        max_steps: Option<usize>,
        /// Omit the per-step list of added edges.
        #[arg(long)]
        no_trace: bool,
        #[command(flatten)]
        io: Io,
        #[command(flatten)]
        jobs: Jobs,
    },
    /// Emit an initial graph from one of the construction families.
    Construct {
        #[arg(long, value_enum)]
        family: Family,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        r: Option<usize>,
        /// Chain length (disjoint, random).
        #[arg(long)]
        t: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Degree cap coefficient for the greedy family.
        #[arg(long, default_value_t = DEFAULT_DEGREE_CAP_COEFF)]
        coeff: f64,
        /// Candidates per step for the random family; default ceil(ln n).
        #[arg(long)]
        attempts: Option<usize>,
        /// Enforce the dangerous/deadly count conditions too.
        #[arg(long)]
        robust: bool,
        #[arg(long, default_value_t = DEFAULT_EPSILON)]
        epsilon: f64,
        #[arg(long, value_enum, default_value_t = ConstructFormat::Auto)]
        format: ConstructFormat,
        #[command(flatten)]
        io: Io,
    },
    /// Check validity and goodness of a chain JSON.
    VerifyChain {
        #[command(flatten)]
        io: Io,
    },
    /// Maximum stabilization time over graphs on n vertices.
    SearchMax {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        r: usize,
        /// One graph per isomorphism class.
        #[arg(long)]
        dedup: bool,
        /// Random graphs per density; switches to a sampled lower bound.
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = SearchFormat::Json)]
        format: SearchFormat,
        /// CSV file to append a result row to.
        #[arg(long)]
        table: Option<PathBuf>,
        #[command(flatten)]
        io: Io,
        #[command(flatten)]
        jobs: Jobs,
    },
    /// Run the process and check a per-step property of the trace:
    /// diameter halving for r = 3, clique growth for r = 4.
    TraceCheck {
        #[arg(long)]
        r: Option<usize>,
        #[command(flatten)]
        io: Io,
    },
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
enum Family {
    Path,
    K4chain,
    Disjoint,
    Greedy,
    Random,
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
enum ConstructFormat {
    /// Edge list for graphs, chain JSON for chains.
    Auto,
    Edges,
    Chain,
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
enum SearchFormat {
    Json,
    Csv,
}

#[derive(Serialize)]
struct Stamped<'a, T: Serialize> {
    #[serde(flatten)]
    body: &'a T,
    #[serde(skip_serializing_if = "Option::is_none")]
    timestamp: Option<u64>,
}

#[derive(Serialize)]
struct Versioned<'a, T: Serialize> {
    schema_version: u32,
    #[serde(flatten)]
    body: &'a T,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::Failed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("krboot: {e}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(command: Command) -> CliResult<Status> {
    match command {
        Command::Run {
            r,
            max_steps,
            no_trace,
            io,
            jobs,
        } => with_jobs(jobs, || cmd_run(r, max_steps, no_trace, &io)),
        Command::Construct {
            family,
            n,
            r,
            t,
            seed,
            coeff,
            attempts,
            robust,
            epsilon,
            format,
            io,
        } => {
            let spec = ConstructSpec {
                family,
                n,
                r,
                t,
                seed,
                coeff,
                attempts,
                robust,
                epsilon,
                format,
            };
            cmd_construct(&spec, &io)
        }
        Command::VerifyChain { io } => cmd_verify(&io),
        Command::SearchMax {
            n,
            r,
            dedup,
            samples,
            seed,
            format,
            table,
            io,
            jobs,
        } => with_jobs(jobs, || {
            cmd_search(n, r, dedup, samples, seed, format, table.as_deref(), &io)
        }),
        Command::TraceCheck { r, io } => cmd_trace_check(r, &io),
    }
}

fn with_jobs<T: Send>(jobs: Jobs, f: impl FnOnce() -> CliResult<T> + Send) -> CliResult<T> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs.jobs).build()?;
    pool.install(f)
}

fn read_input(io: &Io) -> CliResult<String> {
    match &io.input {
        Some(path) => fs::read_to_string(path).map_err(|source| CliError::File {
            path: path.clone(),
            source,
        }),
        None => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s)?;
            Ok(s)
        }
    }
}

fn write_output(io: &Io, text: &str) -> CliResult<()> {
    let mut text = text.to_string();
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match &io.output {
        Some(path) => fs::write(path, text).map_err(|source| CliError::File {
            path: path.clone(),
            source,
        }),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

fn report<T: Serialize>(io: &Io, body: &T) -> CliResult<()> {
    let timestamp = (!io.no_timestamp).then(|| {
        SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map_or(0, |d| d.as_secs())
    });
    let text = serde_json::to_string(&Stamped { body, timestamp })?;
    write_output(io, &text)
}

enum Loaded {
    Graph(Graph),
    Chain(Box<ChainGraph>),
}

fn load(text: &str) -> CliResult<Loaded> {
    if text.trim_start().starts_with('{') {
        let chain = Chain::from_json(text)?;
        Ok(Loaded::Chain(Box::new(ChainGraph::from_chain(chain)?)))
    } else {
        Ok(Loaded::Graph(Graph::parse_edge_list(text)?))
    }
}

fn graph_and_r(text: &str, r: Option<usize>) -> CliResult<(Graph, usize)> {
    match (load(text)?, r) {
        (Loaded::Graph(g), Some(r)) => Ok((g, r)),
        (Loaded::Graph(_), None) => Err(CliError::Input("--r is required for edge-list input".into())),
        (Loaded::Chain(cg), r) => {
            let r = r.unwrap_or(cg.chain.r);
            Ok((cg.graph, r))
        }
    }
}

fn cmd_run(r: Option<usize>, max_steps: Option<usize>, no_trace: bool, io: &Io) -> CliResult<Status> {
    let (g, r) = graph_and_r(&read_input(io)?, r)?;
    let n = g.n();
    let opts = RunOptions {
        max_steps,
        record_trace: !no_trace,
    };
    let outcome = run_with(g, r, opts)?;
    report(io, &RunReport::new(n, r, &outcome, !no_trace))?;
    Ok(Status::Ok)
}

struct ConstructSpec {
    family: Family,
    n: Option<usize>,
    r: Option<usize>,
    t: Option<usize>,
    seed: Option<u64>,
    coeff: f64,
    attempts: Option<usize>,
    robust: bool,
    epsilon: f64,
    format: ConstructFormat,
}

fn need<T>(value: Option<T>, flag: &str, family: &str) -> CliResult<T> {
    value.ok_or_else(|| CliError::Input(format!("--{flag} is required for the {family} family")))
}

fn cmd_construct(spec: &ConstructSpec, io: &Io) -> CliResult<Status> {
    let chain_graph = match spec.family {
        Family::Path | Family::K4chain => {
            let n = need(spec.n, "n", "graph")?;
            if spec.format == ConstructFormat::Chain {
                return Err(CliError::Input("this family produces a graph, not a chain".into()));
            }
            let g = if spec.family == Family::Path {
                path_graph(n)?
            } else {
                k4_chain(n)?
            };
            write_output(io, &g.to_edge_list())?;
            return Ok(Status::Ok);
        }
        Family::Disjoint => disjoint_chain(need(spec.r, "r", "disjoint")?, need(spec.t, "t", "disjoint")?)?,
        Family::Greedy => {
            let n = need(spec.n, "n", "greedy")?;
            greedy_chain(n, spec.r.unwrap_or(5), spec.coeff)?.chain_graph
        }
        Family::Random => {
            let cfg = RandomChainConfig {
                n: need(spec.n, "n", "random")?,
                r: spec.r.unwrap_or(5),
                target_t: need(spec.t, "t", "random")?,
                attempts: spec.attempts,
                seed: need(spec.seed, "seed", "random")?,
                robust: spec.robust,
                epsilon: spec.epsilon,
            };
            match random_chain(&cfg)? {
                RandomChainOutcome::Built(cg) => cg,
                RandomChainOutcome::Failed(failure) => {
                    report(io, &Versioned {
                        schema_version: SCHEMA_VERSION,
                        body: &failure,
                    })?;
                    return Ok(Status::Failed);
                }
            }
        }
    };
    let text = match spec.format {
        ConstructFormat::Edges => chain_graph.graph.to_edge_list(),
        ConstructFormat::Auto | ConstructFormat::Chain => chain_graph.chain.to_json()?,
    };
    write_output(io, &text)?;
    Ok(Status::Ok)
}

fn cmd_verify(io: &Io) -> CliResult<Status> {
    let chain = Chain::from_json(&read_input(io)?)?;
    let verdict = verify_chain(&chain)?;
    report(io, &Versioned {
        schema_version: SCHEMA_VERSION,
        body: &verdict,
    })?;
    Ok(if verdict.good { Status::Ok } else { Status::Failed })
}

#[allow(clippy::too_many_arguments)]
fn cmd_search(
    n: usize,
    r: usize,
    dedup: bool,
    samples: Option<usize>,
    seed: u64,
    format: SearchFormat,
    table: Option<&Path>,
    io: &Io,
) -> CliResult<Status> {
    let start = Instant::now();
    let result = match samples {
        Some(samples) => sampled_max_time(n, r, samples, seed)?,
        None => exact_max_time(n, r, dedup)?,
    };
    let wall = start.elapsed().as_secs_f64();
    if let Some(path) = table {
        append_row(path, &result, wall)?;
    }
    match format {
        SearchFormat::Json => report(io, &Versioned {
            schema_version: SCHEMA_VERSION,
            body: &result,
        })?,
        SearchFormat::Csv => write_output(
            io,
            &format!("{}\n{}", SearchResult::CSV_HEADER, result.csv_row(wall)),
        )?,
    }
    Ok(Status::Ok)
}

fn append_row(path: &Path, result: &SearchResult, wall: f64) -> CliResult<()> {
    let file_err = |source| CliError::File {
        path: path.to_path_buf(),
        source,
    };
    let fresh = fs::metadata(path).map_or(true, |m| m.len() == 0);
    let mut file = OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(file_err)?;
    let mut text = String::new();
    if fresh {
        text.push_str(SearchResult::CSV_HEADER);
        text.push('\n');
    }
    text.push_str(&result.csv_row(wall));
    text.push('\n');
    file.write_all(text.as_bytes()).map_err(file_err)
}

#[derive(Serialize)]
struct TraceCheckReport {
    schema_version: u32,
    property: &'static str,
    r: usize,
    time: usize,
    holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    first_failure_step: Option<usize>,
}

fn cmd_trace_check(r: Option<usize>, io: &Io) -> CliResult<Status> {
    let (g, r) = graph_and_r(&read_input(io)?, r)?;
    let outcome = run_with(g.clone(), r, RunOptions::default())?;
    let (property, holds, first_failure_step) = match r {
        3 => {
            let rep = check_diameter_halving(&g, &outcome.trace)?;
            ("diameter-halving", rep.holds, rep.first_failure)
        }
        4 => {
            let rep = check_clique_growth(&g, &outcome.trace)?;
            let step = rep.first_failure.map(|(_, t)| t);
            ("clique-growth", rep.holds, step)
        }
        _ => {
            return Err(CliError::Input(format!(
                "trace-check knows properties for r = 3 and r = 4, got r = {r}"
            )))
        }
    };
    report(io, &TraceCheckReport {
        schema_version: SCHEMA_VERSION,
        property,
        r,
        time: outcome.result.stabilization_time,
        holds,
        first_failure_step,
    })?;
    Ok(if holds { Status::Ok } else { Status::Failed })
}
