//! The `coverlib` command-line front end.
//!
//! Exit codes: 0 coverable, 1 uncoverable, 2 usage or input error,
//! 3 inconclusive (budget, bound or deadline hit).

use std::ffi::OsString;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use thiserror::Error;

use crate::ingest::{emit_native, parse_mist_named, parse_native_named, ParseError, Problem};
use crate::invariants::{InvariantError, InvariantHandle, InvariantKind};
use crate::net::{Marking, PetriNet, TransitionId};
use crate::preprocess::{preprocess, PreprocessOptions, PruneMode};
use crate::refcheck::{bounded_cover, ExploreBound, OracleOutcome};
use crate::report::{BenchRow, ReportContext, SolveReport, BENCH_HEADER};
use crate::solver::{icover_with, SolveError, SolveOptions, Verdict};

pub const EXIT_COVERABLE: i32 = 0;
pub const EXIT_UNCOVERABLE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;

/// Environment variable overriding the `bench` worker count (0 = auto).
pub const THREADS_ENV: &str = "COVERLIB_THREADS";

#[derive(Debug, Parser)]
#[command(name = "coverlib", version, about = "Coverability checking for Petri nets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decide whether a target marking is coverable.
    Solve(SolveArgs),
    /// Remove dead transitions and print the reduced net.
    Preprocess(PreprocessArgs),
    /// Bounded forward search, for cross-checking.
    Oracle(OracleArgs),
    /// Run every problem in a directory under several invariant configurations.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Native,
    Mist,
}

#[derive(Debug, Args)]
struct InputArgs {
    /// Problem file, or `-` for standard input.
    #[arg(long)]
    net: PathBuf,
    /// Input format; defaults to `mist` for `.spec` files and `native` otherwise.
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, default_value_t = 0)]
    target_index: usize,
    /// Comma-separated subset of trivial,sign,state (intersected).
    #[arg(long)]
    invariant: String,
    #[arg(long, value_enum, default_value_t = PreprocessFlag::Off)]
    preprocess: PreprocessFlag,
    #[arg(long, value_enum, default_value_t = StatsFormat::None)]
    stats: StatsFormat,
    /// Print a replay-validated firing sequence when coverable.
    #[arg(long)]
    witness: bool,
    /// Give up with INCONCLUSIVE after this many predecessor computations.
    #[arg(long)]
    budget_steps: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PreprocessFlag {
    Off,
    Once,
    Fixpoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StatsFormat {
    Json,
    Csv,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeFlag {
    Once,
    Fixpoint,
}

#[derive(Debug, Args)]
struct PreprocessArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, value_enum, default_value_t = ModeFlag::Fixpoint)]
    mode: ModeFlag,
    /// Also prune transitions whose enabling marking violates the state inequation.
    #[arg(long)]
    with_state: bool,
    /// Drop always-empty places that nothing touches and no target needs.
    #[arg(long)]
    drop_places: bool,
    /// Where to write the JSON report (default: standard error).
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct OracleArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, default_value_t = 0)]
    target_index: usize,
    /// Largest token count explored per place.
    #[arg(long, default_value_t = 8)]
    cap: u64,
    /// Largest number of markings explored.
    #[arg(long, default_value_t = 200_000)]
    node_cap: usize,
    #[arg(long)]
    witness: bool,
}

#[derive(Debug, Args)]
struct BenchArgs {
    #[arg(long)]
    dir: PathBuf,
    /// Semicolon-separated configurations, each a comma-separated invariant list.
    #[arg(long, default_value = "trivial;sign;state;sign,state")]
    invariants: String,
    /// Per-instance wall-clock limit.
    #[arg(long, default_value_t = 60.0)]
    timeout_secs: f64,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Parse { path: String, source: ParseError },
    #[error("target index {index} out of range ({count} target(s))")]
    TargetIndex { index: usize, count: usize },
    #[error(transparent)]
    Invariant(#[from] InvariantError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error("witness failed replay on the input net")]
    BadWitness,
    #[error("{0}")]
    Usage(String),
}

/// Parses `args` (program name first) and runs the command. Returns the
/// process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = err.write_all(text.as_bytes());
            } else {
                let _ = out.write_all(text.as_bytes());
            }
            return code;
        }
    };
    let res = match cli.command {
        Command::Solve(a) => cmd_solve(&a, out),
        Command::Preprocess(a) => cmd_preprocess(&a, out, err),
        Command::Oracle(a) => cmd_oracle(&a, out),
        Command::Bench(a) => cmd_bench(&a, out),
    };
    match res {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

fn infer_format(path: &Path) -> Format {
    match path.extension().and_then(|e| e.to_str()) {
        Some("spec") => Format::Mist,
        _ => Format::Native,
    }
}

fn problem_name(path: &Path) -> String {
    if path == Path::new("-") {
        return "stdin".to_string();
    }
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "unnamed".to_string())
}

fn parse_text(text: &str, name: &str, format: Format) -> Result<Problem, ParseError> {
    match format {
        Format::Native => parse_native_named(text, name),
        Format::Mist => parse_mist_named(text, name),
    }
}

fn load(input: &InputArgs) -> Result<Problem, CliError> {
    let path = &input.net;
    let shown = path.display().to_string();
    let text = if path == Path::new("-") {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|source| CliError::Io {
                path: shown.clone(),
                source,
            })?;
        s
    } else {
        std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: shown.clone(),
            source,
        })?
    };
    let format = input.format.unwrap_or_else(|| infer_format(path));
    parse_text(&text, &problem_name(path), format).map_err(|source| CliError::Parse {
        path: shown,
        source,
    })
}

fn pick_target(p: &Problem, index: usize) -> Result<Marking, CliError> {
    p.targets.get(index).cloned().ok_or(CliError::TargetIndex {
        index,
        count: p.targets.len(),
    })
}

fn verdict_code(v: Verdict) -> i32 {
    match v {
        Verdict::Coverable => EXIT_COVERABLE,
        Verdict::Uncoverable => EXIT_UNCOVERABLE,
        Verdict::Inconclusive => EXIT_INCONCLUSIVE,
    }
}

/// Maps a witness over `reduced` back onto `original` by transition name and
/// replays it there.
fn validate_witness(
    original: &PetriNet,
    reduced: &PetriNet,
    target: &Marking,
    seq: &[TransitionId],
) -> Result<Vec<String>, CliError> {
    let names: Vec<String> = seq
        .iter()
        .map(|&t| reduced.transition_name(t).map(str::to_string))
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::BadWitness)?;
    let ids: Vec<TransitionId> = names
        .iter()
        .map(|n| original.transition_id(n))
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::BadWitness)?;
    match original.replay(original.initial_marking(), &ids) {
        Ok(Some(end)) if target.leq(&end).unwrap_or(false) => Ok(names),
        _ => Err(CliError::BadWitness),
    }
}

fn cmd_solve(a: &SolveArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let problem = load(&a.input)?;
    let target = pick_target(&problem, a.target_index)?;
    // validate the list before doing any work
    InvariantHandle::from_list(&problem.net, &a.invariant)?;

    let started = Instant::now();
    let (net, removed, pre_label) = match a.preprocess {
        PreprocessFlag::Off => (problem.net.clone(), Vec::new(), "off"),
        PreprocessFlag::Once | PreprocessFlag::Fixpoint => {
            let mode = if a.preprocess == PreprocessFlag::Once {
                PruneMode::Once
            } else {
                PruneMode::Fixpoint
            };
            let opts = PreprocessOptions {
                mode,
                ..PreprocessOptions::default()
            };
            let pp = preprocess(&problem.net, std::slice::from_ref(&target), &opts);
            let label = if mode == PruneMode::Once { "once" } else { "fixpoint" };
            (pp.net, pp.report.transitions_removed, label)
        }
    };
    let inv = InvariantHandle::from_list(&net, &a.invariant)?;
    let opts = SolveOptions {
        step_budget: a.budget_steps,
        ..SolveOptions::default()
    };
    let result = icover_with(&net, &target, &inv, &opts)?;
    let wall_time_ms = started.elapsed().as_secs_f64() * 1000.0;

    let witness = match (&result.witness, result.verdict) {
        (Some(seq), Verdict::Coverable) => {
            Some(validate_witness(&problem.net, &net, &target, seq)?)
        }
        _ => None,
    };

    let mut text = format!("{}\n", result.verdict);
    if a.witness {
        if let Some(w) = &witness {
            text.push_str("witness:");
            for name in w {
                text.push(' ');
                text.push_str(name);
            }
            text.push('\n');
        }
    }
    if a.stats != StatsFormat::None {
        let report = SolveReport::new(
            &net,
            &target,
            &result,
            ReportContext {
                problem: &problem.name,
                target_index: a.target_index,
                preprocess: pre_label,
                transitions_removed: removed,
                wall_time_ms,
            },
        );
        match a.stats {
            StatsFormat::Json => {
                text.push_str(&report.to_json());
                text.push('\n');
            }
            StatsFormat::Csv => text.push_str(&report.to_csv()),
            StatsFormat::None => {}
        }
    }
    write_all(out, &text)?;
    Ok(verdict_code(result.verdict))
}

fn write_all(out: &mut dyn Write, text: &str) -> Result<(), CliError> {
    out.write_all(text.as_bytes())
        .and_then(|_| out.flush())
        .map_err(|source| CliError::Io {
            path: "<output>".to_string(),
            source,
        })
}

fn cmd_preprocess(
    a: &PreprocessArgs,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, CliError> {
    let problem = load(&a.input)?;
    let opts = PreprocessOptions {
        mode: match a.mode {
            ModeFlag::Once => PruneMode::Once,
            ModeFlag::Fixpoint => PruneMode::Fixpoint,
        },
        use_state: a.with_state,
        drop_places: a.drop_places,
    };
    let pp = preprocess(&problem.net, &problem.targets, &opts);
    let reduced = Problem {
        name: problem.name.clone(),
        net: pp.net,
        targets: pp.targets,
    };
    write_all(out, &emit_native(&reduced))?;

    let json = serde_json::to_string_pretty(&pp.report).expect("report serialises") + "\n";
    match &a.report {
        Some(path) => std::fs::write(path, json).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })?,
        None => write_all(err, &json)?,
    }
    Ok(0)
}

fn cmd_oracle(a: &OracleArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    if a.cap == 0 || a.node_cap == 0 {
        return Err(CliError::Usage("--cap and --node-cap must be positive".into()));
    }
    let problem = load(&a.input)?;
    let target = pick_target(&problem, a.target_index)?;
    let outcome = bounded_cover(&problem.net, &target, ExploreBound::new(a.cap, a.node_cap));
    let (text, code) = match outcome {
        OracleOutcome::Coverable(seq) => {
            let mut s = format!("COVERABLE depth={}\n", seq.len());
            if a.witness {
                s.push_str("witness:");
                for t in &seq {
                    s.push(' ');
                    s.push_str(&problem.net.transitions()[t.0].name);
                }
                s.push('\n');
            }
            (s, EXIT_COVERABLE)
        }
        OracleOutcome::ExhaustedUncoverable => ("UNCOVERABLE\n".to_string(), EXIT_UNCOVERABLE),
        OracleOutcome::BoundHit => ("INCONCLUSIVE\n".to_string(), EXIT_INCONCLUSIVE),
    };
    write_all(out, &text)?;
    Ok(code)
}

/// `trivial;sign,state` → `["trivial", "sign,state"]`, each checked.
fn parse_configs(spec: &str) -> Result<Vec<String>, CliError> {
    let configs: Vec<String> = spec
        .split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_string)
        .collect();
    if configs.is_empty() {
        return Err(CliError::Usage("--invariants lists no configuration".into()));
    }
    for c in &configs {
        for kind in c.split(',') {
            kind.parse::<InvariantKind>()?;
        }
    }
    Ok(configs)
}

fn bench_threads() -> Result<usize, CliError> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("{THREADS_ENV} must be a number, got '{v}'"))),
        Err(_) => Ok(0),
    }
}

struct Job<'a> {
    name: String,
    problem: Option<&'a Problem>,
    target: usize,
    config: &'a str,
}

fn run_job(job: &Job<'_>, timeout: Duration) -> BenchRow {
    let Some(p) = job.problem else {
        return BenchRow::error(&job.name, job.config);
    };
    let started = Instant::now();
    let opts = SolveOptions {
        deadline: Some(started + timeout),
        ..SolveOptions::default()
    };
    let res = InvariantHandle::from_list(&p.net, job.config)
        .map_err(SolveError::from)
        .and_then(|inv| icover_with(&p.net, &p.targets[job.target], &inv, &opts));
    match res {
        Ok(r) => BenchRow::from_result(&job.name, job.config, &r, started.elapsed().as_millis()),
        Err(_) => BenchRow::error(&job.name, job.config),
    }
}

fn cmd_bench(a: &BenchArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let configs = parse_configs(&a.invariants)?;
    if !a.timeout_secs.is_finite() || a.timeout_secs <= 0.0 {
        return Err(CliError::Usage("--timeout-secs must be positive".into()));
    }
    let timeout = Duration::from_secs_f64(a.timeout_secs);
    let threads = bench_threads()?;

    let dir_err = |source| CliError::Io {
        path: a.dir.display().to_string(),
        source,
    };
    let mut files: Vec<PathBuf> = std::fs::read_dir(&a.dir)
        .map_err(dir_err)?
        .collect::<Result<Vec<_>, _>>()
        .map_err(dir_err)?
        .into_iter()
        .map(|e| e.path())
        .filter(|p| {
            p.is_file() && matches!(p.extension().and_then(|e| e.to_str()), Some("net" | "spec"))
        })
        .collect();
    files.sort();

    // unreadable or malformed files become ERROR rows
    let problems: Vec<(String, Option<Problem>)> = files
        .iter()
        .map(|path| {
            let file = path
                .file_name()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            let p = std::fs::read_to_string(path)
                .ok()
                .and_then(|t| parse_text(&t, &problem_name(path), infer_format(path)).ok());
            (file, p)
        })
        .collect();

    let mut jobs = Vec::new();
    for (file, p) in &problems {
        let targets = p.as_ref().map_or(1, |p| p.targets.len());
        for target in 0..targets {
            let name = if targets > 1 {
                format!("{file}#{target}")
            } else {
                file.clone()
            };
            for config in &configs {
                jobs.push(Job {
                    name: name.clone(),
                    problem: p.as_ref(),
                    target,
                    config,
                });
            }
        }
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start worker threads: {e}")))?;
    let rows: Vec<BenchRow> = pool.install(|| jobs.par_iter().map(|j| run_job(j, timeout)).collect());

    let mut text = String::from(BENCH_HEADER);
    text.push('\n');
    for r in &rows {
        text.push_str(&r.to_csv());
        text.push('\n');
    }
    write_all(out, &text)?;
    Ok(0)
}
