//! `opnl`: verification suites, computed objects and enumerations.

mod compute;
mod enumerate;
mod inputs;
mod report;
mod suites;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Mutex;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use opnl::kernel::Mode;
use opnl::{Error, Result};

use report::SuiteOutcome;
use suites::{OperadName, Requested, Suite, SuiteConfig};

#[derive(Parser)]
#[command(name = "opnl", version, about = "Finite checks for leveled operads and cosimplicial box products")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification suite; exits 1 if any check fails.
    Verify(VerifyArgs),
    /// Build an object and write it as JSON.
    Compute(ComputeArgs),
    /// List profiles, decompositions or planar trees.
    Enumerate(EnumerateArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Plain,
    Pointed,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Plain => Mode::Plain,
            ModeArg::Pointed => Mode::Pointed,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args)]
struct Common {
    /// Maximum number of levels.
    #[arg(long)]
    levels: Option<usize>,
    /// Maximum weight (output arity).
    #[arg(long = "max-weight", visible_alias = "weight")]
    max_weight: Option<usize>,
    /// Maximum arity of symmetric sequences.
    #[arg(long)]
    arity: Option<usize>,
    /// Cosimplicial degree bound.
    #[arg(long)]
    degrees: Option<usize>,
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    #[arg(long, value_enum)]
    operad: Option<OperadName>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Write the output to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(value_enum, conflicts_with = "suite")]
    name: Option<Suite>,
    #[arg(long, value_enum)]
    suite: Option<Suite>,
    #[command(flatten)]
    common: Common,
    /// Seed for sampled inputs.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of sampled inputs where a suite samples.
    #[arg(long)]
    samples: Option<usize>,
    /// Corrupt one structure-table entry before checking.
    #[arg(long)]
    inject_fault: bool,
}

#[derive(Args)]
struct ComputeArgs {
    #[arg(value_enum)]
    target: compute::Target,
    /// Left factor: a built-in name or a JSON file.
    #[arg(long)]
    left: Option<String>,
    /// Right factor: a built-in name or a JSON file.
    #[arg(long)]
    right: Option<String>,
    /// Sole input: a built-in name or a JSON file.
    #[arg(long)]
    input: Option<String>,
    /// Profile such as `(2,(1,1),(1,1))`.
    #[arg(long)]
    profile: Option<String>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct EnumerateArgs {
    #[arg(value_enum)]
    kind: enumerate::Kind,
    /// Only profiles without zero entries.
    #[arg(long)]
    positive: bool,
    /// Bound on level sizes and sums when zero entries are allowed.
    #[arg(long)]
    max_width: Option<usize>,
    #[arg(long)]
    profile: Option<String>,
    /// Group depths for decompositions, comma separated.
    #[arg(long, value_delimiter = ',')]
    ells: Vec<usize>,
    #[command(flatten)]
    common: Common,
}

enum Failure {
    Usage(Error),
    Checks,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e)
    }
}

fn emit(common: &Common, body: &str) -> Result<()> {
    match &common.out {
        Some(path) => std::fs::write(path, body).map_err(|e| Error::Invalid(format!("{}: {e}", path.display()))),
        None => match std::io::stdout().lock().write_all(body.as_bytes()) {
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Error::Invalid(format!("stdout: {e}"))),
            _ => Ok(()),
        },
    }
}

fn json_body(v: &serde_json::Value) -> String {
    format!("{}\n", serde_json::to_string_pretty(v).expect("serializable"))
}

fn threads() -> usize {
    let available = std::thread::available_parallelism().map_or(1, |n| n.get());
    match std::env::var("OPNL_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        Some(n) if n > 0 => n.min(available),
        _ => available,
    }
}

/// Runs the suites on up to `OPNL_THREADS` workers, keeping the input order.
fn run_suites(configs: Vec<SuiteConfig>) -> Result<Vec<SuiteOutcome>> {
    let slots: Vec<Mutex<Option<Result<SuiteOutcome>>>> = configs.iter().map(|_| Mutex::new(None)).collect();
    let next = Mutex::new(0usize);
    std::thread::scope(|s| {
        for _ in 0..threads().min(configs.len()) {
            s.spawn(|| loop {
                let i = {
                    let mut n = next.lock().expect("lock");
                    *n += 1;
                    *n - 1
                };
                let Some(cfg) = configs.get(i) else { break };
                let start = Instant::now();
                let outcome = suites::run(cfg).map(|checks| SuiteOutcome { config: cfg.clone(), checks });
                eprintln!("{}: {:.2} s", cfg.suite.name(), start.elapsed().as_secs_f64());
                *slots[i].lock().expect("lock") = Some(outcome);
            });
        }
    });
    slots.into_iter().map(|m| m.into_inner().expect("lock").expect("every suite ran")).collect()
}

fn verify(a: &VerifyArgs) -> std::result::Result<(), Failure> {
    let suite = a.name.or(a.suite).ok_or_else(|| Error::Invalid("a suite is required (--suite NAME)".into()))?;
    let req = Requested {
        levels: a.common.levels,
        max_weight: a.common.max_weight,
        arity: a.common.arity,
        degrees: a.common.degrees,
        samples: a.samples,
        mode: a.common.mode.map(Mode::from),
        operad: a.common.operad,
        seed: a.seed,
        inject_fault: a.inject_fault,
    };
    let list: Vec<Suite> = if suite == Suite::All { Suite::EACH.to_vec() } else { vec![suite] };
    let configs = list.into_iter().map(|s| SuiteConfig::resolve(s, &req)).collect::<Result<Vec<_>>>()?;
    let outcomes = run_suites(configs)?;
    let body = match a.common.format {
        Format::Text => report::to_text(&outcomes),
        Format::Json => json_body(&report::to_json(&outcomes)),
    };
    emit(&a.common, &body)?;
    if outcomes.iter().all(SuiteOutcome::passed) {
        Ok(())
    } else {
        Err(Failure::Checks)
    }
}

fn compute(a: &ComputeArgs) -> Result<()> {
    let c = &a.common;
    let req = compute::Request {
        target: a.target,
        left: a.left.clone(),
        right: a.right.clone(),
        input: a.input.clone(),
        profile: a.profile.clone(),
        operad: c.operad.unwrap_or(OperadName::Ass),
        mode: c.mode.map_or(Mode::Pointed, Mode::from),
        levels: c.levels.unwrap_or(2),
        max_weight: c.max_weight.unwrap_or(3),
        arity: c.arity.unwrap_or(3),
        degrees: c.degrees.unwrap_or(2),
    };
    let v = compute::compute(&req)?;
    emit(c, &json_body(&v))
}

fn enumerate(a: &EnumerateArgs) -> Result<()> {
    let req = enumerate::Request {
        kind: a.kind,
        levels: a.common.levels,
        weight: a.common.max_weight,
        positive: a.positive,
        max_width: a.max_width,
        profile: a.profile.clone(),
        ells: a.ells.clone(),
    };
    let listing = enumerate::enumerate(&req)?;
    let body = match a.common.format {
        Format::Text => listing.to_text(),
        Format::Json => json_body(&listing.to_json()),
    };
    emit(&a.common, &body)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Verify(a) => verify(a),
        Command::Compute(a) => compute(a).map_err(Failure::from),
        Command::Enumerate(a) => enumerate(a).map_err(Failure::from),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Checks) => ExitCode::from(1),
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
