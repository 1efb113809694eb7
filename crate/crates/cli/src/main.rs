//! `listcolor`: generate instances, run the list-coloring algorithms on the
//! round simulator, verify results and sweep parameters.
//!
//! Exit codes: 0 validated success, 1 validation failure (including a
//! CONGEST budget breach or round limit), 2 precondition or usage error,
//! 3 internal contradiction.

mod bench;
mod instance;
mod params;
mod run;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use listcolor::graph::generate;
use listcolor::GraphKind;
use serde::{Deserialize, Serialize};

use instance::{default_lists, load, save, write_json, ListKind};
use params::ParamArgs;
use run::Algorithm;

#[derive(Parser)]
#[command(name = "listcolor", version, about = "Deterministic distributed list coloring experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a graph with lists satisfying an algorithm's hypothesis.
    Generate {
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long)]
        n: usize,
        /// Edge probability for `gnp`.
        #[arg(long)]
        p: Option<f64>,
        #[arg(long, value_enum, default_value = "degplus1")]
        lists: ListKind,
        /// Color space size; by default twice the largest list.
        #[arg(long)]
        space: Option<usize>,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Run an algorithm; exits 0 iff the built-in validators pass.
    Run {
        #[arg(value_enum)]
        algorithm: Algorithm,
        #[arg(long)]
        instance: PathBuf,
        /// Result file; printed to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Recheck a result file against its instance.
    Verify {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        result: PathBuf,
        /// Also decide satisfiability by exhaustive search (small instances).
        #[arg(long)]
        exact: bool,
    },
    /// Run a JSON suite of sweeps and tabulate round metrics.
    Bench {
        #[arg(long)]
        suite: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KindArg {
    Ring,
    Star,
    Complete,
    Path,
    Gnp,
    Interval,
    Tree,
}

impl KindArg {
    pub fn to_graph_kind(self, p: Option<f64>, seed: u64) -> anyhow::Result<GraphKind> {
        Ok(match self {
            KindArg::Ring => GraphKind::Ring,
            KindArg::Star => GraphKind::Star,
            KindArg::Complete => GraphKind::Complete,
            KindArg::Path => GraphKind::Path,
            KindArg::Gnp => GraphKind::Gnp {
                p: p.context("gnp needs --p")?,
                seed,
            },
            KindArg::Interval => GraphKind::Interval { seed },
            KindArg::Tree => GraphKind::Tree { seed },
        })
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Serialize)]
struct VerifyReport<'a> {
    passed: bool,
    checks: &'a [run::Check],
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(error_code(&err))
        }
    }
}

/// Writes to stdout; a reader that went away early is not an error.
fn emit(text: &str) -> anyhow::Result<()> {
    match std::io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn error_code(err: &anyhow::Error) -> u8 {
    use listcolor::Error as E;
    match err.downcast_ref::<E>() {
        Some(E::Internal(_) | E::Stalled { .. } | E::Decode(_)) => 3,
        Some(E::BudgetExceeded { .. } | E::Timeout { .. }) => 1,
        _ => 2,
    }
}

fn dispatch(cmd: Command) -> anyhow::Result<u8> {
    match cmd {
        Command::Generate {
            kind,
            n,
            p,
            lists,
            space,
            out,
            params,
        } => {
            let params = params.resolve()?;
            let seed = params.seed.unwrap_or(0);
            let g = generate(kind.to_graph_kind(p, seed)?, n)?;
            let l = default_lists(&g, lists, space, params.epsilon()?, params.arboricity, seed)?;
            save(&out, &g, &l)?;
            eprintln!(
                "wrote {}: n = {}, m = {}, Δ = {}, C = {}",
                out.display(),
                g.n(),
                g.edge_count(),
                g.max_degree(),
                l.space().size()
            );
            Ok(0)
        }
        Command::Run {
            algorithm,
            instance,
            out,
            params,
        } => {
            let params = params.resolve()?;
            let inst = load(&instance)?;
            let result = run::run(algorithm, &inst, &params)?;
            for w in &result.warnings {
                eprintln!("warning: {w}");
            }
            match &out {
                Some(path) => write_json(path, &result)?,
                None => emit(&(serde_json::to_string_pretty(&result)? + "\n"))?,
            }
            for c in result.checks.iter().filter(|c| !c.passed) {
                eprintln!("check {} failed: {} violation(s)", c.name, c.report.violations);
            }
            eprintln!(
                "{algorithm:?}: {} rounds, {} messages, max payload {} bits, {}",
                result.metrics.rounds,
                result.metrics.messages_sent,
                result.metrics.max_payload_bits,
                if result.passed { "valid" } else { "INVALID" }
            );
            Ok(if result.passed { 0 } else { 1 })
        }
        Command::Verify { instance, result, exact } => {
            let inst = load(&instance)?;
            let text = std::fs::read_to_string(&result).with_context(|| format!("reading {}", result.display()))?;
            let mut res: run::RunOutput =
                serde_json::from_str(&text).with_context(|| format!("parsing {}", result.display()))?;
            let mut checks = run::checks(&inst, &res)?;
            res.passed = checks.iter().all(|c| c.passed);
            if exact {
                let c = run::exact_check(&inst, &res)?;
                if !c.passed {
                    bail!(listcolor::Error::Internal(
                        "result claims a total valid coloring of an unsatisfiable instance".into()
                    ));
                }
                checks.push(c);
            }
            let passed = checks.iter().all(|c| c.passed);
            emit(&(serde_json::to_string_pretty(&VerifyReport { passed, checks: &checks })? + "\n"))?;
            Ok(if passed { 0 } else { 1 })
        }
        Command::Bench { suite, out, format } => {
            let text = std::fs::read_to_string(&suite).with_context(|| format!("reading {}", suite.display()))?;
            let suite: bench::Suite =
                serde_json::from_str(&text).with_context(|| format!("parsing {}", suite.display()))?;
            let rows = bench::run_suite(&suite)?;
            let mut buf = Vec::new();
            match format {
                Format::Csv => bench::write_csv(&rows, &mut buf)?,
                Format::Json => {
                    serde_json::to_writer_pretty(&mut buf, &rows)?;
                    buf.push(b'\n');
                }
            }
            match out {
                Some(path) => std::fs::write(&path, buf).with_context(|| format!("writing {}", path.display()))?,
                None => emit(&String::from_utf8(buf)?)?,
            }
            Ok(0)
        }
    }
}
