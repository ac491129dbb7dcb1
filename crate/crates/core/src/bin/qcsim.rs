//! Command-line driver.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 configuration error, 3 engine
//! error, 4 sweep target missed in `--strict` mode.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use quantcons::balancer::{run_balancing, StopRule};
use quantcons::digraph::Digraph;
use quantcons::harness::io::{
    write_balance_trace, write_balance_trace_to, write_series, write_series_to, write_sweep, write_sweep_to,
};
use quantcons::harness::monte_carlo::{generate_graph, MonteCarloOptions};
use quantcons::harness::sweep::{parse_schemes, parse_totals};
use quantcons::harness::{load_config_with, monte_carlo, sweep_bits, ExperimentConfig};
use quantcons::Error;

#[derive(Parser)]
#[command(name = "qcsim", version, about = "Quantized weight balancing and average consensus on digraphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// TOML configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed (overrides the configuration).
    #[arg(long)]
    seed: Option<u64>,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Directory for per-trial round traces.
    #[arg(long)]
    trace_dir: Option<PathBuf>,
    #[arg(long)]
    max_rounds: Option<u64>,
    /// Record the potential U(k) in balancing traces.
    #[arg(long)]
    diag_u: bool,
    /// Edge-list file used instead of generated graphs.
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Configuration override, repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Worker threads.
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Write a generated graph as an edge list.
    Gen {
        #[command(flatten)]
        common: Common,
        /// Which graph realization to emit.
        #[arg(long, default_value_t = 0)]
        index: usize,
    },
    /// Run weight balancing alone on one graph and write its round trace.
    Balance {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0)]
        index: usize,
        /// Stop once the total imbalance is at most this value.
        #[arg(long)]
        imbalance_tol: Option<f64>,
    },
    /// Monte-Carlo run of the joint algorithm; writes the aggregate series.
    Consensus {
        #[command(flatten)]
        common: Common,
    },
    /// Iterations and communication cost to reach a target MSE per bit split.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "equal_split,one_bit_wb,one_bit_cons")]
        schemes: String,
        #[arg(long, default_value = "2,4,8,16")]
        totals: String,
        #[arg(long, default_value_t = 1e-4)]
        target_mse: f64,
        /// Fail with exit code 4 when some row misses the target.
        #[arg(long)]
        strict: bool,
    },
}

enum Failure {
    Lib(Error),
    NotConverged,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn exit_code(e: &Error) -> u8 {
    match e.root() {
        Error::Io(_) | Error::Csv(_) => 1,
        Error::InvalidParameter(_) | Error::Assumption { .. } | Error::Parse { .. } => 2,
        _ => 3,
    }
}

fn load(common: &Common) -> Result<ExperimentConfig, Error> {
    let mut overrides = common.set.clone();
    if let Some(seed) = common.seed {
        overrides.push(format!("seed={seed}"));
    }
    if let Some(k) = common.max_rounds {
        overrides.push(format!("max_rounds={k}"));
    }
    if common.diag_u {
        overrides.push("diag_u=true".into());
    }
    let cfg = load_config_with(common.config.as_deref(), &overrides)?;
    match &common.graph {
        Some(p) => cfg.with_graph(Digraph::read_edge_list(p)?),
        None => Ok(cfg),
    }
}

fn options(common: &Common, cfg: &ExperimentConfig) -> MonteCarloOptions {
    MonteCarloOptions {
        workers: common.workers,
        retain_trials: false,
        trace_dir: common
            .trace_dir
            .clone()
            .or_else(|| cfg.trace.then(|| PathBuf::from("traces"))),
        stop_at_target: false,
    }
}

/// Writes to `out`, or to standard output when no path is given.
fn emit(
    out: Option<&Path>,
    to_file: impl FnOnce(&Path) -> Result<(), Error>,
    to_stdout: impl FnOnce(std::io::StdoutLock<'static>) -> Result<(), Error>,
) -> Result<(), Error> {
    match out {
        Some(p) => to_file(p),
        None => to_stdout(std::io::stdout().lock()),
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Gen { common, index } => {
            let cfg = load(&common)?;
            let g = generate_graph(&cfg, index)?;
            emit(
                common.out.as_deref(),
                |p| g.write_edge_list(p),
                |mut w| Ok(w.write_all(g.to_edge_list().as_bytes())?),
            )?;
        }
        Command::Balance {
            common,
            index,
            imbalance_tol,
        } => {
            let cfg = load(&common)?;
            let g = generate_graph(&cfg, index)?;
            let (wb, _) = cfg.bits.schedules()?;
            let stop = StopRule {
                max_rounds: cfg.max_rounds,
                imbalance_tol,
            };
            let run = run_balancing(&g, &cfg.initial_multiples(&g), cfg.step, wb, stop, cfg.diag_u)?;
            if let Some(dir) = &common.trace_dir {
                write_balance_trace(&dir.join(format!("balance_{index:06}.csv")), &run.trace)?;
            }
            emit(
                common.out.as_deref(),
                |p| write_balance_trace(p, &run.trace),
                |w| write_balance_trace_to(w, &run.trace),
            )?;
            eprintln!("final imbalance {:e} after {} rounds", run.final_imbalance.value, run.trace.len());
        }
        Command::Consensus { common } => {
            let cfg = load(&common)?;
            let res = monte_carlo(&cfg, &options(&common, &cfg))?;
            if res.uninformative_trials > 0 {
                eprintln!(
                    "warning: {} trials start with an average outside the quantizer range",
                    res.uninformative_trials
                );
            }
            emit(
                common.out.as_deref(),
                |p| write_series(p, &res.series),
                |w| write_series_to(w, &res.series),
            )?;
        }
        Command::Sweep {
            common,
            schemes,
            totals,
            target_mse,
            strict,
        } => {
            let cfg = load(&common)?;
            let schemes = parse_schemes(&schemes)?;
            let totals = parse_totals(&totals)?;
            let opts = MonteCarloOptions {
                stop_at_target: true,
                ..options(&common, &cfg)
            };
            let res = sweep_bits(&cfg, &schemes, &totals, target_mse, &opts)?;
            emit(
                common.out.as_deref(),
                |p| write_sweep(p, &res.rows),
                |w| write_sweep_to(w, &res.rows),
            )?;
            let missed = res.rows.iter().filter(|r| !r.converged).count();
            if missed > 0 {
                eprintln!("warning: {missed} rows did not reach MSE {target_mse:e}");
                if strict {
                    return Err(Failure::NotConverged);
                }
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
        Err(Failure::NotConverged) => ExitCode::from(4),
    }
}
