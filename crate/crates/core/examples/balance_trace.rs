//! Runs quantized weight balancing on one generated graph and prints the
//! total imbalance at logarithmically spaced rounds.
//!
//! ```text
//! cargo run --release --example balance_trace -- [scheme] [rounds] [out.csv]
//! ```
//! `scheme` is any bit scheme name, e.g. `alternating`, `simultaneous` or
//! `equal_split:8`.

use std::path::Path;

use quantcons::balancer::{run_balancing, StopRule};
use quantcons::harness::io::write_balance_trace;
use quantcons::harness::{log_grid, monte_carlo::generate_graph, ExperimentConfig};
use quantcons::BitScheme;

fn main() -> quantcons::Result<()> {
    let mut args = std::env::args().skip(1);
    let scheme: BitScheme = args.next().as_deref().unwrap_or("alternating").parse()?;
    let rounds: u64 = args.next().map_or(100_000, |a| a.parse().expect("rounds"));
    let out = args.next();

    let cfg = ExperimentConfig::default();
    let g = generate_graph(&cfg, 0)?;
    let (wb, _) = scheme.schedules()?;
    let run = run_balancing(&g, &cfg.initial_multiples(&g), cfg.step, wb, StopRule::rounds(rounds), false)?;

    println!("{:>8} {:>12} {:>14} {:>6}", "k", "gamma", "imbalance", "event");
    for k in log_grid(rounds - 1) {
        let r = &run.trace[k as usize];
        println!("{:>8} {:>12.4e} {:>14.6e} {:>6}", r.k, r.gamma, r.imbalance, r.event.code());
    }
    let decreasing = run.trace.iter().filter(|r| r.event.code() == "D").count();
    println!("final imbalance {:.6e}, {decreasing} decreasing rounds", run.final_imbalance.value);
    if let Some(path) = out {
        write_balance_trace(Path::new(&path), &run.trace)?;
    }
    Ok(())
}
