//! Iterations and communication cost to reach a target MSE for each way of
//! splitting a per-round bit budget between weight balancing and consensus.
//!
//! ```text
//! cargo run --release --example bit_sweep -- [graphs] [inits] [target_mse] [out.csv]
//! ```

use std::path::Path;

use quantcons::harness::io::write_sweep;
use quantcons::harness::{sweep_bits, ExperimentConfig, MonteCarloOptions};
use quantcons::SplitRule;

fn main() -> quantcons::Result<()> {
    let mut args = std::env::args().skip(1);
    let graphs: usize = args.next().map_or(10, |a| a.parse().expect("graphs"));
    let inits: usize = args.next().map_or(10, |a| a.parse().expect("inits"));
    let target: f64 = args.next().map_or(1e-4, |a| a.parse().expect("target_mse"));
    let out = args.next();

    let cfg = ExperimentConfig {
        graphs,
        inits,
        max_rounds: 200_000,
        ..ExperimentConfig::default()
    };
    let opts = MonteCarloOptions {
        stop_at_target: true,
        ..MonteCarloOptions::default()
    };
    let res = sweep_bits(&cfg, &SplitRule::ALL, &[2, 4, 8, 16], target, &opts)?;

    println!(
        "{:<13} {:>5} {:>4} {:>5} {:>10} {:>10} {:>9}",
        "scheme", "total", "wb", "cons", "iterations", "cost", "converged"
    );
    for r in &res.rows {
        println!(
            "{:<13} {:>5} {:>4} {:>5} {:>10} {:>10} {:>9}",
            r.scheme.name(),
            r.total_bits,
            r.bits_wb,
            r.bits_cons,
            r.iterations,
            r.comm_cost,
            r.converged
        );
    }
    if let Some(path) = out {
        write_sweep(Path::new(&path), &res.rows)?;
    }
    Ok(())
}
