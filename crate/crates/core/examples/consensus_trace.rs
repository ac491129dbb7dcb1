//! One trial of the joint algorithm: estimates, MSE and imbalance over time.
//!
//! ```text
//! cargo run --release --example consensus_trace -- [scheme] [rounds] [seed]
//! ```

use quantcons::consensus::ConsensusEngine;
use quantcons::harness::monte_carlo::{generate_graph, initial_values, trial_streams};
use quantcons::harness::{log_grid, ExperimentConfig};

fn main() -> quantcons::Result<()> {
    let mut args = std::env::args().skip(1);
    let bits = args.next().as_deref().unwrap_or("simultaneous").parse()?;
    let max_rounds: u64 = args.next().map_or(100_000, |a| a.parse().expect("rounds"));
    let seed: u64 = args.next().map_or(1, |a| a.parse().expect("seed"));

    let cfg = ExperimentConfig {
        bits,
        seed,
        ..ExperimentConfig::default()
    };
    let g = generate_graph(&cfg, 0)?;
    let y0 = initial_values(&cfg, 0);
    let mut engine = ConsensusEngine::new(
        &g,
        &cfg.initial_multiples(&g),
        y0.clone(),
        cfg.range,
        cfg.schedules()?,
        trial_streams(&cfg, 0),
    )?;
    engine.track_envelope();
    println!("initial values {y0:.4?}, average {:.6}", engine.state().ybar0());
    println!("{:>8} {:>12} {:>12} {:>12}  estimates", "k", "mse", "imbalance", "sum drift");
    for k in log_grid(max_rounds) {
        engine.advance_to(k)?;
        let imb = engine.imbalance()?.value;
        let s = engine.state();
        println!(
            "{k:>8} {:>12.4e} {imb:>12.4e} {:>12.2e}  {:.5?}",
            s.mse(),
            s.sum_drift(),
            s.y
        );
    }
    println!("estimates outside the envelope: {}", engine.envelope_misses());
    Ok(())
}
