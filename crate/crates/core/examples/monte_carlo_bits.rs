//! Mean imbalance and mean MSE of the 1-bit (alternating) and 2-bit
//! (simultaneous) schemes over graph and initial-value realizations.
//!
//! ```text
//! cargo run --release --example monte_carlo_bits -- [graphs] [inits] [rounds] [out_dir]
//! ```
//! With an output directory, the aggregate series of each scheme is written
//! as `alternating.csv` and `simultaneous.csv`.

use std::path::PathBuf;

use quantcons::harness::io::write_series;
use quantcons::harness::{monte_carlo, ExperimentConfig, MonteCarloOptions};
use quantcons::BitScheme;

fn main() -> quantcons::Result<()> {
    let mut args = std::env::args().skip(1);
    let graphs: usize = args.next().map_or(20, |a| a.parse().expect("graphs"));
    let inits: usize = args.next().map_or(20, |a| a.parse().expect("inits"));
    let max_rounds: u64 = args.next().map_or(10_000, |a| a.parse().expect("rounds"));
    let out_dir = args.next().map(PathBuf::from);

    let base = ExperimentConfig {
        graphs,
        inits,
        max_rounds,
        ..ExperimentConfig::default()
    };
    let mut results = Vec::new();
    for bits in [BitScheme::Alternating, BitScheme::Simultaneous] {
        let cfg = ExperimentConfig {
            bits: bits.clone(),
            ..base.clone()
        };
        let res = monte_carlo(&cfg, &MonteCarloOptions::default())?;
        if let Some(dir) = &out_dir {
            write_series(&dir.join(format!("{bits}.csv")), &res.series)?;
        }
        results.push(res);
    }

    println!(
        "{:>8} | {:>12} {:>12} | {:>12} {:>12}",
        "k", "imb 1-bit", "imb 2-bit", "mse 1-bit", "mse 2-bit"
    );
    for (a, b) in results[0].series.iter().zip(&results[1].series) {
        println!(
            "{:>8} | {:>12.4e} {:>12.4e} | {:>12.4e} {:>12.4e}",
            a.k, a.mean_imbalance, b.mean_imbalance, a.mean_mse, b.mean_mse
        );
    }
    Ok(())
}
