//! Empirical behaviour of the probabilistic quantizer: sample mean and
//! variance against the exact values for a few inputs and bit budgets.
//!
//! ```text
//! cargo run --release --example quantizer -- [draws]
//! ```

use quantcons::consensus::{quant_step, quantize_prob, QuantRange};
use quantcons::rng::{substream, Domain};

fn main() -> quantcons::Result<()> {
    let draws: usize = std::env::args().nth(1).map_or(100_000, |a| a.parse().expect("draws"));
    let range = QuantRange::new(0.0, 1.0)?;
    let mut rng = substream(3, Domain::Quantizer, 0, 0);

    println!("{:>5} {:>3} {:>9} {:>12} {:>12} {:>12}", "y", "B", "delta", "mean - y", "var", "exact var");
    for bits in 1..=3 {
        let delta = quant_step(bits, range)?;
        for y in [0.1, 0.3, 0.5, 0.9] {
            let mut sum = 0.0;
            let mut sq = 0.0;
            for _ in 0..draws {
                let x = quantize_prob(y, bits, range, &mut rng)?.x;
                sum += x;
                sq += x * x;
            }
            let mean = sum / draws as f64;
            let var = sq / draws as f64 - mean * mean;
            let p = quantize_prob(y, bits, range, &mut rng)?.p;
            println!(
                "{y:>5} {bits:>3} {delta:>9.5} {:>12.3e} {var:>12.6} {:>12.6}",
                mean - y,
                p * (1.0 - p) * delta * delta
            );
        }
    }
    Ok(())
}
