//! Audits weight balancing round by round: the decrement law, sign-set
//! invariance, conservation, the send window, the potential `U(k)` and the
//! tail bound, over a batch of generated graphs.
//!
//! ```text
//! cargo run --release --example potential_diagnostics -- [graphs] [rounds]
//! ```

use quantcons::balancer::audit::{audit_run, Check};
use quantcons::balancer::Balancer;
use quantcons::harness::{monte_carlo::generate_graph, ExperimentConfig};

const CHECKS: [Check; 10] = [
    Check::Conservation,
    Check::Consistency,
    Check::DecrementLaw,
    Check::SignSets,
    Check::WeightMonotone,
    Check::PositiveMass,
    Check::SendWithinWindow,
    Check::TailBound,
    Check::PotentialCap,
    Check::PotentialMonotone,
];

fn main() -> quantcons::Result<()> {
    let mut args = std::env::args().skip(1);
    let graphs: usize = args.next().map_or(20, |a| a.parse().expect("graphs"));
    let rounds: u64 = args.next().map_or(20_000, |a| a.parse().expect("rounds"));

    let cfg = ExperimentConfig::default();
    let (wb, _) = cfg.bits.schedules()?;
    let mut totals = [0usize; CHECKS.len()];
    for gi in 0..graphs {
        let g = generate_graph(&cfg, gi)?;
        let mut engine = Balancer::new(&g, &cfg.initial_multiples(&g), cfg.step, wb.clone())?;
        let report = audit_run(&mut engine, rounds, true)?;
        for (t, c) in totals.iter_mut().zip(CHECKS) {
            *t += report.count(c);
        }
        println!(
            "graph {gi:3}: D {:5} U {:6} idle {:6}  max U {:>8}  U compared {:6}  level crossings {:4} (drops {:3})  tail from {:?}",
            report.decreasing,
            report.updates,
            report.idle,
            report.max_potential.map_or("-".into(), |u| u.to_string()),
            report.potential_checks,
            report.cross_level_rounds,
            report.cross_level_drops,
            report.tail_start,
        );
    }
    println!();
    for (c, t) in CHECKS.iter().zip(totals) {
        println!("{:<18} {t} violating rounds", format!("{c:?}"));
    }
    Ok(())
}
