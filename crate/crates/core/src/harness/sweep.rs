//! Iterations and communication cost needed to reach a target MSE, as a
//! function of how a per-round bit budget is split between the channels.

use std::collections::BTreeMap;

use rand::Rng;

use crate::error::{Error, Result};
use crate::harness::config::ExperimentConfig;
use crate::harness::monte_carlo::{monte_carlo, MonteCarloOptions, MonteCarloResult};
use crate::numerics::{BitScheme, SplitRule};
use crate::rng::{substream, Domain};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepRow {
    pub scheme: SplitRule,
    pub total_bits: u32,
    pub bits_wb: u32,
    pub bits_cons: u32,
    /// First recorded round whose mean MSE is at most the target, or the
    /// last recorded round when the target was not reached.
    pub iterations: u64,
    /// `total_bits * iterations`.
    pub comm_cost: u64,
    pub converged: bool,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    /// Monte-Carlo result per distinct `(bits_wb, bits_cons)` split.
    pub runs: BTreeMap<(u32, u32), MonteCarloResult>,
}

impl SweepResult {
    pub fn row(&self, scheme: SplitRule, total: u32) -> Option<&SweepRow> {
        self.rows.iter().find(|r| r.scheme == scheme && r.total_bits == total)
    }

    pub fn run(&self, scheme: SplitRule, total: u32) -> Option<&MonteCarloResult> {
        let r = self.row(scheme, total)?;
        self.runs.get(&(r.bits_wb, r.bits_cons))
    }

    pub fn all_converged(&self) -> bool {
        self.rows.iter().all(|r| r.converged)
    }
}

/// Runs the Monte-Carlo experiment of `cfg` for every scheme and total and
/// tabulates iterations to `target_mse`. Splits shared by several rows are
/// simulated once.
pub fn sweep_bits(
    cfg: &ExperimentConfig,
    schemes: &[SplitRule],
    totals: &[u32],
    target_mse: f64,
    opts: &MonteCarloOptions,
) -> Result<SweepResult> {
    if !(target_mse.is_finite() && target_mse > 0.0) {
        return Err(Error::invalid(format!("target MSE must be positive, got {target_mse}")));
    }
    let mut runs: BTreeMap<(u32, u32), MonteCarloResult> = BTreeMap::new();
    let mut rows = Vec::new();
    for &total in totals {
        for &scheme in schemes {
            let (bits_wb, bits_cons) = scheme.split(total)?;
            if !runs.contains_key(&(bits_wb, bits_cons)) {
                let run_cfg = ExperimentConfig {
                    bits: scheme.scheme(total),
                    target_mse: Some(target_mse),
                    ..cfg.clone()
                };
                runs.insert((bits_wb, bits_cons), monte_carlo(&run_cfg, opts)?);
            }
            let run = &runs[&(bits_wb, bits_cons)];
            let (iterations, converged) = match run.target_reached {
                Some(k) => (k, true),
                None => (run.series.last().map_or(0, |p| p.k), false),
            };
            rows.push(SweepRow {
                scheme,
                total_bits: total,
                bits_wb,
                bits_cons,
                iterations,
                comm_cost: u64::from(total) * iterations,
                converged,
            });
        }
    }
    Ok(SweepResult { rows, runs })
}

/// First grid round at which the mean MSE over the trials in `sample`
/// (indices, repeats allowed) is at most `target`.
pub fn crossing_round(run: &MonteCarloResult, sample: &[usize], target: f64) -> Result<Option<u64>> {
    let trials = run
        .trials
        .as_ref()
        .ok_or_else(|| Error::invalid("crossing_round needs retained trial series"))?;
    for (idx, point) in run.series.iter().enumerate() {
        let mean = sample.iter().map(|&t| trials[t].mse[idx]).sum::<f64>() / sample.len() as f64;
        if mean <= target {
            return Ok(Some(point.k));
        }
    }
    Ok(None)
}

/// Paired bootstrap estimate of the probability that `a` reaches `target`
/// no later than `b`. Both runs must cover the same trials with retained
/// series. A resample in which neither run reaches the target within the
/// recorded rounds counts against `a`.
pub fn ordering_confidence(
    a: &MonteCarloResult,
    b: &MonteCarloResult,
    target: f64,
    resamples: usize,
    seed: u64,
) -> Result<f64> {
    let m = match (&a.trials, &b.trials) {
        (Some(ta), Some(tb)) if ta.len() == tb.len() && !ta.is_empty() => ta.len(),
        _ => return Err(Error::invalid("ordering_confidence needs matching retained trial series")),
    };
    if resamples == 0 {
        return Err(Error::invalid("at least one bootstrap resample is required"));
    }
    let mut rng = substream(seed, Domain::Bootstrap, 0, 0);
    let mut sample = vec![0usize; m];
    let mut wins = 0usize;
    for _ in 0..resamples {
        sample.iter_mut().for_each(|s| *s = rng.random_range(0..m));
        let ka = crossing_round(a, &sample, target)?;
        let kb = crossing_round(b, &sample, target)?;
        let a_first = match (ka, kb) {
            (Some(x), Some(y)) => x <= y,
            (Some(_), None) => true,
            (None, _) => false,
        };
        wins += usize::from(a_first);
    }
    Ok(wins as f64 / resamples as f64)
}

/// Split rules in the order they are listed, parsed from a comma list.
pub fn parse_schemes(list: &str) -> Result<Vec<SplitRule>> {
    list.split(',').map(str::parse).collect()
}

/// Bit totals parsed from a comma list.
pub fn parse_totals(list: &str) -> Result<Vec<u32>> {
    list.split(',')
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|e| Error::invalid(format!("bad bit total `{t}`: {e}")))
        })
        .collect()
}

/// The bit scheme a row was simulated with.
pub fn row_scheme(row: &SweepRow) -> BitScheme {
    row.scheme.scheme(row.total_bits)
}
