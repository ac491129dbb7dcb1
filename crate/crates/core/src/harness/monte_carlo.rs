//! Monte-Carlo runs over graph and initial-value realizations.
//!
//! Trial `t` uses graph `t / inits` and initial-value draw `t`. Every random
//! quantity comes from its own substream, so results do not depend on the
//! number of workers or on scheduling. All trials advance in lockstep between
//! the points of a log-spaced recording grid; aggregates are reduced in trial
//! order.

use std::path::PathBuf;

use rand::Rng;
use rayon::prelude::*;

use crate::consensus::{ConsensusEngine, ConsensusRecord};
use crate::digraph::Digraph;
use crate::error::{Error, Result};
use crate::harness::config::{ExperimentConfig, InitialValues};
use crate::harness::io;
use crate::rng::{substream, Domain, NodeStreams};

/// Graph number `index` of the experiment.
pub fn generate_graph(cfg: &ExperimentConfig, index: usize) -> Result<Digraph> {
    if let Some(g) = &cfg.graph {
        return Ok(g.clone());
    }
    let mut rng = substream(cfg.seed, Domain::Graph, index as u64, 0);
    Digraph::ring_plus_random(cfg.nodes, cfg.edge_prob, &mut rng)
}

/// Initial estimates of trial `trial`.
pub fn initial_values(cfg: &ExperimentConfig, trial: usize) -> Vec<f64> {
    match &cfg.y0 {
        InitialValues::Explicit(v) => v.clone(),
        InitialValues::Uniform => {
            let mut rng = substream(cfg.seed, Domain::InitialValues, trial as u64, 0);
            let (lo, w) = (cfg.range.q_min(), cfg.range.width());
            (0..cfg.nodes).map(|_| lo + w * rng.random::<f64>()).collect()
        }
    }
}

/// Quantizer streams of trial `trial`.
pub fn trial_streams(cfg: &ExperimentConfig, trial: usize) -> NodeStreams {
    NodeStreams::new(cfg.seed, trial as u64, cfg.nodes)
}

const MANTISSAS: [f64; 12] = [1.0, 1.2, 1.5, 2.0, 2.5, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0];

/// Recording rounds: every round up to 10, then roughly twelve per decade,
/// always ending with `max_rounds`.
pub fn log_grid(max_rounds: u64) -> Vec<u64> {
    let mut grid: Vec<u64> = (0..=10.min(max_rounds)).collect();
    let mut decade = 10.0f64;
    'outer: loop {
        for m in MANTISSAS {
            let k = (m * decade).round() as u64;
            if k >= max_rounds {
                break 'outer;
            }
            if k > *grid.last().unwrap() {
                grid.push(k);
            }
        }
        decade *= 10.0;
    }
    if *grid.last().unwrap() != max_rounds {
        grid.push(max_rounds);
    }
    grid
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesPoint {
    pub k: u64,
    pub mean_imbalance: f64,
    pub se_imbalance: f64,
    pub mean_mse: f64,
    pub se_mse: f64,
}

/// One trial's values on the recording grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialSeries {
    pub trial: usize,
    pub graph: usize,
    pub imbalance: Vec<f64>,
    pub mse: Vec<f64>,
}

#[derive(Debug, Clone, Default)]
pub struct MonteCarloOptions {
    /// Worker threads; `None` uses the global pool.
    pub workers: Option<usize>,
    /// Keep every trial's grid series in the result.
    pub retain_trials: bool,
    /// Write a full per-round trace for each trial into this directory.
    pub trace_dir: Option<PathBuf>,
    /// Stop at the first grid point where the mean MSE reaches `target_mse`.
    pub stop_at_target: bool,
}

#[derive(Debug, Clone)]
pub struct MonteCarloResult {
    pub series: Vec<SeriesPoint>,
    pub trials: Option<Vec<TrialSeries>>,
    /// First grid point whose mean MSE is at most `target_mse`.
    pub target_reached: Option<u64>,
    /// Trials whose initial average lies outside the quantizer range.
    pub uninformative_trials: usize,
}

impl MonteCarloResult {
    pub fn point_at(&self, k: u64) -> Option<&SeriesPoint> {
        self.series.iter().find(|p| p.k == k)
    }
}

/// Mean and standard error (sample standard deviation over `√M`) in input order.
pub fn mean_se(values: impl ExactSizeIterator<Item = f64> + Clone) -> (f64, f64) {
    let m = values.len();
    if m == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.clone().sum::<f64>() / m as f64;
    if m == 1 {
        return (mean, 0.0);
    }
    let ss: f64 = values.map(|v| (v - mean) * (v - mean)).sum();
    (mean, (ss / (m - 1) as f64 / m as f64).sqrt())
}

struct Trial<'g> {
    engine: ConsensusEngine<'g>,
    imbalance: Vec<f64>,
    mse: Vec<f64>,
    trace: Option<Vec<ConsensusRecord>>,
}

impl Trial<'_> {
    fn advance(&mut self, k: u64) -> Result<()> {
        match self.trace.as_mut() {
            Some(trace) => {
                while self.engine.round() < k {
                    trace.push(self.engine.step_with_record()?);
                }
            }
            None => self.engine.advance_to(k)?,
        }
        self.imbalance.push(self.engine.imbalance()?.value);
        self.mse.push(self.engine.mse());
        Ok(())
    }
}

/// Runs every trial of `cfg` and aggregates imbalance and MSE on [`log_grid`].
pub fn monte_carlo(cfg: &ExperimentConfig, opts: &MonteCarloOptions) -> Result<MonteCarloResult> {
    cfg.validate()?;
    match opts.workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::invalid(format!("cannot start {n} workers: {e}")))?
            .install(|| run(cfg, opts)),
        None => run(cfg, opts),
    }
}

fn run(cfg: &ExperimentConfig, opts: &MonteCarloOptions) -> Result<MonteCarloResult> {
    let graphs = (0..cfg.graphs)
        .into_par_iter()
        .map(|i| generate_graph(cfg, i))
        .collect::<Result<Vec<_>>>()?;
    let schedules = cfg.schedules()?;
    let record_trace = opts.trace_dir.is_some();
    let mut trials = (0..cfg.trials())
        .map(|t| {
            let g = &graphs[t / cfg.inits];
            let engine = ConsensusEngine::new(
                g,
                &cfg.initial_multiples(g),
                initial_values(cfg, t),
                cfg.range,
                schedules.clone(),
                trial_streams(cfg, t),
            )
            .map_err(|e| trial_error(t, e))?;
            Ok(Trial {
                engine,
                imbalance: Vec::new(),
                mse: Vec::new(),
                trace: record_trace.then(Vec::new),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let uninformative_trials = trials.iter().filter(|t| !t.engine.state().is_informative()).count();

    let mut series = Vec::new();
    let mut target_reached = None;
    for &k in &log_grid(cfg.max_rounds) {
        trials
            .par_iter_mut()
            .enumerate()
            .try_for_each(|(t, trial)| trial.advance(k).map_err(|e| trial_error(t, e)))?;
        let idx = series.len();
        let (mean_imbalance, se_imbalance) = mean_se(trials.iter().map(|t| t.imbalance[idx]));
        let (mean_mse, se_mse) = mean_se(trials.iter().map(|t| t.mse[idx]));
        series.push(SeriesPoint {
            k,
            mean_imbalance,
            se_imbalance,
            mean_mse,
            se_mse,
        });
        if target_reached.is_none() && cfg.target_mse.is_some_and(|t| mean_mse <= t) {
            target_reached = Some(k);
            if opts.stop_at_target {
                break;
            }
        }
    }

    if let Some(dir) = &opts.trace_dir {
        std::fs::create_dir_all(dir)?;
        trials.par_iter().enumerate().try_for_each(|(t, trial)| {
            let path = dir.join(format!("trial_{t:06}.csv"));
            io::write_consensus_trace(&path, trial.trace.as_deref().unwrap_or(&[]))
        })?;
    }

    let trial_series = opts.retain_trials.then(|| {
        trials
            .into_iter()
            .enumerate()
            .map(|(t, trial)| TrialSeries {
                trial: t,
                graph: t / cfg.inits,
                imbalance: trial.imbalance,
                mse: trial.mse,
            })
            .collect()
    });
    Ok(MonteCarloResult {
        series,
        trials: trial_series,
        target_reached,
        uninformative_trials,
    })
}

fn trial_error(trial: usize, e: Error) -> Error {
    match e {
        e @ Error::Trial { .. } => e,
        e => Error::Trial {
            trial,
            source: Box::new(e),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_shape() {
        let g = log_grid(100_000);
        assert_eq!(&g[..13], &[0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 12, 15]);
        assert_eq!(*g.last().unwrap(), 100_000);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        assert!(g.contains(&100) && g.contains(&10_000));
        assert_eq!(log_grid(3), vec![0, 1, 2, 3]);
        assert_eq!(log_grid(13), vec![0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 12, 13]);
    }

    #[test]
    fn standard_error() {
        let (m, se) = mean_se([1.0, 2.0, 3.0, 4.0].into_iter());
        assert_eq!(m, 2.5);
        assert!((se - (5.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-15);
        assert_eq!(mean_se([7.0].into_iter()), (7.0, 0.0));
    }
}
