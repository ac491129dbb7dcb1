//! Quantized average consensus on an unbalanced digraph, run jointly with
//! the weight-balancing rounds.
//!
//! At round `k` node `i` clips its estimate to `[q_min, q_max]`, quantizes it
//! with a probabilistic (conditionally unbiased) quantizer of
//! `B_i(k)` bits and broadcasts the result `x_i`. Every node then updates
//!
//! ```text
//! y_i <- y_i + α(k) b_i x_i + α(k) Σ_{j∈N_i⁻} a_ij (x_j - x_i)
//! ```
//!
//! using the pre-round weights and balances. The `b_i x_i` term cancels the
//! net outflow of an unbalanced node, so `Σ y_i` is invariant.

use rand::Rng;

use crate::balancer::{Balancer, EventKind, Imbalance, StepOutcome, WeightState, BalanceVector, EventRecord};
use crate::digraph::Digraph;
use crate::error::{Error, Result};
use crate::numerics::{AlphaSchedule, BitScheduleCons, BitScheduleWb, StepSchedule};
use crate::rng::NodeStreams;

/// Quantizer range `[q_min, q_max]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantRange {
    q_min: f64,
    q_max: f64,
}

impl QuantRange {
    pub fn new(q_min: f64, q_max: f64) -> Result<Self> {
        if !(q_min.is_finite() && q_max.is_finite() && q_min < q_max) {
            return Err(Error::invalid(format!("quantizer range [{q_min}, {q_max}] is empty")));
        }
        Ok(Self { q_min, q_max })
    }

    pub fn q_min(&self) -> f64 {
        self.q_min
    }

    pub fn q_max(&self) -> f64 {
        self.q_max
    }

    /// `max(|q_min|, |q_max|)`.
    pub fn q_star(&self) -> f64 {
        self.q_min.abs().max(self.q_max.abs())
    }

    pub fn width(&self) -> f64 {
        self.q_max - self.q_min
    }

    pub fn contains(&self, y: f64) -> bool {
        (self.q_min..=self.q_max).contains(&y)
    }
}

pub fn clip(y: f64, range: QuantRange) -> f64 {
    y.max(range.q_min).min(range.q_max)
}

/// Grid spacing `(q_max - q_min) / (2^B - 1)`.
pub fn quant_step(bits: u32, range: QuantRange) -> Result<f64> {
    if bits == 0 {
        return Err(Error::invalid("quantizer needs at least one bit"));
    }
    Ok(range.width() / levels(bits) as f64)
}

#[inline]
fn levels(bits: u32) -> u64 {
    (1u64 << bits) - 1
}

/// One quantizer output.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantizerDraw {
    pub x: f64,
    /// Probability of the upper grid point.
    pub p: f64,
    pub bits: u32,
}

/// Quantizes an already clipped value using the uniform `u ∈ [0, 1)`: the
/// upper neighbor is returned when `u < p`, the lower one otherwise. Grid
/// points have `p = 0` and map to themselves.
#[inline]
pub fn quantize_with_uniform(y_tilde: f64, bits: u32, range: QuantRange, u: f64) -> QuantizerDraw {
    debug_assert!(bits >= 1);
    let top = levels(bits);
    let delta = range.width() / top as f64;
    let r = ((y_tilde - range.q_min) / delta).max(0.0);
    let lo = r.floor();
    let p = r - lo;
    let lo = (lo as u64).min(top);
    let idx = if u < p { (lo + 1).min(top) } else { lo };
    let x = if idx == top {
        range.q_max
    } else {
        range.q_min + idx as f64 * delta
    };
    QuantizerDraw { x, p, bits }
}

pub fn quantize_prob<R: Rng + ?Sized>(y_tilde: f64, bits: u32, range: QuantRange, rng: &mut R) -> Result<QuantizerDraw> {
    if bits == 0 {
        return Err(Error::invalid("quantizer needs at least one bit"));
    }
    Ok(quantize_with_uniform(y_tilde, bits, range, rng.random()))
}

/// Neumaier-compensated sum.
pub fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// `(1/N) Σ (y_i - ȳ)²`.
pub fn mse(y: &[f64], ybar0: f64) -> f64 {
    y.iter().map(|v| (v - ybar0).powi(2)).sum::<f64>() / y.len() as f64
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConsensusState {
    pub y: Vec<f64>,
    pub y0_sum: f64,
    pub range: QuantRange,
}

impl ConsensusState {
    pub fn new(y0: Vec<f64>, range: QuantRange) -> Result<Self> {
        if y0.is_empty() || y0.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("initial values must be finite and nonempty"));
        }
        Ok(Self {
            y0_sum: compensated_sum(y0.iter().copied()),
            y: y0,
            range,
        })
    }

    pub fn ybar0(&self) -> f64 {
        self.y0_sum / self.y.len() as f64
    }

    pub fn mse(&self) -> f64 {
        mse(&self.y, self.ybar0())
    }

    /// `Σ y_i(k) - Σ y_i(0)`.
    pub fn sum_drift(&self) -> f64 {
        compensated_sum(self.y.iter().copied()) - self.y0_sum
    }

    /// Whether the initial average lies in the quantizer range, the
    /// condition under which the estimates converge to it.
    pub fn is_informative(&self) -> bool {
        self.range.contains(self.ybar0())
    }
}

/// The schedules driving a joint run.
#[derive(Debug, Clone, PartialEq)]
pub struct ConsensusSchedules {
    pub step: StepSchedule,
    pub alpha: AlphaSchedule,
    pub bits_wb: BitScheduleWb,
    pub bits_cons: BitScheduleCons,
}

/// Quantizes every node's clipped estimate for round `k` (zero where the
/// node has no consensus bits).
fn quantize_all(y: &[f64], k: u64, bits: &BitScheduleCons, range: QuantRange, streams: &mut NodeStreams, x: &mut [f64]) -> bool {
    let mut any = false;
    for (i, xi) in x.iter_mut().enumerate() {
        let b = bits.bits(i, k);
        *xi = if b == 0 {
            0.0
        } else {
            any = true;
            quantize_with_uniform(clip(y[i], range), b, range, streams.uniform(i, k)).x
        };
    }
    any
}

/// Applies the estimate update with the given pre-round weights/balances.
fn update_estimates(g: &Digraph, w: &[i128], b: &[i128], gamma: f64, alpha: f64, x: &[f64], y: &mut [f64]) {
    for (i, yi) in y.iter_mut().enumerate() {
        let xi = x[i];
        let mut pull = 0.0;
        for (&e, &j) in g.in_edges(i).iter().zip(g.in_neighbors(i)) {
            pull += w[e] as f64 * gamma * (x[j] - xi);
        }
        *yi += alpha * (b[i] as f64 * gamma * xi + pull);
    }
}

/// One joint round on explicit state: rescale to round `k`, compute the
/// weight signals and quantized estimates, update `y` from the pre-round
/// weights and balances, then update weights and balances.
#[allow(clippy::too_many_arguments)]
pub fn consensus_round(
    g: &Digraph,
    w: &mut WeightState,
    b: &mut BalanceVector,
    c: &mut ConsensusState,
    k: u64,
    schedules: &ConsensusSchedules,
    streams: &mut NodeStreams,
    previous_decreasing: Option<u64>,
) -> Result<EventRecord> {
    crate::balancer::align_to_round(w, b, k, &schedules.step)?;
    let gamma = schedules.step.gamma_of_exponent(w.exponent);
    let mut x = vec![0.0; g.n_nodes()];
    if quantize_all(&c.y, k, &schedules.bits_cons, c.range, streams, &mut x) {
        update_estimates(g, &w.counts, &b.counts, gamma, schedules.alpha.alpha_at(k), &x, &mut c.y);
    }
    crate::balancer::balance_step(g, w, b, k, &schedules.step, &schedules.bits_wb, previous_decreasing)
}

/// Online envelope `[y_i,min(k), y_i,max(k)]` guaranteed to contain every estimate.
///
/// The bound is `max(q_max, y_i(0)) + α(0)‖ε(0)‖₁q* + α(0)S_max(q_max - q_min)
/// + q* Σ_{t<k} α(t)|b_i(t)|` (and symmetrically below), where `S_max` is the
/// largest in-flow of node `i` seen so far.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateEnvelope {
    hi0: Vec<f64>,
    lo0: Vec<f64>,
    offset: f64,
    alpha0: f64,
    range: QuantRange,
    s_max: Vec<f64>,
    drift: Vec<f64>,
}

impl EstimateEnvelope {
    pub fn new(y0: &[f64], range: QuantRange, initial_imbalance: f64, alpha0: f64) -> Self {
        Self {
            hi0: y0.iter().map(|&v| v.max(range.q_max)).collect(),
            lo0: y0.iter().map(|&v| v.min(range.q_min)).collect(),
            offset: alpha0 * initial_imbalance * range.q_star(),
            alpha0,
            range,
            s_max: vec![0.0; y0.len()],
            drift: vec![0.0; y0.len()],
        }
    }

    /// Feeds round `k`'s pre-round in-flows and balances.
    pub fn observe(&mut self, in_flow: &[f64], balance: &[f64], alpha: f64) {
        for i in 0..self.drift.len() {
            self.s_max[i] = self.s_max[i].max(in_flow[i]);
            self.drift[i] += alpha * balance[i].abs() * self.range.q_star();
        }
    }

    pub fn bounds(&self, i: usize) -> (f64, f64) {
        let spread = self.offset + self.alpha0 * self.s_max[i] * self.range.width() + self.drift[i];
        (self.lo0[i] - spread, self.hi0[i] + spread)
    }
}

/// One executed round, described by its starting state.
#[derive(Debug, Clone, PartialEq)]
pub struct ConsensusRecord {
    pub k: u64,
    pub gamma: f64,
    pub alpha: f64,
    pub imbalance: f64,
    pub mse: f64,
    pub sum_y_drift: f64,
    pub event: EventKind,
}

/// Engine for one trial of the joint algorithm.
#[derive(Debug, Clone)]
pub struct ConsensusEngine<'g> {
    balancer: Balancer<'g>,
    state: ConsensusState,
    alpha: AlphaSchedule,
    bits_cons: BitScheduleCons,
    streams: NodeStreams,
    x: Vec<f64>,
    envelope: Option<EstimateEnvelope>,
    envelope_misses: u64,
    scratch: (Vec<f64>, Vec<f64>),
}

impl<'g> ConsensusEngine<'g> {
    pub fn new(
        graph: &'g Digraph,
        c_ij: &[u64],
        y0: Vec<f64>,
        range: QuantRange,
        schedules: ConsensusSchedules,
        streams: NodeStreams,
    ) -> Result<Self> {
        if y0.len() != graph.n_nodes() {
            return Err(Error::invalid(format!(
                "{} initial values for {} nodes",
                y0.len(),
                graph.n_nodes()
            )));
        }
        schedules.bits_cons.pattern().validate_nodes(graph.n_nodes())?;
        let n = graph.n_nodes();
        Ok(Self {
            balancer: Balancer::new(graph, c_ij, schedules.step, schedules.bits_wb)?,
            state: ConsensusState::new(y0, range)?,
            alpha: schedules.alpha,
            bits_cons: schedules.bits_cons,
            streams,
            x: vec![0.0; n],
            envelope: None,
            envelope_misses: 0,
            scratch: (vec![0.0; n], vec![0.0; n]),
        })
    }

    /// Starts tracking the estimate envelope. Must be called before the first round.
    pub fn track_envelope(&mut self) {
        let imb = self.balancer.imbalance().value;
        self.envelope = Some(EstimateEnvelope::new(
            &self.state.y,
            self.state.range,
            imb,
            self.alpha.alpha_at(0),
        ));
    }

    pub fn balancer(&self) -> &Balancer<'g> {
        &self.balancer
    }

    pub fn state(&self) -> &ConsensusState {
        &self.state
    }

    pub fn round(&self) -> u64 {
        self.balancer.round()
    }

    pub fn mse(&self) -> f64 {
        self.state.mse()
    }

    /// Imbalance at the step level of the next round.
    pub fn imbalance(&mut self) -> Result<Imbalance> {
        self.balancer.align()?;
        Ok(self.balancer.imbalance())
    }

    /// Estimates that fell outside the envelope so far (with the float slack
    /// of [`envelope_slack`]).
    pub fn envelope_misses(&self) -> u64 {
        self.envelope_misses
    }

    pub fn envelope(&self) -> Option<&EstimateEnvelope> {
        self.envelope.as_ref()
    }

    pub fn step(&mut self) -> Result<StepOutcome> {
        let outcome = self.balancer.begin_round()?;
        let k = outcome.round;
        let g = self.balancer.graph();
        let gamma = self.balancer.schedule().gamma_of_exponent(self.balancer.balances().exponent);
        let alpha = self.alpha.alpha_at(k);
        let w = &self.balancer.weights().counts;
        let b = &self.balancer.balances().counts;

        if let Some(env) = self.envelope.as_mut() {
            let (in_flow, bal) = &mut self.scratch;
            for i in 0..g.n_nodes() {
                in_flow[i] = g.in_edges(i).iter().map(|&e| w[e] as f64 * gamma).sum();
                bal[i] = b[i] as f64 * gamma;
            }
            env.observe(in_flow, bal, alpha);
        }

        let state = &mut self.state;
        if quantize_all(&state.y, k, &self.bits_cons, state.range, &mut self.streams, &mut self.x) {
            update_estimates(g, w, b, gamma, alpha, &self.x, &mut state.y);
        }
        self.balancer.finish_round(&outcome)?;

        if let Some(env) = &self.envelope {
            let slack = envelope_slack(k + 1, &self.state);
            for (i, &y) in self.state.y.iter().enumerate() {
                let (lo, hi) = env.bounds(i);
                if y < lo - slack || y > hi + slack {
                    self.envelope_misses += 1;
                }
            }
        }
        Ok(outcome)
    }

    /// Executes one round and describes it by its starting state.
    pub fn step_with_record(&mut self) -> Result<ConsensusRecord> {
        let imb = self.imbalance()?;
        let mse = self.mse();
        let drift = self.state.sum_drift();
        let k = self.round();
        let outcome = self.step()?;
        Ok(ConsensusRecord {
            k,
            gamma: self.balancer.schedule().gamma_of_exponent(imb.exponent),
            alpha: self.alpha.alpha_at(k),
            imbalance: imb.value,
            mse,
            sum_y_drift: drift,
            event: outcome.kind,
        })
    }

    /// Runs rounds until `round() == k`.
    pub fn advance_to(&mut self, k: u64) -> Result<()> {
        while self.round() < k {
            self.step()?;
        }
        Ok(())
    }
}

/// Floating-point accumulation budget after `k` rounds:
/// `1e-12 · k · N · max(q*, max|y0|)`.
pub fn accumulation_budget(k: u64, n: usize, q_star: f64, max_abs_y0: f64) -> f64 {
    1e-12 * k as f64 * n as f64 * q_star.max(max_abs_y0)
}

fn envelope_slack(k: u64, state: &ConsensusState) -> f64 {
    let max_abs = state.y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    accumulation_budget(k, state.y.len(), state.range.q_star(), max_abs)
}

/// When `run_consensus` stops.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConsensusStop {
    pub max_rounds: u64,
    pub target_mse: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct ConsensusRun {
    pub trace: Vec<ConsensusRecord>,
    pub final_state: ConsensusState,
    pub final_imbalance: Imbalance,
    pub warnings: Vec<String>,
}

/// Runs one trial, recording every round.
pub fn run_consensus(
    g: &Digraph,
    c_ij: &[u64],
    y0: Vec<f64>,
    range: QuantRange,
    schedules: ConsensusSchedules,
    streams: NodeStreams,
    stop: ConsensusStop,
) -> Result<ConsensusRun> {
    let mut warnings = Vec::new();
    if !g.is_strongly_connected() {
        return Err(Error::invalid("graph is not strongly connected"));
    }
    let mut engine = ConsensusEngine::new(g, c_ij, y0, range, schedules, streams)?;
    if !engine.state().is_informative() {
        warnings.push(format!(
            "initial average {} lies outside [{}, {}]; convergence is not guaranteed",
            engine.state().ybar0(),
            range.q_min(),
            range.q_max()
        ));
    }
    let mut trace = Vec::new();
    while engine.round() < stop.max_rounds {
        if stop.target_mse.is_some_and(|t| engine.mse() <= t) {
            break;
        }
        trace.push(engine.step_with_record()?);
    }
    Ok(ConsensusRun {
        final_imbalance: engine.imbalance()?,
        final_state: engine.state,
        trace,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::balancer::initial_state;
    use crate::numerics::{BitPattern, BitScheme};

    fn unit() -> QuantRange {
        QuantRange::new(0.0, 1.0).unwrap()
    }

    fn schedules(scheme: BitScheme) -> ConsensusSchedules {
        let (bits_wb, bits_cons) = scheme.schedules().unwrap();
        ConsensusSchedules {
            step: StepSchedule::new(1.0, 2, 1).unwrap(),
            alpha: AlphaSchedule::Harmonic,
            bits_wb,
            bits_cons,
        }
    }

    #[test]
    fn clipping() {
        assert_eq!(clip(0.3, unit()), 0.3);
        assert_eq!(clip(-2.0, unit()), 0.0);
        assert_eq!(clip(7.0, unit()), 1.0);
    }

    #[test]
    fn grid_spacing() {
        assert_eq!(quant_step(1, unit()).unwrap(), 1.0);
        assert!((quant_step(3, unit()).unwrap() - 1.0 / 7.0).abs() < 1e-16);
        let r = QuantRange::new(-1.0, 1.0).unwrap();
        assert!((quant_step(2, r).unwrap() - 2.0 / 3.0).abs() < 1e-16);
        assert!(quant_step(0, unit()).is_err());
        assert!(QuantRange::new(1.0, 1.0).is_err());
    }

    #[test]
    fn quantizer_branches() {
        let d = quantize_with_uniform(0.3, 1, unit(), 0.29);
        assert_eq!(d.x, 1.0);
        assert!((d.p - 0.3).abs() < 1e-15);
        assert_eq!(quantize_with_uniform(0.3, 1, unit(), 0.31).x, 0.0);
        // grid points map to themselves whatever the draw
        for u in [0.0, 0.5, 0.999] {
            let d = quantize_with_uniform(1.0, 3, unit(), u);
            assert_eq!((d.x, d.p), (1.0, 0.0));
            assert_eq!(quantize_with_uniform(0.0, 2, unit(), u).x, 0.0);
        }
        let d = quantize_with_uniform(0.5, 3, unit(), 0.9);
        assert!((d.p - 0.5).abs() < 1e-12);
        assert!((d.x - 3.0 / 7.0).abs() < 1e-15);
        assert!((quantize_with_uniform(0.5, 3, unit(), 0.1).x - 4.0 / 7.0).abs() < 1e-15);
    }

    #[test]
    fn quantizer_mean_half_three_bits() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let draws = 100_000;
        let sum: f64 = (0..draws)
            .map(|_| quantize_prob(0.5, 3, unit(), &mut rng).unwrap().x)
            .sum();
        let mean = sum / draws as f64;
        // x takes 3/7 or 4/7 with equal odds: sd = 1/14
        let sigma = 1.0 / 14.0;
        assert!((mean - 0.5).abs() < 3.0 * sigma / (draws as f64).sqrt(), "mean {mean}");
    }

    #[test]
    fn mse_formula() {
        assert_eq!(mse(&[0.4; 5], 0.4), 0.0);
        assert_eq!(mse(&[0.0, 1.0], 0.5), 0.25);
        assert_eq!(mse(&[0.0, 0.0, 3.0], 1.0), 2.0);
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let v = [1e16, 1.0, -1e16, 1.0];
        assert_eq!(compensated_sum(v), 2.0);
    }

    #[test]
    fn two_node_hand_round() {
        let g = Digraph::from_edges(2, [(0, 1), (1, 0)]).unwrap();
        let (mut w, mut b) = initial_state(&g, &[1, 1]).unwrap();
        let mut c = ConsensusState::new(vec![0.0, 1.0], unit()).unwrap();
        let mut streams = NodeStreams::new(1, 0, 2);
        let s = schedules(BitScheme::Simultaneous);
        let rec = consensus_round(&g, &mut w, &mut b, &mut c, 0, &s, &mut streams, None).unwrap();
        assert_eq!(c.y, vec![1.0, 0.0]);
        assert_eq!(c.sum_drift(), 0.0);
        assert_eq!(rec.kind, EventKind::Idle);
    }

    #[test]
    fn silent_consensus_channel_keeps_estimates() {
        let g = Digraph::from_edges(3, [(0, 1), (1, 2), (2, 0), (0, 2)]).unwrap();
        let (mut w, mut b) = initial_state(&g, &[1; 4]).unwrap();
        let mut c = ConsensusState::new(vec![0.2, 0.9, 0.4], unit()).unwrap();
        let mut streams = NodeStreams::new(1, 0, 3);
        let s = schedules(BitScheme::Alternating);
        // round 1 is odd: weight bit only
        consensus_round(&g, &mut w, &mut b, &mut c, 1, &s, &mut streams, None).unwrap();
        assert_eq!(c.y, vec![0.2, 0.9, 0.4]);
    }

    #[test]
    fn consensual_grid_state_is_fixed() {
        let g = Digraph::from_edges(3, [(0, 1), (1, 2), (2, 0)]).unwrap();
        let (bits_wb, bits_cons) = BitScheme::EqualSplit(4).schedules().unwrap();
        let s = ConsensusSchedules {
            step: StepSchedule::new(1.0, 2, 1).unwrap(),
            alpha: AlphaSchedule::Harmonic,
            bits_wb,
            bits_cons,
        };
        // 2/3 is on the 2-bit grid of [0, 1]
        let y = 2.0 / 3.0;
        let run = run_consensus(
            &g,
            &[1; 3],
            vec![y; 3],
            unit(),
            s,
            NodeStreams::new(3, 0, 3),
            ConsensusStop {
                max_rounds: 200,
                target_mse: None,
            },
        )
        .unwrap();
        assert!(run.trace.iter().all(|r| r.mse == 0.0));
        assert_eq!(run.final_state.y, vec![y; 3]);
        assert!(run.warnings.is_empty());
    }

    #[test]
    fn engine_matches_free_round() {
        let g = Digraph::from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2), (3, 1)]).unwrap();
        let c_ij = [2, 1, 3, 1, 1, 2];
        let y0 = vec![0.1, 0.95, -0.3, 0.6];
        let s = schedules(BitScheme::OneBitWb(4));
        let mut engine =
            ConsensusEngine::new(&g, &c_ij, y0.clone(), unit(), s.clone(), NodeStreams::new(9, 2, 4)).unwrap();
        let (mut w, mut b) = initial_state(&g, &c_ij).unwrap();
        let mut c = ConsensusState::new(y0, unit()).unwrap();
        let mut streams = NodeStreams::new(9, 2, 4);
        let mut last = None;
        for k in 0..300 {
            let rec = consensus_round(&g, &mut w, &mut b, &mut c, k, &s, &mut streams, last).unwrap();
            last = rec.last_decreasing;
            let out = engine.step().unwrap();
            assert_eq!(out.kind, rec.kind);
            assert_eq!(engine.state().y, c.y);
        }
    }

    #[test]
    fn uninformative_average_warns() {
        let g = Digraph::from_edges(2, [(0, 1), (1, 0)]).unwrap();
        let run = run_consensus(
            &g,
            &[1, 1],
            vec![3.0, 5.0],
            unit(),
            schedules(BitScheme::Simultaneous),
            NodeStreams::new(0, 0, 2),
            ConsensusStop {
                max_rounds: 5,
                target_mse: None,
            },
        )
        .unwrap();
        assert_eq!(run.warnings.len(), 1);
    }

    #[test]
    fn envelope_contains_estimates() {
        let g = Digraph::from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2), (1, 3)]).unwrap();
        let y0 = vec![-2.0, 0.5, 3.0, 0.1];
        let s = schedules(BitScheme::Alternating);
        let mut engine = ConsensusEngine::new(&g, &[1; 6], y0, unit(), s, NodeStreams::new(5, 0, 4)).unwrap();
        engine.track_envelope();
        engine.advance_to(5000).unwrap();
        assert_eq!(engine.envelope_misses(), 0);
        let (lo, hi) = engine.envelope().unwrap().bounds(2);
        assert!(lo < 0.0 && hi >= 3.0);
    }

    #[test]
    fn custom_heterogeneous_budgets_run() {
        let g = Digraph::from_edges(3, [(0, 1), (1, 2), (2, 0)]).unwrap();
        let cons = BitPattern::uniform(vec![1, 0]).with_node(1, vec![3, 0]);
        let s = ConsensusSchedules {
            step: StepSchedule::new(1.0, 2, 1).unwrap(),
            alpha: AlphaSchedule::Harmonic,
            bits_wb: BitScheduleWb::new(BitPattern::uniform(vec![0, 1])).unwrap(),
            bits_cons: BitScheduleCons::new(cons).unwrap(),
        };
        let mut e = ConsensusEngine::new(&g, &[1; 3], vec![0.0, 0.5, 1.0], unit(), s, NodeStreams::new(1, 1, 3)).unwrap();
        e.advance_to(2000).unwrap();
        assert!(e.mse() < 0.05);
        assert!(e.state().sum_drift().abs() < 1e-9);
    }
}
