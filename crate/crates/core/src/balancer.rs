//! Quantized weight balancing over a strongly connected digraph.
//!
//! Each round every node `i` broadcasts the integer signal
//! `n_i = min(floor(max(b_i, 0) / (d_i⁺ γ)), 2^B_i - 1)`. Every receiver raises
//! the weight of the incoming edge by `γ n_i`, so the sender's balance drops by
//! `d_i⁺ γ n_i` and each out-neighbor's balance rises by `γ n_i`. All signals
//! are computed from the pre-round state, then all updates are applied.
//!
//! All quantities are stored as integer counts of the current step size, see
//! [`crate::numerics`].

pub mod audit;

use crate::digraph::Digraph;
use crate::error::{Error, Result};
use crate::numerics::{rescale_counts, BitScheduleWb, StepSchedule};

/// Edge weights as counts of `γ(k)`, indexed by edge id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightState {
    pub counts: Vec<i128>,
    pub exponent: u32,
}

/// Node balances `b_i = S_i⁻ - S_i⁺` as counts of `γ(k)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BalanceVector {
    pub counts: Vec<i128>,
    pub exponent: u32,
}

impl BalanceVector {
    pub fn total_imbalance_count(&self) -> i128 {
        self.counts.iter().map(|c| c.abs()).sum()
    }

    /// Nodes with nonnegative balance.
    pub fn nonnegative_set(&self) -> Vec<bool> {
        self.counts.iter().map(|&c| c >= 0).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EventKind {
    /// Some sender has an out-neighbor with negative balance.
    Decreasing,
    /// Somebody sends, but no sender reaches a negative-balance node.
    Update,
    /// Nobody sends.
    Idle,
}

impl EventKind {
    pub fn code(&self) -> &'static str {
        match self {
            EventKind::Decreasing => "D",
            EventKind::Update => "U",
            EventKind::Idle => "-",
        }
    }

    pub fn from_code(s: &str) -> Option<Self> {
        match s {
            "D" => Some(EventKind::Decreasing),
            "U" => Some(EventKind::Update),
            "-" => Some(EventKind::Idle),
            _ => None,
        }
    }
}

/// Classification of one round.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventRecord {
    pub round: u64,
    pub kind: EventKind,
    /// Nodes with `n_i > 0`.
    pub senders: Vec<usize>,
    /// `n_i` per node. The balance node `i` hands out is `γ n_i` per out-edge.
    pub signals: Vec<u64>,
    /// Most recent round (this one included) with a decreasing event.
    pub last_decreasing: Option<u64>,
}

/// Total imbalance `Σ |b_i|` in exact form plus a float view.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Imbalance {
    pub count: i128,
    pub exponent: u32,
    pub value: f64,
}

/// Weights `c_ij γ0` on every edge, at exponent 0.
pub fn initial_state(g: &Digraph, c_ij: &[u64]) -> Result<(WeightState, BalanceVector)> {
    if c_ij.len() != g.edge_count() {
        return Err(Error::invalid(format!(
            "expected {} initial weight multiples, got {}",
            g.edge_count(),
            c_ij.len()
        )));
    }
    if let Some(e) = c_ij.iter().position(|&c| c == 0) {
        let (i, j) = g.edges()[e];
        return Err(Error::invalid(format!("initial weight multiple on edge ({i},{j}) must be >= 1")));
    }
    let weights = WeightState {
        counts: c_ij.iter().map(|&c| c as i128).collect(),
        exponent: 0,
    };
    let balances = BalanceVector {
        counts: balances_from_weights(g, &weights.counts)?,
        exponent: 0,
    };
    Ok((weights, balances))
}

/// `b_i = Σ_{j∈N_i⁻} a_ij - Σ_{j∈N_i⁺} a_ji`, in counts.
pub fn balances_from_weights(g: &Digraph, weights: &[i128]) -> Result<Vec<i128>> {
    let mut b = vec![0i128; g.n_nodes()];
    for (e, &(src, dst)) in g.edges().iter().enumerate() {
        let w = weights[e];
        b[dst] = b[dst].checked_add(w).ok_or(Error::Overflow("balance"))?;
        b[src] = b[src].checked_sub(w).ok_or(Error::Overflow("balance"))?;
    }
    Ok(b)
}

/// `n_i = min(floor(max(count, 0) / d_out), 2^bits - 1)`.
#[inline]
pub fn compute_signal(balance_count: i128, d_out: usize, bits: u32) -> u64 {
    if bits == 0 || balance_count <= 0 || d_out == 0 {
        return 0;
    }
    let cap = (1u64 << bits) - 1;
    let q = balance_count / d_out as i128;
    if q >= cap as i128 {
        cap
    } else {
        q as u64
    }
}

/// Kind of the round and number of senders, from the pre-round balances.
fn classify_kind(g: &Digraph, pre_balances: &[i128], signals: &[u64]) -> (EventKind, usize) {
    let mut senders = 0;
    let mut decreasing = false;
    for (i, &n) in signals.iter().enumerate() {
        if n == 0 {
            continue;
        }
        senders += 1;
        if !decreasing {
            decreasing = g.out_neighbors(i).iter().any(|&j| pre_balances[j] < 0);
        }
    }
    let kind = match (senders, decreasing) {
        (0, _) => EventKind::Idle,
        (_, true) => EventKind::Decreasing,
        _ => EventKind::Update,
    };
    (kind, senders)
}

/// Classifies a round given its pre-round balances and signals.
pub fn classify_event(
    g: &Digraph,
    pre_balances: &[i128],
    signals: &[u64],
    round: u64,
    previous_decreasing: Option<u64>,
) -> EventRecord {
    let (kind, _) = classify_kind(g, pre_balances, signals);
    EventRecord {
        round,
        kind,
        senders: signals
            .iter()
            .enumerate()
            .filter(|(_, &n)| n > 0)
            .map(|(i, _)| i)
            .collect(),
        signals: signals.to_vec(),
        last_decreasing: if kind == EventKind::Decreasing {
            Some(round)
        } else {
            previous_decreasing
        },
    }
}

pub fn imbalance_l1(b: &BalanceVector, s: &StepSchedule) -> Imbalance {
    let count = b.total_imbalance_count();
    Imbalance {
        count,
        exponent: b.exponent,
        value: count as f64 * s.gamma_of_exponent(b.exponent),
    }
}

/// Brings both states to the step level of round `k`.
pub fn align_to_round(w: &mut WeightState, b: &mut BalanceVector, k: u64, s: &StepSchedule) -> Result<()> {
    let target = s.exponent_at(k);
    rescale_counts(&mut w.counts, w.exponent, target, s.c1())?;
    w.exponent = target;
    rescale_counts(&mut b.counts, b.exponent, target, s.c1())?;
    b.exponent = target;
    Ok(())
}

fn compute_signals_into(g: &Digraph, b: &[i128], k: u64, bits: &BitScheduleWb, out: &mut [u64]) {
    for (i, n) in out.iter_mut().enumerate() {
        *n = compute_signal(b[i], g.out_degree(i), bits.bits(i, k));
    }
}

fn apply_signals(g: &Digraph, w: &mut [i128], b: &mut [i128], signals: &[u64]) -> Result<()> {
    for (e, &(src, dst)) in g.edges().iter().enumerate() {
        let n = signals[src];
        if n == 0 {
            continue;
        }
        let n = n as i128;
        w[e] = w[e].checked_add(n).ok_or(Error::Overflow("weight"))?;
        b[dst] = b[dst].checked_add(n).ok_or(Error::Overflow("balance"))?;
        b[src] = b[src].checked_sub(n).ok_or(Error::Overflow("balance"))?;
    }
    Ok(())
}

/// One synchronous round. Rescales to round `k`'s step level first, then
/// computes the signals, classifies the round and applies the updates.
pub fn balance_step(
    g: &Digraph,
    w: &mut WeightState,
    b: &mut BalanceVector,
    k: u64,
    s: &StepSchedule,
    bits: &BitScheduleWb,
    previous_decreasing: Option<u64>,
) -> Result<EventRecord> {
    align_to_round(w, b, k, s)?;
    let mut signals = vec![0u64; g.n_nodes()];
    compute_signals_into(g, &b.counts, k, bits, &mut signals);
    let record = classify_event(g, &b.counts, &signals, k, previous_decreasing);
    apply_signals(g, &mut w.counts, &mut b.counts, &signals)?;
    Ok(record)
}

/// Distance-ranked positive-balance levels and the mixed-radix potential
/// built on them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PotentialSnapshot {
    /// `levels[n]` holds the nonnegative-balance nodes `n` hops from the
    /// nearest negative-balance node. `levels[0]` is always empty.
    pub levels: Vec<Vec<usize>>,
    /// `radices[n] = Π_{m=n+1}^{n_max} (1 + Σ_{i∈levels[m]} d_i⁺)`.
    pub radices: Vec<u128>,
    pub value: u128,
    pub n_max: usize,
}

/// Evaluates the potential `U = Σ_n U_n Σ_{i∈V_n} min(b_i/γ, d_i⁺)` for the
/// current balances (counts are already normalized by `γ`).
pub fn compute_potential(g: &Digraph, b: &BalanceVector) -> Result<PotentialSnapshot> {
    let negative: Vec<usize> = (0..g.n_nodes()).filter(|&i| b.counts[i] < 0).collect();
    if negative.is_empty() {
        return Err(Error::DiagnosticUnavailable("no node has negative balance"));
    }
    let dist = g.distances_to_set(&negative)?;
    let mut levels: Vec<Vec<usize>> = vec![Vec::new()];
    for i in (0..g.n_nodes()).filter(|&i| b.counts[i] >= 0) {
        let n = dist[i].ok_or(Error::DiagnosticUnavailable(
            "a nonnegative-balance node cannot reach the negative set",
        ))?;
        if levels.len() <= n {
            levels.resize(n + 1, Vec::new());
        }
        levels[n].push(i);
    }
    let n_max = levels.len() - 1;
    let mut radices = vec![1u128; n_max + 1];
    for n in (0..n_max).rev() {
        let width: u128 = 1 + levels[n + 1].iter().map(|&i| g.out_degree(i) as u128).sum::<u128>();
        radices[n] = radices[n + 1]
            .checked_mul(width)
            .ok_or(Error::Overflow("potential radix"))?;
    }
    let mut value = 0u128;
    for n in 1..=n_max {
        let digit: u128 = levels[n]
            .iter()
            .map(|&i| b.counts[i].min(g.out_degree(i) as i128) as u128)
            .sum();
        value = digit
            .checked_mul(radices[n])
            .and_then(|v| v.checked_add(value))
            .ok_or(Error::Overflow("potential"))?;
    }
    Ok(PotentialSnapshot {
        levels,
        radices,
        value,
        n_max,
    })
}

/// `N^(2N)`, the a-priori cap on the potential, if it fits.
pub fn potential_cap(n_nodes: usize) -> Option<u128> {
    (n_nodes as u128).checked_pow(2 * n_nodes as u32)
}

/// Summary of one executed round.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepOutcome {
    pub round: u64,
    pub kind: EventKind,
    pub n_senders: usize,
}

/// Stateful engine running the weight-balancing rounds on one graph.
#[derive(Debug, Clone)]
pub struct Balancer<'g> {
    graph: &'g Digraph,
    schedule: StepSchedule,
    bits: BitScheduleWb,
    c_ij: Vec<u64>,
    weights: WeightState,
    balances: BalanceVector,
    signals: Vec<u64>,
    round: u64,
    last_decreasing: Option<u64>,
}

impl<'g> Balancer<'g> {
    pub fn new(graph: &'g Digraph, c_ij: &[u64], schedule: StepSchedule, bits: BitScheduleWb) -> Result<Self> {
        bits.pattern().validate_nodes(graph.n_nodes())?;
        let (weights, balances) = initial_state(graph, c_ij)?;
        Ok(Self {
            graph,
            schedule,
            bits,
            c_ij: c_ij.to_vec(),
            weights,
            balances,
            signals: vec![0; graph.n_nodes()],
            round: 0,
            last_decreasing: None,
        })
    }

    /// Same multiple `c` on every edge.
    pub fn with_uniform_weights(graph: &'g Digraph, c: u64, schedule: StepSchedule, bits: BitScheduleWb) -> Result<Self> {
        Self::new(graph, &vec![c; graph.edge_count()], schedule, bits)
    }

    pub fn graph(&self) -> &'g Digraph {
        self.graph
    }

    pub fn schedule(&self) -> &StepSchedule {
        &self.schedule
    }

    pub fn bits(&self) -> &BitScheduleWb {
        &self.bits
    }

    pub fn initial_multiples(&self) -> &[u64] {
        &self.c_ij
    }

    /// Index of the next round to execute.
    pub fn round(&self) -> u64 {
        self.round
    }

    pub fn weights(&self) -> &WeightState {
        &self.weights
    }

    pub fn balances(&self) -> &BalanceVector {
        &self.balances
    }

    /// Signals of the most recent round.
    pub fn signals(&self) -> &[u64] {
        &self.signals
    }

    pub fn last_decreasing(&self) -> Option<u64> {
        self.last_decreasing
    }

    pub fn imbalance(&self) -> Imbalance {
        imbalance_l1(&self.balances, &self.schedule)
    }

    /// Rescales the state to the step level of the next round.
    pub fn align(&mut self) -> Result<()> {
        align_to_round(&mut self.weights, &mut self.balances, self.round, &self.schedule)
    }

    /// Aligns, computes this round's signals and classifies the round
    /// without touching the state.
    pub(crate) fn begin_round(&mut self) -> Result<StepOutcome> {
        self.align()?;
        compute_signals_into(self.graph, &self.balances.counts, self.round, &self.bits, &mut self.signals);
        let (kind, n_senders) = classify_kind(self.graph, &self.balances.counts, &self.signals);
        Ok(StepOutcome {
            round: self.round,
            kind,
            n_senders,
        })
    }

    /// Applies the signals computed by `begin_round` and advances the round.
    pub(crate) fn finish_round(&mut self, outcome: &StepOutcome) -> Result<()> {
        apply_signals(self.graph, &mut self.weights.counts, &mut self.balances.counts, &self.signals)?;
        if outcome.kind == EventKind::Decreasing {
            self.last_decreasing = Some(outcome.round);
        }
        self.round += 1;
        Ok(())
    }

    pub fn step(&mut self) -> Result<StepOutcome> {
        let outcome = self.begin_round()?;
        self.finish_round(&outcome)?;
        Ok(outcome)
    }

    /// Full record of the round, including per-node signals.
    pub fn step_with_record(&mut self) -> Result<EventRecord> {
        let previous = self.last_decreasing;
        let outcome = self.begin_round()?;
        let record = classify_event(self.graph, &self.balances.counts, &self.signals, outcome.round, previous);
        self.finish_round(&outcome)?;
        Ok(record)
    }

    pub fn potential(&self) -> Result<PotentialSnapshot> {
        compute_potential(self.graph, &self.balances)
    }
}

/// When `run_balancing` stops.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StopRule {
    pub max_rounds: u64,
    /// Stop once `‖ε‖₁` is at or below this value.
    pub imbalance_tol: Option<f64>,
}

impl StopRule {
    pub fn rounds(max_rounds: u64) -> Self {
        Self {
            max_rounds,
            imbalance_tol: None,
        }
    }
}

/// One executed round, described by the state it started from.
#[derive(Debug, Clone, PartialEq)]
pub struct BalanceRecord {
    pub k: u64,
    pub exponent: u32,
    pub gamma: f64,
    pub imbalance_count: i128,
    pub imbalance: f64,
    pub event: EventKind,
    pub n_senders: usize,
    pub potential: Option<u128>,
}

#[derive(Debug, Clone)]
pub struct BalanceRun {
    pub trace: Vec<BalanceRecord>,
    pub weights: WeightState,
    pub balances: BalanceVector,
    /// `‖ε‖₁` of the state the run stopped at.
    pub final_imbalance: Imbalance,
}

/// Runs rounds until `stop` fires. With `diag_potential`, each record carries
/// the potential of its starting state (empty once the graph is balanced).
pub fn run_balancing(
    g: &Digraph,
    c_ij: &[u64],
    s: StepSchedule,
    bits: BitScheduleWb,
    stop: StopRule,
    diag_potential: bool,
) -> Result<BalanceRun> {
    let mut engine = Balancer::new(g, c_ij, s, bits)?;
    let mut trace = Vec::new();
    while engine.round() < stop.max_rounds {
        engine.align()?;
        let imb = engine.imbalance();
        if stop.imbalance_tol.is_some_and(|tol| imb.value <= tol) {
            break;
        }
        let potential = match diag_potential {
            true => match engine.potential() {
                Ok(p) => Some(p.value),
                Err(Error::DiagnosticUnavailable(_)) => None,
                Err(e) => return Err(e),
            },
            false => None,
        };
        let outcome = engine.step()?;
        trace.push(BalanceRecord {
            k: outcome.round,
            exponent: imb.exponent,
            gamma: s.gamma_of_exponent(imb.exponent),
            imbalance_count: imb.count,
            imbalance: imb.value,
            event: outcome.kind,
            n_senders: outcome.n_senders,
            potential,
        });
    }
    engine.align()?;
    Ok(BalanceRun {
        trace,
        final_imbalance: engine.imbalance(),
        weights: engine.weights.clone(),
        balances: engine.balances.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{BitPattern, BitScheme};

    /// 1 -> 2 -> 3 -> 1 plus 1 -> 3 (zero-based here).
    fn four_edge() -> Digraph {
        Digraph::from_edges(3, [(0, 1), (1, 2), (2, 0), (0, 2)]).unwrap()
    }

    fn one_bit() -> BitScheduleWb {
        BitScheduleWb::new(BitPattern::constant(1)).unwrap()
    }

    fn unit_steps() -> StepSchedule {
        StepSchedule::new(1.0, 2, 1).unwrap()
    }

    #[test]
    fn initial_balances_four_edge() {
        let g = four_edge();
        let (w, b) = initial_state(&g, &[1; 4]).unwrap();
        assert_eq!(w.counts, vec![1; 4]);
        assert_eq!(b.counts, vec![-1, 0, 1]);
        assert_eq!(imbalance_l1(&b, &unit_steps()).value, 2.0);
    }

    #[test]
    fn cycle_starts_balanced() {
        let g = Digraph::from_edges(5, (0..5).map(|i| (i, (i + 1) % 5))).unwrap();
        let (_, b) = initial_state(&g, &[3; 5]).unwrap();
        assert!(b.counts.iter().all(|&c| c == 0));
    }

    #[test]
    fn initial_state_rejects_zero_multiples() {
        let g = four_edge();
        assert!(initial_state(&g, &[1, 0, 1, 1]).is_err());
        assert!(initial_state(&g, &[1, 1]).is_err());
    }

    #[test]
    fn signal_formula() {
        assert_eq!(compute_signal(5, 2, 1), 1);
        assert_eq!(compute_signal(-3, 2, 4), 0);
        assert_eq!(compute_signal(5, 2, 3), 2);
        assert_eq!(compute_signal(5, 2, 0), 0);
        assert_eq!(compute_signal(1 << 40, 1, 32), u32::MAX as u64);
    }

    #[test]
    fn one_round_on_four_edge_graph() {
        let g = four_edge();
        let (mut w, mut b) = initial_state(&g, &[1; 4]).unwrap();
        let rec = balance_step(&g, &mut w, &mut b, 0, &unit_steps(), &one_bit(), None).unwrap();
        assert_eq!(rec.signals, vec![0, 0, 1]);
        assert_eq!(rec.senders, vec![2]);
        assert_eq!(rec.kind, EventKind::Decreasing);
        assert_eq!(rec.last_decreasing, Some(0));
        assert_eq!(b.counts, vec![0, 0, 0]);
        // weight on edge 3 -> 1, i.e. (2, 0)
        assert_eq!(w.counts[g.edge_id(2, 0).unwrap()], 2);
        assert_eq!(b.total_imbalance_count(), 0);
    }

    #[test]
    fn balanced_state_is_a_fixed_point() {
        let g = Digraph::from_edges(3, [(0, 1), (1, 2), (2, 0)]).unwrap();
        let (mut w, mut b) = initial_state(&g, &[2; 3]).unwrap();
        let before = (w.clone(), b.clone());
        let rec = balance_step(&g, &mut w, &mut b, 0, &unit_steps(), &one_bit(), None).unwrap();
        assert_eq!(rec.kind, EventKind::Idle);
        assert_eq!((w, b), before);
    }

    #[test]
    fn classification_rules() {
        let g = four_edge();
        let none = classify_event(&g, &[-1, 0, 1], &[0, 0, 0], 3, Some(1));
        assert_eq!(none.kind, EventKind::Idle);
        assert_eq!(none.last_decreasing, Some(1));
        let dec = classify_event(&g, &[-1, 0, 1], &[0, 0, 1], 4, Some(1));
        assert_eq!(dec.kind, EventKind::Decreasing);
        assert_eq!(dec.last_decreasing, Some(4));
        // node 1 sends to node 2, which is nonnegative.
        let upd = classify_event(&g, &[-2, 2, 0], &[0, 1, 0], 5, None);
        assert_eq!(upd.kind, EventKind::Update);
        assert_eq!(upd.senders, vec![1]);
    }

    #[test]
    fn imbalance_at_higher_exponent() {
        let b = BalanceVector {
            counts: vec![-2, 1, 1],
            exponent: 1,
        };
        let imb = imbalance_l1(&b, &unit_steps());
        assert_eq!((imb.count, imb.exponent, imb.value), (4, 1, 2.0));
        let zero = BalanceVector {
            counts: vec![0; 3],
            exponent: 0,
        };
        assert_eq!(imbalance_l1(&zero, &unit_steps()).value, 0.0);
    }

    #[test]
    fn potential_four_edge_graph() {
        let g = four_edge();
        let (_, b) = initial_state(&g, &[1; 4]).unwrap();
        let p = compute_potential(&g, &b).unwrap();
        assert_eq!(p.levels, vec![vec![], vec![2], vec![1]]);
        assert_eq!(p.n_max, 2);
        assert_eq!(p.radices[2], 1);
        assert_eq!(p.radices[1], 2);
        assert_eq!(p.value, 2);
        assert!(p.value < potential_cap(3).unwrap());
        assert_eq!(potential_cap(3), Some(729));
    }

    #[test]
    fn potential_zero_when_positive_side_is_empty_handed() {
        let g = four_edge();
        let b = BalanceVector {
            counts: vec![-1, 0, 0],
            exponent: 0,
        };
        assert_eq!(compute_potential(&g, &b).unwrap().value, 0);
        let balanced = BalanceVector {
            counts: vec![0; 3],
            exponent: 0,
        };
        assert!(matches!(
            compute_potential(&g, &balanced),
            Err(Error::DiagnosticUnavailable(_))
        ));
    }

    #[test]
    fn run_terminates_after_one_round() {
        let g = four_edge();
        let stop = StopRule {
            max_rounds: 100,
            imbalance_tol: Some(0.0),
        };
        let run = run_balancing(&g, &[1; 4], unit_steps(), one_bit(), stop, true).unwrap();
        assert_eq!(run.trace.len(), 1);
        assert_eq!(run.trace[0].potential, Some(2));
        assert_eq!(run.trace[0].event, EventKind::Decreasing);
        assert_eq!(run.final_imbalance.count, 0);
    }

    #[test]
    fn balanced_input_stops_immediately() {
        let g = Digraph::from_edges(3, [(0, 1), (1, 2), (2, 0)]).unwrap();
        let stop = StopRule {
            max_rounds: 100,
            imbalance_tol: Some(0.0),
        };
        let run = run_balancing(&g, &[1; 3], unit_steps(), one_bit(), stop, false).unwrap();
        assert!(run.trace.is_empty());
    }

    #[test]
    fn engine_matches_free_functions() {
        let g = Digraph::from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2), (1, 3), (0, 3)]).unwrap();
        let (wb, _) = BitScheme::Alternating.schedules().unwrap();
        let s = unit_steps();
        let mut engine = Balancer::with_uniform_weights(&g, 1, s, wb.clone()).unwrap();
        let (mut w, mut b) = initial_state(&g, &[1; 7]).unwrap();
        let mut last = None;
        for k in 0..200 {
            let rec = balance_step(&g, &mut w, &mut b, k, &s, &wb, last).unwrap();
            last = rec.last_decreasing;
            let got = engine.step_with_record().unwrap();
            assert_eq!(got, rec);
            assert_eq!(engine.balances(), &b);
            assert_eq!(engine.weights(), &w);
        }
    }
}
