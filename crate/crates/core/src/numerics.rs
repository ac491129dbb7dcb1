//! Step-size schedules, bit budgets and the scaled-integer convention.
//!
//! Weights and balances are never stored as floats. A value `v` at round `k`
//! is held as an integer count with `v = count * γ(k)`, where
//! `γ(k) = γ0 / c1^n(k)`. When the schedule moves from exponent `n` to `n+1`
//! every count is multiplied by `c1`, which keeps the represented value fixed.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Assumption, Error, Result};

/// Largest per-round bit budget accepted by either channel.
pub const MAX_BITS: u32 = 32;

/// Piecewise-constant diminishing step size `γ(k) = γ0 / c1^n` where `n` is
/// the unique integer with `(c1^n - 1) c2 <= k <= (c1^(n+1) - 1) c2 - 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepSchedule {
    gamma0: f64,
    c1: u32,
    c2: u64,
}

impl StepSchedule {
    pub fn new(gamma0: f64, c1: u32, c2: u64) -> Result<Self> {
        if !(gamma0.is_finite() && gamma0 > 0.0) {
            return Err(Error::assumption(
                Assumption::StepSizeRule,
                format!("gamma0 must be positive and finite, got {gamma0}"),
            ));
        }
        if c1 < 2 {
            return Err(Error::assumption(
                Assumption::StepSizeRule,
                format!("c1 must be an integer >= 2, got {c1}"),
            ));
        }
        if c2 < 1 {
            return Err(Error::assumption(Assumption::StepSizeRule, "c2 must be a positive integer"));
        }
        Ok(Self { gamma0, c1, c2 })
    }

    pub fn gamma0(&self) -> f64 {
        self.gamma0
    }

    pub fn c1(&self) -> u32 {
        self.c1
    }

    pub fn c2(&self) -> u64 {
        self.c2
    }

    /// First round of step level `n`, i.e. `(c1^n - 1) c2`. Saturates.
    pub fn level_start(&self, n: u32) -> u64 {
        let p = (self.c1 as u128).checked_pow(n).unwrap_or(u128::MAX);
        let start = (p - 1).saturating_mul(self.c2 as u128);
        start.min(u64::MAX as u128) as u64
    }

    /// Step level in force at round `k`.
    pub fn exponent_at(&self, k: u64) -> u32 {
        let mut n = 0;
        while self.level_start(n + 1) <= k {
            n += 1;
        }
        n
    }

    pub fn gamma_of_exponent(&self, n: u32) -> f64 {
        self.gamma0 / (self.c1 as f64).powi(n as i32)
    }

    /// `(n, γ(k))` for round `k`.
    pub fn gamma_at(&self, k: u64) -> (u32, f64) {
        let n = self.exponent_at(k);
        (n, self.gamma_of_exponent(n))
    }
}

/// Multiplies every count by `c1^(new - old)`, keeping `count * γ` fixed.
pub fn rescale_counts(counts: &mut [i128], old_exponent: u32, new_exponent: u32, c1: u32) -> Result<()> {
    if new_exponent < old_exponent {
        return Err(Error::invalid(format!(
            "step exponent cannot decrease ({old_exponent} -> {new_exponent})"
        )));
    }
    if new_exponent == old_exponent {
        return Ok(());
    }
    let factor = (c1 as i128)
        .checked_pow(new_exponent - old_exponent)
        .ok_or(Error::Overflow("rescale factor"))?;
    for c in counts.iter_mut() {
        *c = c.checked_mul(factor).ok_or(Error::Overflow("rescaled count"))?;
    }
    Ok(())
}

/// Consensus gain `α(k)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AlphaSchedule {
    /// `α(k) = 1 / (k + 1)`.
    #[default]
    Harmonic,
}

impl AlphaSchedule {
    pub fn alpha_at(&self, k: u64) -> f64 {
        match self {
            AlphaSchedule::Harmonic => 1.0 / (k as f64 + 1.0),
        }
    }
}

impl FromStr for AlphaSchedule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "harmonic" => Ok(AlphaSchedule::Harmonic),
            other => Err(Error::assumption(
                Assumption::ConsensusGain,
                format!("unknown alpha schedule `{other}` (expected `harmonic`)"),
            )),
        }
    }
}

/// Per-node cyclic bit patterns: node `i` spends `cycle_i[k mod len]` bits at
/// round `k`. Nodes without their own cycle use the default one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitPattern {
    default: Option<Vec<u32>>,
    nodes: Vec<Option<Vec<u32>>>,
}

impl BitPattern {
    pub fn uniform(cycle: Vec<u32>) -> Self {
        Self {
            default: Some(cycle),
            nodes: Vec::new(),
        }
    }

    pub fn constant(bits: u32) -> Self {
        Self::uniform(vec![bits])
    }

    /// Overrides the cycle of one node.
    pub fn with_node(mut self, node: usize, cycle: Vec<u32>) -> Self {
        if self.nodes.len() <= node {
            self.nodes.resize(node + 1, None);
        }
        self.nodes[node] = Some(cycle);
        self
    }

    fn cycle_of(&self, i: usize) -> Option<&[u32]> {
        self.nodes
            .get(i)
            .and_then(|c| c.as_deref())
            .or(self.default.as_deref())
    }

    #[inline]
    pub fn bits(&self, i: usize, k: u64) -> u32 {
        let cycle = self.cycle_of(i).expect("bit pattern validated for this node");
        cycle[(k % cycle.len() as u64) as usize]
    }

    fn cycles(&self) -> impl Iterator<Item = &Vec<u32>> {
        self.default.iter().chain(self.nodes.iter().flatten())
    }

    fn check_cycles(&self, assumption: Assumption) -> Result<()> {
        if self.cycles().next().is_none() {
            return Err(Error::assumption(assumption, "bit pattern has no cycles"));
        }
        for c in self.cycles() {
            if c.is_empty() {
                return Err(Error::assumption(assumption, "empty bit cycle"));
            }
            if let Some(&b) = c.iter().find(|&&b| b > MAX_BITS) {
                return Err(Error::assumption(assumption, format!("{b} bits exceeds the limit {MAX_BITS}")));
            }
        }
        Ok(())
    }

    /// Period after which every node's budget repeats.
    fn joint_period(&self) -> u64 {
        self.cycles().fold(1, |acc, c| lcm(acc, c.len() as u64))
    }

    /// Checks every node `0..n` has a cycle and no override is out of range.
    pub fn validate_nodes(&self, n: usize) -> Result<()> {
        if self.nodes.len() > n && self.nodes[n..].iter().any(Option::is_some) {
            return Err(Error::invalid(format!("bit pattern names a node >= {n}")));
        }
        if let Some(i) = (0..n).find(|&i| self.cycle_of(i).is_none()) {
            return Err(Error::invalid(format!("no bit cycle for node {i}")));
        }
        Ok(())
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

/// Smallest `W` such that every aligned window `[mW, (m+1)W)` contains a
/// round where `hit` is true. `hit` must be periodic with period `period`.
fn minimal_window(period: u64, hit: impl Fn(u64) -> bool) -> Option<u64> {
    (1..=period).find(|&w| {
        let span = lcm(w, period);
        (0..span / w).all(|m| (m * w..(m + 1) * w).any(&hit))
    })
}

/// Weight-balancing bit budgets. Every node spends at least one bit in every
/// aligned window of `window` rounds and never more than `b_max` bits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitScheduleWb {
    pattern: BitPattern,
    window: u64,
    b_max: u32,
}

impl BitScheduleWb {
    pub fn new(pattern: BitPattern) -> Result<Self> {
        let a = Assumption::WeightBitWindow;
        pattern.check_cycles(a)?;
        if let Some(c) = pattern.cycles().find(|c| c.iter().all(|&b| b == 0)) {
            return Err(Error::assumption(a, format!("bit cycle {c:?} never transmits")));
        }
        let period = pattern.joint_period();
        let window = (1..=period)
            .find(|&w| {
                pattern.cycles().all(|c| {
                    let len = c.len() as u64;
                    let span = lcm(w, len);
                    (0..span / w).all(|m| (m * w..(m + 1) * w).any(|k| c[(k % len) as usize] > 0))
                })
            })
            .ok_or_else(|| Error::assumption(a, "no common transmission window"))?;
        let b_max = pattern.cycles().flatten().copied().max().unwrap_or(0);
        Ok(Self { pattern, window, b_max })
    }

    #[inline]
    pub fn bits(&self, i: usize, k: u64) -> u32 {
        self.pattern.bits(i, k)
    }

    pub fn window(&self) -> u64 {
        self.window
    }

    pub fn b_max(&self) -> u32 {
        self.b_max
    }

    pub fn pattern(&self) -> &BitPattern {
        &self.pattern
    }
}

/// Consensus bit budgets. At every round either all nodes quantize with at
/// least one bit or none does, and simultaneous rounds recur within every
/// aligned window of `window` rounds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitScheduleCons {
    pattern: BitPattern,
    window: u64,
}

impl BitScheduleCons {
    pub fn new(pattern: BitPattern) -> Result<Self> {
        let a = Assumption::ConsensusBitWindow;
        pattern.check_cycles(a)?;
        let period = pattern.joint_period();
        for k in 0..period {
            let mut on = pattern.cycles().map(|c| c[(k % c.len() as u64) as usize] > 0);
            let first = on.next().unwrap_or(false);
            if on.any(|b| b != first) {
                return Err(Error::assumption(
                    a,
                    format!("nodes disagree on whether to quantize at round {k} (mod {period})"),
                ));
            }
        }
        let window = minimal_window(period, |k| pattern.cycles().all(|c| c[(k % c.len() as u64) as usize] > 0))
            .ok_or_else(|| Error::assumption(a, "consensus channel is never used"))?;
        Ok(Self { pattern, window })
    }

    #[inline]
    pub fn bits(&self, i: usize, k: u64) -> u32 {
        self.pattern.bits(i, k)
    }

    /// Common lower envelope `B(k) ∈ {0, 1}`.
    pub fn base(&self, k: u64) -> u32 {
        u32::from(self.pattern.cycles().all(|c| c[(k % c.len() as u64) as usize] > 0))
    }

    pub fn window(&self) -> u64 {
        self.window
    }

    pub fn pattern(&self) -> &BitPattern {
        &self.pattern
    }
}

/// How a per-round total bit budget is split between the two channels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SplitRule {
    EqualSplit,
    OneBitWb,
    OneBitCons,
}

impl SplitRule {
    pub const ALL: [SplitRule; 3] = [SplitRule::EqualSplit, SplitRule::OneBitWb, SplitRule::OneBitCons];

    /// `(weight bits, consensus bits)` for a total budget.
    pub fn split(&self, total: u32) -> Result<(u32, u32)> {
        if total < 2 {
            return Err(Error::invalid(format!("total bit budget must be >= 2, got {total}")));
        }
        match self {
            SplitRule::EqualSplit if total % 2 != 0 => {
                Err(Error::invalid(format!("equal split needs an even total, got {total}")))
            }
            SplitRule::EqualSplit => Ok((total / 2, total / 2)),
            SplitRule::OneBitWb => Ok((1, total - 1)),
            SplitRule::OneBitCons => Ok((total - 1, 1)),
        }
    }

    pub fn scheme(&self, total: u32) -> BitScheme {
        match self {
            SplitRule::EqualSplit => BitScheme::EqualSplit(total),
            SplitRule::OneBitWb => BitScheme::OneBitWb(total),
            SplitRule::OneBitCons => BitScheme::OneBitCons(total),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SplitRule::EqualSplit => "equal_split",
            SplitRule::OneBitWb => "one_bit_wb",
            SplitRule::OneBitCons => "one_bit_cons",
        }
    }
}

impl FromStr for SplitRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SplitRule::ALL
            .into_iter()
            .find(|r| r.name() == s.trim())
            .ok_or_else(|| Error::invalid(format!("unknown split rule `{s}`")))
    }
}

/// Named bit-allocation schemes for the two channels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BitScheme {
    /// One weight bit on odd rounds, one consensus bit on even rounds.
    Alternating,
    /// One bit on each channel every round.
    Simultaneous,
    EqualSplit(u32),
    OneBitWb(u32),
    OneBitCons(u32),
    Custom { path: PathBuf, wb: BitPattern, cons: BitPattern },
}

impl BitScheme {
    pub fn schedules(&self) -> Result<(BitScheduleWb, BitScheduleCons)> {
        let (wb, cons) = match self {
            BitScheme::Alternating => (BitPattern::uniform(vec![0, 1]), BitPattern::uniform(vec![1, 0])),
            BitScheme::Simultaneous => (BitPattern::constant(1), BitPattern::constant(1)),
            BitScheme::EqualSplit(t) => split_patterns(SplitRule::EqualSplit, *t)?,
            BitScheme::OneBitWb(t) => split_patterns(SplitRule::OneBitWb, *t)?,
            BitScheme::OneBitCons(t) => split_patterns(SplitRule::OneBitCons, *t)?,
            BitScheme::Custom { wb, cons, .. } => (wb.clone(), cons.clone()),
        };
        Ok((BitScheduleWb::new(wb)?, BitScheduleCons::new(cons)?))
    }

    /// Bits per node per round summed over both channels, averaged over one period.
    pub fn bits_per_round(&self) -> Result<f64> {
        let (wb, cons) = self.schedules()?;
        let period = lcm(wb.pattern.joint_period(), cons.pattern.joint_period());
        let total: u64 = (0..period).map(|k| u64::from(wb.bits(0, k) + cons.bits(0, k))).sum();
        Ok(total as f64 / period as f64)
    }

    /// Parses a custom schedule file. Each non-comment line reads
    /// `<wb|cons> <node|*> <b0,b1,...>`; the comma list is the node's cycle.
    pub fn load_custom(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let parse_err = |msg: String| Error::Parse {
            path: path.to_path_buf(),
            msg,
        };
        let mut wb: Option<BitPattern> = None;
        let mut cons: Option<BitPattern> = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let [channel, node, cycle] = fields.as_slice() else {
                return Err(parse_err(format!("line {}: expected `<channel> <node> <cycle>`", lineno + 1)));
            };
            let cycle = cycle
                .split(',')
                .map(|b| b.trim().parse::<u32>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| parse_err(format!("line {}: {e}", lineno + 1)))?;
            let slot = match *channel {
                "wb" => &mut wb,
                "cons" => &mut cons,
                other => return Err(parse_err(format!("line {}: unknown channel `{other}`", lineno + 1))),
            };
            let pat = slot.take().unwrap_or(BitPattern {
                default: None,
                nodes: Vec::new(),
            });
            *slot = Some(if *node == "*" {
                BitPattern {
                    default: Some(cycle),
                    ..pat
                }
            } else {
                let i = node
                    .parse::<usize>()
                    .map_err(|e| parse_err(format!("line {}: bad node `{node}`: {e}", lineno + 1)))?;
                pat.with_node(i, cycle)
            });
        }
        let (Some(wb), Some(cons)) = (wb, cons) else {
            return Err(parse_err("custom schedule needs both `wb` and `cons` lines".into()));
        };
        let scheme = BitScheme::Custom {
            path: path.to_path_buf(),
            wb,
            cons,
        };
        scheme.schedules()?;
        Ok(scheme)
    }
}

fn split_patterns(rule: SplitRule, total: u32) -> Result<(BitPattern, BitPattern)> {
    let (w, c) = rule.split(total)?;
    Ok((BitPattern::constant(w), BitPattern::constant(c)))
}

impl std::fmt::Display for BitScheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BitScheme::Alternating => write!(f, "alternating"),
            BitScheme::Simultaneous => write!(f, "simultaneous"),
            BitScheme::EqualSplit(b) => write!(f, "equal_split:{b}"),
            BitScheme::OneBitWb(b) => write!(f, "one_bit_wb:{b}"),
            BitScheme::OneBitCons(b) => write!(f, "one_bit_cons:{b}"),
            BitScheme::Custom { path, .. } => write!(f, "custom:{}", path.display()),
        }
    }
}

impl FromStr for BitScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (s, None),
        };
        let total = || -> Result<u32> {
            arg.ok_or_else(|| Error::invalid(format!("`{name}` needs a bit total, e.g. `{name}:8`")))?
                .parse()
                .map_err(|e| Error::invalid(format!("bad bit total in `{s}`: {e}")))
        };
        let scheme = match name {
            "alternating" => BitScheme::Alternating,
            "simultaneous" => BitScheme::Simultaneous,
            "equal_split" => BitScheme::EqualSplit(total()?),
            "one_bit_wb" => BitScheme::OneBitWb(total()?),
            "one_bit_cons" => BitScheme::OneBitCons(total()?),
            "custom" => {
                let path = arg.ok_or_else(|| Error::invalid("`custom` needs a file, e.g. `custom:bits.txt`"))?;
                return BitScheme::load_custom(Path::new(path));
            }
            other => return Err(Error::invalid(format!("unknown bit scheme `{other}`"))),
        };
        scheme.schedules()?;
        Ok(scheme)
    }
}
