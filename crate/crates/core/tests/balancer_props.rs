use proptest::prelude::*;
use quantcons::balancer::audit::{audit_run, Check};
use quantcons::balancer::{compute_potential, potential_cap, Balancer, BalanceVector, EventKind};
use quantcons::digraph::Digraph;
use quantcons::numerics::{BitScheduleWb, BitScheme, StepSchedule};
use quantcons::rng::{substream, Domain};

/// Plain reimplementation of the weight-balancing rounds. All quantities are
/// integers in units of `γ0 / c1^top`, where `top` is the last exponent the
/// run reaches, so no rescaling ever happens.
struct Reference<'g> {
    g: &'g Digraph,
    s: StepSchedule,
    top: u32,
    weights: Vec<i128>,
}

impl<'g> Reference<'g> {
    fn new(g: &'g Digraph, c: &[u64], s: StepSchedule, rounds: u64) -> Self {
        let top = s.exponent_at(rounds);
        let unit = (s.c1() as i128).pow(top);
        Self {
            g,
            s,
            top,
            weights: c.iter().map(|&c| c as i128 * unit).collect(),
        }
    }

    fn gamma_units(&self, k: u64) -> i128 {
        (self.s.c1() as i128).pow(self.top - self.s.exponent_at(k))
    }

    fn balances(&self) -> Vec<i128> {
        let mut b = vec![0i128; self.g.n_nodes()];
        for (e, &(j, i)) in self.g.edges().iter().enumerate() {
            b[i] += self.weights[e];
            b[j] -= self.weights[e];
        }
        b
    }

    fn round(&mut self, k: u64, bits: &BitScheduleWb) -> EventKind {
        let gamma = self.gamma_units(k);
        let b = self.balances();
        let n = self.g.n_nodes();
        let signals: Vec<i128> = (0..n)
            .map(|i| {
                let cap = (1i128 << bits.bits(i, k)) - 1;
                (b[i].max(0) / (self.g.out_degree(i) as i128 * gamma)).min(cap)
            })
            .collect();
        for (e, &(j, _)) in self.g.edges().iter().enumerate() {
            self.weights[e] += signals[j] * gamma;
        }
        let senders: Vec<usize> = (0..n).filter(|&i| signals[i] > 0).collect();
        if senders.is_empty() {
            EventKind::Idle
        } else if senders.iter().any(|&i| self.g.out_neighbors(i).iter().any(|&j| b[j] < 0)) {
            EventKind::Decreasing
        } else {
            EventKind::Update
        }
    }
}

fn scheme_strategy() -> impl Strategy<Value = BitScheme> {
    prop_oneof![
        Just(BitScheme::Alternating),
        Just(BitScheme::Simultaneous),
        (1u32..5).prop_map(|h| BitScheme::EqualSplit(2 * h)),
        (2u32..8).prop_map(BitScheme::OneBitWb),
        (2u32..8).prop_map(BitScheme::OneBitCons),
    ]
}

fn graph(n: usize, p: f64, seed: u64) -> Digraph {
    Digraph::ring_plus_random(n, p, &mut substream(seed, Domain::Graph, 0, 0)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn engine_matches_reference(
        n in 2usize..8,
        p in 0.0f64..0.6,
        seed in any::<u64>(),
        cs in prop::collection::vec(1u64..6, 64),
        c1 in 2u32..4,
        c2 in 1u64..4,
        scheme in scheme_strategy(),
        rounds in 1u64..300,
    ) {
        let g = graph(n, p, seed);
        let c = &cs[..g.edge_count()];
        let s = StepSchedule::new(1.0, c1, c2).unwrap();
        let (wb, _) = scheme.schedules().unwrap();
        let mut engine = Balancer::new(&g, c, s, wb.clone()).unwrap();
        let mut reference = Reference::new(&g, c, s, rounds);
        for k in 0..rounds {
            let outcome = engine.step().unwrap();
            let kind = reference.round(k, &wb);
            prop_assert_eq!(outcome.kind, kind, "round {}", k);
            let exp = engine.balances().exponent;
            let scale = (c1 as i128).pow(reference.top - exp);
            let scaled: Vec<i128> = engine.balances().counts.iter().map(|b| b * scale).collect();
            prop_assert_eq!(scaled, reference.balances(), "round {}", k);
            let scaled_w: Vec<i128> = engine.weights().counts.iter().map(|w| w * scale).collect();
            prop_assert_eq!(&scaled_w, &reference.weights, "round {}", k);
        }
    }

    #[test]
    fn audited_invariants_hold(
        n in 2usize..9,
        p in 0.0f64..0.6,
        seed in any::<u64>(),
        cs in prop::collection::vec(1u64..4, 72),
        c1 in 2u32..4,
        c2 in 1u64..4,
        scheme in scheme_strategy(),
    ) {
        let g = graph(n, p, seed);
        let s = StepSchedule::new(1.0, c1, c2).unwrap();
        let (wb, _) = scheme.schedules().unwrap();
        let mut engine = Balancer::new(&g, &cs[..g.edge_count()], s, wb).unwrap();
        let report = audit_run(&mut engine, 1500, true).unwrap();
        let hard: Vec<_> = report.violations.iter().filter(|v| v.check != Check::TailBound).collect();
        prop_assert!(hard.is_empty(), "{:?}", &hard[..hard.len().min(3)]);
        prop_assert_eq!(report.rounds, 1500);
    }

    #[test]
    fn potential_is_below_cap(
        n in 2usize..8,
        p in 0.0f64..0.6,
        seed in any::<u64>(),
        counts in prop::collection::vec(-40i128..40, 8),
    ) {
        let g = graph(n, p, seed);
        let mut counts = counts[..n].to_vec();
        let total: i128 = counts.iter().sum();
        counts[0] -= total;
        prop_assume!(counts.iter().any(|&c| c < 0));
        let b = BalanceVector { counts, exponent: 0 };
        let snap = compute_potential(&g, &b).unwrap();
        prop_assert!(snap.value < potential_cap(n).unwrap());
    }
}
