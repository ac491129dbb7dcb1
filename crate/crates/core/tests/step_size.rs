use proptest::prelude::*;
use quantcons::numerics::{rescale_counts, StepSchedule};

/// `n` found by scanning the level boundaries `(c1^n - 1) c2` directly.
fn level_by_scan(k: u64, c1: u64, c2: u64) -> u32 {
    let mut n = 0u32;
    while (c1.pow(n + 1) - 1) * c2 <= k {
        n += 1;
    }
    n
}

#[test]
fn sandwich_holds_on_a_grid() {
    for c1 in 2u32..=5 {
        for c2 in 1u64..=12 {
            let s = StepSchedule::new(1.0, c1, c2).unwrap();
            for k in 0u64..20_000 {
                let n = s.exponent_at(k);
                assert_eq!(n, level_by_scan(k, c1 as u64, c2), "c1={c1} c2={c2} k={k}");
                // c2 c1^n <= k + c2 <= c1 c2 c1^n, the exact form of
                // γ0 c2/(k+c2) <= γ(k) <= γ0 c1 c2/(k+c2).
                let p = (c1 as u128).pow(n);
                let kc = (k + c2) as u128;
                assert!(c2 as u128 * p <= kc && kc <= c1 as u128 * c2 as u128 * p);
                let g = s.gamma_of_exponent(n);
                let lo = c2 as f64 / (k + c2) as f64;
                let hi = (c1 as u64 * c2) as f64 / (k + c2) as f64;
                assert!(lo <= g * (1.0 + 1e-15) && g <= hi * (1.0 + 1e-15));
            }
        }
    }
}

#[test]
fn reference_sequence() {
    let s = StepSchedule::new(1.0, 2, 1).unwrap();
    let gammas: Vec<f64> = (0..8).map(|k| s.gamma_at(k).1).collect();
    assert_eq!(gammas, [1.0, 0.5, 0.5, 0.25, 0.25, 0.25, 0.25, 0.125]);
}

proptest! {
    #[test]
    fn sandwich_for_large_rounds(c1 in 2u32..10, c2 in 1u64..1000, k in 0u64..1_000_000_000_000) {
        let s = StepSchedule::new(1.0, c1, c2).unwrap();
        let n = s.exponent_at(k);
        let p = (c1 as u128).pow(n);
        let kc = (k + c2) as u128;
        prop_assert!(c2 as u128 * p <= kc && kc <= c1 as u128 * c2 as u128 * p);
        prop_assert!(s.level_start(n) <= k && k < s.level_start(n + 1));
    }

    #[test]
    fn rescaling_keeps_represented_values(c1 in 2u32..6, counts in prop::collection::vec(-1000i128..1000, 1..10), from in 0u32..5, up in 0u32..5) {
        let mut scaled = counts.clone();
        rescale_counts(&mut scaled, from, from + up, c1).unwrap();
        for (a, b) in counts.iter().zip(&scaled) {
            prop_assert_eq!(*a * (c1 as i128).pow(up), *b);
        }
    }
}

#[test]
fn rejected_parameters() {
    assert!(StepSchedule::new(1.0, 1, 1).is_err());
    assert!(StepSchedule::new(1.0, 2, 0).is_err());
    assert!(StepSchedule::new(0.0, 2, 1).is_err());
    assert!(StepSchedule::new(f64::NAN, 2, 1).is_err());
    let mut v = [1i128];
    assert!(rescale_counts(&mut v, 3, 2, 2).is_err());
}
