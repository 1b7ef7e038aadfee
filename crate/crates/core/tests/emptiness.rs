mod common;

use common::{oracle_accepts, small_tela};
use proptest::prelude::*;
use tela::analysis::{accepting_lasso, accepts, brute_force_empty, is_empty, sample_lassos};
use tela::determinize::{determinize_product, determinize_via_gba};
use tela::transforms::{remove_fin, remove_fin_gba, to_gba, GbaMethod};
use tela::{AcceptanceFormula as F, MarkSet, Tela, Transition};

fn loop_tela(marks: &[&[u32]], acc: F, n_marks: u32) -> Tela {
    let ts = marks
        .iter()
        .enumerate()
        .map(|(i, m)| Transition::new(0, i as u32 % 2, 0, m.iter().copied().collect()))
        .collect();
    Tela::new(vec!["p".into()], 1, [0], ts, acc, n_marks).unwrap()
}

#[test]
fn single_state_conditions() {
    // letter 0 loops with mark 0, letter 1 with mark 1
    let a = loop_tela(&[&[0], &[1]], F::and([F::inf([0]), F::fin([1])]), 2);
    assert!(!is_empty(&a));
    let w = accepting_lasso(&a).unwrap().word();
    assert!(w.cycle.iter().all(|&l| l == 0));
    let b = loop_tela(&[&[0], &[0]], F::and([F::inf([0]), F::fin([0])]), 1);
    assert!(is_empty(&b));
    assert!(brute_force_empty(&b).unwrap());
}

#[test]
fn fin_needs_a_separate_cycle() {
    // two states, 0 -> 1 marks {0}, 1 -> 0 marks {1}, 1 -> 1 nothing
    let ts = vec![
        Transition::new(0, 0, 1, MarkSet::singleton(0)),
        Transition::new(1, 0, 0, MarkSet::singleton(1)),
        Transition::new(1, 0, 1, MarkSet::new()),
    ];
    let a = Tela::new(vec![], 2, [0], ts, F::and([F::inf([0]), F::fin([1])]), 2).unwrap();
    assert!(is_empty(&a));
    let b = a.with_acceptance(F::fin([0]), 2).unwrap();
    assert!(!is_empty(&b));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn emptiness_matches_oracle(seed in 0u64..100_000) {
        let a = small_tela(seed, 6, 6, 12);
        prop_assert_eq!(is_empty(&a), brute_force_empty(&a).unwrap());
        if let Some(l) = accepting_lasso(&a) {
            prop_assert!(accepts(&a, &l.word()).unwrap());
        }
    }

    #[test]
    fn membership_stable_under_rotation_and_unrolling(seed in 0u64..100_000) {
        let a = small_tela(seed, 5, 4, 10);
        for w in sample_lassos(&a, 8, seed) {
            let expected = oracle_accepts(&a, &w);
            prop_assert_eq!(accepts(&a, &w).unwrap(), expected);
            prop_assert_eq!(accepts(&a, &w.unrolled()).unwrap(), expected);
            for k in 0..w.cycle.len() {
                let r = w.rotated(k);
                prop_assert_eq!(accepts(&a, &r).unwrap(), oracle_accepts(&a, &r));
            }
        }
    }

    #[test]
    fn emptiness_invariant_under_translations(seed in 0u64..100_000) {
        let a = small_tela(seed, 4, 4, 6);
        let e = is_empty(&a);
        let d = a.to_dnf().tela;
        prop_assert_eq!(is_empty(&remove_fin(&d).unwrap()), e);
        prop_assert_eq!(is_empty(&remove_fin_gba(&d).unwrap()), e);
        for m in GbaMethod::ALL {
            prop_assert_eq!(is_empty(&to_gba(&a, m)), e, "{}", m);
        }
        prop_assert_eq!(is_empty(&determinize_product(&a, true)), e);
        prop_assert_eq!(is_empty(&determinize_via_gba(&a, GbaMethod::SplitRemfin)), e);
    }
}
