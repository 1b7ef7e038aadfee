mod common;

use std::collections::HashMap;

use common::{disagreements, probe_words, small_dnf_tela, small_tela};
use proptest::prelude::*;
use tela::automaton::{product, sum, Combinator};
use tela::determinize::determinize_product;
use tela::families::cnf_blowup;
use tela::transforms::{remove_fin, remove_fin_gba, to_gba, GbaMethod};
use tela::{MarkSet, StateId, Tela};

/// Checks the mark layout of `p = a ⊗ b` by simulating both deterministic
/// components along every product transition.
fn marks_lifted(a: &Tela, b: &Tela, p: &Tela) -> bool {
    let mut pair: HashMap<StateId, (StateId, StateId)> = HashMap::new();
    pair.insert(p.initial()[0], (a.initial()[0], b.initial()[0]));
    let mut stack = vec![p.initial()[0]];
    let off = a.num_marks();
    while let Some(s) = stack.pop() {
        let (qa, qb) = pair[&s];
        for t in p.out(s) {
            let ta = &a.succ(qa, t.letter)[0];
            let tb = &b.succ(qb, t.letter)[0];
            let lower: MarkSet = t.marks.iter().filter(|&m| m < off).collect();
            let upper: MarkSet = t.marks.iter().filter(|&m| m >= off).map(|m| m - off).collect();
            if lower != ta.marks || upper != tb.marks {
                return false;
            }
            match pair.get(&t.dst) {
                Some(&x) if x != (ta.dst, tb.dst) => return false,
                Some(_) => {}
                None => {
                    pair.insert(t.dst, (ta.dst, tb.dst));
                    stack.push(t.dst);
                }
            }
        }
    }
    true
}

#[test]
fn blowup_mark_counts() {
    for n in 1..=6 {
        let a = cnf_blowup(n);
        assert_eq!(to_gba(&a, GbaMethod::Cnf).num_marks(), 1 << n);
        for m in GbaMethod::ALL.into_iter().filter(|m| m.is_copy_based()) {
            assert!(to_gba(&a, m).num_marks() <= 2, "{m} n={n}");
        }
    }
}

#[test]
fn sum_requires_complete_inputs() {
    let a = small_tela(3, 4, 4, 6);
    if !a.is_complete() {
        assert!(sum(&a, &a).is_err());
    }
    assert!(sum(&a.complete(), &a.complete()).is_ok());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gba_methods_agree_with_oracle(seed in 0u64..100_000) {
        let a = small_tela(seed, 5, 6, 6);
        let dnf_len = a.acceptance().to_dnf().length();
        let max_k = a.to_dnf().max_k();
        let gbas: Vec<Tela> = GbaMethod::ALL.iter().map(|&m| to_gba(&a, m)).collect();
        let mut words = probe_words(&a, &gbas[0], 24, seed);
        for g in &gbas {
            words.extend(probe_words(g, &a, 0, seed));
        }
        for (m, g) in GbaMethod::ALL.iter().zip(&gbas) {
            prop_assert!(g.acceptance().gba_sets().is_some(), "{} not GBA", m);
            prop_assert_eq!(disagreements(&a, g, &words), 0, "{}", m);
            if m.is_copy_based() {
                prop_assert!(g.num_marks() as usize <= max_k.max(1));
                prop_assert!(g.num_marks() as usize <= dnf_len.max(1));
            }
        }
    }

    #[test]
    fn fin_removal_shapes(seed in 0u64..100_000) {
        let a = small_dnf_tela(seed, 5);
        let n = a.num_states();
        let rf = remove_fin(&a).unwrap();
        let rg = remove_fin_gba(&a).unwrap();
        prop_assert!(!rf.acceptance().has_fin());
        prop_assert!(rg.acceptance().gba_sets().is_some());
        for r in [&rf, &rg] {
            // once in a copy, runs never return to the main part
            prop_assert!(r.transitions().iter().all(|t| t.src < n || t.dst >= n));
        }
        let words = probe_words(&a, &rf, 24, seed);
        prop_assert_eq!(disagreements(&a, &rf, &words), 0);
        prop_assert_eq!(disagreements(&a, &rg, &words), 0);
    }

    #[test]
    fn disjunctive_product_of_deterministic_automata(seed in 0u64..100_000) {
        let a = determinize_product(&small_tela(seed, 3, 4, 5), true);
        let b = determinize_product(&small_tela(seed + 1, 3, 4, 5), true);
        let p = product(&a, &b, Combinator::Or).unwrap();
        prop_assert!(p.is_deterministic() && p.is_complete());
        prop_assert!(marks_lifted(&a, &b, &p));
    }
}
