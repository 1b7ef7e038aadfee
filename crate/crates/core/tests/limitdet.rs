mod common;

use std::collections::HashMap;

use common::{disagreements, probe_words, small_dnf_tela, small_tela};
use proptest::prelude::*;
use tela::analysis::brute_force_empty;
use tela::families::{ab_state, ba_state, singleton_bridge_counterexample, A1, B2};
use tela::limitdet::{
    breakpoint_component, breakpoint_step, build_gfm_with, build_ld_with, canonical_partition,
    is_limit_deterministic, is_syntactically_limit_deterministic, limit_det_sum, BreakpointState, Construction,
    CounterMode, LdOptions, Origin,
};
use tela::{AcceptanceFormula as F, MarkSet, StateSet, Tela, Transition};

fn t(s: u32, l: u32, d: u32, m: &[u32]) -> Transition {
    Transition::new(s, l, d, m.iter().copied().collect())
}

fn opts(counter: CounterMode) -> LdOptions {
    LdOptions {
        counter,
        ..Default::default()
    }
}

/// Structural properties shared by both constructions; `Err` names the
/// first violation.
fn check_structure(a: &Tela, c: &Construction, mode: CounterMode) -> Result<(), String> {
    let d = a.to_dnf();
    let g = &c.automaton;
    if !is_syntactically_limit_deterministic(g).unwrap() {
        return Err("not syntactically limit-deterministic".into());
    }
    for o in &c.origin {
        if let Origin::Breakpoint(_, s) = o {
            if s.r.is_empty() || !s.b.is_subset(&s.r) {
                return Err(format!("bad breakpoint state {s:?}"));
            }
        }
    }
    for tr in g.transitions() {
        let src_bp = tr.src >= c.num_initial;
        if src_bp && tr.dst < c.num_initial {
            return Err("transition back into the initial component".into());
        }
        if !src_bp && !tr.marks.is_empty() {
            return Err("marked transition in the initial component".into());
        }
        let (Origin::Breakpoint(i, s), Origin::Breakpoint(j, s2)) =
            (&c.origin[tr.src as usize], &c.origin[tr.dst as usize])
        else {
            continue;
        };
        if i != j {
            return Err("transition between breakpoint components".into());
        }
        let k = d.clauses[*i].infs.len() as u32;
        let modulus = match mode {
            CounterMode::AwaitNext => k,
            CounterMode::PlainBreakAtZero => k + 1,
        };
        if tr.marks.contains(0) {
            if !s2.b.is_empty() || s2.l != (s.l + 1) % modulus {
                return Err(format!("bad break {s:?} -> {s2:?}"));
            }
        } else if s2.l != s.l {
            return Err("counter changed without a break".into());
        }
    }
    Ok(())
}

#[test]
fn partition_examples() {
    let det = Tela::new(vec![], 2, [0], vec![t(0, 0, 1, &[]), t(1, 0, 1, &[0])], F::inf([0]), 1).unwrap();
    assert!(canonical_partition(&det).nondet.is_empty());
    assert!(is_limit_deterministic(&det));
    assert!(is_syntactically_limit_deterministic(&det).unwrap());
    // state 0 is nondeterministic and reachable from everywhere
    let hub = Tela::new(
        vec![],
        2,
        [0],
        vec![t(0, 0, 0, &[]), t(0, 0, 1, &[]), t(1, 0, 0, &[])],
        F::inf([0]),
        1,
    )
    .unwrap();
    assert!(canonical_partition(&hub).det.is_empty());
}

#[test]
fn accepting_cycle_inside_the_nondeterministic_part() {
    let a = Tela::new(
        vec![],
        2,
        [0],
        vec![t(0, 0, 0, &[0]), t(0, 0, 1, &[]), t(1, 0, 0, &[0])],
        F::inf([0]),
        1,
    )
    .unwrap();
    let p = canonical_partition(&a);
    assert_eq!(p.nondet.len(), 2);
    let (n_aut, _) = a.restrict(&p.nondet);
    assert!(!brute_force_empty(&n_aut).unwrap());
    assert!(!is_limit_deterministic(&a));
    assert!(!is_syntactically_limit_deterministic(&a).unwrap());
}

#[test]
fn single_disjunct_sum_is_deterministic() {
    let a = Tela::new(
        vec!["p".into()],
        2,
        [0],
        vec![t(0, 0, 0, &[]), t(0, 0, 1, &[]), t(1, 1, 1, &[0]), t(1, 0, 1, &[])],
        F::inf([0]),
        1,
    )
    .unwrap();
    let s = limit_det_sum(&a);
    assert!(s.is_deterministic());
}

#[test]
fn gfm_starts_in_the_initial_set() {
    let a = singleton_bridge_counterexample();
    let c = build_gfm_with(&a, LdOptions::default()).unwrap();
    let init: StateSet = a.initial().iter().copied().collect();
    assert_eq!(c.automaton.initial(), &[0]);
    assert_eq!(c.origin[0], Origin::Subset(init));
}

#[test]
fn one_state_buchi_loop() {
    let a = Tela::new(vec![], 1, [0], vec![t(0, 0, 0, &[0])], F::inf([0]), 1).unwrap();
    let (bp, states) = breakpoint_component(&a, 0, CounterMode::AwaitNext).unwrap();
    assert_eq!(states, vec![BreakpointState::seed(StateSet::singleton(0))]);
    assert_eq!(bp.transitions(), &[t(0, 0, 0, &[0])]);
}

#[test]
fn example_trap_state() {
    let a = singleton_bridge_counterexample();
    let d = a.to_dnf();
    let start = BreakpointState::seed(StateSet::singleton(ab_state(1, 1)));
    let (s1, _) = breakpoint_step(&d, 0, CounterMode::AwaitNext, &start, A1).unwrap();
    assert_eq!(s1.r, [ba_state(1, 1), ba_state(1, 2)].into_iter().collect());
    assert!(breakpoint_step(&d, 0, CounterMode::AwaitNext, &s1, B2).is_none());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn constructions_are_structurally_sound(seed in 0u64..100_000) {
        let a = small_dnf_tela(seed, 4);
        for mode in [CounterMode::AwaitNext, CounterMode::PlainBreakAtZero] {
            let ld = build_ld_with(&a, opts(mode)).unwrap();
            let gfm = build_gfm_with(&a, opts(mode)).unwrap();
            prop_assert_eq!(check_structure(&a, &ld, mode), Ok(()));
            prop_assert_eq!(check_structure(&a, &gfm, mode), Ok(()));
        }
    }

    #[test]
    fn ld_bridges_are_gfm_bridges(seed in 0u64..100_000) {
        let a = small_dnf_tela(seed, 4);
        let ld = build_ld_with(&a, LdOptions::default()).unwrap();
        let gfm = build_gfm_with(&a, LdOptions::default()).unwrap();
        let id: HashMap<&Origin, u32> = gfm.origin.iter().enumerate().map(|(i, o)| (o, i as u32)).collect();
        let reachable = a.reachable();
        for tr in ld.automaton.transitions() {
            if tr.src >= ld.num_initial || tr.dst < ld.num_initial || !reachable.contains(tr.src) {
                continue;
            }
            let target = id.get(&ld.origin[tr.dst as usize]);
            prop_assert!(target.is_some());
            for (p, o) in gfm.origin.iter().enumerate().take(gfm.num_initial as usize) {
                let Origin::Subset(set) = o else { unreachable!() };
                if set.contains(tr.src) {
                    prop_assert!(gfm.automaton.succ(p as u32, tr.letter).iter().any(|x| Some(&x.dst) == target));
                }
            }
        }
    }

    #[test]
    fn constructions_preserve_language(seed in 0u64..100_000) {
        let a = small_dnf_tela(seed, 5);
        for mode in [CounterMode::AwaitNext, CounterMode::PlainBreakAtZero] {
            for c in [build_ld_with(&a, opts(mode)).unwrap(), build_gfm_with(&a, opts(mode)).unwrap()] {
                let mut words = probe_words(&a, &c.automaton, 24, seed);
                words.extend(probe_words(&c.automaton, &a, 0, seed));
                prop_assert_eq!(disagreements(&a, &c.automaton, &words), 0, "{:?}", mode);
            }
        }
    }

    #[test]
    fn sum_is_limit_deterministic(seed in 0u64..100_000) {
        let a = small_tela(seed, 4, 6, 8);
        let s = limit_det_sum(&a);
        prop_assert!(is_limit_deterministic(&s));
        let mut words = probe_words(&a, &s, 24, seed);
        words.extend(probe_words(&s, &a, 0, seed));
        prop_assert_eq!(disagreements(&a, &s, &words), 0);
    }
}

#[test]
fn marks_confined_to_breakpoint_components() {
    let a = small_dnf_tela(17, 4);
    let c = build_ld_with(&a, LdOptions::default()).unwrap();
    let marked: Vec<&Transition> = c.automaton.transitions().iter().filter(|t| !t.marks.is_empty()).collect();
    assert!(marked.iter().all(|t| t.src >= c.num_initial && t.marks == MarkSet::singleton(0)));
}
