mod common;

use common::{random_mdp, small_tela};
use proptest::prelude::*;
use tela::families::{alternating_chain, singleton_bridge_counterexample};
use tela::limitdet::{build_ld, limit_det_sum, BridgeMode, LdOptions};
use tela::mdp::{
    max_reachability, mdp_product, mec_decomposition, parse_mdp, pr_max_buchi, pr_max_reference, pr_max_tela,
    pr_max_tela_with, qualitative_positive, VI_TOLERANCE,
};
use tela::{AcceptanceFormula as F, Error, MarkSet, StateSet, Tela, Transition};

/// Inf on letter 1: one state, the 1-loop is marked.
fn inf_one() -> Tela {
    Tela::new(
        vec!["p".into()],
        1,
        [0],
        vec![
            Transition::new(0, 0, 0, MarkSet::new()),
            Transition::new(0, 1, 0, MarkSet::singleton(0)),
        ],
        F::inf([0]),
        1,
    )
    .unwrap()
}

const FORK: &str = "\
# fork into two absorbing states
states 3
initial 0
label 0 1
label 1 0
label 2 1
trans 0 go 1 1/3
trans 0 go 2 2/3
trans 1 stay 1 1
trans 2 stay 2 1
";

#[test]
fn fork_value_is_two_thirds() {
    let m = parse_mdp(FORK).unwrap();
    let a = inf_one();
    for v in [pr_max_tela(&m, &a).unwrap(), pr_max_reference(&m, &a).unwrap()] {
        assert!((v - 2.0 / 3.0).abs() < 1e-6, "{v}");
    }
    assert!(qualitative_positive(&m, &a).unwrap());
}

#[test]
fn scheduler_picks_the_better_action() {
    let m = parse_mdp(
        "states 3\ninitial 0\nlabel 0 0\nlabel 1 0\nlabel 2 1\n\
         trans 0 safe 1 1\ntrans 0 risky 1 1/2\ntrans 0 risky 2 1/2\n\
         trans 1 stay 1 1\ntrans 2 stay 2 1\n",
    )
    .unwrap();
    assert!((pr_max_tela(&m, &inf_one()).unwrap() - 0.5).abs() < 1e-6);
}

#[test]
fn example_chain_values() {
    let a = singleton_bridge_counterexample();
    let m = alternating_chain();
    assert!((pr_max_tela(&m, &a).unwrap() - 1.0).abs() < 1e-6);
    assert!((pr_max_reference(&m, &a).unwrap() - 1.0).abs() < 1e-6);
    let broken = pr_max_tela_with(
        &m,
        &a,
        LdOptions {
            bridges: BridgeMode::Singletons,
            ..Default::default()
        },
    )
    .unwrap();
    assert!(broken <= 0.5 + 1e-6, "{broken}");
}

#[test]
fn qualitative_rejects_non_limit_deterministic() {
    let a = Tela::new(
        vec![],
        2,
        [0],
        vec![
            Transition::new(0, 0, 0, MarkSet::singleton(0)),
            Transition::new(0, 0, 1, MarkSet::new()),
            Transition::new(1, 0, 0, MarkSet::singleton(0)),
        ],
        F::inf([0]),
        1,
    )
    .unwrap();
    let m = parse_mdp("states 1\ninitial 0\nlabel 0 0\ntrans 0 x 0 1\n").unwrap();
    assert!(matches!(qualitative_positive(&m, &a), Err(Error::NotLimitDeterministic(_))));
}

#[test]
fn mdp_text_round_trip() {
    let m = parse_mdp(FORK).unwrap();
    assert_eq!(parse_mdp(&m.to_string()).unwrap(), m);
    assert!(parse_mdp("states 1\ninitial 0\nlabel 0 0\ntrans 0 x 0 1/2\n").is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn mecs_are_disjoint_closed_and_connected(seed in 0u64..100_000) {
        let a = small_tela(seed, 3, 4, 6);
        let m = random_mdp(seed, 3, a.alphabet_size());
        let p = mdp_product(&m, &build_ld(&a).single_initial()).unwrap();
        let g = p.graph();
        let mecs = mec_decomposition(&g);
        let mut seen = StateSet::new();
        for e in &mecs {
            prop_assert!(e.is_valid(&g));
            prop_assert!(!seen.intersects(&e.states));
            seen.union_with(&e.states);
        }
    }

    #[test]
    fn values_agree_and_lie_in_the_unit_interval(seed in 0u64..100_000) {
        let a = small_tela(seed, 3, 4, 6);
        let m = random_mdp(seed, 3, a.alphabet_size());
        let v = pr_max_tela(&m, &a).unwrap();
        let r = pr_max_reference(&m, &a).unwrap();
        prop_assert!((0.0..=1.0).contains(&v) && (0.0..=1.0).contains(&r));
        prop_assert!((v - r).abs() <= 1e-6, "{} vs {}", v, r);
        prop_assert_eq!(qualitative_positive(&m, &limit_det_sum(&a)).unwrap(), r > 1e-6);
    }

    #[test]
    fn more_accepting_transitions_never_lower_the_value(seed in 0u64..100_000, extra in 0usize..64) {
        let a = small_tela(seed, 3, 4, 6);
        let m = random_mdp(seed, 3, a.alphabet_size());
        let b = build_ld(&a).single_initial();
        let mut ts: Vec<Transition> = b.transitions().to_vec();
        if !ts.is_empty() {
            let i = extra % ts.len();
            ts[i].marks.insert(0);
        }
        let bigger = Tela::new(b.aps().to_vec(), b.num_states(), b.initial().iter().copied(), ts, F::inf([0]), 1).unwrap();
        let v = pr_max_buchi(&mdp_product(&m, &b).unwrap()).unwrap();
        let w = pr_max_buchi(&mdp_product(&m, &bigger).unwrap()).unwrap();
        prop_assert!(w >= v - 1e-6, "{} < {}", w, v);
    }

    #[test]
    fn reachability_bounds(seed in 0u64..100_000) {
        let a = small_tela(seed, 3, 4, 6);
        let m = random_mdp(seed, 3, a.alphabet_size());
        let g = m.graph();
        let target: Vec<bool> = (0..g.num_states()).map(|s| s % 2 == 1).collect();
        let v = max_reachability(&g, &target, VI_TOLERANCE);
        for (s, x) in v.iter().enumerate() {
            prop_assert!((0.0..=1.0).contains(x));
            if target[s] {
                prop_assert!((x - 1.0).abs() < 1e-9);
            }
        }
    }
}
