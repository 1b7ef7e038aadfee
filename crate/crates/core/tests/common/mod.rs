#![allow(dead_code)]

use tela::analysis::{accepts, brute_force_accepts, sample_lassos, LassoWord, BRUTE_FORCE_MAX_STATES};
use tela::randbench::{random_tela, AccKind, RandomParams};
use tela::Tela;

/// Small random automaton for oracle suites: `1..=max_states` states,
/// random Emerson-Lei acceptance with DNF length at most `max_len`.
pub fn small_tela(seed: u64, max_states: u32, n_marks: u32, max_len: usize) -> Tela {
    random_tela(&RandomParams {
        n_states: 1 + (seed % max_states as u64) as u32,
        n_aps: 1,
        n_marks,
        edge_density: Some(0.45),
        mark_prob: 0.3,
        acc: AccKind::RandomEl,
        dnf_length: (1, max_len),
        min_disjuncts: 1,
        max_depth: 3,
        require_nondeterminism: false,
        seed,
        ..Default::default()
    })
    .expect("generator parameters are valid")
}

/// Small automaton whose acceptance is a DNF with distinct atoms.
pub fn small_dnf_tela(seed: u64, max_states: u32) -> Tela {
    random_tela(&RandomParams {
        n_states: 1 + (seed % max_states as u64) as u32,
        n_aps: 1,
        n_marks: 6,
        edge_density: Some(0.45),
        mark_prob: 0.3,
        acc: AccKind::Dnf,
        dnf_disjuncts: (1, 2),
        dnf_infs: (1, 2),
        dnf_fins: (0, 1),
        require_nondeterminism: false,
        seed,
        ..Default::default()
    })
    .expect("generator parameters are valid")
}

/// Words to compare languages on: seeded samples plus accepting witnesses
/// of both automata.
pub fn probe_words(a: &Tela, b: &Tela, n: usize, seed: u64) -> Vec<LassoWord> {
    let mut words = sample_lassos(a, n, seed);
    for x in [a, b] {
        if let Some(l) = tela::analysis::accepting_lasso(x) {
            words.push(l.word());
        }
    }
    words
}

/// Membership in `reference` decided by the brute-force oracle when the
/// automaton and its product with `w` are small enough, otherwise by the
/// SCC procedure.
pub fn oracle_accepts(reference: &Tela, w: &LassoWord) -> bool {
    let word_len = (w.prefix.len() + w.cycle.len()) as u32;
    if reference.num_states() <= BRUTE_FORCE_MAX_STATES && reference.num_states() * word_len <= 128 {
        brute_force_accepts(reference, w).unwrap()
    } else {
        accepts(reference, w).unwrap()
    }
}

/// Number of words on which `candidate` disagrees with `reference`.
pub fn disagreements(reference: &Tela, candidate: &Tela, words: &[LassoWord]) -> usize {
    words
        .iter()
        .filter(|w| oracle_accepts(reference, w) != accepts(candidate, w).unwrap())
        .count()
}

/// Random MDP with two to `max_states` states. States other than 0 are
/// absorbing with probability 0.6 and state 0 is transient; the others get one or two actions with
/// up to two successors each, with probabilities in halves, thirds or
/// quarters. Labels range over `0..alphabet`.
pub fn random_mdp(seed: u64, max_states: u32, alphabet: u32) -> tela::mdp::Mdp {
    use rand::{Rng, SeedableRng};
    use tela::mdp::{Action, Mdp, Prob};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(max_states.min(2)..=max_states);
    let labels = (0..n).map(|_| rng.gen_range(0..alphabet)).collect();
    let actions = (0..n)
        .map(|s| {
            if s > 0 && rng.gen_bool(0.6) {
                return vec![Action {
                    name: "stay".into(),
                    succ: vec![(s, Prob::from_integer(1))],
                }];
            }
            (0..rng.gen_range(1..=2))
                .map(|k| {
                    // the initial state moves on to the others
                    let lo = u32::from(s == 0);
                    let (t1, t2) = {
                        let x = rng.gen_range(lo..n);
                        let y = rng.gen_range(lo..n);
                        (x.min(y), x.max(y))
                    };
                    let succ = if t1 == t2 || rng.gen_bool(0.15) {
                        vec![(t1, Prob::from_integer(1))]
                    } else {
                        let p = Prob::new(1, rng.gen_range(2..=4));
                        vec![(t1, p), (t2, Prob::from_integer(1) - p)]
                    };
                    Action {
                        name: format!("a{k}"),
                        succ,
                    }
                })
                .collect()
        })
        .collect();
    Mdp::new(labels, 0, actions).expect("valid random MDP")
}
