//! Hand-built automata and Markov chains used in tests, the CLI and the
//! benchmark harness.

use crate::acceptance::AcceptanceFormula;
use crate::automaton::{Letter, Tela, Transition};
use crate::bitset::MarkSet;
use crate::mdp::{Mdp, Prob};

/// One state over one proposition `a`; for every `i < n` the `a`-loop
/// carries mark `2i` and the `!a`-loop mark `2i+1`. Acceptance
/// `⋁_i (Inf(2i) ∧ Inf(2i+1))`, whose CNF has `2^n` clauses. Every
/// disjunct alone defines "infinitely many `a` and infinitely many `!a`".
pub fn cnf_blowup(n: u32) -> Tela {
    let mut transitions = Vec::new();
    for i in 0..n {
        transitions.push(Transition::new(0, 1, 0, MarkSet::singleton(2 * i)));
        transitions.push(Transition::new(0, 0, 0, MarkSet::singleton(2 * i + 1)));
    }
    let acceptance = AcceptanceFormula::or(
        (0..n).map(|i| AcceptanceFormula::and([AcceptanceFormula::inf([2 * i]), AcceptanceFormula::inf([2 * i + 1])])),
    );
    Tela::new(vec!["a".into()], 1, [0], transitions, acceptance, 2 * n).expect("valid family member")
}

/// Letters of the four-letter alphabet over propositions `x`, `y`.
pub const A1: Letter = 0;
pub const A2: Letter = 1;
pub const B1: Letter = 2;
pub const B2: Letter = 3;

/// State `a_i b_j` (`i, j ∈ {1, 2}`) is `2(i-1) + (j-1)`; state `b_i a_j`
/// is `4 + 2(i-1) + (j-1)`.
pub fn ab_state(i: u32, j: u32) -> u32 {
    2 * (i - 1) + (j - 1)
}

pub fn ba_state(i: u32, j: u32) -> u32 {
    4 + ab_state(i, j)
}

/// Eight-state Büchi automaton for `({a_i b_j})^ω`: `a_i b_j` reads `a_i`
/// and moves to `b_j a_1` or `b_j a_2`, symmetrically for `b_i a_j`. All
/// `a_i b_j` are initial and every transition is accepting.
pub fn singleton_bridge_counterexample() -> Tela {
    let acc = MarkSet::singleton(0);
    let a = [A1, A2];
    let b = [B1, B2];
    let mut transitions = Vec::new();
    for i in 1..=2 {
        for j in 1..=2 {
            for k in 1..=2 {
                transitions.push(Transition::new(ab_state(i, j), a[i as usize - 1], ba_state(j, k), acc.clone()));
                transitions.push(Transition::new(ba_state(i, j), b[i as usize - 1], ab_state(j, k), acc.clone()));
            }
        }
    }
    Tela::new(
        vec!["x".into(), "y".into()],
        8,
        (1..=2).flat_map(|i| (1..=2).map(move |j| ab_state(i, j))),
        transitions,
        AcceptanceFormula::inf([0]),
        1,
    )
    .expect("valid automaton")
}

/// Markov chain over states labelled `a_1, a_2, b_1, b_2` (state `s` has
/// letter `s`), starting in `a_1`. From an `a` state it moves to `b_1` or
/// `b_2`, from a `b` state to `a_1` or `a_2`, each with probability 1/2.
pub fn alternating_chain() -> Mdp {
    let half = Prob::new(1, 2);
    let to_b = vec![(B1, half), (B2, half)];
    let to_a = vec![(A1, half), (A2, half)];
    Mdp::chain(vec![A1, A2, B1, B2], A1, vec![to_b.clone(), to_b, to_a.clone(), to_a]).expect("valid chain")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn blowup_shape() {
        let a = cnf_blowup(3);
        assert_eq!(a.num_marks(), 6);
        assert_eq!(a.to_dnf().num_disjuncts(), 3);
    }

    #[test]
    fn counterexample_shape() {
        let a = singleton_bridge_counterexample();
        assert_eq!(a.initial(), &[0, 1, 2, 3]);
        assert_eq!(a.transitions().len(), 16);
        // a1b1 --a1--> b1a1, b1a2
        let succ: Vec<u32> = a.succ(ab_state(1, 1), A1).iter().map(|t| t.dst).collect();
        assert_eq!(succ, vec![ba_state(1, 1), ba_state(1, 2)]);
        assert!(a.succ(ab_state(1, 1), A2).is_empty());
        assert_eq!(alternating_chain().num_states(), 4);
    }
}
