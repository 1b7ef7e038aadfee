//! Degeneralization, Safra determinization and the two determinization
//! pipelines for TELA, plus language containment of deterministic
//! automata.

mod safra;

use std::collections::{HashMap, VecDeque};

use rayon::prelude::*;

pub use safra::{safra_determinize, safra_determinize_bounded, SafraTree};

use crate::acceptance::AcceptanceFormula;
use crate::analysis::{is_empty, prune_useless};
use crate::automaton::{product_unchecked, Combinator, DnfTela, StateId, Tela, Transition};
use crate::bitset::MarkSet;
use crate::error::{Error, Result};
use crate::graph;
use crate::transforms::{remove_fin_dnf, to_gba, GbaMethod};

/// Counter construction from generalized Büchi to Büchi. The counter
/// records the next awaited acceptance set and is reset when a transition
/// leaves its SCC.
pub fn degeneralize(g: &Tela) -> Result<Tela> {
    let sets = g
        .acceptance()
        .gba_sets()
        .ok_or_else(|| Error::NotGba(g.acceptance().to_string()))?;
    let k = sets.len();
    let comp = graph::component_index(g.num_states() as usize, &g.sccs());
    let mut ids: HashMap<(StateId, usize), StateId> = HashMap::new();
    let mut states: Vec<(StateId, usize)> = Vec::new();
    let mut queue = VecDeque::new();
    let mut initial = Vec::new();
    for &q in g.initial() {
        ids.insert((q, 0), states.len() as StateId);
        initial.push(states.len() as StateId);
        queue.push_back(states.len() as StateId);
        states.push((q, 0));
    }
    let mut transitions = Vec::new();
    while let Some(id) = queue.pop_front() {
        let (q, c) = states[id as usize];
        for t in g.out(q) {
            let mut next = c;
            while next < k && t.marks.intersects(&sets[next]) {
                next += 1;
            }
            let accepting = next == k;
            if accepting || comp[t.src as usize] != comp[t.dst as usize] {
                next = 0;
            }
            let key = (t.dst, next);
            let dst = *ids.entry(key).or_insert_with(|| {
                let n = states.len() as StateId;
                states.push(key);
                queue.push_back(n);
                n
            });
            let marks = if accepting { MarkSet::singleton(0) } else { MarkSet::new() };
            transitions.push(Transition::new(id, t.letter, dst, marks));
        }
    }
    Tela::new(
        g.aps().to_vec(),
        states.len() as u32,
        initial,
        transitions,
        AcceptanceFormula::inf([0]),
        1,
    )
}

/// Determinization through a single GBA: `to_gba`, degeneralization,
/// Safra.
pub fn determinize_via_gba(a: &Tela, method: GbaMethod) -> Tela {
    determinize_via_gba_bounded(a, method, usize::MAX).expect("unbounded determinization")
}

pub fn determinize_via_gba_bounded(a: &Tela, method: GbaMethod, max_states: usize) -> Result<Tela> {
    let g = prune_useless(&to_gba(a, method));
    safra_determinize_bounded(&degeneralize(&g)?, max_states)
}

/// Deterministic automaton for one DNF disjunct: fin-removal on the
/// single-disjunct automaton, degeneralization, Safra.
pub(crate) fn determinize_disjunct(d: &DnfTela, i: usize, max_states: usize) -> Result<Tela> {
    let g = prune_useless(&remove_fin_dnf(&d.disjunct(i)));
    safra_determinize_bounded(&degeneralize(&g)?, max_states)
}

/// Options for [`determinize_product_with`].
#[derive(Clone, Copy, Debug)]
pub struct ProductOptions {
    /// Skip components whose language is already covered.
    pub langcover: bool,
    /// Determinize the components on the rayon pool.
    pub parallel: bool,
    /// State budget for every intermediate deterministic automaton.
    pub max_states: usize,
}

impl Default for ProductOptions {
    fn default() -> Self {
        Self {
            langcover: true,
            parallel: false,
            max_states: usize::MAX,
        }
    }
}

/// Outcome of the product pipeline.
#[derive(Clone, Debug)]
pub struct ProductResult {
    pub automaton: Tela,
    /// Indices of the DNF disjuncts whose components entered the product.
    pub used: Vec<usize>,
}

/// Determinizes each DNF disjunct separately and combines the results with
/// the disjunctive product.
pub fn determinize_product(a: &Tela, langcover: bool) -> Tela {
    determinize_product_with(
        a,
        ProductOptions {
            langcover,
            ..Default::default()
        },
    )
    .expect("unbounded determinization")
    .automaton
}

pub fn determinize_product_with(a: &Tela, opts: ProductOptions) -> Result<ProductResult> {
    let d = a.to_dnf();
    let m = d.num_disjuncts();
    let components: Vec<Result<Tela>> = if opts.parallel {
        (0..m).into_par_iter().map(|i| determinize_disjunct(&d, i, opts.max_states)).collect()
    } else {
        (0..m).map(|i| determinize_disjunct(&d, i, opts.max_states)).collect()
    };
    let mut acc: Option<Tela> = None;
    let mut used = Vec::new();
    for (i, c) in components.into_iter().enumerate() {
        let c = c?;
        match acc.take() {
            None => acc = Some(c),
            Some(p) => {
                if opts.langcover && contains(&p, &c)? {
                    acc = Some(p);
                    continue;
                }
                let next = product_unchecked(&p, &c, Combinator::Or);
                if next.num_states() as usize > opts.max_states {
                    return Err(Error::Limit(format!("product exceeds {} states", opts.max_states)));
                }
                acc = Some(next);
            }
        }
        used.push(i);
    }
    let automaton = match acc {
        Some(p) => p,
        None => Tela::universal(a.aps().to_vec(), AcceptanceFormula::False, 0)?,
    };
    Ok(ProductResult { automaton, used })
}

/// `L(d) ⊆ L(p)` for deterministic complete automata.
pub fn contains(p: &Tela, d: &Tela) -> Result<bool> {
    for x in [p, d] {
        if !x.is_deterministic() {
            return Err(Error::NotDeterministic);
        }
        if !x.is_complete() {
            return Err(Error::NotComplete);
        }
    }
    if p.num_aps() != d.num_aps() {
        return Err(Error::AlphabetMismatch(p.num_aps(), d.num_aps()));
    }
    let np = p.complement_deterministic()?;
    Ok(is_empty(&product_unchecked(d, &np, Combinator::And)))
}

/// Language equality of deterministic complete automata.
pub fn equivalent(a: &Tela, b: &Tela) -> Result<bool> {
    Ok(contains(a, b)? && contains(b, a)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::acceptance::AcceptanceFormula as F;
    use crate::analysis::{accepts, sample_lassos};

    fn ms(v: &[u32]) -> MarkSet {
        v.iter().copied().collect()
    }

    fn t(s: u32, l: u32, d: u32, m: &[u32]) -> Transition {
        Transition::new(s, l, d, ms(m))
    }

    #[test]
    fn degeneralize_k1_is_isomorphic() {
        let g = Tela::new(
            vec!["a".into()],
            2,
            [0],
            vec![t(0, 0, 1, &[0]), t(1, 1, 0, &[]), t(1, 0, 1, &[0])],
            F::inf([0]),
            1,
        )
        .unwrap();
        let b = degeneralize(&g).unwrap();
        assert_eq!(b.num_states(), 2);
        assert_eq!(b.transitions(), g.transitions());
    }

    #[test]
    fn degeneralize_bound_and_language() {
        let g = Tela::new(
            vec!["a".into()],
            3,
            [0],
            vec![
                t(0, 0, 1, &[0]),
                t(1, 1, 2, &[1]),
                t(2, 0, 0, &[]),
                t(2, 1, 2, &[0, 1]),
                t(0, 1, 0, &[]),
            ],
            F::and([F::inf([0]), F::inf([1])]),
            2,
        )
        .unwrap();
        let b = degeneralize(&g).unwrap();
        assert!(b.num_states() <= 6);
        for w in sample_lassos(&g, 60, 9) {
            assert_eq!(accepts(&g, &w).unwrap(), accepts(&b, &w).unwrap());
        }
    }

    #[test]
    fn contains_basics() {
        let aps = vec!["a".to_string()];
        let univ = Tela::universal(aps.clone(), F::True, 0).unwrap();
        let empty = Tela::universal(aps.clone(), F::False, 0).unwrap();
        let inf_a = Tela::new(
            aps,
            2,
            [0],
            vec![t(0, 0, 0, &[]), t(0, 1, 1, &[0]), t(1, 0, 0, &[]), t(1, 1, 1, &[0])],
            F::inf([0]),
            1,
        )
        .unwrap();
        assert!(contains(&inf_a, &inf_a).unwrap());
        assert!(contains(&univ, &inf_a).unwrap());
        assert!(!contains(&empty, &univ).unwrap());
        assert!(!contains(&inf_a, &univ).unwrap());
        let nd = Tela::new(vec!["a".into()], 1, [0], vec![t(0, 0, 0, &[]), t(0, 0, 0, &[0]), t(0, 1, 0, &[])], F::inf([0]), 1).unwrap();
        assert_eq!(contains(&univ, &nd), Err(Error::NotDeterministic));
    }

    #[test]
    fn zero_disjuncts_gives_false_automaton() {
        let a = Tela::universal(vec![], F::False, 0).unwrap();
        let d = determinize_product(&a, true);
        assert_eq!(d.num_states(), 1);
        assert_eq!(d.acceptance(), &F::False);
    }

    #[test]
    fn single_disjunct_matches_via_gba() {
        let a = Tela::new(
            vec!["a".into()],
            2,
            [0],
            vec![t(0, 0, 0, &[]), t(0, 0, 1, &[]), t(0, 1, 0, &[]), t(1, 0, 1, &[0]), t(1, 1, 1, &[1])],
            F::and([F::fin([1]), F::inf([0])]),
            2,
        )
        .unwrap();
        let p = determinize_product(&a, true);
        let v = determinize_via_gba(&a, GbaMethod::RemfinRewrite);
        assert_eq!(p, v);
    }

    #[test]
    fn langcover_keeps_one_of_identical_disjuncts() {
        // Both disjuncts define "infinitely many a".
        let a = Tela::new(
            vec!["a".into()],
            1,
            [0],
            vec![t(0, 0, 0, &[]), t(0, 1, 0, &[0, 1])],
            F::or([
                F::and([F::inf([0]), F::fin([2])]),
                F::and([F::inf([1]), F::fin([3])]),
            ]),
            4,
        )
        .unwrap();
        let r = determinize_product_with(&a, ProductOptions::default()).unwrap();
        assert_eq!(r.used.len(), 1);
        let full = determinize_product(&a, false);
        assert!(equivalent(&r.automaton, &full).unwrap());
    }
}
