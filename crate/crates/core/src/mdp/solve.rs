use super::mec::mec_decomposition_filtered;
use super::{mdp_product, ChoiceGraph, Mdp, ProductMdp};
use crate::acceptance::InfAtom;
use crate::analysis::accepting_lasso;
use crate::bitset::{MarkSet, StateSet};
use crate::determinize::determinize_product;
use crate::error::{Error, Result};
use crate::graph;
use crate::automaton::Tela;
use crate::limitdet::{build_gfm_with, canonical_partition, LdOptions};

/// Stopping width of interval value iteration.
pub const VI_TOLERANCE: f64 = 1e-9;

const VI_MAX_ROUNDS: usize = 10_000_000;

/// Maximal probability of reaching `target` from every state. End
/// components outside the target are collapsed first, then lower and
/// upper bounds are iterated until they are `tol` apart.
pub fn max_reachability(g: &ChoiceGraph, target: &[bool], tol: f64) -> Vec<f64> {
    let n = g.num_states();
    let adj: Vec<Vec<u32>> = g
        .choices
        .iter()
        .map(|cs| cs.iter().flatten().map(|&(t, _)| t).collect())
        .collect();
    let goals: Vec<u32> = (0..n as u32).filter(|&s| target[s as usize]).collect();
    let can_reach = graph::reachable(&graph::reverse(&adj), goals);

    let mecs = mec_decomposition_filtered(g, |s, _| !target[s as usize]);
    let mut node: Vec<usize> = (0..n).collect();
    for e in &mecs {
        let rep = e.states.first().expect("non-empty") as usize;
        for s in e.states.iter() {
            node[s as usize] = rep;
        }
    }
    // Quotient choices: every choice that can leave its node.
    let mut qchoices: Vec<Vec<Vec<(usize, f64)>>> = vec![Vec::new(); n];
    for s in 0..n {
        if target[s] || !can_reach[s] {
            continue;
        }
        for c in &g.choices[s] {
            if c.iter().all(|&(t, _)| node[t as usize] == node[s]) {
                continue;
            }
            qchoices[node[s]].push(c.iter().map(|&(t, p)| (node[t as usize], p)).collect());
        }
    }
    let fixed = |v: usize| target[v] || !can_reach[v] || qchoices[v].is_empty();
    let mut lo = vec![0.0f64; n];
    let mut hi = vec![0.0f64; n];
    for v in 0..n {
        if node[v] != v {
            continue;
        }
        if target[v] {
            lo[v] = 1.0;
            hi[v] = 1.0;
        } else if !fixed(v) {
            hi[v] = 1.0;
        }
    }
    let live: Vec<usize> = (0..n).filter(|&v| node[v] == v && !fixed(v)).collect();
    let eval = |x: &[f64], cs: &[Vec<(usize, f64)>]| -> f64 {
        cs.iter()
            .map(|c| c.iter().map(|&(t, p)| p * x[t]).sum::<f64>())
            .fold(0.0, f64::max)
    };
    for _ in 0..VI_MAX_ROUNDS {
        let mut width = 0.0f64;
        for &v in &live {
            lo[v] = eval(&lo, &qchoices[v]).min(1.0);
            hi[v] = eval(&hi, &qchoices[v]).min(1.0).max(lo[v]);
            width = width.max(hi[v] - lo[v]);
        }
        if width < tol {
            break;
        }
    }
    (0..n).map(|s| (lo[node[s]] + hi[node[s]]) / 2.0).collect()
}

/// States of end components that avoid every `fin` mark and see each set
/// of `infs`; `None` in `infs` is satisfied by any end component.
fn accepting_ec_states(p: &ProductMdp, g: &ChoiceGraph, fin: &MarkSet, infs: &[Option<MarkSet>]) -> StateSet {
    let mecs = mec_decomposition_filtered(g, |s, c| !p.choices[s as usize][c].marks.intersects(fin));
    let mut out = StateSet::new();
    for e in mecs {
        let mut seen = MarkSet::new();
        for &(s, c) in &e.choices {
            seen.union_with(&p.choices[s as usize][c].marks);
        }
        if infs.iter().all(|i| i.as_ref().is_none_or(|set| seen.intersects(set))) {
            out.union_with(&e.states);
        }
    }
    out
}

fn dnf_target(p: &ProductMdp, g: &ChoiceGraph) -> StateSet {
    let mut out = StateSet::new();
    for d in p.acceptance.to_dnf().disjuncts {
        let infs: Vec<Option<MarkSet>> = d
            .infs
            .iter()
            .map(|i| match i {
                InfAtom::Marks(s) => Some(s.clone()),
                InfAtom::All => None,
            })
            .collect();
        out.union_with(&accepting_ec_states(p, g, &d.fin, &infs));
    }
    out
}

fn value_at_initial(g: &ChoiceGraph, target: &StateSet) -> f64 {
    let t: Vec<bool> = (0..g.num_states() as u32).map(|s| target.contains(s)).collect();
    max_reachability(g, &t, VI_TOLERANCE)[0]
}

/// `Pr^max` of the accepting paths of a product whose acceptance is
/// generalized Büchi.
pub fn pr_max_buchi(p: &ProductMdp) -> Result<f64> {
    let sets = p
        .acceptance
        .gba_sets()
        .ok_or_else(|| Error::NotGba(p.acceptance.to_string()))?;
    let g = p.graph();
    let infs: Vec<Option<MarkSet>> = sets.into_iter().map(Some).collect();
    let target = accepting_ec_states(p, &g, &MarkSet::new(), &infs);
    Ok(value_at_initial(&g, &target))
}

/// `Pr^max_M(L(B))` through the good-for-MDP automaton of `b`.
pub fn pr_max_tela(m: &Mdp, b: &Tela) -> Result<f64> {
    pr_max_tela_with(m, b, LdOptions::default())
}

pub fn pr_max_tela_with(m: &Mdp, b: &Tela, opts: LdOptions) -> Result<f64> {
    let g = build_gfm_with(b, opts)?.automaton;
    pr_max_buchi(&mdp_product(m, &g)?)
}

/// Reference value through the deterministic product automaton of `b`:
/// states of accepting end components per DNF disjunct, then maximal
/// reachability.
pub fn pr_max_reference(m: &Mdp, b: &Tela) -> Result<f64> {
    let d = determinize_product(b, true);
    let p = mdp_product(m, &d)?;
    let g = p.graph();
    let target = dnf_target(&p, &g);
    Ok(value_at_initial(&g, &target))
}

fn check_limit_deterministic(a: &Tela) -> Result<()> {
    let part = canonical_partition(a);
    let (n_aut, map) = a.restrict(&part.nondet);
    if let Some(lasso) = accepting_lasso(&n_aut) {
        let back: Vec<u32> = (0..a.num_states())
            .filter(|&q| map[q as usize].is_some())
            .collect();
        let cycle: Vec<String> = lasso.cycle.iter().map(|t| back[t.src as usize].to_string()).collect();
        return Err(Error::NotLimitDeterministic(format!(
            "accepting cycle through nondeterministic states {}",
            cycle.join(" ")
        )));
    }
    Ok(())
}

fn product_for(m: &Mdp, a: &Tela) -> Result<Option<ProductMdp>> {
    check_limit_deterministic(a)?;
    if a.initial().is_empty() {
        return Ok(None);
    }
    Ok(Some(mdp_product(m, &a.single_initial())?))
}

/// `Pr^max_M(L(A)) > 0` for limit-deterministic `a`.
pub fn qualitative_positive(m: &Mdp, a: &Tela) -> Result<bool> {
    if a.acceptance().has_fin() {
        qualitative_positive_dnf(m, a)
    } else {
        qualitative_positive_finless(m, a)
    }
}

/// Some end component of the product, restricted to the transitions of
/// one disjunct's non-`Fin` part, sees all its `Inf` sets.
pub fn qualitative_positive_dnf(m: &Mdp, a: &Tela) -> Result<bool> {
    let Some(p) = product_for(m, a)? else { return Ok(false) };
    Ok(!dnf_target(&p, &p.graph()).is_empty())
}

/// Maximal end components suffice when the condition is monotone.
pub fn qualitative_positive_finless(m: &Mdp, a: &Tela) -> Result<bool> {
    if a.acceptance().has_fin() {
        return Err(Error::HasFin);
    }
    let Some(p) = product_for(m, a)? else { return Ok(false) };
    let mecs = mec_decomposition_filtered(&p.graph(), |_, _| true);
    Ok(mecs.iter().any(|e| {
        let mut seen = MarkSet::new();
        for &(s, c) in &e.choices {
            seen.union_with(&p.choices[s as usize][c].marks);
        }
        p.acceptance.evaluate(&seen)
    }))
}
