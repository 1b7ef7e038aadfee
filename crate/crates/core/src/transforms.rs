//! Fin-removal by copying and the translations to generalized Büchi
//! automata built on it.

use std::fmt;
use std::str::FromStr;

use crate::acceptance::AcceptanceFormula;
use crate::analysis::prune_useless;
use crate::automaton::{gba_formula, sum_gba_unchecked, DnfTela, Tela, Transition};
use crate::bitset::MarkSet;
use crate::error::{Error, Result};

/// Fin-removal for an automaton whose acceptance is syntactically in DNF.
pub fn remove_fin(a: &Tela) -> Result<Tela> {
    Ok(remove_fin_dnf(&DnfTela::from_dnf_shaped(a)?))
}

/// Variant of [`remove_fin`] whose output is a generalized Büchi automaton.
pub fn remove_fin_gba(a: &Tela) -> Result<Tela> {
    Ok(remove_fin_gba_dnf(&DnfTela::from_dnf_shaped(a)?))
}

/// Transitions of the main copy, the per-disjunct copies and the bridges.
/// `mark_copy(i, t)` gives the marks of `t`'s image in copy `i`.
fn copies(d: &DnfTela, mark_copy: impl Fn(usize, &Transition) -> MarkSet) -> Vec<Transition> {
    let a = &d.tela;
    let n = a.num_states();
    let mut out = Vec::new();
    for t in a.transitions() {
        out.push(Transition::new(t.src, t.letter, t.dst, MarkSet::new()));
    }
    for (i, clause) in d.clauses.iter().enumerate() {
        let off = (i as u32 + 1) * n;
        for t in a.transitions() {
            out.push(Transition::new(t.src, t.letter, t.dst + off, MarkSet::new()));
            if !t.marks.intersects(&clause.fin) {
                out.push(Transition::new(t.src + off, t.letter, t.dst + off, mark_copy(i, t)));
            }
        }
    }
    out
}

/// Main copy `0..n`, copy `i` (1-based) at `i*n..(i+1)*n`. Marks are
/// numbered copy-major: copy `i` owns `k_1 + .. + k_{i-1} ..` onwards.
pub fn remove_fin_dnf(d: &DnfTela) -> Tela {
    let a = &d.tela;
    let m = d.clauses.len() as u32;
    let offsets: Vec<u32> = d
        .clauses
        .iter()
        .scan(0u32, |acc, c| {
            let o = *acc;
            *acc += c.infs.len() as u32;
            Some(o)
        })
        .collect();
    let num_marks: u32 = d.clauses.iter().map(|c| c.infs.len() as u32).sum();
    let transitions = copies(d, |i, t| {
        d.clauses[i]
            .infs
            .iter()
            .enumerate()
            .filter(|(_, s)| t.marks.intersects(s))
            .map(|(j, _)| offsets[i] + j as u32)
            .collect()
    });
    let acceptance = AcceptanceFormula::or(d.clauses.iter().enumerate().map(|(i, c)| {
        AcceptanceFormula::and((0..c.infs.len() as u32).map(|j| AcceptanceFormula::inf([offsets[i] + j])))
    }));
    Tela::new(
        a.aps().to_vec(),
        (m + 1) * a.num_states(),
        a.initial().iter().copied(),
        transitions,
        acceptance,
        num_marks,
    )
    .expect("fin removal preserves validity")
}

pub fn remove_fin_gba_dnf(d: &DnfTela) -> Tela {
    let a = &d.tela;
    let m = d.clauses.len() as u32;
    if m == 0 {
        return empty_gba(a);
    }
    let k = d.max_k();
    let transitions = copies(d, |i, t| {
        let infs = &d.clauses[i].infs;
        (0..k)
            .filter(|&j| match infs.get(j) {
                Some(s) => t.marks.intersects(s),
                None => true,
            })
            .map(|j| j as u32)
            .collect()
    });
    Tela::new(
        a.aps().to_vec(),
        (m + 1) * a.num_states(),
        a.initial().iter().copied(),
        transitions,
        gba_formula(k),
        k as u32,
    )
    .expect("fin removal preserves validity")
}

/// One-state GBA with no transitions, accepting nothing. The single mark
/// is never carried.
fn empty_gba(a: &Tela) -> Tela {
    Tela::new(a.aps().to_vec(), 1, [0], vec![], AcceptanceFormula::inf([0]), 1).expect("valid")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GbaMethod {
    /// Fin-removal followed by CNF of the fin-less condition.
    Cnf,
    /// Fin-removal, split of the resulting disjunction, GBA sum.
    RemfinSplit,
    /// Split of the input, per-disjunct GBA fin-removal, GBA sum.
    SplitRemfin,
    /// Fin-removal with the padded conjunctive condition.
    RemfinRewrite,
}

impl GbaMethod {
    pub const ALL: [GbaMethod; 4] = [
        GbaMethod::Cnf,
        GbaMethod::RemfinSplit,
        GbaMethod::SplitRemfin,
        GbaMethod::RemfinRewrite,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GbaMethod::Cnf => "cnf",
            GbaMethod::RemfinSplit => "remfin_split",
            GbaMethod::SplitRemfin => "split_remfin",
            GbaMethod::RemfinRewrite => "remfin_rewrite",
        }
    }

    /// Whether the method is built on per-disjunct copies.
    pub fn is_copy_based(self) -> bool {
        self != GbaMethod::Cnf
    }
}

impl fmt::Display for GbaMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GbaMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        GbaMethod::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Invalid(format!("unknown GBA method `{s}`")))
    }
}

/// Language-equivalent generalized Büchi automaton.
pub fn to_gba(a: &Tela, method: GbaMethod) -> Tela {
    match method {
        GbaMethod::Cnf => cnf(a),
        GbaMethod::RemfinRewrite => prune_useless(&remove_fin_gba_dnf(&a.to_dnf())),
        GbaMethod::RemfinSplit => {
            let r = remove_fin_dnf(&a.to_dnf());
            sum_parts(a, r.split().iter().map(prune_useless).collect())
        }
        GbaMethod::SplitRemfin => {
            let d = a.to_dnf();
            let parts = (0..d.num_disjuncts())
                .map(|i| prune_useless(&remove_fin_gba_dnf(&d.disjunct(i))))
                .collect();
            sum_parts(a, parts)
        }
    }
}

fn sum_parts(a: &Tela, parts: Vec<Tela>) -> Tela {
    let mut it = parts.into_iter();
    let Some(first) = it.next() else {
        return empty_gba(a);
    };
    let first = normalize_gba(&first);
    it.fold(first, |acc, p| sum_gba_unchecked(&acc, &p).expect("parts are GBA"))
}

/// Renumbers a GBA so that acceptance set `j` is mark `j`.
fn normalize_gba(a: &Tela) -> Tela {
    let sets = a.acceptance().gba_sets().expect("GBA acceptance");
    let k = sets.len();
    let transitions = crate::automaton::gba_remark(a, k).expect("GBA acceptance");
    Tela::new(
        a.aps().to_vec(),
        a.num_states(),
        a.initial().iter().copied(),
        transitions,
        gba_formula(k),
        k as u32,
    )
    .expect("valid")
}

fn cnf(a: &Tela) -> Tela {
    let fin_less = if a.acceptance().has_fin() {
        prune_useless(&remove_fin_dnf(&a.to_dnf()))
    } else {
        a.clone()
    };
    let clauses = fin_less
        .acceptance()
        .finless_to_gba()
        .expect("fin removal leaves a fin-less condition");
    let k = clauses.len();
    let transitions = fin_less
        .transitions()
        .iter()
        .map(|t| {
            let marks = (0..k as u32).filter(|&c| t.marks.intersects(&clauses[c as usize])).collect();
            Transition::new(t.src, t.letter, t.dst, marks)
        })
        .collect();
    Tela::new(
        a.aps().to_vec(),
        fin_less.num_states(),
        fin_less.initial().iter().copied(),
        transitions,
        gba_formula(k),
        k as u32,
    )
    .expect("valid")
}
