//! The TELA data model and its structural operations: completion, split,
//! sum, GBA-specific sum, synchronized products and complementation of
//! deterministic automata.

use std::collections::{HashMap, VecDeque};

use crate::acceptance::{AcceptanceFormula, InfAtom};
use crate::bitset::{MarkSet, StateSet};
use crate::error::{Error, Result};
use crate::graph;

pub type StateId = u32;
/// Index of a letter; bit `j` holds the value of atomic proposition `j`.
pub type Letter = u32;

/// Hard ceiling on atomic propositions for any automaton.
pub const MAX_APS_HARD: usize = 16;
/// Default cap applied by parsers and generators.
pub const DEFAULT_MAX_APS: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Transition {
    pub src: StateId,
    pub letter: Letter,
    pub dst: StateId,
    pub marks: MarkSet,
}

impl Transition {
    pub fn new(src: StateId, letter: Letter, dst: StateId, marks: MarkSet) -> Self {
        Self {
            src,
            letter,
            dst,
            marks,
        }
    }
}

/// A transition-based Emerson-Lei automaton over the explicit alphabet of
/// all valuations of its atomic propositions.
///
/// Transitions are kept sorted by `(src, letter, dst, marks)` without
/// duplicates and the acceptance formula is kept normalized, so two
/// automata are equal iff they are structurally identical.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tela {
    aps: Vec<String>,
    num_states: u32,
    initial: Vec<StateId>,
    transitions: Vec<Transition>,
    acceptance: AcceptanceFormula,
    num_marks: u32,
    out_start: Vec<usize>,
}

/// Combinator for [`product`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Combinator {
    Or,
    And,
}

impl Tela {
    pub fn new(
        aps: Vec<String>,
        num_states: u32,
        initial: impl IntoIterator<Item = StateId>,
        mut transitions: Vec<Transition>,
        acceptance: AcceptanceFormula,
        num_marks: u32,
    ) -> Result<Self> {
        if aps.len() > MAX_APS_HARD {
            return Err(Error::Limit(format!(
                "{} atomic propositions exceed the maximum of {MAX_APS_HARD}",
                aps.len()
            )));
        }
        let letters = 1u32 << aps.len();
        let mut initial: Vec<StateId> = initial.into_iter().collect();
        initial.sort_unstable();
        initial.dedup();
        if let Some(&q) = initial.iter().find(|&&q| q >= num_states) {
            return Err(Error::InvalidAutomaton(format!("initial state {q} out of range")));
        }
        for t in &transitions {
            if t.src >= num_states || t.dst >= num_states {
                return Err(Error::InvalidAutomaton(format!(
                    "transition {} -> {} out of range ({} states)",
                    t.src, t.dst, num_states
                )));
            }
            if t.letter >= letters {
                return Err(Error::InvalidAutomaton(format!("letter {} out of range", t.letter)));
            }
            if t.marks.bound() > num_marks {
                return Err(Error::InvalidAutomaton(format!(
                    "transition mark {} exceeds mark count {num_marks}",
                    t.marks.bound() - 1
                )));
            }
        }
        let acceptance = acceptance.normalize();
        if acceptance.marks().bound() > num_marks {
            return Err(Error::InvalidAutomaton(format!(
                "acceptance references mark {} but only {num_marks} marks are declared",
                acceptance.marks().bound() - 1
            )));
        }
        transitions.sort_unstable();
        transitions.dedup();
        let mut out_start = vec![0usize; num_states as usize + 1];
        for t in &transitions {
            out_start[t.src as usize + 1] += 1;
        }
        for i in 0..num_states as usize {
            out_start[i + 1] += out_start[i];
        }
        Ok(Self {
            aps,
            num_states,
            initial,
            transitions,
            acceptance,
            num_marks,
            out_start,
        })
    }

    /// Single-state automaton with a self-loop on every letter.
    pub fn universal(aps: Vec<String>, acceptance: AcceptanceFormula, num_marks: u32) -> Result<Self> {
        let letters = 1u32 << aps.len();
        let trans = (0..letters).map(|a| Transition::new(0, a, 0, MarkSet::new())).collect();
        Tela::new(aps, 1, [0], trans, acceptance, num_marks)
    }

    pub fn aps(&self) -> &[String] {
        &self.aps
    }

    pub fn num_aps(&self) -> usize {
        self.aps.len()
    }

    pub fn alphabet_size(&self) -> u32 {
        1 << self.aps.len()
    }

    pub fn num_states(&self) -> u32 {
        self.num_states
    }

    pub fn initial(&self) -> &[StateId] {
        &self.initial
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn acceptance(&self) -> &AcceptanceFormula {
        &self.acceptance
    }

    pub fn num_marks(&self) -> u32 {
        self.num_marks
    }

    /// Outgoing transitions of `q`, sorted by letter.
    pub fn out(&self, q: StateId) -> &[Transition] {
        &self.transitions[self.out_start[q as usize]..self.out_start[q as usize + 1]]
    }

    /// Index range of `q`'s outgoing transitions in [`transitions`](Self::transitions).
    pub fn out_range(&self, q: StateId) -> std::ops::Range<usize> {
        self.out_start[q as usize]..self.out_start[q as usize + 1]
    }

    /// Outgoing transitions of `q` on letter `a`.
    pub fn succ(&self, q: StateId, a: Letter) -> &[Transition] {
        let out = self.out(q);
        let lo = out.partition_point(|t| t.letter < a);
        let hi = out.partition_point(|t| t.letter <= a);
        &out[lo..hi]
    }

    /// Successor states on `a` from any state of `from`.
    pub fn post(&self, from: &StateSet, a: Letter) -> StateSet {
        let mut out = StateSet::new();
        for q in from.iter() {
            for t in self.succ(q, a) {
                out.insert(t.dst);
            }
        }
        out
    }

    /// Human-readable letter in HOA label syntax, e.g. `0&!1`.
    pub fn letter_label(&self, a: Letter) -> String {
        letter_label(self.aps.len(), a)
    }

    /// Same automaton with a different acceptance condition.
    pub fn with_acceptance(&self, acceptance: AcceptanceFormula, num_marks: u32) -> Result<Tela> {
        Tela::new(
            self.aps.clone(),
            self.num_states,
            self.initial.iter().copied(),
            self.transitions.clone(),
            acceptance,
            num_marks,
        )
    }

    /// Adjacency lists of the underlying graph (targets may repeat).
    pub fn adjacency(&self) -> Vec<Vec<u32>> {
        (0..self.num_states)
            .map(|q| self.out(q).iter().map(|t| t.dst).collect())
            .collect()
    }

    pub fn is_deterministic(&self) -> bool {
        self.initial.len() == 1
            && (0..self.num_states).all(|q| {
                self.out(q).windows(2).all(|w| w[0].letter != w[1].letter)
            })
    }

    pub fn is_complete(&self) -> bool {
        let letters = self.alphabet_size();
        (0..self.num_states).all(|q| {
            let mut count = 0u32;
            let mut last = None;
            for t in self.out(q) {
                if last != Some(t.letter) {
                    count += 1;
                    last = Some(t.letter);
                }
            }
            count == letters
        })
    }

    /// Language-preserving completion with one fresh sink state. If the
    /// condition accepts mark-free runs, every original transition gets a
    /// fresh mark and the condition is conjoined with `Inf` of it, so the
    /// sink cannot accept.
    pub fn complete(&self) -> Tela {
        if self.is_complete() {
            return self.clone();
        }
        let mut transitions = self.transitions.clone();
        let mut acceptance = self.acceptance.clone();
        let mut num_marks = self.num_marks;
        if acceptance.evaluate(&MarkSet::new()) {
            let all = num_marks;
            num_marks += 1;
            for t in &mut transitions {
                t.marks.insert(all);
            }
            acceptance = AcceptanceFormula::and([acceptance, AcceptanceFormula::inf([all])]);
        }
        let sink = self.num_states;
        for q in 0..self.num_states {
            for a in 0..self.alphabet_size() {
                if self.succ(q, a).is_empty() {
                    transitions.push(Transition::new(q, a, sink, MarkSet::new()));
                }
            }
        }
        for a in 0..self.alphabet_size() {
            transitions.push(Transition::new(sink, a, sink, MarkSet::new()));
        }
        Tela::new(
            self.aps.clone(),
            self.num_states + 1,
            self.initial.iter().copied(),
            transitions,
            acceptance,
            num_marks,
        )
        .expect("completion preserves validity")
    }

    /// One automaton per top-level disjunct of the acceptance condition.
    pub fn split(&self) -> Vec<Tela> {
        self.acceptance
            .top_disjuncts()
            .into_iter()
            .map(|d| self.with_acceptance(d, self.num_marks).expect("sub-formula is valid"))
            .collect()
    }

    /// Automaton with the same structure accepting the complement
    /// language. Requires a deterministic complete input.
    pub fn complement_deterministic(&self) -> Result<Tela> {
        if !self.is_deterministic() {
            return Err(Error::NotDeterministic);
        }
        if !self.is_complete() {
            return Err(Error::NotComplete);
        }
        self.with_acceptance(self.acceptance.negate(), self.num_marks)
    }

    /// SCCs of the transition graph, ordered by minimal state.
    pub fn sccs(&self) -> Vec<Vec<StateId>> {
        graph::sccs(&self.adjacency())
    }

    /// States reachable from the initial states.
    pub fn reachable(&self) -> StateSet {
        graph::reachable(&self.adjacency(), self.initial.iter().copied())
            .into_iter()
            .enumerate()
            .filter(|(_, r)| *r)
            .map(|(q, _)| q as u32)
            .collect()
    }

    /// Sub-automaton on the states in `keep`, renumbered in ascending
    /// order. Returns the automaton and the old-to-new state map.
    pub fn restrict(&self, keep: &StateSet) -> (Tela, Vec<Option<StateId>>) {
        let mut map = vec![None; self.num_states as usize];
        let mut next = 0;
        for q in keep.iter().filter(|&q| q < self.num_states) {
            map[q as usize] = Some(next);
            next += 1;
        }
        let transitions = self
            .transitions
            .iter()
            .filter_map(|t| {
                Some(Transition::new(
                    map[t.src as usize]?,
                    t.letter,
                    map[t.dst as usize]?,
                    t.marks.clone(),
                ))
            })
            .collect();
        let initial: Vec<_> = self.initial.iter().filter_map(|&q| map[q as usize]).collect();
        let t = Tela::new(
            self.aps.clone(),
            next,
            initial,
            transitions,
            self.acceptance.clone(),
            self.num_marks,
        )
        .expect("restriction preserves validity");
        (t, map)
    }

    /// Drops states unreachable from the initial states.
    pub fn trim_unreachable(&self) -> Tela {
        let r = self.reachable();
        if r.len() == self.num_states as usize {
            return self.clone();
        }
        self.restrict(&r).0
    }

    /// Equivalent automaton with a single initial state: a fresh state
    /// copying the outgoing transitions of all initial states.
    pub fn single_initial(&self) -> Tela {
        if self.initial.len() == 1 {
            return self.clone();
        }
        let fresh = self.num_states;
        let mut transitions = self.transitions.clone();
        for &q in &self.initial {
            for t in self.out(q) {
                transitions.push(Transition::new(fresh, t.letter, t.dst, t.marks.clone()));
            }
        }
        Tela::new(
            self.aps.clone(),
            self.num_states + 1,
            [fresh],
            transitions,
            self.acceptance.clone(),
            self.num_marks,
        )
        .expect("fresh initial state preserves validity")
    }

    /// The DNF view of this automaton: acceptance rewritten into
    /// generalized-Rabin form, with a fresh mark carried by every
    /// transition materialized when some disjunct has no `Inf` atom.
    pub fn to_dnf(&self) -> DnfTela {
        let dnf = self.acceptance.to_dnf();
        let mut num_marks = self.num_marks;
        let mut transitions = self.transitions.clone();
        let all = if dnf.uses_all() {
            let m = num_marks;
            num_marks += 1;
            for t in &mut transitions {
                t.marks.insert(m);
            }
            Some(m)
        } else {
            None
        };
        let clauses: Vec<DnfClause> = dnf
            .disjuncts
            .iter()
            .map(|d| DnfClause {
                fin: d.fin.clone(),
                infs: d
                    .infs
                    .iter()
                    .map(|i| match i {
                        InfAtom::Marks(s) => s.clone(),
                        InfAtom::All => MarkSet::singleton(all.expect("all mark allocated")),
                    })
                    .collect(),
            })
            .collect();
        let acceptance = clauses_formula(&clauses);
        let tela = Tela::new(
            self.aps.clone(),
            self.num_states,
            self.initial.iter().copied(),
            transitions,
            acceptance,
            num_marks,
        )
        .expect("dnf rewrite preserves validity");
        DnfTela { tela, clauses }
    }
}

/// HOA label of letter `a` over `num_aps` propositions.
pub fn letter_label(num_aps: usize, a: Letter) -> String {
    if num_aps == 0 {
        return "t".to_string();
    }
    (0..num_aps)
        .map(|j| if a & (1 << j) != 0 { format!("{j}") } else { format!("!{j}") })
        .collect::<Vec<_>>()
        .join("&")
}

/// One generalized-Rabin disjunct `Fin(fin) ∧ ⋀_j Inf(infs[j])`, with at
/// least one `Inf` set.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DnfClause {
    pub fin: MarkSet,
    pub infs: Vec<MarkSet>,
}

impl DnfClause {
    pub fn formula(&self) -> AcceptanceFormula {
        let mut parts = vec![AcceptanceFormula::Fin(self.fin.clone())];
        parts.extend(self.infs.iter().cloned().map(AcceptanceFormula::Inf));
        AcceptanceFormula::and(parts)
    }
}

fn clauses_formula(clauses: &[DnfClause]) -> AcceptanceFormula {
    AcceptanceFormula::or(clauses.iter().map(DnfClause::formula))
}

/// An automaton whose acceptance is given in DNF: disjunct `i` is
/// `clauses[i]` over the marks of `tela`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DnfTela {
    pub tela: Tela,
    pub clauses: Vec<DnfClause>,
}

impl DnfTela {
    /// Rejects acceptance conditions that are not syntactically a
    /// disjunction of conjunctions of atoms.
    pub fn from_dnf_shaped(a: &Tela) -> Result<DnfTela> {
        if !a.acceptance().is_dnf_shaped() {
            return Err(Error::NotDnf(a.acceptance().to_string()));
        }
        Ok(a.to_dnf())
    }

    pub fn num_disjuncts(&self) -> usize {
        self.clauses.len()
    }

    /// The automaton restricted to disjunct `i`.
    pub fn disjunct(&self, i: usize) -> DnfTela {
        let clause = self.clauses[i].clone();
        let tela = self
            .tela
            .with_acceptance(clause.formula(), self.tela.num_marks())
            .expect("disjunct is valid");
        DnfTela {
            tela,
            clauses: vec![clause],
        }
    }

    pub fn max_k(&self) -> usize {
        self.clauses.iter().map(|c| c.infs.len()).max().unwrap_or(0)
    }
}

fn check_same_alphabet(a: &Tela, b: &Tela) -> Result<()> {
    if a.aps.len() != b.aps.len() {
        return Err(Error::AlphabetMismatch(a.aps.len(), b.aps.len()));
    }
    Ok(())
}

/// Disjoint union of the transition structures: `b`'s states shifted by
/// `a.num_states()`, `b`'s marks shifted by `b_mark_offset`.
fn disjoint_union(a: &Tela, b: &Tela, b_mark_offset: u32) -> (Vec<Transition>, Vec<StateId>) {
    let off = a.num_states;
    let mut transitions = a.transitions.clone();
    transitions.extend(b.transitions.iter().map(|t| {
        Transition::new(t.src + off, t.letter, t.dst + off, t.marks.shifted(b_mark_offset))
    }));
    let mut initial = a.initial.clone();
    initial.extend(b.initial.iter().map(|q| q + off));
    (transitions, initial)
}

/// `a ⊕ b`: disjoint union with acceptance
/// `(α_a ∧ Inf(δ_a)) ∨ (α_b ∧ Inf(δ_b))`, where `δ_a`, `δ_b` are two
/// fresh marks carried by every transition of the respective part. The
/// states of `b` are renumbered by `a.num_states()`.
pub fn sum(a: &Tela, b: &Tela) -> Result<Tela> {
    check_same_alphabet(a, b)?;
    if !a.is_complete() || !b.is_complete() {
        return Err(Error::NotComplete);
    }
    Ok(sum_unchecked(a, b))
}

pub(crate) fn sum_unchecked(a: &Tela, b: &Tela) -> Tela {
    let off = a.num_marks;
    let fa = a.num_marks + b.num_marks;
    let fb = fa + 1;
    let (mut transitions, initial) = disjoint_union(a, b, off);
    let split = a.transitions.len();
    for (i, t) in transitions.iter_mut().enumerate() {
        t.marks.insert(if i < split { fa } else { fb });
    }
    let acceptance = AcceptanceFormula::or([
        AcceptanceFormula::and([a.acceptance.clone(), AcceptanceFormula::inf([fa])]),
        AcceptanceFormula::and([b.acceptance.shifted(off), AcceptanceFormula::inf([fb])]),
    ]);
    Tela::new(
        a.aps.clone(),
        a.num_states + b.num_states,
        initial,
        transitions,
        acceptance,
        fb + 1,
    )
    .expect("sum preserves validity")
}

/// `a ⊕_GBA b` for two generalized Büchi automata. The shorter condition
/// is padded with acceptance sets containing every transition; the result
/// has `k = max(k_a, k_b)` marks and acceptance `⋀_j Inf(j)`.
pub fn sum_gba(a: &Tela, b: &Tela) -> Result<Tela> {
    check_same_alphabet(a, b)?;
    if !a.is_complete() || !b.is_complete() {
        return Err(Error::NotComplete);
    }
    sum_gba_unchecked(a, b)
}

/// Relabels a GBA so that acceptance set `j` is mark `j`, padding up to `k`
/// sets with all-transition sets.
pub(crate) fn gba_remark(a: &Tela, k: usize) -> Result<Vec<Transition>> {
    let sets = a
        .acceptance
        .gba_sets()
        .ok_or_else(|| Error::NotGba(a.acceptance.to_string()))?;
    Ok(a.transitions
        .iter()
        .map(|t| {
            let marks = (0..k as u32)
                .filter(|&j| match sets.get(j as usize) {
                    Some(s) => t.marks.intersects(s),
                    None => true,
                })
                .collect();
            Transition::new(t.src, t.letter, t.dst, marks)
        })
        .collect())
}

pub(crate) fn gba_formula(k: usize) -> AcceptanceFormula {
    AcceptanceFormula::and((0..k as u32).map(|j| AcceptanceFormula::inf([j])))
}

pub(crate) fn sum_gba_unchecked(a: &Tela, b: &Tela) -> Result<Tela> {
    let ka = a.acceptance.gba_sets().ok_or_else(|| Error::NotGba(a.acceptance.to_string()))?;
    let kb = b.acceptance.gba_sets().ok_or_else(|| Error::NotGba(b.acceptance.to_string()))?;
    let k = ka.len().max(kb.len());
    let ra = gba_remark(a, k)?;
    let rb = gba_remark(b, k)?;
    let off = a.num_states;
    let mut transitions = ra;
    transitions.extend(
        rb.into_iter()
            .map(|t| Transition::new(t.src + off, t.letter, t.dst + off, t.marks)),
    );
    let mut initial = a.initial.clone();
    initial.extend(b.initial.iter().map(|q| q + off));
    Tela::new(
        a.aps.clone(),
        a.num_states + b.num_states,
        initial,
        transitions,
        gba_formula(k),
        k as u32,
    )
}

/// Synchronized product restricted to reachable pairs. Product marks are
/// `a`'s marks followed by `b`'s marks shifted by `a.num_marks()`; the
/// acceptance is the disjunction (`Or`) or conjunction (`And`) of the
/// lifted conditions. `And` requires deterministic inputs.
pub fn product(a: &Tela, b: &Tela, combinator: Combinator) -> Result<Tela> {
    check_same_alphabet(a, b)?;
    if !a.is_complete() || !b.is_complete() {
        return Err(Error::NotComplete);
    }
    if combinator == Combinator::And && (!a.is_deterministic() || !b.is_deterministic()) {
        return Err(Error::NotDeterministic);
    }
    Ok(product_unchecked(a, b, combinator))
}

/// Product state pairs, in discovery order, along with the product.
pub(crate) fn product_unchecked(a: &Tela, b: &Tela, combinator: Combinator) -> Tela {
    product_with_pairs(a, b, combinator).0
}

pub(crate) fn product_with_pairs(
    a: &Tela,
    b: &Tela,
    combinator: Combinator,
) -> (Tela, Vec<(StateId, StateId)>) {
    let off = a.num_marks;
    let mut ids: HashMap<(StateId, StateId), StateId> = HashMap::new();
    let mut pairs: Vec<(StateId, StateId)> = Vec::new();
    let mut queue = VecDeque::new();
    let mut initial = Vec::new();
    for &p in &a.initial {
        for &q in &b.initial {
            let id = pairs.len() as StateId;
            ids.insert((p, q), id);
            pairs.push((p, q));
            queue.push_back(id);
            initial.push(id);
        }
    }
    let mut transitions = Vec::new();
    while let Some(id) = queue.pop_front() {
        let (p, q) = pairs[id as usize];
        for ta in a.out(p) {
            for tb in b.succ(q, ta.letter) {
                let key = (ta.dst, tb.dst);
                let dst = *ids.entry(key).or_insert_with(|| {
                    let n = pairs.len() as StateId;
                    pairs.push(key);
                    queue.push_back(n);
                    n
                });
                transitions.push(Transition::new(
                    id,
                    ta.letter,
                    dst,
                    ta.marks.union(&tb.marks.shifted(off)),
                ));
            }
        }
    }
    let lifted = [a.acceptance.clone(), b.acceptance.shifted(off)];
    let acceptance = match combinator {
        Combinator::Or => AcceptanceFormula::or(lifted),
        Combinator::And => AcceptanceFormula::and(lifted),
    };
    let t = Tela::new(
        a.aps.clone(),
        pairs.len() as u32,
        initial,
        transitions,
        acceptance,
        a.num_marks + b.num_marks,
    )
    .expect("product preserves validity");
    (t, pairs)
}
