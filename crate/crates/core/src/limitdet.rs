//! Limit-determinism checks and limit-deterministic constructions.
//!
//! A TELA is limit-deterministic if its states split into a part `Q_N`
//! and a deterministic part `Q_D` closed under successors, such that every
//! accepting run eventually stays in `Q_D`. The constructions here build
//! such automata either as a sum of deterministic components or with one
//! breakpoint component per DNF disjunct.

use std::collections::{HashMap, VecDeque};

use crate::acceptance::AcceptanceFormula;
use crate::analysis::is_empty;
use crate::automaton::{sum_unchecked, DnfTela, Letter, StateId, Tela, Transition};
use crate::bitset::{MarkSet, StateSet};
use crate::determinize::determinize_disjunct;
use crate::error::{Error, Result};
use crate::graph;

/// Largest input accepted by [`build_gfm`].
pub const GFM_MAX_STATES: u32 = 12;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    pub nondet: StateSet,
    pub det: StateSet,
}

fn locally_deterministic(a: &Tela, q: StateId) -> bool {
    let out = a.out(q);
    out.windows(2).all(|w| w[0].letter != w[1].letter)
}

/// The partition with the largest deterministic part: `Q_D` holds the
/// states from which only states with at most one successor per letter
/// are reachable.
pub fn canonical_partition(a: &Tela) -> Partition {
    let n = a.num_states();
    let rev = graph::reverse(&a.adjacency());
    let bad: Vec<StateId> = (0..n).filter(|&q| !locally_deterministic(a, q)).collect();
    let reaches_bad = graph::reachable(&rev, bad);
    let mut nondet = StateSet::new();
    let mut det = StateSet::new();
    for q in 0..n {
        if reaches_bad[q as usize] {
            nondet.insert(q);
        } else {
            det.insert(q);
        }
    }
    Partition { nondet, det }
}

/// Every accepting run eventually leaves `Q_N*` for good. Decided by an
/// emptiness check on the automaton restricted to `Q_N*`.
pub fn is_limit_deterministic(a: &Tela) -> bool {
    let p = canonical_partition(a);
    if p.nondet.is_empty() {
        return true;
    }
    is_empty(&a.restrict(&p.nondet).0)
}

/// All `Inf` transitions of every disjunct lie inside `Q_D*`.
pub fn is_syntactically_limit_deterministic(a: &Tela) -> Result<bool> {
    let d = DnfTela::from_dnf_shaped(a)?;
    let p = canonical_partition(&d.tela);
    let mut inf = MarkSet::new();
    for c in &d.clauses {
        for s in &c.infs {
            inf.union_with(s);
        }
    }
    Ok(d
        .tela
        .transitions()
        .iter()
        .filter(|t| t.marks.intersects(&inf))
        .all(|t| p.det.contains(t.src) && p.det.contains(t.dst)))
}

/// Sum of the deterministic automata of the single disjuncts. The choice
/// of the component is the only nondeterminism.
pub fn limit_det_sum(a: &Tela) -> Tela {
    limit_det_sum_bounded(a, usize::MAX).expect("unbounded determinization")
}

pub fn limit_det_sum_bounded(a: &Tela, max_states: usize) -> Result<Tela> {
    let d = a.to_dnf();
    let mut acc: Option<Tela> = None;
    for i in 0..d.num_disjuncts() {
        let c = determinize_disjunct(&d, i, max_states)?;
        acc = Some(match acc {
            None => c,
            Some(s) => sum_unchecked(&s, &c),
        });
    }
    match acc {
        Some(s) => Ok(s),
        None => Tela::universal(a.aps().to_vec(), AcceptanceFormula::False, 0),
    }
}

/// How the counter `l` of a breakpoint state selects the awaited set.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum CounterMode {
    /// `l` ranges over `0..k` and awaits `Inf` set `l+1`.
    #[default]
    AwaitNext,
    /// `l` ranges over `0..=k`; `l = 0` counts every transition, so the
    /// next step is a break, and `l >= 1` awaits `Inf` set `l`.
    PlainBreakAtZero,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BreakpointState {
    pub r: StateSet,
    pub b: StateSet,
    pub l: u32,
}

impl BreakpointState {
    pub fn seed(r: StateSet) -> Self {
        BreakpointState {
            r,
            b: StateSet::new(),
            l: 0,
        }
    }

    fn with_l(mut self, l: u32) -> Self {
        self.l = l;
        self
    }
}

/// Successor in the breakpoint automaton of disjunct `i`: the next state
/// and whether the step is a break. `None` if no run survives.
pub fn breakpoint_step(
    d: &DnfTela,
    i: usize,
    mode: CounterMode,
    s: &BreakpointState,
    a: Letter,
) -> Option<(BreakpointState, bool)> {
    let clause = &d.clauses[i];
    let k = clause.infs.len() as u32;
    let awaited = match mode {
        CounterMode::AwaitNext => Some(&clause.infs[s.l as usize]),
        CounterMode::PlainBreakAtZero if s.l == 0 => None,
        CounterMode::PlainBreakAtZero => Some(&clause.infs[s.l as usize - 1]),
    };
    let mut r2 = StateSet::new();
    let mut b2 = StateSet::new();
    for q in s.r.iter() {
        for t in d.tela.succ(q, a) {
            if t.marks.intersects(&clause.fin) {
                continue;
            }
            r2.insert(t.dst);
            let grows = match awaited {
                None => true,
                Some(set) => t.marks.intersects(set),
            };
            if grows || s.b.contains(q) {
                b2.insert(t.dst);
            }
        }
    }
    if r2.is_empty() {
        return None;
    }
    if r2 == b2 {
        let l = match mode {
            CounterMode::AwaitNext => (s.l + 1) % k,
            CounterMode::PlainBreakAtZero => (s.l + 1) % (k + 1),
        };
        Some((BreakpointState::seed(r2).with_l(l), true))
    } else {
        Some((
            BreakpointState {
                r: r2,
                b: b2,
                l: s.l,
            },
            false,
        ))
    }
}

/// Interns breakpoint states of several components into one numbering
/// that starts at `offset`.
struct BpSpace<'a> {
    d: &'a DnfTela,
    mode: CounterMode,
    offset: u32,
    ids: HashMap<(usize, BreakpointState), StateId>,
    states: Vec<(usize, BreakpointState)>,
    queue: VecDeque<StateId>,
}

impl<'a> BpSpace<'a> {
    fn new(d: &'a DnfTela, mode: CounterMode, offset: u32) -> Self {
        BpSpace {
            d,
            mode,
            offset,
            ids: HashMap::new(),
            states: Vec::new(),
            queue: VecDeque::new(),
        }
    }

    fn intern(&mut self, i: usize, s: BreakpointState) -> StateId {
        if let Some(&id) = self.ids.get(&(i, s.clone())) {
            return id;
        }
        let id = self.offset + self.states.len() as StateId;
        self.ids.insert((i, s.clone()), id);
        self.states.push((i, s));
        self.queue.push_back(id);
        id
    }

    /// Explores everything reachable from the interned states and returns
    /// the transitions; breaks carry mark 0.
    fn explore(&mut self, max_states: usize) -> Result<Vec<Transition>> {
        let mut out = Vec::new();
        let alphabet = self.d.tela.alphabet_size();
        while let Some(id) = self.queue.pop_front() {
            let (i, s) = self.states[(id - self.offset) as usize].clone();
            for a in 0..alphabet {
                if let Some((next, brk)) = breakpoint_step(self.d, i, self.mode, &s, a) {
                    let dst = self.intern(i, next);
                    if self.states.len() > max_states {
                        return Err(Error::Limit(format!("breakpoint component exceeds {max_states} states")));
                    }
                    let marks = if brk { MarkSet::singleton(0) } else { MarkSet::new() };
                    out.push(Transition::new(id, a, dst, marks));
                }
            }
        }
        Ok(out)
    }
}

/// Deterministic Büchi automaton of disjunct `i` started in
/// `(I, ∅, 0)`, together with the breakpoint state of every automaton
/// state.
pub fn breakpoint_component(a: &Tela, i: usize, mode: CounterMode) -> Result<(Tela, Vec<BreakpointState>)> {
    let d = a.to_dnf();
    if i >= d.num_disjuncts() {
        return Err(Error::Invalid(format!("disjunct {i} out of range ({} disjuncts)", d.num_disjuncts())));
    }
    let seed: StateSet = a.initial().iter().copied().collect();
    breakpoint_from(&d, i, mode, seed)
}

pub fn breakpoint_from(
    d: &DnfTela,
    i: usize,
    mode: CounterMode,
    seed: StateSet,
) -> Result<(Tela, Vec<BreakpointState>)> {
    let mut space = BpSpace::new(d, mode, 0);
    space.intern(i, BreakpointState::seed(seed));
    let transitions = space.explore(usize::MAX)?;
    let states: Vec<BreakpointState> = space.states.into_iter().map(|(_, s)| s).collect();
    let t = Tela::new(
        d.tela.aps().to_vec(),
        states.len() as u32,
        [0],
        transitions,
        AcceptanceFormula::inf([0]),
        1,
    )?;
    Ok((t, states))
}

/// Bridges from the subset component of [`build_gfm_with`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum BridgeMode {
    /// Every non-empty subset of the successor set.
    #[default]
    All,
    /// Singleton subsets only.
    Singletons,
}

#[derive(Clone, Copy, Debug)]
pub struct LdOptions {
    pub counter: CounterMode,
    pub bridges: BridgeMode,
    pub max_states: usize,
}

impl Default for LdOptions {
    fn default() -> Self {
        LdOptions {
            counter: CounterMode::default(),
            bridges: BridgeMode::default(),
            max_states: usize::MAX,
        }
    }
}

/// Origin of a state of a limit-deterministic construction.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Origin {
    /// State of the copy of the input.
    Copy(StateId),
    /// State of the subset component.
    Subset(StateSet),
    /// State `(R, B, l)` of the breakpoint component of a disjunct.
    Breakpoint(usize, BreakpointState),
}

/// A limit-deterministic Büchi automaton whose first `num_initial`
/// states form the initial component.
#[derive(Clone, Debug)]
pub struct Construction {
    pub automaton: Tela,
    pub num_initial: u32,
    pub origin: Vec<Origin>,
}

/// Copy of `a` as initial component, bridges into `({q'}, ∅, 0)` of every
/// breakpoint component.
pub fn build_ld(a: &Tela) -> Tela {
    build_ld_with(a, LdOptions::default()).expect("unbounded construction").automaton
}

pub fn build_ld_with(a: &Tela, opts: LdOptions) -> Result<Construction> {
    let d = a.to_dnf();
    let m = d.num_disjuncts();
    let n = a.num_states();
    let mut space = BpSpace::new(&d, opts.counter, n);
    let mut transitions: Vec<Transition> = a
        .transitions()
        .iter()
        .map(|t| Transition::new(t.src, t.letter, t.dst, MarkSet::new()))
        .collect();
    for t in a.transitions() {
        for i in 0..m {
            let dst = space.intern(i, BreakpointState::seed(StateSet::singleton(t.dst)));
            transitions.push(Transition::new(t.src, t.letter, dst, MarkSet::new()));
        }
    }
    transitions.extend(space.explore(opts.max_states)?);
    let mut origin: Vec<Origin> = (0..n).map(Origin::Copy).collect();
    origin.extend(space.states.into_iter().map(|(i, s)| Origin::Breakpoint(i, s)));
    let automaton = Tela::new(
        a.aps().to_vec(),
        origin.len() as u32,
        a.initial().iter().copied(),
        transitions,
        AcceptanceFormula::inf([0]),
        1,
    )?;
    Ok(Construction {
        automaton,
        num_initial: n,
        origin,
    })
}

/// Subset automaton of `a` as initial component, bridges into
/// `(P', ∅, 0)` for non-empty `P'` below the successor set. Inputs are
/// limited to [`GFM_MAX_STATES`] states.
pub fn build_gfm(a: &Tela) -> Result<Tela> {
    Ok(build_gfm_with(a, LdOptions::default())?.automaton)
}

pub fn build_gfm_with(a: &Tela, opts: LdOptions) -> Result<Construction> {
    if a.num_states() > GFM_MAX_STATES {
        return Err(Error::Limit(format!(
            "GFM construction supports at most {GFM_MAX_STATES} states, input has {}",
            a.num_states()
        )));
    }
    let d = a.to_dnf();
    let m = d.num_disjuncts();
    let alphabet = a.alphabet_size();

    // Subset component; the empty set is never materialized.
    let init: StateSet = a.initial().iter().copied().collect();
    let mut ids: HashMap<StateSet, StateId> = HashMap::new();
    let mut subsets: Vec<StateSet> = vec![init.clone()];
    ids.insert(init, 0);
    let mut subset_edges: Vec<(StateId, Letter, StateSet)> = Vec::new();
    let mut next = 0;
    while next < subsets.len() {
        let p = subsets[next].clone();
        for l in 0..alphabet {
            let post = a.post(&p, l);
            if post.is_empty() {
                continue;
            }
            if !ids.contains_key(&post) {
                ids.insert(post.clone(), subsets.len() as StateId);
                subsets.push(post.clone());
            }
            subset_edges.push((next as StateId, l, post));
        }
        next += 1;
    }

    let num_initial = subsets.len() as u32;
    let mut space = BpSpace::new(&d, opts.counter, num_initial);
    let mut transitions = Vec::new();
    for (src, l, post) in subset_edges {
        transitions.push(Transition::new(src, l, ids[&post], MarkSet::new()));
        for target in bridge_targets(&post, opts.bridges) {
            for i in 0..m {
                let dst = space.intern(i, BreakpointState::seed(target.clone()));
                transitions.push(Transition::new(src, l, dst, MarkSet::new()));
            }
        }
    }
    transitions.extend(space.explore(opts.max_states)?);
    let mut origin: Vec<Origin> = subsets.into_iter().map(Origin::Subset).collect();
    origin.extend(space.states.into_iter().map(|(i, s)| Origin::Breakpoint(i, s)));
    let automaton = Tela::new(
        a.aps().to_vec(),
        origin.len() as u32,
        [0],
        transitions,
        AcceptanceFormula::inf([0]),
        1,
    )?;
    Ok(Construction {
        automaton,
        num_initial,
        origin,
    })
}

fn bridge_targets(post: &StateSet, mode: BridgeMode) -> Vec<StateSet> {
    let elems: Vec<u32> = post.iter().collect();
    match mode {
        BridgeMode::Singletons => elems.iter().map(|&q| StateSet::singleton(q)).collect(),
        BridgeMode::All => (1u32..(1 << elems.len()))
            .map(|mask| {
                elems
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| mask & (1 << j) != 0)
                    .map(|(_, &q)| q)
                    .collect()
            })
            .collect(),
    }
}
