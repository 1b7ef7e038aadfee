//! Emptiness, accepting lassos, membership of ultimately periodic words and
//! a brute-force oracle that shares none of the SCC machinery.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::acceptance::AcceptanceFormula;
use crate::automaton::{Letter, StateId, Tela, Transition};
use crate::bitset::{MarkSet, StateSet};
use crate::error::{Error, Result};
use crate::graph;

/// State bound for [`brute_force_empty`].
pub const BRUTE_FORCE_MAX_STATES: u32 = 7;

/// A lasso-shaped run: `prefix` leads from an initial state to the start
/// of `cycle`, which returns to its own start.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lasso {
    pub prefix: Vec<Transition>,
    pub cycle: Vec<Transition>,
}

impl Lasso {
    pub fn word(&self) -> LassoWord {
        LassoWord {
            prefix: self.prefix.iter().map(|t| t.letter).collect(),
            cycle: self.cycle.iter().map(|t| t.letter).collect(),
        }
    }

    /// Marks seen infinitely often along the run.
    pub fn inf_marks(&self) -> MarkSet {
        let mut m = MarkSet::new();
        for t in &self.cycle {
            m.union_with(&t.marks);
        }
        m
    }
}

/// The ultimately periodic word `prefix · cycle^ω`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LassoWord {
    pub prefix: Vec<Letter>,
    pub cycle: Vec<Letter>,
}

impl LassoWord {
    pub fn new(prefix: Vec<Letter>, cycle: Vec<Letter>) -> Self {
        Self { prefix, cycle }
    }

    /// Same word, with the period rotated left by `k` and the prefix
    /// extended accordingly.
    pub fn rotated(&self, k: usize) -> LassoWord {
        let k = k % self.cycle.len().max(1);
        let mut prefix = self.prefix.clone();
        prefix.extend_from_slice(&self.cycle[..k]);
        let mut cycle = self.cycle[k..].to_vec();
        cycle.extend_from_slice(&self.cycle[..k]);
        LassoWord { prefix, cycle }
    }

    /// Same word with the period written twice.
    pub fn unrolled(&self) -> LassoWord {
        let mut cycle = self.cycle.clone();
        cycle.extend_from_slice(&self.cycle);
        LassoWord {
            prefix: self.prefix.clone(),
            cycle,
        }
    }

    /// Renders the word in HOA label syntax as `prefix | cycle`.
    pub fn display(&self, num_aps: usize) -> String {
        let show = |ls: &[Letter]| {
            ls.iter()
                .map(|&a| format!("[{}]", crate::automaton::letter_label(num_aps, a)))
                .collect::<Vec<_>>()
                .join(" ")
        };
        format!("{} | {}", show(&self.prefix), show(&self.cycle))
    }
}

impl fmt::Display for LassoWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} ({:?})^w", self.prefix, self.cycle)
    }
}

pub fn is_empty(a: &Tela) -> bool {
    accepting_lasso(a).is_none()
}

/// An accepting lasso of `a`, if its language is non-empty.
pub fn accepting_lasso(a: &Tela) -> Option<Lasso> {
    let reach = a.reachable();
    let edges: Vec<usize> = (0..a.transitions().len())
        .filter(|&i| reach.contains(a.transitions()[i].src))
        .collect();
    let scc_edges = search(a, &edges, a.acceptance())?;
    Some(build_lasso(a, &scc_edges))
}

/// Groups `edges` by the SCC of the graph they induce, keeping only
/// internal edges. Components without internal edges are dropped.
fn edge_sccs(a: &Tela, edges: &[usize]) -> Vec<Vec<usize>> {
    // States are renumbered locally so the cost is linear in `edges`.
    let mut local: HashMap<StateId, u32> = HashMap::new();
    let id = |q: StateId, local: &mut HashMap<StateId, u32>| {
        let k = local.len() as u32;
        *local.entry(q).or_insert(k)
    };
    let mut ends = Vec::with_capacity(edges.len());
    for &e in edges {
        let t = &a.transitions()[e];
        ends.push((id(t.src, &mut local), id(t.dst, &mut local)));
    }
    let n = local.len();
    let mut adj = vec![Vec::new(); n];
    for &(s, d) in &ends {
        adj[s as usize].push(d);
    }
    let comps = graph::sccs(&adj);
    let idx = graph::component_index(n, &comps);
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); comps.len()];
    for (&e, &(s, d)) in edges.iter().zip(&ends) {
        if idx[s as usize] == idx[d as usize] {
            groups[idx[s as usize]].push(e);
        }
    }
    groups.retain(|g| !g.is_empty());
    groups
}

fn marks_of(a: &Tela, edges: &[usize]) -> MarkSet {
    let mut m = MarkSet::new();
    for &e in edges {
        m.union_with(&a.transitions()[e].marks);
    }
    m
}

/// Emerson-Lei SCC search: returns the edges of a strongly connected
/// subgraph whose marks satisfy `acc`.
fn search(a: &Tela, edges: &[usize], acc: &AcceptanceFormula) -> Option<Vec<usize>> {
    if *acc == AcceptanceFormula::False {
        return None;
    }
    for scc in edge_sccs(a, edges) {
        if let Some(found) = search_scc(a, scc, acc) {
            return Some(found);
        }
    }
    None
}

fn search_scc(a: &Tela, scc: Vec<usize>, acc: &AcceptanceFormula) -> Option<Vec<usize>> {
    let present = marks_of(a, &scc);
    let acc = acc.restrict_to(&present);
    if acc == AcceptanceFormula::False {
        return None;
    }
    if acc.evaluate(&present) {
        return Some(scc);
    }
    if let AcceptanceFormula::Or(cs) = &acc {
        return cs.iter().find_map(|c| search_scc(a, scc.clone(), c));
    }
    // Marks that falsify the condition when seen must be avoided.
    let fin = acc.fin_marks();
    let forced: MarkSet = fin
        .iter()
        .filter(|&f| acc.assume_seen(f) == AcceptanceFormula::False)
        .collect();
    if !forced.is_empty() {
        let rest: Vec<usize> = scc
            .iter()
            .copied()
            .filter(|&e| !a.transitions()[e].marks.intersects(&forced))
            .collect();
        return search(a, &rest, &acc);
    }
    // A conjunct failing on the whole component is split into its cases.
    if let AcceptanceFormula::And(cs) = &acc {
        if let Some((i, AcceptanceFormula::Or(alts))) = cs
            .iter()
            .enumerate()
            .find(|(_, c)| matches!(c, AcceptanceFormula::Or(_)) && !c.evaluate(&present))
        {
            return alts.iter().find_map(|alt| {
                let mut parts = cs.clone();
                parts[i] = alt.clone();
                search_scc(a, scc.clone(), &AcceptanceFormula::and(parts))
            });
        }
    }
    let f = fin.first()?;
    // Either f is eventually avoided, or it is seen infinitely often.
    let without: Vec<usize> = scc
        .iter()
        .copied()
        .filter(|&e| !a.transitions()[e].marks.contains(f))
        .collect();
    if let Some(found) = search(a, &without, &acc) {
        return Some(found);
    }
    search_scc(a, scc, &acc.drop_fin(f))
}

/// Shortest path (as transition indices) from any state in `from` to
/// `to`, using only `allowed` edges.
fn bfs_path(a: &Tela, from: &[StateId], to: StateId, allowed: Option<&[bool]>) -> Option<Vec<usize>> {
    let n = a.num_states() as usize;
    let mut pred: Vec<Option<usize>> = vec![None; n];
    let mut seen = vec![false; n];
    let mut queue = VecDeque::new();
    for &s in from {
        if !seen[s as usize] {
            seen[s as usize] = true;
            queue.push_back(s);
        }
    }
    while let Some(q) = queue.pop_front() {
        if q == to {
            let mut path = Vec::new();
            let mut cur = q;
            while let Some(e) = pred[cur as usize] {
                path.push(e);
                cur = a.transitions()[e].src;
            }
            path.reverse();
            return Some(path);
        }
        for e in a.out_range(q) {
            if allowed.is_some_and(|al| !al[e]) {
                continue;
            }
            let d = a.transitions()[e].dst;
            if !seen[d as usize] {
                seen[d as usize] = true;
                pred[d as usize] = Some(e);
                queue.push_back(d);
            }
        }
    }
    None
}

fn build_lasso(a: &Tela, scc: &[usize]) -> Lasso {
    let mut allowed = vec![false; a.transitions().len()];
    for &e in scc {
        allowed[e] = true;
    }
    let present = marks_of(a, scc);
    let mut reps: Vec<usize> = Vec::new();
    for m in present.iter() {
        if reps.iter().any(|&r| a.transitions()[r].marks.contains(m)) {
            continue;
        }
        let e = *scc
            .iter()
            .find(|&&e| a.transitions()[e].marks.contains(m))
            .expect("mark occurs in component");
        reps.push(e);
    }
    if reps.is_empty() {
        reps.push(scc[0]);
    }
    let start = a.transitions()[reps[0]].src;
    let mut cycle = Vec::new();
    let mut cur = start;
    for &r in &reps {
        let t = &a.transitions()[r];
        cycle.extend(bfs_path(a, &[cur], t.src, Some(&allowed)).expect("component is strongly connected"));
        cycle.push(r);
        cur = t.dst;
    }
    cycle.extend(bfs_path(a, &[cur], start, Some(&allowed)).expect("component is strongly connected"));
    let prefix = bfs_path(a, a.initial(), start, None).expect("component is reachable");
    let tr = |v: Vec<usize>| v.into_iter().map(|e| a.transitions()[e].clone()).collect();
    Lasso {
        prefix: tr(prefix),
        cycle: tr(cycle),
    }
}

fn check_word(a: &Tela, w: &LassoWord) -> Result<()> {
    if w.cycle.is_empty() {
        return Err(Error::Invalid("lasso word has an empty period".into()));
    }
    if let Some(&l) = w.prefix.iter().chain(&w.cycle).find(|&&l| l >= a.alphabet_size()) {
        return Err(Error::Invalid(format!(
            "letter {l} outside alphabet of size {}",
            a.alphabet_size()
        )));
    }
    Ok(())
}

/// Synchronized product of `a` with the deterministic automaton of `w`.
fn word_product(a: &Tela, w: &LassoWord) -> Tela {
    let len = (w.prefix.len() + w.cycle.len()) as u32;
    let letter_at = |p: u32| {
        let p = p as usize;
        if p < w.prefix.len() {
            w.prefix[p]
        } else {
            w.cycle[p - w.prefix.len()]
        }
    };
    let next = |p: u32| if p + 1 == len { w.prefix.len() as u32 } else { p + 1 };
    let mut ids: HashMap<(StateId, u32), StateId> = HashMap::new();
    let mut pairs = Vec::new();
    let mut queue = VecDeque::new();
    let mut initial = Vec::new();
    for &q in a.initial() {
        ids.insert((q, 0), pairs.len() as StateId);
        initial.push(pairs.len() as StateId);
        queue.push_back(pairs.len() as StateId);
        pairs.push((q, 0));
    }
    let mut transitions = Vec::new();
    while let Some(id) = queue.pop_front() {
        let (q, p) = pairs[id as usize];
        let l = letter_at(p);
        for t in a.succ(q, l) {
            let key = (t.dst, next(p));
            let dst = *ids.entry(key).or_insert_with(|| {
                let n = pairs.len() as StateId;
                pairs.push(key);
                queue.push_back(n);
                n
            });
            transitions.push(Transition::new(id, l, dst, t.marks.clone()));
        }
    }
    Tela::new(
        a.aps().to_vec(),
        pairs.len() as u32,
        initial,
        transitions,
        a.acceptance().clone(),
        a.num_marks(),
    )
    .expect("word product preserves validity")
}

/// Whether `w` is accepted by `a`.
pub fn accepts(a: &Tela, w: &LassoWord) -> Result<bool> {
    check_word(a, w)?;
    Ok(!is_empty(&word_product(a, w)))
}

/// Oracle emptiness check for automata with at most
/// [`BRUTE_FORCE_MAX_STATES`] states.
///
/// For every set `M` of marks satisfying the acceptance condition it asks
/// whether some reachable strongly connected set of transitions, each
/// carrying only marks of `M`, sees exactly `M`. Reachability is computed
/// by Warshall closure over bit rows.
pub fn brute_force_empty(a: &Tela) -> Result<bool> {
    if a.num_states() > BRUTE_FORCE_MAX_STATES {
        return Err(Error::Limit(format!(
            "brute-force oracle supports at most {BRUTE_FORCE_MAX_STATES} states, got {}",
            a.num_states()
        )));
    }
    closure_empty(a)
}

/// Oracle membership check: the brute-force emptiness test applied to the
/// word product. `a` must satisfy the brute-force state bound.
pub fn brute_force_accepts(a: &Tela, w: &LassoWord) -> Result<bool> {
    if a.num_states() > BRUTE_FORCE_MAX_STATES {
        return Err(Error::Limit(format!(
            "brute-force oracle supports at most {BRUTE_FORCE_MAX_STATES} states, got {}",
            a.num_states()
        )));
    }
    check_word(a, w)?;
    Ok(!closure_empty(&word_product(a, w))?)
}

const CLOSURE_MAX_STATES: usize = 128;
const CLOSURE_MAX_MARKS: usize = 20;

fn closure_empty(a: &Tela) -> Result<bool> {
    let n = a.num_states() as usize;
    if n > CLOSURE_MAX_STATES {
        return Err(Error::Limit(format!("closure oracle supports at most {CLOSURE_MAX_STATES} states")));
    }
    let used: Vec<u32> = {
        let mut m = MarkSet::new();
        for t in a.transitions() {
            m.union_with(&t.marks);
        }
        m.iter().collect()
    };
    if used.len() > CLOSURE_MAX_MARKS {
        return Err(Error::Limit(format!("closure oracle supports at most {CLOSURE_MAX_MARKS} used marks")));
    }
    let local = |marks: &MarkSet| -> u32 {
        used.iter()
            .enumerate()
            .filter(|(_, &m)| marks.contains(m))
            .fold(0, |acc, (i, _)| acc | (1 << i))
    };
    let edges: Vec<(usize, usize, u32)> = a
        .transitions()
        .iter()
        .map(|t| (t.src as usize, t.dst as usize, local(&t.marks)))
        .collect();

    // states reachable from the initial states
    let mut reach: u128 = a.initial().iter().fold(0, |acc, &q| acc | (1 << q));
    loop {
        let mut next = reach;
        for &(s, d, _) in &edges {
            if reach >> s & 1 == 1 {
                next |= 1 << d;
            }
        }
        if next == reach {
            break;
        }
        reach = next;
    }

    for subset in 0u32..(1u32 << used.len()) {
        let seen: MarkSet = used
            .iter()
            .enumerate()
            .filter(|(i, _)| subset >> i & 1 == 1)
            .map(|(_, &m)| m)
            .collect();
        if !a.acceptance().evaluate(&seen) {
            continue;
        }
        // closure[x] has bit y iff y is reachable from x in ≥ 1 step
        let mut closure = vec![0u128; n];
        for &(s, d, m) in &edges {
            if m & !subset == 0 {
                closure[s] |= 1 << d;
            }
        }
        for k in 0..n {
            for x in 0..n {
                if closure[x] >> k & 1 == 1 {
                    closure[x] |= closure[k];
                }
            }
        }
        for s in 0..n {
            if reach >> s & 1 == 0 || closure[s] >> s & 1 == 0 {
                continue;
            }
            // marks of edges lying on a cycle through s
            let mut covered = 0u32;
            for &(x, y, m) in &edges {
                if m & !subset != 0 {
                    continue;
                }
                let x_from_s = x == s || closure[s] >> x & 1 == 1;
                let s_from_y = y == s || closure[y] >> s & 1 == 1;
                if x_from_s && s_from_y {
                    covered |= m;
                }
            }
            if covered == subset {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Seeded sample of `n` lasso words with `|prefix| ≤ 6` and
/// `1 ≤ |cycle| ≤ 6` over the alphabet of `a`.
pub fn sample_lassos(a: &Tela, n: usize, seed: u64) -> Vec<LassoWord> {
    sample_words(a.alphabet_size(), n, seed)
}

pub fn sample_words(alphabet_size: u32, n: usize, seed: u64) -> Vec<LassoWord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let lu = rng.gen_range(0..=6);
            let lv = rng.gen_range(1..=6);
            LassoWord {
                prefix: (0..lu).map(|_| rng.gen_range(0..alphabet_size)).collect(),
                cycle: (0..lv).map(|_| rng.gen_range(0..alphabet_size)).collect(),
            }
        })
        .collect()
}

/// States that lie on or lead to an accepting cycle.
pub fn useful_states(a: &Tela) -> StateSet {
    let reach = a.reachable();
    let edges: Vec<usize> = (0..a.transitions().len())
        .filter(|&i| reach.contains(a.transitions()[i].src))
        .collect();
    let mut good = vec![false; a.num_states() as usize];
    for scc in edge_sccs(a, &edges) {
        let src = a.transitions()[scc[0]].src;
        if search_scc(a, scc, a.acceptance()).is_some() {
            good[src as usize] = true;
        }
    }
    let rev = graph::reverse(&a.adjacency());
    let roots: Vec<u32> = (0..a.num_states()).filter(|&q| good[q as usize]).collect();
    let back = graph::reachable(&rev, roots);
    (0..a.num_states())
        .filter(|&q| back[q as usize] && reach.contains(q))
        .collect()
}

/// Removes states that are unreachable or cannot reach an accepting cycle.
/// An empty language leaves a single initial state without transitions.
pub fn prune_useless(a: &Tela) -> Tela {
    let keep = useful_states(a);
    if keep.len() == a.num_states() as usize {
        return a.clone();
    }
    if keep.is_empty() {
        let initial: Vec<StateId> = a.initial().first().map(|_| 0).into_iter().collect();
        let n = if initial.is_empty() { 0 } else { 1 };
        return Tela::new(
            a.aps().to_vec(),
            n,
            initial,
            vec![],
            a.acceptance().clone(),
            a.num_marks(),
        )
        .expect("empty automaton is valid");
    }
    a.restrict(&keep).0
}
