//! Transition-based Safra construction from Büchi to deterministic Rabin.

use std::collections::{HashMap, VecDeque};

use crate::acceptance::AcceptanceFormula;
use crate::automaton::{Letter, Tela, Transition};
use crate::bitset::{MarkSet, StateSet};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Node {
    name: u32,
    label: StateSet,
    /// Oldest first.
    children: Vec<Node>,
}

/// A Safra tree; `None` is the empty tree.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SafraTree {
    root: Option<Node>,
}

impl SafraTree {
    fn names(&self) -> StateSet {
        fn go(n: &Node, out: &mut StateSet) {
            out.insert(n.name);
            n.children.iter().for_each(|c| go(c, out));
        }
        let mut out = StateSet::new();
        if let Some(r) = &self.root {
            go(r, &mut out);
        }
        out
    }

    /// Checks the tree invariants: children are disjoint, strictly
    /// contained in their parent, names unique.
    pub fn is_well_formed(&self) -> bool {
        fn go(n: &Node, names: &mut StateSet) -> bool {
            if !names.insert(n.name) || n.label.is_empty() {
                return false;
            }
            let mut union = StateSet::new();
            for c in &n.children {
                if union.intersects(&c.label) || !c.label.is_subset(&n.label) {
                    return false;
                }
                union.union_with(&c.label);
                if !go(c, names) {
                    return false;
                }
            }
            n.children.is_empty() || union != n.label
        }
        match &self.root {
            None => true,
            Some(r) => go(r, &mut StateSet::new()),
        }
    }
}

/// Successor data of one Safra step.
struct Step {
    tree: SafraTree,
    red: StateSet,
    green: StateSet,
}

struct Ctx<'a> {
    b: &'a Tela,
    acc_marks: Option<MarkSet>,
}

impl Ctx<'_> {
    fn is_acc(&self, t: &Transition) -> bool {
        match &self.acc_marks {
            None => true,
            Some(s) => t.marks.intersects(s),
        }
    }

    fn post(&self, from: &StateSet, a: Letter, only_acc: bool) -> StateSet {
        let mut out = StateSet::new();
        for q in from.iter() {
            for t in self.b.succ(q, a) {
                if !only_acc || self.is_acc(t) {
                    out.insert(t.dst);
                }
            }
        }
        out
    }

    fn step(&self, tree: &SafraTree, a: Letter) -> Step {
        let mut red = StateSet::new();
        let mut green = StateSet::new();
        let Some(root) = &tree.root else {
            return Step {
                tree: tree.clone(),
                red,
                green,
            };
        };
        let mut used = tree.names();
        let mut root = self.update(root, a, &mut used);
        horizontal(&mut root, &StateSet::new());
        let old = tree.names();
        let root = if root.label.is_empty() {
            None
        } else {
            prune_empty(&mut root);
            vertical(&mut root, &mut green);
            Some(root)
        };
        let new_tree = SafraTree { root };
        let alive = new_tree.names();
        for n in old.iter() {
            if !alive.contains(n) {
                red.insert(n);
            }
        }
        Step {
            tree: new_tree,
            red,
            green,
        }
    }

    /// Subset step on every label and spawning of a youngest child with
    /// the accepting successors.
    fn update(&self, n: &Node, a: Letter, used: &mut StateSet) -> Node {
        let mut children: Vec<Node> = n.children.iter().map(|c| self.update(c, a, used)).collect();
        let spawned = self.post(&n.label, a, true);
        if !spawned.is_empty() {
            let name = (0..).find(|i| !used.contains(*i)).expect("free name");
            used.insert(name);
            children.push(Node {
                name,
                label: spawned,
                children: vec![],
            });
        }
        Node {
            name: n.name,
            label: self.post(&n.label, a, false),
            children,
        }
    }
}

/// Keeps each state only in the oldest branch containing it.
fn horizontal(n: &mut Node, forbidden: &StateSet) {
    n.label.difference_with(forbidden);
    let mut taken = forbidden.clone();
    for c in &mut n.children {
        horizontal(c, &taken);
        taken.union_with(&c.label);
    }
}

fn prune_empty(n: &mut Node) {
    n.children.retain(|c| !c.label.is_empty());
    n.children.iter_mut().for_each(prune_empty);
}

/// Collapses nodes whose children cover their label; such nodes turn
/// green and lose their descendants.
fn vertical(n: &mut Node, green: &mut StateSet) {
    if !n.children.is_empty() {
        let mut union = StateSet::new();
        for c in &n.children {
            union.union_with(&c.label);
        }
        if union == n.label {
            n.children.clear();
            green.insert(n.name);
            return;
        }
    }
    n.children.iter_mut().for_each(|c| vertical(c, green));
}

/// Deterministic complete Rabin automaton for a Büchi automaton (an
/// acceptance of the form `Inf(S)` or `t`). Pair `p` uses marks `2p`
/// (`Fin`) and `2p+1` (`Inf`).
pub fn safra_determinize(b: &Tela) -> Result<Tela> {
    safra_determinize_bounded(b, usize::MAX)
}

pub fn safra_determinize_bounded(b: &Tela, max_states: usize) -> Result<Tela> {
    let acc_marks = match b.acceptance().gba_sets() {
        Some(sets) if sets.is_empty() => None,
        Some(sets) if sets.len() == 1 => Some(sets[0].clone()),
        _ => return Err(Error::NotGba(format!("expected a Büchi condition, got {}", b.acceptance()))),
    };
    let ctx = Ctx { b, acc_marks };
    let init = SafraTree {
        root: if b.initial().is_empty() {
            None
        } else {
            Some(Node {
                name: 0,
                label: b.initial().iter().copied().collect(),
                children: vec![],
            })
        },
    };
    let mut ids: HashMap<SafraTree, u32> = HashMap::new();
    let mut trees: Vec<SafraTree> = Vec::new();
    let mut queue = VecDeque::new();
    ids.insert(init.clone(), 0);
    trees.push(init);
    queue.push_back(0u32);
    // (src, letter, dst, red names, green names)
    let mut raw: Vec<(u32, Letter, u32, StateSet, StateSet)> = Vec::new();
    let mut ever_green = StateSet::new();
    while let Some(id) = queue.pop_front() {
        for a in 0..b.alphabet_size() {
            let step = ctx.step(&trees[id as usize], a);
            debug_assert!(step.tree.is_well_formed());
            let dst = match ids.get(&step.tree) {
                Some(&d) => d,
                None => {
                    if trees.len() >= max_states {
                        return Err(Error::Limit(format!("determinization exceeds {max_states} states")));
                    }
                    let d = trees.len() as u32;
                    ids.insert(step.tree.clone(), d);
                    trees.push(step.tree);
                    queue.push_back(d);
                    d
                }
            };
            ever_green.union_with(&step.green);
            raw.push((id, a, dst, step.red, step.green));
        }
    }
    let pair_of: HashMap<u32, u32> = ever_green.iter().enumerate().map(|(p, n)| (n, p as u32)).collect();
    let transitions = raw
        .into_iter()
        .map(|(s, a, d, red, green)| {
            let mut marks = MarkSet::new();
            for n in red.iter() {
                if let Some(&p) = pair_of.get(&n) {
                    marks.insert(2 * p);
                }
            }
            for n in green.iter() {
                marks.insert(2 * pair_of[&n] + 1);
            }
            Transition::new(s, a, d, marks)
        })
        .collect();
    let pairs = pair_of.len() as u32;
    let acceptance = AcceptanceFormula::or(
        (0..pairs).map(|p| AcceptanceFormula::and([AcceptanceFormula::fin([2 * p]), AcceptanceFormula::inf([2 * p + 1])])),
    );
    Tela::new(b.aps().to_vec(), trees.len() as u32, [0], transitions, acceptance, 2 * pairs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::acceptance::AcceptanceFormula as F;
    use crate::analysis::{accepts, LassoWord};

    fn ms(v: &[u32]) -> MarkSet {
        v.iter().copied().collect()
    }

    #[test]
    fn deterministic_one_state() {
        let b = Tela::universal(vec!["a".into()], F::inf([0]), 1).unwrap();
        let b = b.with_acceptance(F::True, 0).unwrap();
        let d = safra_determinize(&b).unwrap();
        assert_eq!(d.num_states(), 1);
        assert!(d.is_deterministic() && d.is_complete());
        assert!(accepts(&d, &LassoWord::new(vec![], vec![0])).unwrap());
    }

    /// "Finitely many a": letter 1 is `a`, letter 0 is `b`.
    fn finitely_many_a() -> Tela {
        let t = |s, l, d, m: &[u32]| Transition::new(s, l, d, ms(m));
        Tela::new(
            vec!["a".into()],
            2,
            [0],
            vec![t(0, 0, 0, &[]), t(0, 1, 0, &[]), t(0, 0, 1, &[]), t(1, 0, 1, &[0])],
            F::inf([0]),
            1,
        )
        .unwrap()
    }

    #[test]
    fn finitely_many_a_is_determinized() {
        let b = finitely_many_a();
        let d = safra_determinize(&b).unwrap();
        assert!(d.is_deterministic() && d.is_complete());
        // (ab)^ω has infinitely many a
        assert!(!accepts(&d, &LassoWord::new(vec![], vec![1, 0])).unwrap());
        assert!(!accepts(&d, &LassoWord::new(vec![], vec![1])).unwrap());
        assert!(accepts(&d, &LassoWord::new(vec![1, 1, 0, 1], vec![0])).unwrap());
    }

    #[test]
    fn rejects_non_buchi() {
        let b = Tela::universal(vec![], F::fin([0]), 1).unwrap();
        assert!(safra_determinize(&b).is_err());
    }

    #[test]
    fn bounded_reports_limit() {
        let b = finitely_many_a();
        assert!(matches!(safra_determinize_bounded(&b, 1), Err(Error::Limit(_))));
    }
}
