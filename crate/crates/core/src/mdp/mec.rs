use crate::bitset::StateSet;
use crate::graph;

/// Choice structure of an MDP: per state, per choice, the successor
/// distribution. A state without choices is a dead end.
#[derive(Clone, Debug, PartialEq)]
pub struct ChoiceGraph {
    pub choices: Vec<Vec<Vec<(u32, f64)>>>,
}

impl ChoiceGraph {
    pub fn new(choices: Vec<Vec<Vec<(u32, f64)>>>) -> Self {
        ChoiceGraph { choices }
    }

    pub fn num_states(&self) -> usize {
        self.choices.len()
    }
}

/// States with the choices that keep the play inside them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EndComponent {
    pub states: StateSet,
    /// `(state, choice index)` pairs, ascending.
    pub choices: Vec<(u32, usize)>,
}

impl EndComponent {
    /// Strongly connected under the retained choices and closed under
    /// their successors.
    pub fn is_valid(&self, g: &ChoiceGraph) -> bool {
        if self.states.is_empty() {
            return false;
        }
        let mut adj: Vec<Vec<u32>> = vec![Vec::new(); g.num_states()];
        let mut has_choice = StateSet::new();
        for &(s, c) in &self.choices {
            if !self.states.contains(s) {
                return false;
            }
            has_choice.insert(s);
            for &(t, _) in &g.choices[s as usize][c] {
                if !self.states.contains(t) {
                    return false;
                }
                adj[s as usize].push(t);
            }
        }
        if has_choice != self.states {
            return false;
        }
        let first = self.states.first().expect("non-empty");
        let fwd = graph::reachable(&adj, [first]);
        let bwd = graph::reachable(&graph::reverse(&adj), [first]);
        self.states.iter().all(|s| fwd[s as usize] && bwd[s as usize])
    }
}

/// Maximal end components of `g` using only choices admitted by `allowed`.
/// Repeatedly splits into SCCs and drops choices that can leave their SCC.
pub fn mec_decomposition_filtered(g: &ChoiceGraph, allowed: impl Fn(u32, usize) -> bool) -> Vec<EndComponent> {
    let n = g.num_states();
    let mut enabled: Vec<Vec<usize>> = (0..n)
        .map(|s| (0..g.choices[s].len()).filter(|&c| allowed(s as u32, c)).collect())
        .collect();
    loop {
        let adj: Vec<Vec<u32>> = (0..n)
            .map(|s| {
                enabled[s]
                    .iter()
                    .flat_map(|&c| g.choices[s][c].iter().map(|&(t, _)| t))
                    .collect()
            })
            .collect();
        let comps = graph::sccs(&adj);
        let idx = graph::component_index(n, &comps);
        let mut changed = false;
        for s in 0..n {
            let before = enabled[s].len();
            enabled[s].retain(|&c| {
                g.choices[s][c]
                    .iter()
                    .all(|&(t, _)| idx[t as usize] == idx[s])
            });
            changed |= enabled[s].len() != before;
        }
        if !changed {
            let mut out = Vec::new();
            for comp in comps {
                let states: StateSet = comp.iter().copied().filter(|&s| !enabled[s as usize].is_empty()).collect();
                if states.is_empty() {
                    continue;
                }
                let mut choices: Vec<(u32, usize)> = states
                    .iter()
                    .flat_map(|s| enabled[s as usize].iter().map(move |&c| (s, c)))
                    .collect();
                choices.sort_unstable();
                out.push(EndComponent { states, choices });
            }
            out.sort_by_key(|e| e.states.first());
            return out;
        }
    }
}

pub fn mec_decomposition(g: &ChoiceGraph) -> Vec<EndComponent> {
    mec_decomposition_filtered(g, |_, _| true)
}
