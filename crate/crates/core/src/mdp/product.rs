use std::collections::{HashMap, VecDeque};

use super::{to_float, ChoiceGraph, Mdp, Prob};
use crate::acceptance::AcceptanceFormula;
use crate::automaton::{StateId, Tela};
use crate::bitset::MarkSet;
use crate::error::{Error, Result};

/// A choice of the product: an MDP action together with the automaton
/// transition taken on the current label.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductChoice {
    pub action: usize,
    pub next_q: StateId,
    pub marks: MarkSet,
    pub succ: Vec<(u32, Prob)>,
}

/// Reachable part of `M × G`; state 0 is initial. States whose label has
/// no automaton successor have no choices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductMdp {
    pub states: Vec<(u32, StateId)>,
    pub choices: Vec<Vec<ProductChoice>>,
    pub acceptance: AcceptanceFormula,
    pub num_marks: u32,
}

impl ProductMdp {
    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn graph(&self) -> ChoiceGraph {
        ChoiceGraph::new(
            self.choices
                .iter()
                .map(|cs| cs.iter().map(|c| to_float(&c.succ)).collect())
                .collect(),
        )
    }

    pub fn index_of(&self, s: u32, q: StateId) -> Option<u32> {
        self.states.iter().position(|&x| x == (s, q)).map(|i| i as u32)
    }
}

/// The scheduler picks the action and the automaton successor; the
/// automaton reads the label of the current MDP state.
pub fn mdp_product(m: &Mdp, g: &Tela) -> Result<ProductMdp> {
    if g.initial().len() != 1 {
        return Err(Error::InitialStates(g.initial().len()));
    }
    if let Some(&l) = m.labels().iter().find(|&&l| l >= g.alphabet_size()) {
        return Err(Error::Invalid(format!(
            "MDP label {l} outside the alphabet of {} letters",
            g.alphabet_size()
        )));
    }
    let init = (m.initial(), g.initial()[0]);
    let mut ids: HashMap<(u32, StateId), u32> = HashMap::from([(init, 0)]);
    let mut states = vec![init];
    let mut choices: Vec<Vec<ProductChoice>> = Vec::new();
    let mut queue = VecDeque::from([0u32]);
    while let Some(id) = queue.pop_front() {
        let (s, q) = states[id as usize];
        let mut out = Vec::new();
        for (ai, act) in m.actions(s).iter().enumerate() {
            for t in g.succ(q, m.label(s)) {
                let succ = act
                    .succ
                    .iter()
                    .map(|&(s2, p)| {
                        let key = (s2, t.dst);
                        let next = *ids.entry(key).or_insert_with(|| {
                            states.push(key);
                            queue.push_back(states.len() as u32 - 1);
                            states.len() as u32 - 1
                        });
                        (next, p)
                    })
                    .collect();
                out.push(ProductChoice {
                    action: ai,
                    next_q: t.dst,
                    marks: t.marks.clone(),
                    succ,
                });
            }
        }
        if choices.len() <= id as usize {
            choices.resize_with(id as usize + 1, Vec::new);
        }
        choices[id as usize] = out;
    }
    choices.resize_with(states.len(), Vec::new);
    Ok(ProductMdp {
        states,
        choices,
        acceptance: g.acceptance().clone(),
        num_marks: g.num_marks(),
    })
}
