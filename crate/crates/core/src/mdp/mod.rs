//! Markov decision processes with letter-labelled states, their product
//! with automata, maximal end components and reachability values.
//!
//! Text format, one declaration per line (`#` starts a comment):
//!
//! ```text
//! states 3
//! initial 0
//! label 0 1
//! trans 0 go 1 1/2
//! trans 0 go 2 1/2
//! ```
//!
//! Labels are letters of the automaton alphabet: bit `j` is proposition
//! `j`. Every state needs a label and at least one action, and the
//! probabilities of each action must sum to exactly 1.

mod mec;
mod product;
mod solve;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;

pub use mec::{mec_decomposition, mec_decomposition_filtered, ChoiceGraph, EndComponent};
pub use product::{mdp_product, ProductChoice, ProductMdp};
pub use solve::{
    max_reachability, pr_max_buchi, pr_max_reference, pr_max_tela, pr_max_tela_with, qualitative_positive,
    qualitative_positive_dnf, qualitative_positive_finless, VI_TOLERANCE,
};

use crate::automaton::Letter;
use crate::error::{Error, Result};

pub type Prob = Ratio<i128>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Action {
    pub name: String,
    /// Successors with positive probability, ascending by state.
    pub succ: Vec<(u32, Prob)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mdp {
    labels: Vec<Letter>,
    initial: u32,
    actions: Vec<Vec<Action>>,
}

impl Mdp {
    /// Validates the distributions: positive probabilities summing to 1,
    /// at least one action per state, targets in range.
    pub fn new(labels: Vec<Letter>, initial: u32, actions: Vec<Vec<Action>>) -> Result<Mdp> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::InvalidAutomaton("MDP without states".into()));
        }
        if actions.len() != n {
            return Err(Error::InvalidAutomaton(format!("{} action lists for {n} states", actions.len())));
        }
        if initial as usize >= n {
            return Err(Error::InvalidAutomaton(format!("initial state {initial} out of range")));
        }
        let mut actions = actions;
        for (s, acts) in actions.iter_mut().enumerate() {
            if acts.is_empty() {
                return Err(Error::InvalidAutomaton(format!("state {s} has no action")));
            }
            for a in acts.iter_mut() {
                a.succ.sort_by_key(|&(t, _)| t);
                if a.succ.windows(2).any(|w| w[0].0 == w[1].0) {
                    return Err(Error::InvalidAutomaton(format!("state {s} action {}: repeated target", a.name)));
                }
                let mut total = Prob::from_integer(0);
                for &(t, p) in &a.succ {
                    if t as usize >= n {
                        return Err(Error::InvalidAutomaton(format!("target {t} out of range")));
                    }
                    if p <= Prob::from_integer(0) {
                        return Err(Error::InvalidAutomaton(format!("state {s} action {}: probability {p}", a.name)));
                    }
                    total += p;
                }
                if total != Prob::from_integer(1) {
                    return Err(Error::InvalidAutomaton(format!(
                        "state {s} action {}: probabilities sum to {total}",
                        a.name
                    )));
                }
            }
        }
        Ok(Mdp {
            labels,
            initial,
            actions,
        })
    }

    /// A Markov chain: one action `c` per state.
    pub fn chain(labels: Vec<Letter>, initial: u32, succ: Vec<Vec<(u32, Prob)>>) -> Result<Mdp> {
        let actions = succ
            .into_iter()
            .map(|s| {
                vec![Action {
                    name: "c".into(),
                    succ: s,
                }]
            })
            .collect();
        Mdp::new(labels, initial, actions)
    }

    pub fn num_states(&self) -> u32 {
        self.labels.len() as u32
    }

    pub fn initial(&self) -> u32 {
        self.initial
    }

    pub fn label(&self, s: u32) -> Letter {
        self.labels[s as usize]
    }

    pub fn labels(&self) -> &[Letter] {
        &self.labels
    }

    pub fn actions(&self, s: u32) -> &[Action] {
        &self.actions[s as usize]
    }

    pub fn graph(&self) -> ChoiceGraph {
        ChoiceGraph::new(
            self.actions
                .iter()
                .map(|acts| acts.iter().map(|a| to_float(&a.succ)).collect())
                .collect(),
        )
    }
}

pub(crate) fn to_float(succ: &[(u32, Prob)]) -> Vec<(u32, f64)> {
    succ.iter().map(|&(t, p)| (t, *p.numer() as f64 / *p.denom() as f64)).collect()
}

fn parse_prob(tok: &str) -> Option<Prob> {
    match tok.split_once('/') {
        Some((n, d)) => {
            let n: i128 = n.parse().ok()?;
            let d: i128 = d.parse().ok()?;
            (d != 0).then(|| Prob::new(n, d))
        }
        None => tok.parse::<i128>().ok().map(Prob::from_integer),
    }
}

/// Parses the text format described in the module documentation.
pub fn parse_mdp(text: &str) -> Result<Mdp> {
    let mut n: Option<u32> = None;
    let mut initial: Option<u32> = None;
    let mut labels: BTreeMap<u32, Letter> = BTreeMap::new();
    let mut actions: Vec<BTreeMap<String, Vec<(u32, Prob)>>> = Vec::new();
    for (li, raw) in text.lines().enumerate() {
        let line = li + 1;
        let content = raw.split('#').next().unwrap_or("");
        let toks: Vec<(usize, &str)> = tokens(content);
        let Some(&(c0, kw)) = toks.first() else { continue };
        let num = |k: usize, what: &str| -> Result<u32> {
            let (c, t) = toks.get(k).ok_or_else(|| Error::parse(line, raw.len() + 1, format!("missing {what}")))?;
            t.parse().map_err(|_| Error::parse(line, *c, format!("expected {what}, found `{t}`")))
        };
        let state = |k: usize| -> Result<u32> {
            let s = num(k, "state")?;
            match n {
                None => Err(Error::parse(line, toks[k].0, "`states` must come first")),
                Some(n) if s >= n => Err(Error::parse(line, toks[k].0, format!("state {s} out of range"))),
                _ => Ok(s),
            }
        };
        let arity = match kw {
            "states" | "initial" => 2,
            "label" => 3,
            "trans" => 5,
            _ => return Err(Error::parse(line, c0, format!("unknown declaration `{kw}`"))),
        };
        if toks.len() != arity {
            return Err(Error::parse(line, c0, format!("`{kw}` takes {} arguments", arity - 1)));
        }
        match kw {
            "states" => {
                if n.is_some() {
                    return Err(Error::parse(line, c0, "repeated `states`"));
                }
                let k = num(1, "state count")?;
                n = Some(k);
                actions = vec![BTreeMap::new(); k as usize];
            }
            "initial" => {
                if initial.is_some() {
                    return Err(Error::parse(line, c0, "repeated `initial`"));
                }
                initial = Some(state(1)?);
            }
            "label" => {
                let s = state(1)?;
                let l = num(2, "letter")?;
                if labels.insert(s, l).is_some() {
                    return Err(Error::parse(line, c0, format!("state {s} labelled twice")));
                }
            }
            _ => {
                let s = state(1)?;
                let t = state(3)?;
                let (pc, pt) = toks[4];
                let p = parse_prob(pt).ok_or_else(|| Error::parse(line, pc, format!("bad probability `{pt}`")))?;
                let succ = actions[s as usize].entry(toks[2].1.to_string()).or_default();
                if succ.iter().any(|&(u, _)| u == t) {
                    return Err(Error::parse(line, c0, format!("duplicate transition {s} {} {t}", toks[2].1)));
                }
                succ.push((t, p));
            }
        }
    }
    let n = n.ok_or_else(|| Error::parse(1, 1, "missing `states`"))?;
    let initial = initial.ok_or_else(|| Error::parse(1, 1, "missing `initial`"))?;
    let mut label_vec = Vec::with_capacity(n as usize);
    for s in 0..n {
        label_vec.push(*labels.get(&s).ok_or_else(|| Error::parse(1, 1, format!("state {s} has no label")))?);
    }
    let actions = actions
        .into_iter()
        .map(|m| m.into_iter().map(|(name, succ)| Action { name, succ }).collect())
        .collect();
    Mdp::new(label_vec, initial, actions).map_err(|e| match e {
        Error::InvalidAutomaton(msg) => Error::parse(1, 1, msg),
        e => e,
    })
}

/// Whitespace-separated tokens with their 1-based columns.
fn tokens(s: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in s.char_indices() {
        match (ch.is_whitespace(), start) {
            (true, Some(b)) => {
                out.push((b + 1, &s[b..i]));
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    if let Some(b) = start {
        out.push((b + 1, &s[b..]));
    }
    out
}

impl FromStr for Mdp {
    type Err = Error;

    fn from_str(s: &str) -> Result<Mdp> {
        parse_mdp(s)
    }
}

impl fmt::Display for Mdp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "states {}", self.num_states())?;
        writeln!(f, "initial {}", self.initial)?;
        for (s, l) in self.labels.iter().enumerate() {
            writeln!(f, "label {s} {l}")?;
        }
        for (s, acts) in self.actions.iter().enumerate() {
            for a in acts {
                for (t, p) in &a.succ {
                    writeln!(f, "trans {s} {} {t} {p}", a.name)?;
                }
            }
        }
        Ok(())
    }
}
