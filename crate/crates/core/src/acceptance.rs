//! Emerson-Lei acceptance conditions.
//!
//! Atoms range over acceptance marks. `Inf(S)` holds when some mark of `S`
//! is seen infinitely often, `Fin(S)` when no mark of `S` is. A run is
//! accepting when the set of marks it sees infinitely often satisfies the
//! formula.

use std::fmt;

use crate::bitset::MarkSet;
use crate::error::{Error, Result};

/// Upper bound on the mark count accepted by [`equivalent`].
pub const EQUIVALENCE_MAX_MARKS: u32 = 24;

/// Positive Boolean formula over `Inf`/`Fin` atoms.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum AcceptanceFormula {
    True,
    False,
    Inf(MarkSet),
    Fin(MarkSet),
    And(Vec<AcceptanceFormula>),
    Or(Vec<AcceptanceFormula>),
}

use AcceptanceFormula as F;

impl AcceptanceFormula {
    pub fn inf(marks: impl IntoIterator<Item = u32>) -> Self {
        F::Inf(marks.into_iter().collect()).normalize()
    }

    pub fn fin(marks: impl IntoIterator<Item = u32>) -> Self {
        F::Fin(marks.into_iter().collect()).normalize()
    }

    pub fn and(children: impl IntoIterator<Item = AcceptanceFormula>) -> Self {
        F::And(children.into_iter().collect()).normalize()
    }

    pub fn or(children: impl IntoIterator<Item = AcceptanceFormula>) -> Self {
        F::Or(children.into_iter().collect()).normalize()
    }

    /// Canonical form: constants folded, nested connectives flattened,
    /// sibling `Fin` atoms under `And` (and sibling `Inf` atoms under `Or`)
    /// merged at the position of the first one, singleton connectives
    /// collapsed.
    pub fn normalize(&self) -> Self {
        match self {
            F::True | F::False => self.clone(),
            F::Inf(s) if s.is_empty() => F::False,
            F::Fin(s) if s.is_empty() => F::True,
            F::Inf(_) | F::Fin(_) => self.clone(),
            F::And(children) => {
                let mut out: Vec<F> = Vec::new();
                let mut fin_at: Option<usize> = None;
                let mut flat = Vec::new();
                for c in children {
                    match c.normalize() {
                        F::And(cs) => flat.extend(cs),
                        other => flat.push(other),
                    }
                }
                for c in flat {
                    match c {
                        F::False => return F::False,
                        F::True => {}
                        F::Fin(s) => match fin_at {
                            Some(i) => {
                                if let F::Fin(acc) = &mut out[i] {
                                    acc.union_with(&s);
                                }
                            }
                            None => {
                                fin_at = Some(out.len());
                                out.push(F::Fin(s));
                            }
                        },
                        other => out.push(other),
                    }
                }
                match out.len() {
                    0 => F::True,
                    1 => out.pop().unwrap(),
                    _ => F::And(out),
                }
            }
            F::Or(children) => {
                let mut out: Vec<F> = Vec::new();
                let mut inf_at: Option<usize> = None;
                let mut flat = Vec::new();
                for c in children {
                    match c.normalize() {
                        F::Or(cs) => flat.extend(cs),
                        other => flat.push(other),
                    }
                }
                for c in flat {
                    match c {
                        F::True => return F::True,
                        F::False => {}
                        F::Inf(s) => match inf_at {
                            Some(i) => {
                                if let F::Inf(acc) = &mut out[i] {
                                    acc.union_with(&s);
                                }
                            }
                            None => {
                                inf_at = Some(out.len());
                                out.push(F::Inf(s));
                            }
                        },
                        other => out.push(other),
                    }
                }
                match out.len() {
                    0 => F::False,
                    1 => out.pop().unwrap(),
                    _ => F::Or(out),
                }
            }
        }
    }

    /// Truth value under the set of marks seen infinitely often.
    pub fn evaluate(&self, seen: &MarkSet) -> bool {
        match self {
            F::True => true,
            F::False => false,
            F::Inf(s) => seen.intersects(s),
            F::Fin(s) => !seen.intersects(s),
            F::And(cs) => cs.iter().all(|c| c.evaluate(seen)),
            F::Or(cs) => cs.iter().any(|c| c.evaluate(seen)),
        }
    }

    /// Same as [`evaluate`](Self::evaluate) with `seen` given as a bit mask;
    /// marks above 63 count as unseen.
    pub fn evaluate_mask(&self, seen: u64) -> bool {
        fn hits(s: &MarkSet, seen: u64) -> bool {
            s.iter().take_while(|&m| m < 64).any(|m| seen & (1 << m) != 0)
        }
        match self {
            F::True => true,
            F::False => false,
            F::Inf(s) => hits(s, seen),
            F::Fin(s) => !hits(s, seen),
            F::And(cs) => cs.iter().all(|c| c.evaluate_mask(seen)),
            F::Or(cs) => cs.iter().any(|c| c.evaluate_mask(seen)),
        }
    }

    /// Number of atoms counted with multiplicity; a markset atom counts
    /// as its expansion into single-mark atoms.
    pub fn length(&self) -> usize {
        match self {
            F::True | F::False => 1,
            F::Inf(s) | F::Fin(s) => s.len().max(1),
            F::And(cs) | F::Or(cs) => cs.iter().map(F::length).sum(),
        }
    }

    /// All marks referenced by the formula.
    pub fn marks(&self) -> MarkSet {
        let mut out = MarkSet::new();
        self.visit_atoms(&mut |_, s| out.union_with(s));
        out
    }

    /// Marks occurring inside `Fin` atoms.
    pub fn fin_marks(&self) -> MarkSet {
        let mut out = MarkSet::new();
        self.visit_atoms(&mut |is_inf, s| {
            if !is_inf {
                out.union_with(s)
            }
        });
        out
    }

    pub fn has_fin(&self) -> bool {
        !self.fin_marks().is_empty()
    }

    fn visit_atoms(&self, f: &mut impl FnMut(bool, &MarkSet)) {
        match self {
            F::True | F::False => {}
            F::Inf(s) => f(true, s),
            F::Fin(s) => f(false, s),
            F::And(cs) | F::Or(cs) => cs.iter().for_each(|c| c.visit_atoms(f)),
        }
    }

    /// Rewrites every atom's markset.
    pub fn map_marks(&self, f: &impl Fn(&MarkSet) -> MarkSet) -> Self {
        match self {
            F::True | F::False => self.clone(),
            F::Inf(s) => F::Inf(f(s)),
            F::Fin(s) => F::Fin(f(s)),
            F::And(cs) => F::And(cs.iter().map(|c| c.map_marks(f)).collect()),
            F::Or(cs) => F::Or(cs.iter().map(|c| c.map_marks(f)).collect()),
        }
        .normalize()
    }

    pub fn shifted(&self, offset: u32) -> Self {
        self.map_marks(&|s| s.shifted(offset))
    }

    /// Simplifies under the assumption that only marks in `present` can be
    /// seen at all.
    pub fn restrict_to(&self, present: &MarkSet) -> Self {
        self.map_marks(&|s| s.intersection(present))
    }

    /// Simplifies under the assumption that `mark` is seen infinitely often
    /// (every `Fin` atom mentioning it becomes false).
    pub fn assume_seen(&self, mark: u32) -> Self {
        match self {
            F::Fin(s) if s.contains(mark) => F::False,
            F::Inf(s) if s.contains(mark) => F::True,
            F::True | F::False | F::Inf(_) | F::Fin(_) => self.clone(),
            F::And(cs) => F::And(cs.iter().map(|c| c.assume_seen(mark)).collect()),
            F::Or(cs) => F::Or(cs.iter().map(|c| c.assume_seen(mark)).collect()),
        }
        .normalize()
    }

    /// Replaces every `Fin` atom mentioning `mark` by `f`, leaving `Inf`
    /// atoms untouched. The result implies `self`.
    pub fn drop_fin(&self, mark: u32) -> Self {
        match self {
            F::Fin(s) if s.contains(mark) => F::False,
            F::True | F::False | F::Inf(_) | F::Fin(_) => self.clone(),
            F::And(cs) => F::And(cs.iter().map(|c| c.drop_fin(mark)).collect()),
            F::Or(cs) => F::Or(cs.iter().map(|c| c.drop_fin(mark)).collect()),
        }
        .normalize()
    }

    /// Dual formula: `evaluate(s, negate(f)) == !evaluate(s, f)`.
    pub fn negate(&self) -> Self {
        match self {
            F::True => F::False,
            F::False => F::True,
            F::Inf(s) => F::Fin(s.clone()),
            F::Fin(s) => F::Inf(s.clone()),
            F::And(cs) => F::Or(cs.iter().map(F::negate).collect()),
            F::Or(cs) => F::And(cs.iter().map(F::negate).collect()),
        }
        .normalize()
    }

    /// Disjunctive normal form with merged `Fin` atoms per disjunct.
    /// Disjuncts without an `Inf` atom receive [`InfAtom::All`].
    pub fn to_dnf(&self) -> DnfAcceptance {
        fn go(f: &F) -> Vec<(MarkSet, Vec<MarkSet>)> {
            match f {
                F::True => vec![(MarkSet::new(), vec![])],
                F::False => vec![],
                F::Inf(s) => vec![(MarkSet::new(), vec![s.clone()])],
                F::Fin(s) => vec![(s.clone(), vec![])],
                F::Or(cs) => cs.iter().flat_map(go).collect(),
                F::And(cs) => {
                    let mut acc = vec![(MarkSet::new(), vec![])];
                    for c in cs {
                        let rhs = go(c);
                        let mut next = Vec::with_capacity(acc.len() * rhs.len());
                        for (fa, ia) in &acc {
                            for (fb, ib) in &rhs {
                                let mut infs = ia.clone();
                                infs.extend(ib.iter().cloned());
                                next.push((fa.union(fb), infs));
                            }
                        }
                        acc = next;
                    }
                    acc
                }
            }
        }
        let mut disjuncts: Vec<DnfDisjunct> = Vec::new();
        for (fin, infs) in go(&self.normalize()) {
            let infs = if infs.is_empty() {
                vec![InfAtom::All]
            } else {
                infs.into_iter().map(InfAtom::Marks).collect()
            };
            let d = DnfDisjunct { fin, infs };
            if !disjuncts.contains(&d) {
                disjuncts.push(d);
            }
        }
        DnfAcceptance { disjuncts }
    }

    /// Conjunctive normal form of a fin-less formula with each clause's
    /// `Inf` atoms merged into one markset: the result `S_1..S_K` satisfies
    /// `⋀ Inf(S_j) ≡ self`. An empty clause stands for `Inf(∅)` (false).
    pub fn finless_to_gba(&self) -> Result<Vec<MarkSet>> {
        fn go(f: &F) -> Result<Vec<MarkSet>> {
            Ok(match f {
                F::True => vec![],
                F::False => vec![MarkSet::new()],
                F::Inf(s) => vec![s.clone()],
                F::Fin(_) => return Err(Error::HasFin),
                F::And(cs) => {
                    let mut out = Vec::new();
                    for c in cs {
                        out.extend(go(c)?);
                    }
                    out
                }
                F::Or(cs) => {
                    let mut acc = vec![MarkSet::new()];
                    for c in cs {
                        let rhs = go(c)?;
                        let mut next = Vec::with_capacity(acc.len() * rhs.len());
                        for a in &acc {
                            for b in &rhs {
                                next.push(a.union(b));
                            }
                        }
                        acc = next;
                    }
                    acc
                }
            })
        }
        let mut out: Vec<MarkSet> = Vec::new();
        for clause in go(&self.normalize())? {
            if !out.contains(&clause) {
                out.push(clause);
            }
        }
        Ok(out)
    }

    /// The acceptance sets if the formula is a conjunction of `Inf` atoms
    /// (`t` being the empty conjunction).
    pub fn gba_sets(&self) -> Option<Vec<MarkSet>> {
        match self {
            F::True => Some(vec![]),
            F::Inf(s) => Some(vec![s.clone()]),
            F::And(cs) => cs
                .iter()
                .map(|c| match c {
                    F::Inf(s) => Some(s.clone()),
                    _ => None,
                })
                .collect(),
            _ => None,
        }
    }

    /// Whether the formula syntactically is a disjunction of conjunctions of
    /// atoms.
    pub fn is_dnf_shaped(&self) -> bool {
        fn conj(f: &F) -> bool {
            match f {
                F::True | F::Inf(_) | F::Fin(_) => true,
                F::And(cs) => cs.iter().all(|c| matches!(c, F::True | F::Inf(_) | F::Fin(_))),
                _ => false,
            }
        }
        match self {
            F::False => true,
            F::Or(cs) => cs.iter().all(conj),
            other => conj(other),
        }
    }

    /// Top-level disjuncts (a non-`Or` formula is its own single disjunct).
    pub fn top_disjuncts(&self) -> Vec<AcceptanceFormula> {
        match self {
            F::Or(cs) => cs.clone(),
            F::False => vec![],
            other => vec![other.clone()],
        }
    }
}

/// `true` iff both formulas agree on every subset of `{0..nmarks-1}`.
pub fn equivalent(a: &AcceptanceFormula, b: &AcceptanceFormula, nmarks: u32) -> Result<bool> {
    if nmarks > EQUIVALENCE_MAX_MARKS {
        return Err(Error::Limit(format!(
            "equivalence check over {nmarks} marks exceeds {EQUIVALENCE_MAX_MARKS}"
        )));
    }
    Ok((0..1u64 << nmarks).all(|seen| a.evaluate_mask(seen) == b.evaluate_mask(seen)))
}

/// An `Inf` atom inside a DNF disjunct.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum InfAtom {
    Marks(MarkSet),
    /// `Inf(δ)`: satisfied by every run. Materialized as a fresh mark on
    /// every transition when the owning automaton needs one.
    All,
}

impl InfAtom {
    fn length(&self) -> usize {
        match self {
            InfAtom::Marks(s) => s.len().max(1),
            InfAtom::All => 1,
        }
    }
}

/// One disjunct `Fin(fin) ∧ ⋀ Inf(infs)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DnfDisjunct {
    pub fin: MarkSet,
    pub infs: Vec<InfAtom>,
}

/// Generalized-Rabin normal form. No disjuncts means `f`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct DnfAcceptance {
    pub disjuncts: Vec<DnfDisjunct>,
}

impl DnfAcceptance {
    pub fn evaluate(&self, seen: &MarkSet) -> bool {
        self.disjuncts.iter().any(|d| {
            !seen.intersects(&d.fin)
                && d.infs.iter().all(|i| match i {
                    InfAtom::Marks(s) => seen.intersects(s),
                    InfAtom::All => true,
                })
        })
    }

    pub fn length(&self) -> usize {
        if self.disjuncts.is_empty() {
            return 1;
        }
        self.disjuncts
            .iter()
            .map(|d| d.fin.len() + d.infs.iter().map(InfAtom::length).sum::<usize>())
            .sum()
    }

    /// Back to a formula; `Inf(δ)` becomes `t`.
    pub fn to_formula(&self) -> AcceptanceFormula {
        F::or(self.disjuncts.iter().map(|d| {
            let mut parts = vec![F::Fin(d.fin.clone())];
            parts.extend(d.infs.iter().map(|i| match i {
                InfAtom::Marks(s) => F::Inf(s.clone()),
                InfAtom::All => F::True,
            }));
            F::and(parts)
        }))
    }

    pub fn uses_all(&self) -> bool {
        self.disjuncts
            .iter()
            .any(|d| d.infs.contains(&InfAtom::All))
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Ctx {
    Top,
    And,
    Or,
}

fn write_formula(f: &F, ctx: Ctx, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    let joined = |out: &mut fmt::Formatter<'_>, parts: Vec<String>, sep: &str, paren: bool| {
        if paren && parts.len() > 1 {
            write!(out, "({})", parts.join(sep))
        } else {
            write!(out, "{}", parts.join(sep))
        }
    };
    match f {
        F::True => write!(out, "t"),
        F::False => write!(out, "f"),
        F::Inf(s) => joined(
            out,
            s.iter().map(|m| format!("Inf({m})")).collect(),
            " | ",
            ctx == Ctx::And,
        ),
        F::Fin(s) => joined(
            out,
            s.iter().map(|m| format!("Fin({m})")).collect(),
            " & ",
            ctx == Ctx::Or,
        ),
        F::And(cs) => joined(
            out,
            cs.iter().map(|c| Shown(c, Ctx::And).to_string()).collect(),
            " & ",
            ctx == Ctx::Or,
        ),
        F::Or(cs) => joined(
            out,
            cs.iter().map(|c| Shown(c, Ctx::Or).to_string()).collect(),
            " | ",
            ctx == Ctx::And,
        ),
    }
}

struct Shown<'a>(&'a F, Ctx);

impl fmt::Display for Shown<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(self.0, self.1, f)
    }
}

/// HOA `Acceptance:` syntax.
impl fmt::Display for AcceptanceFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(self, Ctx::Top, f)
    }
}

impl fmt::Debug for AcceptanceFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(self, Ctx::Top, f)
    }
}

/// Parses HOA acceptance syntax; error columns are 1-based and offset by
/// `col0`.
pub fn parse_acceptance_at(text: &str, line: usize, col0: usize) -> Result<AcceptanceFormula> {
    let mut p = AccParser {
        chars: text.char_indices().collect(),
        pos: 0,
        line,
        col0,
    };
    let f = p.expr()?;
    p.skip_ws();
    if p.pos < p.chars.len() {
        return Err(p.err("trailing input after acceptance formula"));
    }
    Ok(f.normalize())
}

impl std::str::FromStr for AcceptanceFormula {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_acceptance_at(s, 1, 0)
    }
}

struct AccParser {
    chars: Vec<(usize, char)>,
    pos: usize,
    line: usize,
    col0: usize,
}

impl AccParser {
    fn err(&self, msg: &str) -> Error {
        Error::parse(self.line, self.col0 + self.pos + 1, msg)
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].1.is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).map(|c| c.1)
    }

    fn eat(&mut self, c: char) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(&format!("expected '{c}'")))
        }
    }

    fn expr(&mut self) -> Result<F> {
        let mut parts = vec![self.term()?];
        while self.peek() == Some('|') {
            self.pos += 1;
            parts.push(self.term()?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { F::Or(parts) })
    }

    fn term(&mut self) -> Result<F> {
        let mut parts = vec![self.factor()?];
        while self.peek() == Some('&') {
            self.pos += 1;
            parts.push(self.factor()?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { F::And(parts) })
    }

    fn word(&mut self) -> String {
        let start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].1.is_ascii_alphabetic() {
            self.pos += 1;
        }
        self.chars[start..self.pos].iter().map(|c| c.1).collect()
    }

    fn number(&mut self) -> Result<u32> {
        self.skip_ws();
        if self.peek() == Some('!') {
            return Err(self.err("complemented acceptance sets are not supported"));
        }
        let start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].1.is_ascii_digit() {
            self.pos += 1;
        }
        let digits: String = self.chars[start..self.pos].iter().map(|c| c.1).collect();
        digits.parse().map_err(|_| {
            self.pos = start;
            self.err("expected acceptance set number")
        })
    }

    fn factor(&mut self) -> Result<F> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.eat(')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                let w = self.word();
                match w.as_str() {
                    "t" => Ok(F::True),
                    "f" => Ok(F::False),
                    "Inf" | "Fin" => {
                        self.eat('(')?;
                        let n = self.number()?;
                        self.eat(')')?;
                        let s = MarkSet::singleton(n);
                        Ok(if w == "Inf" { F::Inf(s) } else { F::Fin(s) })
                    }
                    _ => {
                        self.pos = start;
                        Err(self.err(&format!("unknown acceptance atom '{w}'")))
                    }
                }
            }
            Some(_) => Err(self.err("malformed acceptance formula")),
            None => Err(self.err("unexpected end of acceptance formula")),
        }
    }
}
