//! Reading and writing automata in the HOA v1 format.
//!
//! Supported: explicit transition labels over declared propositions,
//! transition-based marks, several `Start:` lines. Labels are expanded to
//! explicit letters. Rejected with a positioned diagnostic: state-based
//! marks, implicit labels, aliases, unknown capitalized headers, more
//! propositions than the configured cap.

use std::fmt::Write as _;

use crate::acceptance::{parse_acceptance_at, AcceptanceFormula};
use crate::automaton::{letter_label, Letter, Tela, Transition, DEFAULT_MAX_APS, MAX_APS_HARD};
use crate::bitset::MarkSet;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Header(String),
    Int(u64),
    Str(String),
    Ident(String),
    Sym(char),
    Body,
    End,
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
    /// Byte offset of the token start.
    at: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let (mut i, mut line, mut line_start) = (0usize, 1usize, 0usize);
    while i < bytes.len() {
        let c = bytes[i];
        let col = text[line_start..i].chars().count() + 1;
        if c == b'\n' {
            i += 1;
            line += 1;
            line_start = i;
            continue;
        }
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let push = |out: &mut Vec<Spanned>, tok| out.push(Spanned { tok, line, col, at: start });
        if text[i..].starts_with("/*") {
            let end = text[i + 2..]
                .find("*/")
                .ok_or_else(|| Error::parse(line, col, "unterminated comment"))?;
            for ch in text[i..i + 2 + end + 2].chars() {
                if ch == '\n' {
                    line += 1;
                }
            }
            let skipped = i + 2 + end + 2;
            if let Some(nl) = text[i..skipped].rfind('\n') {
                line_start = i + nl + 1;
            }
            i = skipped;
            continue;
        }
        if text[i..].starts_with("--BODY--") {
            push(&mut out, Tok::Body);
            i += 8;
            continue;
        }
        if text[i..].starts_with("--END--") {
            push(&mut out, Tok::End);
            i += 7;
            continue;
        }
        if text[i..].starts_with("--ABORT--") {
            return Err(Error::parse(line, col, "--ABORT-- is not supported"));
        }
        if c == b'"' {
            let mut j = i + 1;
            let mut s = String::new();
            loop {
                match bytes.get(j) {
                    None | Some(b'\n') => return Err(Error::parse(line, col, "unterminated string")),
                    Some(b'"') => break,
                    Some(b'\\') if j + 1 < bytes.len() => {
                        s.push(bytes[j + 1] as char);
                        j += 2;
                    }
                    Some(_) => {
                        let ch = text[j..].chars().next().expect("char");
                        s.push(ch);
                        j += ch.len_utf8();
                    }
                }
            }
            push(&mut out, Tok::Str(s));
            i = j + 1;
            continue;
        }
        if c.is_ascii_digit() {
            let mut j = i;
            while j < bytes.len() && bytes[j].is_ascii_digit() {
                j += 1;
            }
            let v = text[i..j]
                .parse()
                .map_err(|_| Error::parse(line, col, "integer too large"))?;
            push(&mut out, Tok::Int(v));
            i = j;
            continue;
        }
        if c.is_ascii_alphabetic() || c == b'_' || c == b'@' {
            let mut j = i + 1;
            while j < bytes.len() && (bytes[j].is_ascii_alphanumeric() || b"_-.".contains(&bytes[j])) {
                j += 1;
            }
            if bytes.get(j) == Some(&b':') {
                push(&mut out, Tok::Header(text[i..j].to_string()));
                i = j + 1;
            } else {
                push(&mut out, Tok::Ident(text[i..j].to_string()));
                i = j;
            }
            continue;
        }
        if b"!&|()[]{}".contains(&c) {
            push(&mut out, Tok::Sym(c as char));
            i += 1;
            continue;
        }
        let ch = text[i..].chars().next().expect("char");
        return Err(Error::parse(line, col, format!("unexpected character '{ch}'")));
    }
    Ok(out)
}

struct Parser<'a> {
    text: &'a str,
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn here(&self) -> (usize, usize) {
        match self.toks.get(self.pos) {
            Some(s) => (s.line, s.col),
            None => {
                let line = self.text.lines().count().max(1);
                (line, self.text.lines().last().map_or(0, |l| l.chars().count()) + 1)
            }
        }
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        let (l, c) = self.here();
        Error::parse(l, c, msg)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|s| s.tok.clone());
        self.pos += 1;
        t
    }

    fn int(&mut self, what: &str) -> Result<u64> {
        match self.peek() {
            Some(Tok::Int(v)) => {
                let v = *v;
                self.pos += 1;
                Ok(v)
            }
            _ => Err(self.err(format!("expected {what}"))),
        }
    }

    fn sym(&mut self, c: char) -> Result<()> {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected '{c}'")))
        }
    }

    /// Skips the arguments of an ignored header.
    fn skip_args(&mut self) {
        while matches!(self.peek(), Some(Tok::Int(_) | Tok::Str(_) | Tok::Ident(_) | Tok::Sym(_))) {
            self.pos += 1;
        }
    }

    // Label grammar: or := and ('|' and)*, and := not ('&' not)*,
    // not := '!' not | atom, atom := 't' | 'f' | int | '(' or ')'.
    // A label evaluates to a table indexed by letter.
    fn label_or(&mut self, aps: usize) -> Result<Vec<bool>> {
        let mut v = self.label_and(aps)?;
        while self.peek() == Some(&Tok::Sym('|')) {
            self.pos += 1;
            let w = self.label_and(aps)?;
            v.iter_mut().zip(w).for_each(|(a, b)| *a |= b);
        }
        Ok(v)
    }

    fn label_and(&mut self, aps: usize) -> Result<Vec<bool>> {
        let mut v = self.label_not(aps)?;
        while self.peek() == Some(&Tok::Sym('&')) {
            self.pos += 1;
            let w = self.label_not(aps)?;
            v.iter_mut().zip(w).for_each(|(a, b)| *a &= b);
        }
        Ok(v)
    }

    fn label_not(&mut self, aps: usize) -> Result<Vec<bool>> {
        let n = 1usize << aps;
        match self.peek().cloned() {
            Some(Tok::Sym('!')) => {
                self.pos += 1;
                Ok(self.label_not(aps)?.into_iter().map(|b| !b).collect())
            }
            Some(Tok::Sym('(')) => {
                self.pos += 1;
                let v = self.label_or(aps)?;
                self.sym(')')?;
                Ok(v)
            }
            Some(Tok::Ident(w)) if w == "t" || w == "f" => {
                self.pos += 1;
                Ok(vec![w == "t"; n])
            }
            Some(Tok::Ident(w)) if w.starts_with('@') => Err(self.err("aliases are not supported")),
            Some(Tok::Int(j)) => {
                if j as usize >= aps {
                    return Err(self.err(format!("proposition {j} not declared")));
                }
                self.pos += 1;
                Ok((0..n).map(|a| a & (1 << j) != 0).collect())
            }
            _ => Err(self.err("expected label expression")),
        }
    }

    fn marks(&mut self) -> Result<Option<MarkSet>> {
        if self.peek() != Some(&Tok::Sym('{')) {
            return Ok(None);
        }
        self.pos += 1;
        let mut m = MarkSet::new();
        while let Some(Tok::Int(v)) = self.peek() {
            let v = *v;
            if v > u32::MAX as u64 / 2 {
                return Err(self.err("mark number too large"));
            }
            m.insert(v as u32);
            self.pos += 1;
        }
        self.sym('}')?;
        Ok(Some(m))
    }
}

pub fn parse_hoa(text: &str) -> Result<Tela> {
    parse_hoa_with(text, DEFAULT_MAX_APS)
}

/// Like [`parse_hoa`] with a custom cap on the number of propositions.
pub fn parse_hoa_with(text: &str, max_aps: usize) -> Result<Tela> {
    let max_aps = max_aps.min(MAX_APS_HARD);
    let mut p = Parser {
        text,
        toks: lex(text)?,
        pos: 0,
    };
    match p.next() {
        Some(Tok::Header(h)) if h == "HOA" => {}
        _ => {
            p.pos = 0;
            return Err(p.err("expected `HOA: v1`"));
        }
    }
    match p.next() {
        Some(Tok::Ident(v)) if v == "v1" => {}
        _ => {
            p.pos -= 1;
            return Err(p.err("unsupported HOA version"));
        }
    }
    let mut states: Option<u32> = None;
    let mut initial: Vec<u32> = Vec::new();
    let mut aps: Option<Vec<String>> = None;
    let mut acc: Option<(u32, AcceptanceFormula)> = None;
    loop {
        let (line, col) = p.here();
        match p.next() {
            Some(Tok::Body) => break,
            Some(Tok::Header(h)) => match h.as_str() {
                "States" => {
                    if states.is_some() {
                        return Err(Error::parse(line, col, "repeated States header"));
                    }
                    let n = p.int("state count")?;
                    states = Some(u32::try_from(n).map_err(|_| Error::parse(line, col, "too many states"))?);
                }
                "Start" => {
                    let q = p.int("initial state")?;
                    if p.peek() == Some(&Tok::Sym('&')) {
                        return Err(p.err("universal initial states are not supported"));
                    }
                    initial.push(q as u32);
                }
                "AP" => {
                    if aps.is_some() {
                        return Err(Error::parse(line, col, "repeated AP header"));
                    }
                    let n = p.int("proposition count")? as usize;
                    if n > max_aps {
                        return Err(Error::parse(
                            line,
                            col,
                            format!("{n} atomic propositions exceed the maximum of {max_aps}"),
                        ));
                    }
                    let mut names = Vec::new();
                    for _ in 0..n {
                        match p.next() {
                            Some(Tok::Str(s)) => names.push(s),
                            _ => {
                                p.pos -= 1;
                                return Err(p.err("expected proposition name"));
                            }
                        }
                    }
                    aps = Some(names);
                }
                "Acceptance" => {
                    if acc.is_some() {
                        return Err(Error::parse(line, col, "repeated Acceptance header"));
                    }
                    let n = p.int("acceptance set count")? as u32;
                    let start_tok = p.pos;
                    while matches!(p.peek(), Some(Tok::Ident(_) | Tok::Int(_) | Tok::Sym(_))) {
                        p.pos += 1;
                    }
                    let Some(first) = p.toks.get(start_tok).filter(|_| p.pos > start_tok) else {
                        return Err(p.err("missing acceptance formula"));
                    };
                    let (fl, fc, from) = (first.line, first.col, first.at);
                    let to = p.toks.get(p.pos).map_or(text.len(), |s| s.at);
                    let src = &text[from..to];
                    if src.trim_end().contains('\n') {
                        return Err(Error::parse(fl, fc, "acceptance formula must fit on one line"));
                    }
                    let f = parse_acceptance_at(src.trim_end(), fl, fc - 1)?;
                    acc = Some((n, f));
                }
                "name" | "tool" | "properties" | "acc-name" => p.skip_args(),
                other if other.starts_with(|c: char| c.is_ascii_lowercase()) => p.skip_args(),
                other => return Err(Error::parse(line, col, format!("unknown header `{other}:`"))),
            },
            Some(_) => return Err(Error::parse(line, col, "expected a header")),
            None => return Err(Error::parse(line, col, "missing --BODY--")),
        }
    }
    let aps = aps.unwrap_or_default();
    let (num_marks, acceptance) = acc.ok_or_else(|| Error::parse(1, 1, "missing Acceptance header"))?;

    let mut transitions: Vec<Transition> = Vec::new();
    let mut seen_states: u32 = 0;
    loop {
        let (line, col) = p.here();
        match p.next() {
            Some(Tok::End) => break,
            Some(Tok::Header(h)) if h == "State" => {
                if p.peek() == Some(&Tok::Sym('[')) {
                    return Err(p.err("state labels are not supported"));
                }
                let q = p.int("state number")? as u32;
                if let Some(Tok::Str(_)) = p.peek() {
                    p.pos += 1;
                }
                if p.peek() == Some(&Tok::Sym('{')) {
                    return Err(p.err("state-based acceptance is not supported"));
                }
                seen_states = seen_states.max(q + 1);
                while p.peek() == Some(&Tok::Sym('[')) || matches!(p.peek(), Some(Tok::Int(_))) {
                    if p.peek() != Some(&Tok::Sym('[')) {
                        return Err(p.err("implicit labels are not supported"));
                    }
                    p.pos += 1;
                    let letters = p.label_or(aps.len())?;
                    p.sym(']')?;
                    let dst = p.int("target state")? as u32;
                    if p.peek() == Some(&Tok::Sym('&')) {
                        return Err(p.err("universal branching is not supported"));
                    }
                    let marks = p.marks()?.unwrap_or_default();
                    for (a, _) in letters.iter().enumerate().filter(|(_, &b)| b) {
                        transitions.push(Transition::new(q, a as Letter, dst, marks.clone()));
                    }
                }
            }
            Some(_) => return Err(Error::parse(line, col, "expected `State:` or --END--")),
            None => return Err(Error::parse(line, col, "missing --END--")),
        }
    }
    if p.pos < p.toks.len() {
        return Err(p.err("trailing input after --END--"));
    }
    let n = states.unwrap_or(seen_states);
    Tela::new(aps, n, initial, transitions, acceptance, num_marks).map_err(|e| match e {
        Error::InvalidAutomaton(msg) => Error::parse(1, 1, msg),
        e => e,
    })
}

/// Canonical HOA text: fixed header order, one explicit full-cube label
/// per letter, transitions in (state, letter, target, marks) order.
pub fn print_hoa(a: &Tela) -> String {
    let mut s = String::new();
    s.push_str("HOA: v1\n");
    let _ = writeln!(s, "States: {}", a.num_states());
    for q in a.initial() {
        let _ = writeln!(s, "Start: {q}");
    }
    s.push_str("AP: ");
    let _ = write!(s, "{}", a.num_aps());
    for ap in a.aps() {
        let _ = write!(s, " \"{}\"", ap.replace('\\', "\\\\").replace('"', "\\\""));
    }
    s.push('\n');
    let _ = writeln!(s, "Acceptance: {} {}", a.num_marks(), a.acceptance());
    s.push_str("properties: trans-labels explicit-labels trans-acc");
    if a.is_deterministic() {
        s.push_str(" deterministic");
    }
    if a.is_complete() {
        s.push_str(" complete");
    }
    s.push('\n');
    s.push_str("--BODY--\n");
    for q in 0..a.num_states() {
        let _ = writeln!(s, "State: {q}");
        for t in a.out(q) {
            let _ = write!(s, "[{}] {}", letter_label(a.num_aps(), t.letter), t.dst);
            if !t.marks.is_empty() {
                let marks: Vec<String> = t.marks.iter().map(|m| m.to_string()).collect();
                let _ = write!(s, " {{{}}}", marks.join(" "));
            }
            s.push('\n');
        }
    }
    s.push_str("--END--\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::acceptance::AcceptanceFormula as F;

    const BUCHI: &str = r#"HOA: v1
name: "GFa"
States: 1
Start: 0
AP: 1 "a"
acc-name: Buchi
Acceptance: 1 Inf(0)
properties: trans-labels explicit-labels trans-acc
--BODY--
State: 0
[0] 0 {0}
[!0] 0
--END--
"#;

    #[test]
    fn minimal_buchi() {
        let a = parse_hoa(BUCHI).unwrap();
        assert_eq!(a.num_states(), 1);
        assert_eq!(a.num_marks(), 1);
        assert_eq!(a.transitions().len(), 2);
        assert_eq!(a.acceptance(), &F::inf([0]));
        assert_eq!(parse_hoa(&print_hoa(&a)).unwrap(), a);
    }

    #[test]
    fn fin_and_inf() {
        let text = BUCHI.replace("Acceptance: 1 Inf(0)", "Acceptance: 2 Fin(0) & Inf(1)");
        let a = parse_hoa(&text).unwrap();
        assert_eq!(a.acceptance(), &F::and([F::fin([0]), F::inf([1])]));
    }

    #[test]
    fn label_expansion() {
        let text = r#"HOA: v1
States: 2
Start: 0
AP: 2 "a" "b"
Acceptance: 0 t
--BODY--
State: 0
[0 | !1] 1
State: 1
[t] 1
--END--
"#;
        let a = parse_hoa(text).unwrap();
        // letters: 0 = !a!b, 1 = a!b, 2 = !ab, 3 = ab
        let from0: Vec<u32> = a.out(0).iter().map(|t| t.letter).collect();
        assert_eq!(from0, vec![0, 1, 3]);
        assert_eq!(a.out(1).len(), 4);
    }

    #[test]
    fn diagnostics_carry_positions() {
        let sb = BUCHI.replace("State: 0\n", "State: 0 {0}\n");
        assert!(matches!(parse_hoa(&sb), Err(Error::Parse { line: 10, col: 10, .. })));
        let unk = BUCHI.replace("name: \"GFa\"", "Weird: 3");
        assert!(matches!(parse_hoa(&unk), Err(Error::Parse { line: 2, col: 1, .. })));
        let bad_acc = BUCHI.replace("Inf(0)", "Inf(0) &");
        assert!(matches!(parse_hoa(&bad_acc), Err(Error::Parse { line: 7, .. })));
        let many = BUCHI.replace("AP: 1 \"a\"", "AP: 9 \"a\" \"b\" \"c\" \"d\" \"e\" \"f\" \"g\" \"h\" \"i\"");
        let e = parse_hoa(&many).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 5, col: 1, .. }), "{e}");
        assert!(parse_hoa_with(&many, 9).is_ok());
    }

    #[test]
    fn printer_flags_and_marks() {
        let a = Tela::new(
            vec!["p".into()],
            1,
            [0],
            vec![Transition::new(0, 0, 0, [1, 0].into_iter().collect())],
            F::and([F::inf([0]), F::inf([1])]),
            2,
        )
        .unwrap();
        let s = print_hoa(&a);
        assert!(s.contains("[!0] 0 {0 1}\n"));
        assert!(s.contains(" deterministic"));
        assert!(!s.contains(" complete"));
    }

    #[test]
    fn empty_language_golden() {
        let a = Tela::new(vec![], 1, [0], vec![], F::False, 0).unwrap();
        let golden = "HOA: v1\nStates: 1\nStart: 0\nAP: 0\nAcceptance: 0 f\n\
                      properties: trans-labels explicit-labels trans-acc deterministic\n\
                      --BODY--\nState: 0\n--END--\n";
        assert_eq!(print_hoa(&a), golden);
        assert_eq!(parse_hoa(golden).unwrap(), a);
    }
}
