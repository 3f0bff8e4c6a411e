//! Reading and writing coverability problems.
//!
//! The native format is line oriented:
//!
//! ```text
//! # comment
//! places: p1 p2 p3
//! transitions:
//!   t1: in p1 out p2;
//!   t2: in p2 out p3*2;
//!   t3: in p3 out p2*2;
//! init: p1=1
//! target:
//!   p2>=2 p3>=1
//! ```
//!
//! `*k` gives an arc multiplicity (default 1), unlisted places start empty,
//! and every line of the `target:` section is one target marking.
//!
//! A strict subset of the MIST `.spec` language is also accepted; see
//! [`parse_mist`].

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::Zero;
use thiserror::Error;

use crate::net::{Marking, NetBuilder, NetError, PetriNet, PlaceId};

/// A diagnostic tied to a 1-based line and column.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    fn at(line: usize, column: usize, message: impl Into<String>) -> Self {
        ParseError {
            line,
            column,
            message: message.into(),
        }
    }
}

/// A net together with the markings to cover.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Problem {
    pub name: String,
    pub net: PetriNet,
    pub targets: Vec<Marking>,
}

const RESERVED: &[&str] = &["places", "transitions", "init", "target", "in", "out"];

#[derive(Debug, Clone)]
struct Tok<'a> {
    text: &'a str,
    line: usize,
    col: usize,
}

impl Tok<'_> {
    fn err(&self, message: impl Into<String>) -> ParseError {
        ParseError::at(self.line, self.col, message)
    }
}

/// Splits on whitespace, strips `#` comments and detaches `;`.
fn lex_native(text: &str) -> Vec<Tok<'_>> {
    let mut out = Vec::new();
    for (li, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("");
        let mut push = |s: usize, e: usize| {
            if s < e {
                out.push(Tok {
                    text: &raw[s..e],
                    line: li + 1,
                    col: line[..s].chars().count() + 1,
                });
            }
        };
        let mut start = None;
        for (i, c) in line.char_indices() {
            if c.is_whitespace() || c == ';' {
                if let Some(s) = start.take() {
                    push(s, i);
                }
                if c == ';' {
                    push(i, i + 1);
                }
            } else if start.is_none() {
                start = Some(i);
            }
        }
        if let Some(s) = start {
            push(s, line.len());
        }
    }
    out
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '.' | '\''))
}

fn parse_number(tok: &Tok<'_>, s: &str) -> Result<BigUint, ParseError> {
    if s.starts_with('-') {
        return Err(tok.err(format!("negative number '{s}'")));
    }
    BigUint::from_str(s).map_err(|_| tok.err(format!("expected a number, found '{s}'")))
}

fn check_name(tok: &Tok<'_>, name: &str, what: &str) -> Result<(), ParseError> {
    if !is_ident(name) {
        return Err(tok.err(format!("invalid {what} name '{name}'")));
    }
    if RESERVED.contains(&name) {
        return Err(tok.err(format!("'{name}' is a reserved word")));
    }
    Ok(())
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Section {
    Places,
    Transitions,
    Init,
    Target,
}

fn section_of(tok: &str) -> Option<Section> {
    match tok {
        "places:" => Some(Section::Places),
        "transitions:" => Some(Section::Transitions),
        "init:" => Some(Section::Init),
        "target:" => Some(Section::Target),
        _ => None,
    }
}

type ArcList<'a> = Vec<(Tok<'a>, String, BigUint)>;

fn parse_arc<'a>(tok: &Tok<'a>) -> Result<(Tok<'a>, String, BigUint), ParseError> {
    let (name, mult) = match tok.text.split_once('*') {
        Some((n, k)) => (n, parse_number(tok, k)?),
        None => (tok.text, BigUint::from(1u32)),
    };
    check_name(tok, name, "place")?;
    Ok((tok.clone(), name.to_string(), mult))
}

fn parse_assignment<'a>(
    tok: &Tok<'a>,
    op: &str,
) -> Result<(String, BigUint), ParseError> {
    let (name, value) = tok
        .text
        .split_once(op)
        .ok_or_else(|| tok.err(format!("expected 'place{op}count', found '{}'", tok.text)))?;
    check_name(tok, name, "place")?;
    Ok((name.to_string(), parse_number(tok, value)?))
}

/// Parses the native format. The problem is named `unnamed`.
pub fn parse_native(text: &str) -> Result<Problem, ParseError> {
    parse_native_named(text, "unnamed")
}

pub fn parse_native_named(text: &str, name: &str) -> Result<Problem, ParseError> {
    let toks = lex_native(text);
    let mut seen: HashSet<&str> = HashSet::new();
    let mut section: Option<Section> = None;

    let mut places: Vec<Tok<'_>> = Vec::new();
    let mut transitions: Vec<(Tok<'_>, ArcList<'_>, ArcList<'_>)> = Vec::new();
    let mut init: ArcList<'_> = Vec::new();
    let mut targets: Vec<(Tok<'_>, ArcList<'_>)> = Vec::new();

    let mut i = 0;
    while i < toks.len() {
        let tok = &toks[i];
        if let Some(s) = section_of(tok.text) {
            if !seen.insert(tok.text) {
                return Err(tok.err(format!("duplicate section '{}'", tok.text)));
            }
            section = Some(s);
            i += 1;
            continue;
        }
        match section {
            None => return Err(tok.err(format!("expected a section header, found '{}'", tok.text))),
            Some(Section::Places) => {
                check_name(tok, tok.text, "place")?;
                places.push(tok.clone());
                i += 1;
            }
            Some(Section::Transitions) => {
                let name = tok
                    .text
                    .strip_suffix(':')
                    .ok_or_else(|| tok.err(format!("expected 'name:', found '{}'", tok.text)))?;
                check_name(tok, name, "transition")?;
                let head = Tok {
                    text: name,
                    ..tok.clone()
                };
                i += 1;
                let mut inputs = Vec::new();
                let mut outputs = Vec::new();
                let mut side: Option<bool> = None;
                loop {
                    let Some(t) = toks.get(i) else {
                        return Err(tok.err(format!("transition '{name}' is missing ';'")));
                    };
                    i += 1;
                    match t.text {
                        ";" => break,
                        "in" if side.is_none() => side = Some(false),
                        "out" if side != Some(true) => side = Some(true),
                        _ if section_of(t.text).is_some() => {
                            return Err(t.err(format!("transition '{name}' is missing ';'")))
                        }
                        _ => match side {
                            None => {
                                return Err(t.err(format!(
                                    "expected 'in', 'out' or ';', found '{}'",
                                    t.text
                                )))
                            }
                            Some(false) => inputs.push(parse_arc(t)?),
                            Some(true) => outputs.push(parse_arc(t)?),
                        },
                    }
                }
                transitions.push((head, inputs, outputs));
            }
            Some(Section::Init) => {
                let (p, k) = parse_assignment(tok, "=")?;
                init.push((tok.clone(), p, k));
                i += 1;
            }
            Some(Section::Target) => {
                let (p, k) = parse_assignment(tok, ">=")?;
                match targets.last_mut() {
                    Some((first, entries)) if first.line == tok.line => {
                        entries.push((tok.clone(), p, k))
                    }
                    _ => targets.push((tok.clone(), vec![(tok.clone(), p, k)])),
                }
                i += 1;
            }
        }
    }

    if places.is_empty() {
        let (line, col) = toks.first().map_or((1, 1), |t| (t.line, t.col));
        return Err(ParseError::at(line, col, "no places"));
    }

    let mut b = NetBuilder::new();
    for p in &places {
        b.add_place(p.text).map_err(|e| p.err(e.to_string()))?;
    }
    for (head, inputs, outputs) in &transitions {
        for (t, p, _) in inputs.iter().chain(outputs) {
            if !b.has_place(p) {
                return Err(t.err(format!("unknown place '{p}' in transition '{}'", head.text)));
            }
        }
        let ins: Vec<(&str, BigUint)> = inputs.iter().map(|(_, p, k)| (p.as_str(), k.clone())).collect();
        let outs: Vec<(&str, BigUint)> = outputs.iter().map(|(_, p, k)| (p.as_str(), k.clone())).collect();
        b.add_transition(head.text, &ins, &outs)
            .map_err(|e| head.err(e.to_string()))?;
    }
    let mut init_seen = HashSet::new();
    for (t, p, k) in &init {
        if !init_seen.insert(p.as_str()) {
            return Err(t.err(format!("place '{p}' initialised twice")));
        }
        b.set_initial(p, k.clone()).map_err(|e| t.err(e.to_string()))?;
    }
    let net = b.build();

    if targets.is_empty() {
        let (line, col) = toks.last().map_or((1, 1), |t| (t.line, t.col));
        return Err(ParseError::at(line, col, "no targets"));
    }
    let targets = targets
        .iter()
        .map(|(_, entries)| marking_from(&net, entries))
        .collect::<Result<Vec<_>, _>>()?;

    Ok(Problem {
        name: name.to_string(),
        net,
        targets,
    })
}

fn marking_from(net: &PetriNet, entries: &[(Tok<'_>, String, BigUint)]) -> Result<Marking, ParseError> {
    let mut m = Marking::zero(net.num_places());
    let mut seen = HashSet::new();
    for (t, p, k) in entries {
        let id = net
            .place_id(p)
            .ok_or_else(|| t.err(format!("unknown place '{p}'")))?;
        if !seen.insert(id) {
            return Err(t.err(format!("place '{p}' listed twice in one target")));
        }
        m.set(id, k.clone());
    }
    Ok(m)
}

fn write_arcs(out: &mut String, net: &PetriNet, weights: &[BigUint]) {
    for (p, k) in weights.iter().enumerate() {
        if k.is_zero() {
            continue;
        }
        out.push(' ');
        out.push_str(&net.places()[p]);
        if *k != BigUint::from(1u32) {
            let _ = write!(out, "*{k}");
        }
    }
}

/// Serialises a problem in the native format.
pub fn emit_native(p: &Problem) -> String {
    let net = &p.net;
    let mut out = String::new();
    let _ = writeln!(out, "# {}", p.name);
    let _ = writeln!(out, "places: {}", net.places().join(" "));
    out.push_str("transitions:\n");
    for t in net.transitions() {
        let _ = write!(out, "  {}:", t.name);
        if t.pre.iter().any(|k| !k.is_zero()) {
            out.push_str(" in");
            write_arcs(&mut out, net, &t.pre);
        }
        if t.post.iter().any(|k| !k.is_zero()) {
            out.push_str(" out");
            write_arcs(&mut out, net, &t.post);
        }
        out.push_str(";\n");
    }
    out.push_str("init:");
    for p in net.initial_marking().support() {
        let _ = write!(out, " {}={}", net.places()[p.0], net.initial_marking().get(p));
    }
    out.push('\n');
    out.push_str("target:\n");
    for m in &p.targets {
        out.push(' ');
        let mut any = false;
        for q in m.support() {
            let _ = write!(out, " {}>={}", net.places()[q.0], m.get(q));
            any = true;
        }
        if !any {
            let _ = write!(out, " {}>=0", net.places()[0]);
        }
        out.push('\n');
    }
    out
}

// ---------------------------------------------------------------------------
// MIST subset

#[derive(Debug, Clone, PartialEq, Eq)]
enum MTok {
    Ident(String),
    Num(BigUint),
    Ge,
    Eq,
    Le,
    Gt,
    Lt,
    Plus,
    Minus,
    Prime,
    Comma,
    Semi,
    Arrow,
    Amp,
}

#[derive(Debug, Clone)]
struct MPos {
    tok: MTok,
    line: usize,
    col: usize,
}

fn lex_mist(text: &str) -> Result<Vec<MPos>, ParseError> {
    let mut out = Vec::new();
    for (li, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("");
        let line = line.split("//").next().unwrap_or("");
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let col = i + 1;
            let push = |tok, out: &mut Vec<MPos>| {
                out.push(MPos {
                    tok,
                    line: li + 1,
                    col,
                })
            };
            if c.is_whitespace() {
                i += 1;
            } else if c.is_ascii_alphabetic() || c == '_' {
                let s = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                push(MTok::Ident(chars[s..i].iter().collect()), &mut out);
            } else if c.is_ascii_digit() {
                let s = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let digits: String = chars[s..i].iter().collect();
                push(MTok::Num(digits.parse().expect("digits")), &mut out);
            } else {
                let two: String = chars[i..(i + 2).min(chars.len())].iter().collect();
                let (tok, len) = match two.as_str() {
                    ">=" => (MTok::Ge, 2),
                    "<=" => (MTok::Le, 2),
                    "->" => (MTok::Arrow, 2),
                    _ => match c {
                        '=' => (MTok::Eq, 1),
                        '>' => (MTok::Gt, 1),
                        '<' => (MTok::Lt, 1),
                        '+' => (MTok::Plus, 1),
                        '-' => (MTok::Minus, 1),
                        '\'' => (MTok::Prime, 1),
                        ',' => (MTok::Comma, 1),
                        ';' => (MTok::Semi, 1),
                        '&' => (MTok::Amp, 1),
                        _ => {
                            return Err(ParseError::at(li + 1, col, format!("unexpected character '{c}'")))
                        }
                    },
                };
                push(tok, &mut out);
                i += len;
            }
        }
    }
    Ok(out)
}

const MIST_SECTIONS: &[&str] = &["vars", "rules", "init", "target", "invariants"];

struct MistParser {
    toks: Vec<MPos>,
    pos: usize,
    end: (usize, usize),
}

impl MistParser {
    fn peek(&self) -> Option<&MPos> {
        self.toks.get(self.pos)
    }

    fn err_here(&self, message: impl Into<String>) -> ParseError {
        let (line, col) = self.peek().map_or(self.end, |t| (t.line, t.col));
        ParseError::at(line, col, message)
    }

    fn next(&mut self) -> Result<MPos, ParseError> {
        let t = self
            .toks
            .get(self.pos)
            .cloned()
            .ok_or_else(|| ParseError::at(self.end.0, self.end.1, "unexpected end of input"))?;
        self.pos += 1;
        Ok(t)
    }

    fn at_section(&self) -> bool {
        matches!(self.peek(), Some(MPos { tok: MTok::Ident(s), .. }) if MIST_SECTIONS.contains(&s.as_str()))
    }

    fn ident(&mut self) -> Result<(String, MPos), ParseError> {
        let t = self.next()?;
        match &t.tok {
            MTok::Ident(s) => Ok((s.clone(), t.clone())),
            other => Err(ParseError::at(t.line, t.col, format!("expected an identifier, found {other:?}"))),
        }
    }

    fn number(&mut self) -> Result<BigUint, ParseError> {
        let t = self.next()?;
        match t.tok {
            MTok::Num(n) => Ok(n),
            MTok::Minus => Err(ParseError::at(t.line, t.col, "negative number")),
            other => Err(ParseError::at(t.line, t.col, format!("expected a number, found {other:?}"))),
        }
    }

    fn eat(&mut self, tok: &MTok) -> bool {
        if self.peek().is_some_and(|t| &t.tok == tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn eat_separator(&mut self) -> bool {
        self.eat(&MTok::Comma) || self.eat(&MTok::Amp)
    }
}

struct MistRule {
    name: String,
    pos: MPos,
    guards: Vec<(String, MPos, BigUint)>,
    // variable, +/- amount
    updates: Vec<(String, MPos, bool, BigUint)>,
}

/// Parses the MIST subset: `vars`, `rules` of the form
/// `x >= c, … -> x' = x + c, …;`, `init` with `x = c` only, and one or more
/// `target` blocks of `x >= c`. An `invariants` section is skipped. Anything
/// that is not a plain Petri-net transition is rejected.
pub fn parse_mist(text: &str) -> Result<Problem, ParseError> {
    parse_mist_named(text, "unnamed")
}

pub fn parse_mist_named(text: &str, name: &str) -> Result<Problem, ParseError> {
    let toks = lex_mist(text)?;
    let end = toks.last().map_or((1, 1), |t| (t.line, t.col + 1));
    let mut p = MistParser { toks, pos: 0, end };

    let mut vars: Vec<(String, MPos)> = Vec::new();
    let mut rules: Vec<MistRule> = Vec::new();
    let mut init: Vec<(String, MPos, BigUint)> = Vec::new();
    let mut targets: Vec<Vec<(String, MPos, BigUint)>> = Vec::new();
    let mut seen_vars = false;

    while p.peek().is_some() {
        let (section, stok) = p.ident()?;
        match section.as_str() {
            "vars" => {
                seen_vars = true;
                while p.peek().is_some() && !p.at_section() {
                    vars.push(p.ident()?);
                }
            }
            "rules" => {
                while p.peek().is_some() && !p.at_section() {
                    let pos = p.peek().cloned().expect("peeked");
                    let mut rule = MistRule {
                        name: format!("r{}", rules.len() + 1),
                        pos,
                        guards: Vec::new(),
                        updates: Vec::new(),
                    };
                    if !p.eat(&MTok::Arrow) {
                        loop {
                            let (v, vt) = p.ident()?;
                            let op = p.next()?;
                            if op.tok != MTok::Ge {
                                return Err(ParseError::at(
                                    op.line,
                                    op.col,
                                    format!("unsupported guard in rule {}: only 'x >= c' is allowed", rule.name),
                                ));
                            }
                            rule.guards.push((v, vt, p.number()?));
                            if p.eat(&MTok::Arrow) {
                                break;
                            }
                            if !p.eat_separator() {
                                return Err(p.err_here("expected ',' or '->' in guard"));
                            }
                        }
                    }
                    loop {
                        if p.eat(&MTok::Semi) {
                            break;
                        }
                        let (v, vt) = p.ident()?;
                        let non_petri = |p: &MistParser| {
                            p.err_here(format!("non-Petri update for '{v}' in rule {}", rule.name))
                        };
                        if !p.eat(&MTok::Prime) || !p.eat(&MTok::Eq) {
                            return Err(non_petri(&p));
                        }
                        match p.peek().map(|t| t.tok.clone()) {
                            Some(MTok::Ident(ref w)) if *w == v => {
                                p.pos += 1;
                            }
                            _ => return Err(non_petri(&p)),
                        }
                        let (plus, amount) = if p.eat(&MTok::Plus) {
                            (true, p.number()?)
                        } else if p.eat(&MTok::Minus) {
                            (false, p.number()?)
                        } else {
                            (true, BigUint::zero())
                        };
                        if !matches!(p.peek().map(|t| &t.tok), Some(MTok::Comma | MTok::Semi)) {
                            return Err(non_petri(&p));
                        }
                        rule.updates.push((v, vt, plus, amount));
                        p.eat(&MTok::Comma);
                    }
                    rules.push(rule);
                }
            }
            "init" => loop {
                if p.peek().is_none() || p.at_section() {
                    break;
                }
                let (v, vt) = p.ident()?;
                let op = p.next()?;
                match op.tok {
                    MTok::Eq => init.push((v, vt, p.number()?)),
                    MTok::Ge => {
                        return Err(ParseError::at(
                            op.line,
                            op.col,
                            "parametric initial marking unsupported",
                        ))
                    }
                    _ => return Err(ParseError::at(op.line, op.col, "expected '=' in init")),
                }
                if !p.eat_separator() && p.peek().is_some() && !p.at_section() {
                    return Err(p.err_here("expected ',' in init"));
                }
            },
            "target" => {
                let mut entries = Vec::new();
                loop {
                    if p.peek().is_none() || p.at_section() {
                        break;
                    }
                    let (v, vt) = p.ident()?;
                    let op = p.next()?;
                    if op.tok != MTok::Ge {
                        return Err(ParseError::at(op.line, op.col, "only 'x >= c' is allowed in target"));
                    }
                    entries.push((v, vt, p.number()?));
                    if !p.eat_separator() && p.peek().is_some() && !p.at_section() {
                        return Err(p.err_here("expected ',' in target"));
                    }
                }
                targets.push(entries);
            }
            "invariants" => {
                while p.peek().is_some() && !p.at_section() {
                    p.pos += 1;
                }
            }
            other => {
                return Err(ParseError::at(stok.line, stok.col, format!("unknown section '{other}'")))
            }
        }
    }

    if !seen_vars || vars.is_empty() {
        return Err(ParseError::at(1, 1, "no places"));
    }
    let mut b = NetBuilder::new();
    for (v, t) in &vars {
        b.add_place(v).map_err(|e| ParseError::at(t.line, t.col, e.to_string()))?;
    }
    let index: HashMap<&str, usize> = vars.iter().enumerate().map(|(i, (v, _))| (v.as_str(), i)).collect();
    let lookup = |v: &str, t: &MPos| {
        index
            .get(v)
            .copied()
            .ok_or_else(|| ParseError::at(t.line, t.col, format!("undeclared variable '{v}'")))
    };

    for rule in &rules {
        let n = vars.len();
        let mut guard = vec![BigUint::zero(); n];
        for (v, t, c) in &rule.guards {
            let i = lookup(v, t)?;
            if *c > guard[i] {
                guard[i] = c.clone();
            }
        }
        let mut inc = vec![BigUint::zero(); n];
        let mut dec = vec![BigUint::zero(); n];
        let mut updated = HashSet::new();
        for (v, t, plus, k) in &rule.updates {
            let i = lookup(v, t)?;
            if !updated.insert(i) {
                return Err(ParseError::at(t.line, t.col, format!("'{v}' updated twice in rule {}", rule.name)));
            }
            if *plus {
                inc[i] = k.clone();
            } else {
                dec[i] = k.clone();
            }
        }
        let pre: Vec<BigUint> = (0..n).map(|i| guard[i].clone().max(dec[i].clone())).collect();
        let post: Vec<BigUint> = (0..n).map(|i| &pre[i] - &dec[i] + &inc[i]).collect();
        let ins: Vec<(&str, BigUint)> = (0..n)
            .filter(|&i| !pre[i].is_zero())
            .map(|i| (vars[i].0.as_str(), pre[i].clone()))
            .collect();
        let outs: Vec<(&str, BigUint)> = (0..n)
            .filter(|&i| !post[i].is_zero())
            .map(|i| (vars[i].0.as_str(), post[i].clone()))
            .collect();
        b.add_transition(&rule.name, &ins, &outs)
            .map_err(|e| ParseError::at(rule.pos.line, rule.pos.col, e.to_string()))?;
    }

    let mut init_seen = HashSet::new();
    for (v, t, k) in &init {
        let i = lookup(v, t)?;
        if !init_seen.insert(i) {
            return Err(ParseError::at(t.line, t.col, format!("'{v}' initialised twice")));
        }
        b.set_initial(v, k.clone()).map_err(|e: NetError| ParseError::at(t.line, t.col, e.to_string()))?;
    }
    let net = b.build();

    if targets.is_empty() {
        return Err(ParseError::at(end.0, end.1, "no targets"));
    }
    let mut ms = Vec::new();
    for entries in &targets {
        let mut m = Marking::zero(net.num_places());
        for (v, t, k) in entries {
            let i = lookup(v, t)?;
            if *k > *m.get(PlaceId(i)) {
                m.set(PlaceId(i), k.clone());
            }
        }
        ms.push(m);
    }
    Ok(Problem {
        name: name.to_string(),
        net,
        targets: ms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::{example_net, TransitionId};

    const EXAMPLE: &str = "\
# three-place example
places: p1 p2 p3
transitions:
  t1: in p1 out p2;
  t2: in p2 out p3*2;
  t3: in p3 out p2*2;
init: p1=1
target:
  p2>=2 p3>=1
  p1>=2
";

    #[test]
    fn parses_example() {
        let p = parse_native(EXAMPLE).unwrap();
        assert_eq!(p.net, example_net());
        assert_eq!(p.targets, vec![Marking::from_u64s(&[0, 2, 1]), Marking::from_u64s(&[2, 0, 0])]);
        assert_eq!(p.net.num_places(), 3);
        assert_eq!(p.net.num_transitions(), 3);
    }

    #[test]
    fn inline_target_and_compact_layout() {
        let p = parse_native("places: a b\ntransitions: t: in a*2 out b; u: ;\ninit: a=3\ntarget: b>=1\n").unwrap();
        assert_eq!(p.net.num_transitions(), 2);
        assert_eq!(p.targets, vec![Marking::from_u64s(&[0, 1])]);
        assert!(p.net.transition(TransitionId(1)).unwrap().pre.iter().all(Zero::is_zero));
    }

    #[test]
    fn rejects_bad_inputs() {
        let e = parse_native("places:\ntarget: a>=1\n").unwrap_err();
        assert_eq!(e.message, "no places");

        let e = parse_native("places: a\ntransitions:\n  t: in zz;\ntarget: a>=1\n").unwrap_err();
        assert!(e.message.contains("zz"), "{e}");
        assert_eq!((e.line, e.column), (3, 9));

        let e = parse_native("places: a a\ntarget: a>=1\n").unwrap_err();
        assert!(e.message.contains("duplicate"), "{e}");

        let e = parse_native("places: a\ninit: a=-1\ntarget: a>=1\n").unwrap_err();
        assert!(e.message.contains("negative"), "{e}");

        let e = parse_native("places: a\ntransitions:\n t: in a;\n t: in a;\ntarget: a>=1\n").unwrap_err();
        assert!(e.message.contains("duplicate transition"), "{e}");

        let e = parse_native("places: a\n").unwrap_err();
        assert_eq!(e.message, "no targets");

        let e = parse_native("places: a\ntransitions:\n t: in a\ntarget: a>=1\n").unwrap_err();
        assert!(e.message.contains("missing ';'"), "{e}");
    }

    #[test]
    fn round_trips() {
        let p = parse_native(EXAMPLE).unwrap();
        assert_eq!(parse_native(&emit_native(&p)).unwrap(), p);

        let bare = parse_native("places: a b\ntarget: a>=0\n").unwrap();
        assert_eq!(bare.net.num_transitions(), 0);
        assert_eq!(parse_native(&emit_native(&bare)).unwrap(), bare);
    }

    const MIST_PASS: &str = "\
vars
    x1 x2

rules
    x1 >= 1 ->
        x1' = x1 - 1,
        x2' = x2 + 1;

init
    x1 = 1, x2 = 0

target
    x2 >= 1
";

    #[test]
    fn mist_token_passing() {
        let p = parse_mist(MIST_PASS).unwrap();
        let expected = parse_native(
            "places: x1 x2\ntransitions:\n  r1: in x1 out x2;\ninit: x1=1\ntarget: x2>=1\n",
        )
        .unwrap();
        assert_eq!(p, expected);
        assert_eq!(parse_native(&emit_native(&p)).unwrap(), p);
    }

    #[test]
    fn mist_guard_larger_than_decrement() {
        let p = parse_mist(
            "vars a b\nrules\n a >= 2, b >= 1 -> a' = a - 1, b' = b;\ninit a = 2\ntarget b >= 1\ntarget a >= 3\n",
        )
        .unwrap();
        let t = p.net.transition(TransitionId(0)).unwrap();
        assert_eq!(t.pre, vec![BigUint::from(2u32), BigUint::from(1u32)]);
        assert_eq!(t.post, vec![BigUint::from(1u32), BigUint::from(1u32)]);
        assert_eq!(p.targets.len(), 2);
    }

    #[test]
    fn mist_rejections() {
        let e = parse_mist("vars x y\nrules\n x >= 1 -> x' = y;\ninit x = 1\ntarget y >= 1\n").unwrap_err();
        assert!(e.message.contains("non-Petri update"), "{e}");
        assert!(e.message.contains("r1"), "{e}");

        let e = parse_mist("vars x\nrules\n x >= 1 -> x' = x - 1;\ninit x >= 1\ntarget x >= 1\n").unwrap_err();
        assert!(e.message.contains("parametric initial marking unsupported"), "{e}");

        let e = parse_mist("vars x\nrules\n x >= 1 -> x' = 0;\ninit x = 1\ntarget x >= 1\n").unwrap_err();
        assert!(e.message.contains("non-Petri update"), "{e}");

        let e = parse_mist("vars x\nrules\n x = 1 -> x' = x - 1;\ninit x = 1\ntarget x >= 1\n").unwrap_err();
        assert!(e.message.contains("unsupported guard"), "{e}");

        let e = parse_mist("vars x\nrules\n z >= 1 -> x' = x - 1;\ninit x = 1\ntarget x >= 1\n").unwrap_err();
        assert!(e.message.contains("undeclared"), "{e}");
    }

    #[test]
    fn mist_skips_invariants_section() {
        let p = parse_mist(&format!("{MIST_PASS}\ninvariants\n x1 = 1, x2 = 0\n")).unwrap();
        assert_eq!(p.targets.len(), 1);
    }
}
