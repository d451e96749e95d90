//! LTL and LTLf: syntax, direct semantics, and tableau translations.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use thiserror::Error;

use super::nfw::{Nbw, Nfw, Trans};
use super::{Guard, Lasso};
use crate::model::Letter;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ltl {
    True,
    False,
    Atom(String),
    Not(Box<Ltl>),
    And(Box<Ltl>, Box<Ltl>),
    Or(Box<Ltl>, Box<Ltl>),
    Implies(Box<Ltl>, Box<Ltl>),
    Next(Box<Ltl>),
    Until(Box<Ltl>, Box<Ltl>),
    Finally(Box<Ltl>),
    Globally(Box<Ltl>),
}

use Ltl::*;

pub fn atom(a: &str) -> Ltl {
    Atom(a.to_string())
}
pub fn not(a: Ltl) -> Ltl {
    Not(Box::new(a))
}
pub fn and(a: Ltl, b: Ltl) -> Ltl {
    And(Box::new(a), Box::new(b))
}
pub fn or(a: Ltl, b: Ltl) -> Ltl {
    Or(Box::new(a), Box::new(b))
}
pub fn implies(a: Ltl, b: Ltl) -> Ltl {
    Implies(Box::new(a), Box::new(b))
}
pub fn next(a: Ltl) -> Ltl {
    Next(Box::new(a))
}
pub fn until(a: Ltl, b: Ltl) -> Ltl {
    Until(Box::new(a), Box::new(b))
}
pub fn finally(a: Ltl) -> Ltl {
    Finally(Box::new(a))
}
pub fn globally(a: Ltl) -> Ltl {
    Globally(Box::new(a))
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("unexpected character `{0}` at offset {1}")]
    BadChar(char, usize),
    #[error("unexpected {0} at token {1}")]
    Unexpected(String, usize),
    #[error("unterminated quoted atom")]
    Unterminated,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Not,
    And,
    Or,
    Arrow,
    LParen,
    RParen,
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '.' || c == '\''
}

fn lex(src: &str) -> Result<Vec<Tok>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = vec![];
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            _ if c.is_whitespace() => i += 1,
            '!' | '~' => {
                out.push(Tok::Not);
                i += 1
            }
            '&' => {
                out.push(Tok::And);
                i += if chars.get(i + 1) == Some(&'&') { 2 } else { 1 }
            }
            '|' => {
                out.push(Tok::Or);
                i += if chars.get(i + 1) == Some(&'|') { 2 } else { 1 }
            }
            '-' if chars.get(i + 1) == Some(&'>') => {
                out.push(Tok::Arrow);
                i += 2
            }
            '(' => {
                out.push(Tok::LParen);
                i += 1
            }
            ')' => {
                out.push(Tok::RParen);
                i += 1
            }
            '"' => {
                let end = chars[i + 1..].iter().position(|&d| d == '"').ok_or(ParseError::Unterminated)?;
                out.push(Tok::Ident(format!("\"{}", chars[i + 1..i + 1 + end].iter().collect::<String>())));
                i += end + 2;
            }
            _ if is_ident_start(c) => {
                let start = i;
                while i < chars.len() && is_ident_char(chars[i]) {
                    i += 1;
                }
                // clock predicates such as `x>2` or `c=0` are single atoms
                if i + 1 < chars.len() && (chars[i] == '>' || chars[i] == '=') && chars[i + 1].is_ascii_digit() {
                    i += 1;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                out.push(Tok::Ident(chars[start..i].iter().collect()));
            }
            _ => return Err(ParseError::BadChar(c, i)),
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn unexpected(&self) -> ParseError {
        match self.peek() {
            Some(t) => ParseError::Unexpected(format!("{t:?}"), self.pos),
            None => ParseError::Unexpected("end of input".into(), self.pos),
        }
    }

    fn is_op(&self, name: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(s)) if s == name)
    }

    fn implication(&mut self) -> Result<Ltl, ParseError> {
        let lhs = self.disjunction()?;
        if self.peek() == Some(&Tok::Arrow) {
            self.pos += 1;
            return Ok(implies(lhs, self.implication()?));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Ltl, ParseError> {
        let mut lhs = self.conjunction()?;
        while self.peek() == Some(&Tok::Or) {
            self.pos += 1;
            lhs = or(lhs, self.conjunction()?);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Ltl, ParseError> {
        let mut lhs = self.until()?;
        while self.peek() == Some(&Tok::And) {
            self.pos += 1;
            lhs = and(lhs, self.until()?);
        }
        Ok(lhs)
    }

    fn until(&mut self) -> Result<Ltl, ParseError> {
        let lhs = self.unary()?;
        if self.is_op("U") {
            self.pos += 1;
            return Ok(until(lhs, self.until()?));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Ltl, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Not) => {
                self.pos += 1;
                Ok(not(self.unary()?))
            }
            Some(Tok::Ident(s)) if s == "X" || s == "F" || s == "G" => {
                self.pos += 1;
                let f = self.unary()?;
                Ok(match s.as_str() {
                    "X" => next(f),
                    "F" => finally(f),
                    _ => globally(f),
                })
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let f = self.implication()?;
                if self.peek() != Some(&Tok::RParen) {
                    return Err(self.unexpected());
                }
                self.pos += 1;
                Ok(f)
            }
            Some(Tok::Ident(s)) if s != "U" => {
                self.pos += 1;
                Ok(match s.as_str() {
                    "true" => True,
                    "false" => False,
                    _ => Atom(s.strip_prefix('"').map(str::to_string).unwrap_or(s)),
                })
            }
            _ => Err(self.unexpected()),
        }
    }
}

impl std::str::FromStr for Ltl {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Ltl, ParseError> {
        let mut p = Parser { toks: lex(s)?, pos: 0 };
        let f = p.implication()?;
        if p.pos != p.toks.len() {
            return Err(p.unexpected());
        }
        Ok(f)
    }
}

fn plain_atom(a: &str) -> bool {
    let mut chars = a.chars();
    let head_ok = chars.next().is_some_and(is_ident_start);
    let body: String = a.chars().take_while(|&c| is_ident_char(c)).collect();
    let rest = &a[body.len()..];
    let tail_ok = rest.is_empty()
        || (rest.len() > 1 && (rest.starts_with('>') || rest.starts_with('=')) && rest[1..].chars().all(|c| c.is_ascii_digit()));
    head_ok && tail_ok && !matches!(a, "X" | "F" | "G" | "U" | "true" | "false")
}

impl fmt::Display for Ltl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            True => f.write_str("true"),
            False => f.write_str("false"),
            Atom(a) if plain_atom(a) => f.write_str(a),
            Atom(a) => write!(f, "\"{a}\""),
            Not(a) => write!(f, "!{}", Paren(a)),
            Next(a) => write!(f, "X {}", Paren(a)),
            Finally(a) => write!(f, "F {}", Paren(a)),
            Globally(a) => write!(f, "G {}", Paren(a)),
            And(a, b) => write!(f, "{} & {}", Paren(a), Paren(b)),
            Or(a, b) => write!(f, "{} | {}", Paren(a), Paren(b)),
            Implies(a, b) => write!(f, "{} -> {}", Paren(a), Paren(b)),
            Until(a, b) => write!(f, "{} U {}", Paren(a), Paren(b)),
        }
    }
}

struct Paren<'a>(&'a Ltl);

impl fmt::Display for Paren<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            True | False | Atom(_) => write!(f, "{}", self.0),
            _ => write!(f, "({})", self.0),
        }
    }
}

impl Ltl {
    pub fn atoms(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<String>) {
        match self {
            True | False => {}
            Atom(a) => {
                out.insert(a.clone());
            }
            Not(a) | Next(a) | Finally(a) | Globally(a) => a.collect_atoms(out),
            And(a, b) | Or(a, b) | Implies(a, b) | Until(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }

    /// Replaces atoms by formulas.
    pub fn substitute(&self, f: &impl Fn(&str) -> Ltl) -> Ltl {
        let s = |x: &Ltl| Box::new(x.substitute(f));
        match self {
            True => True,
            False => False,
            Atom(a) => f(a),
            Not(a) => Not(s(a)),
            Next(a) => Next(s(a)),
            Finally(a) => Finally(s(a)),
            Globally(a) => Globally(s(a)),
            And(a, b) => And(s(a), s(b)),
            Or(a, b) => Or(s(a), s(b)),
            Implies(a, b) => Implies(s(a), s(b)),
            Until(a, b) => Until(s(a), s(b)),
        }
    }

    /// Rewrites into `true, atoms, !, &, |, X, U` only.
    pub fn desugar(&self) -> Ltl {
        let d = |x: &Ltl| Box::new(x.desugar());
        match self {
            True => True,
            False => Not(Box::new(True)),
            Atom(a) => Atom(a.clone()),
            Not(a) => Not(d(a)),
            And(a, b) => And(d(a), d(b)),
            Or(a, b) => Or(d(a), d(b)),
            Implies(a, b) => Or(Box::new(Not(d(a))), d(b)),
            Next(a) => Next(d(a)),
            Until(a, b) => Until(d(a), d(b)),
            Finally(a) => Until(Box::new(True), d(a)),
            Globally(a) => Not(Box::new(Until(Box::new(True), Box::new(Not(d(a)))))),
        }
    }

    /// Truth on the infinite word `w`, evaluated on the folded lasso.
    pub fn holds_on_lasso(&self, w: &Lasso) -> bool {
        assert!(!w.cycle.is_empty(), "lasso needs a nonempty cycle");
        self.lasso_values(w)[0]
    }

    fn lasso_values(&self, w: &Lasso) -> Vec<bool> {
        let n = w.len();
        match self {
            True => vec![true; n],
            False => vec![false; n],
            Atom(a) => (0..n).map(|i| w.at(i).contains(a)).collect(),
            Not(a) => a.lasso_values(w).into_iter().map(|v| !v).collect(),
            And(a, b) => zip(a.lasso_values(w), b.lasso_values(w), |x, y| x && y),
            Or(a, b) => zip(a.lasso_values(w), b.lasso_values(w), |x, y| x || y),
            Implies(a, b) => zip(a.lasso_values(w), b.lasso_values(w), |x, y| !x || y),
            Next(a) => {
                let v = a.lasso_values(w);
                (0..n).map(|i| v[w.next(i)]).collect()
            }
            Until(a, b) => lasso_until(w, &a.lasso_values(w), &b.lasso_values(w)),
            Finally(a) => lasso_until(w, &vec![true; n], &a.lasso_values(w)),
            Globally(a) => {
                let neg: Vec<bool> = a.lasso_values(w).into_iter().map(|v| !v).collect();
                lasso_until(w, &vec![true; n], &neg).into_iter().map(|v| !v).collect()
            }
        }
    }

    /// Truth at position 0 of the nonempty finite word `w`, reading
    /// `X` as a strong next.
    pub fn holds_on_finite(&self, w: &[Letter]) -> bool {
        !w.is_empty() && self.finite_at(w, 0)
    }

    fn finite_at(&self, w: &[Letter], i: usize) -> bool {
        match self {
            True => true,
            False => false,
            Atom(a) => w[i].contains(a),
            Not(a) => !a.finite_at(w, i),
            And(a, b) => a.finite_at(w, i) && b.finite_at(w, i),
            Or(a, b) => a.finite_at(w, i) || b.finite_at(w, i),
            Implies(a, b) => !a.finite_at(w, i) || b.finite_at(w, i),
            Next(a) => i + 1 < w.len() && a.finite_at(w, i + 1),
            Until(a, b) => (i..w.len()).any(|j| b.finite_at(w, j) && (i..j).all(|k| a.finite_at(w, k))),
            Finally(a) => (i..w.len()).any(|j| a.finite_at(w, j)),
            Globally(a) => (i..w.len()).all(|j| a.finite_at(w, j)),
        }
    }
}

fn zip(a: Vec<bool>, b: Vec<bool>, f: impl Fn(bool, bool) -> bool) -> Vec<bool> {
    a.into_iter().zip(b).map(|(x, y)| f(x, y)).collect()
}

/// Least fixed point of `u = b | (a & next(u))` over the lasso positions.
fn lasso_until(w: &Lasso, a: &[bool], b: &[bool]) -> Vec<bool> {
    let n = w.len();
    let mut u = vec![false; n];
    loop {
        let mut changed = false;
        for i in (0..n).rev() {
            let v = b[i] || (a[i] && u[w.next(i)]);
            if v != u[i] {
                u[i] = v;
                changed = true;
            }
        }
        if !changed {
            return u;
        }
    }
}

/// Elementary formulas of a desugared formula, and the consistent
/// assignments to them.
struct Tableau {
    root: Ltl,
    atoms: Vec<String>,
    nexts: Vec<Ltl>,
    untils: Vec<(Ltl, Ltl)>,
    slot: HashMap<Ltl, usize>,
    states: Vec<u64>,
}

impl Tableau {
    fn new(phi: &Ltl) -> Tableau {
        let root = phi.desugar();
        let mut t = Tableau { root: root.clone(), atoms: vec![], nexts: vec![], untils: vec![], slot: HashMap::new(), states: vec![] };
        t.collect(&root);
        let width = t.slot.len();
        assert!(width <= 20, "formula has {width} elementary subformulas");
        t.states = (0u64..1 << width).filter(|&m| t.locally_consistent(m)).collect();
        t
    }

    fn collect(&mut self, f: &Ltl) {
        match f {
            True => {}
            Atom(a) => {
                if !self.slot.contains_key(f) {
                    self.slot.insert(f.clone(), self.slot.len());
                    self.atoms.push(a.clone());
                }
            }
            Not(a) => self.collect(a),
            And(a, b) | Or(a, b) => {
                self.collect(a);
                self.collect(b);
            }
            Next(a) => {
                self.collect(a);
                if !self.slot.contains_key(f) {
                    self.slot.insert(f.clone(), self.slot.len());
                    self.nexts.push((**a).clone());
                }
            }
            Until(a, b) => {
                self.collect(a);
                self.collect(b);
                if !self.slot.contains_key(f) {
                    self.slot.insert(f.clone(), self.slot.len());
                    self.untils.push(((**a).clone(), (**b).clone()));
                }
            }
            _ => unreachable!("desugared formula"),
        }
    }

    fn bit(&self, f: &Ltl, m: u64) -> bool {
        m >> self.slot[f] & 1 == 1
    }

    fn holds(&self, f: &Ltl, m: u64) -> bool {
        match f {
            True => true,
            Atom(_) | Next(_) | Until(..) => self.bit(f, m),
            Not(a) => !self.holds(a, m),
            And(a, b) => self.holds(a, m) && self.holds(b, m),
            Or(a, b) => self.holds(a, m) || self.holds(b, m),
            _ => unreachable!(),
        }
    }

    fn until_formula(&self, j: usize) -> Ltl {
        let (a, b) = &self.untils[j];
        until(a.clone(), b.clone())
    }

    fn locally_consistent(&self, m: u64) -> bool {
        (0..self.untils.len()).all(|j| {
            let (a, b) = &self.untils[j];
            let u = self.bit(&self.until_formula(j), m);
            let hb = self.holds(b, m);
            (!u || hb || self.holds(a, m)) && (!hb || u)
        })
    }

    fn step_ok(&self, m: u64, n: u64) -> bool {
        self.nexts.iter().all(|a| self.bit(&next(a.clone()), m) == self.holds(a, n))
            && (0..self.untils.len()).all(|j| {
                let (a, b) = &self.untils[j];
                let uf = self.until_formula(j);
                self.bit(&uf, m) == (self.holds(b, m) || (self.holds(a, m) && self.bit(&uf, n)))
            })
    }

    fn fulfils(&self, j: usize, m: u64) -> bool {
        !self.bit(&self.until_formula(j), m) || self.holds(&self.untils[j].1, m)
    }

    fn can_end(&self, m: u64) -> bool {
        self.nexts.iter().all(|a| !self.bit(&next(a.clone()), m)) && (0..self.untils.len()).all(|j| self.fulfils(j, m))
    }

    fn guard(&self, m: u64) -> Guard {
        let (mut pos, mut neg) = (Letter::new(), Letter::new());
        for a in &self.atoms {
            if self.bit(&Atom(a.clone()), m) {
                pos.insert(a.clone());
            } else {
                neg.insert(a.clone());
            }
        }
        Guard::Cube { pos, neg }
    }

    fn name(&self, m: u64) -> String {
        let mut parts = vec![];
        let mut by_slot: Vec<(&Ltl, usize)> = self.slot.iter().map(|(f, &i)| (f, i)).collect();
        by_slot.sort_by_key(|x| x.1);
        for (f, i) in by_slot {
            if m >> i & 1 == 1 {
                parts.push(f.to_string());
            }
        }
        format!("{{{}}}", parts.join(", "))
    }

    /// Reachable tableau states with their successor lists.
    fn explore(&self) -> (Vec<u64>, Vec<Vec<usize>>) {
        let mut index: BTreeMap<u64, usize> = BTreeMap::new();
        let mut order = vec![];
        let mut queue = VecDeque::new();
        for &m in &self.states {
            if self.holds(&self.root, m) {
                index.insert(m, order.len());
                order.push(m);
                queue.push_back(m);
            }
        }
        let mut succ_of: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
        while let Some(m) = queue.pop_front() {
            let succ: Vec<u64> = self.states.iter().copied().filter(|&n| self.step_ok(m, n)).collect();
            for &n in &succ {
                if let std::collections::btree_map::Entry::Vacant(e) = index.entry(n) {
                    e.insert(order.len());
                    order.push(n);
                    queue.push_back(n);
                }
            }
            succ_of.insert(m, succ);
        }
        let succ = order.iter().map(|m| succ_of[m].iter().map(|n| index[n]).collect()).collect();
        (order, succ)
    }
}

/// Büchi automaton for `φ`. Each state reads its own letter on its
/// outgoing transitions.
pub fn ltl_to_nbw(phi: &Ltl) -> Nbw {
    let t = Tableau::new(phi);
    let (order, succ) = t.explore();
    let initial_count = order.iter().filter(|&&m| t.holds(&t.root, m)).count();
    let h = t.untils.len().max(1);
    let fair = |j: usize, m: u64| t.untils.is_empty() || t.fulfils(j, m);
    let id = |s: usize, j: usize| s * h + j;
    let mut nbw = Nbw::default();
    for (s, &m) in order.iter().enumerate() {
        for j in 0..h {
            debug_assert_eq!(nbw.states.len(), id(s, j));
            let tag = if t.untils.is_empty() { String::new() } else { format!("#{j}") };
            nbw.states.push(format!("{}{}", t.name(m), tag));
            nbw.accepting.push(j == 0 && fair(0, m));
        }
    }
    nbw.initial = (0..initial_count).map(|s| id(s, 0)).collect();
    for (s, &m) in order.iter().enumerate() {
        for j in 0..h {
            let j2 = if fair(j, m) { (j + 1) % h } else { j };
            for &n in &succ[s] {
                nbw.trans.push(Trans { src: id(s, j), guard: t.guard(m), dst: id(n, j2) });
            }
        }
    }
    nbw.trim()
}

/// Finite-word automaton for `φ` under the strong-next reading. A fresh
/// initial state precedes the tableau states; each transition reads the
/// letter of its target, so `ε` is never accepted.
pub fn ltlf_to_nfw(phi: &Ltl) -> Nfw {
    let t = Tableau::new(phi);
    let (order, succ) = t.explore();
    let mut nfw = Nfw::default();
    nfw.states.push("init".into());
    nfw.accepting.push(false);
    nfw.initial = vec![0];
    for &m in &order {
        nfw.states.push(t.name(m));
        nfw.accepting.push(t.can_end(m));
    }
    for (s, &m) in order.iter().enumerate() {
        if t.holds(&t.root, m) {
            nfw.trans.push(Trans { src: 0, guard: t.guard(m), dst: s + 1 });
        }
        for &n in &succ[s] {
            nfw.trans.push(Trans { src: s + 1, guard: t.guard(order[n]), dst: n + 1 });
        }
    }
    nfw.trim()
}
