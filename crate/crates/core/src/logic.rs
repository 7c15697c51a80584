//! LTL bodies over trace-indexed propositions, HyperLTL formulas, their parser,
//! negation, and a reference evaluator on ultimately periodic words.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::text::{Cursor, ParseError, TokenKind};
use crate::word::{zip_with, UpWord};

/// Atomic proposition `ap` read on the trace bound to `var`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IndexedAp {
    pub ap: String,
    pub var: String,
}

impl IndexedAp {
    pub fn new(ap: impl Into<String>, var: impl Into<String>) -> Self {
        IndexedAp {
            ap: ap.into(),
            var: var.into(),
        }
    }
}

impl fmt::Display for IndexedAp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]", self.ap, self.var)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Ltl {
    True,
    False,
    Atom(IndexedAp),
    Not(Box<Ltl>),
    And(Box<Ltl>, Box<Ltl>),
    Or(Box<Ltl>, Box<Ltl>),
    Implies(Box<Ltl>, Box<Ltl>),
    Iff(Box<Ltl>, Box<Ltl>),
    Next(Box<Ltl>),
    Until(Box<Ltl>, Box<Ltl>),
    /// Dual of until; produced by negation normal form.
    Release(Box<Ltl>, Box<Ltl>),
    Eventually(Box<Ltl>),
    Globally(Box<Ltl>),
}

#[allow(clippy::should_implement_trait)]
impl Ltl {
    pub fn atom(ap: &str, var: &str) -> Ltl {
        Ltl::Atom(IndexedAp::new(ap, var))
    }
    pub fn not(a: Ltl) -> Ltl {
        Ltl::Not(Box::new(a))
    }
    pub fn and(a: Ltl, b: Ltl) -> Ltl {
        Ltl::And(Box::new(a), Box::new(b))
    }
    pub fn or(a: Ltl, b: Ltl) -> Ltl {
        Ltl::Or(Box::new(a), Box::new(b))
    }
    pub fn implies(a: Ltl, b: Ltl) -> Ltl {
        Ltl::Implies(Box::new(a), Box::new(b))
    }
    pub fn iff(a: Ltl, b: Ltl) -> Ltl {
        Ltl::Iff(Box::new(a), Box::new(b))
    }
    pub fn next(a: Ltl) -> Ltl {
        Ltl::Next(Box::new(a))
    }
    pub fn until(a: Ltl, b: Ltl) -> Ltl {
        Ltl::Until(Box::new(a), Box::new(b))
    }
    pub fn release(a: Ltl, b: Ltl) -> Ltl {
        Ltl::Release(Box::new(a), Box::new(b))
    }
    pub fn eventually(a: Ltl) -> Ltl {
        Ltl::Eventually(Box::new(a))
    }
    pub fn globally(a: Ltl) -> Ltl {
        Ltl::Globally(Box::new(a))
    }

    /// Conjunction of all items; `true` when empty.
    pub fn conjunction(items: impl IntoIterator<Item = Ltl>) -> Ltl {
        let mut it = items.into_iter();
        match it.next() {
            None => Ltl::True,
            Some(first) => it.fold(first, Ltl::and),
        }
    }

    pub fn children(&self) -> Vec<&Ltl> {
        match self {
            Ltl::True | Ltl::False | Ltl::Atom(_) => vec![],
            Ltl::Not(a) | Ltl::Next(a) | Ltl::Eventually(a) | Ltl::Globally(a) => vec![a],
            Ltl::And(a, b)
            | Ltl::Or(a, b)
            | Ltl::Implies(a, b)
            | Ltl::Iff(a, b)
            | Ltl::Until(a, b)
            | Ltl::Release(a, b) => vec![a, b],
        }
    }

    pub fn depth(&self) -> usize {
        1 + self.children().iter().map(|c| c.depth()).max().unwrap_or(0)
    }

    /// Rewrites into the core grammar `{atom, true, and, not, next, until}`.
    pub fn core(&self) -> Ltl {
        match self {
            Ltl::True => Ltl::True,
            Ltl::False => Ltl::not(Ltl::True),
            Ltl::Atom(a) => Ltl::Atom(a.clone()),
            Ltl::Not(a) => Ltl::not(a.core()),
            Ltl::And(a, b) => Ltl::and(a.core(), b.core()),
            Ltl::Or(a, b) => Ltl::not(Ltl::and(Ltl::not(a.core()), Ltl::not(b.core()))),
            Ltl::Implies(a, b) => Ltl::not(Ltl::and(a.core(), Ltl::not(b.core()))),
            Ltl::Iff(a, b) => {
                let (a, b) = (a.core(), b.core());
                Ltl::and(
                    Ltl::not(Ltl::and(a.clone(), Ltl::not(b.clone()))),
                    Ltl::not(Ltl::and(b, Ltl::not(a))),
                )
            }
            Ltl::Next(a) => Ltl::next(a.core()),
            Ltl::Until(a, b) => Ltl::until(a.core(), b.core()),
            Ltl::Release(a, b) => Ltl::not(Ltl::until(Ltl::not(a.core()), Ltl::not(b.core()))),
            Ltl::Eventually(a) => Ltl::until(Ltl::True, a.core()),
            Ltl::Globally(a) => Ltl::not(Ltl::until(Ltl::True, Ltl::not(a.core()))),
        }
    }

    /// Negation normal form: negation only in front of atoms, no `->`/`<->`.
    pub fn nnf(&self) -> Ltl {
        nnf(self, false)
    }

    /// True when the formula is a syntactic safety formula: in negation normal
    /// form it uses no until and no eventually.
    pub fn is_syntactic_safety(&self) -> bool {
        fn go(f: &Ltl) -> bool {
            match f {
                Ltl::Until(..) | Ltl::Eventually(_) => false,
                _ => f.children().into_iter().all(go),
            }
        }
        go(&self.nnf())
    }

    pub fn trace_vars(&self) -> BTreeSet<String> {
        indexed_aps(self).into_iter().map(|a| a.var).collect()
    }

    /// Renames trace variables according to `map`; unmapped ones are kept.
    pub fn rename_vars(&self, map: &HashMap<String, String>) -> Ltl {
        self.map_atoms(&|a| {
            let var = map.get(&a.var).cloned().unwrap_or_else(|| a.var.clone());
            Ltl::Atom(IndexedAp::new(a.ap.clone(), var))
        })
    }

    pub fn map_atoms(&self, f: &dyn Fn(&IndexedAp) -> Ltl) -> Ltl {
        let b = |x: &Ltl| Box::new(x.map_atoms(f));
        match self {
            Ltl::True => Ltl::True,
            Ltl::False => Ltl::False,
            Ltl::Atom(a) => f(a),
            Ltl::Not(a) => Ltl::Not(b(a)),
            Ltl::And(x, y) => Ltl::And(b(x), b(y)),
            Ltl::Or(x, y) => Ltl::Or(b(x), b(y)),
            Ltl::Implies(x, y) => Ltl::Implies(b(x), b(y)),
            Ltl::Iff(x, y) => Ltl::Iff(b(x), b(y)),
            Ltl::Next(a) => Ltl::Next(b(a)),
            Ltl::Until(x, y) => Ltl::Until(b(x), b(y)),
            Ltl::Release(x, y) => Ltl::Release(b(x), b(y)),
            Ltl::Eventually(a) => Ltl::Eventually(b(a)),
            Ltl::Globally(a) => Ltl::Globally(b(a)),
        }
    }
}

fn nnf(f: &Ltl, neg: bool) -> Ltl {
    let b = |x: &Ltl, n: bool| nnf(x, n);
    match (f, neg) {
        (Ltl::True, false) | (Ltl::False, true) => Ltl::True,
        (Ltl::True, true) | (Ltl::False, false) => Ltl::False,
        (Ltl::Atom(a), false) => Ltl::Atom(a.clone()),
        (Ltl::Atom(a), true) => Ltl::not(Ltl::Atom(a.clone())),
        (Ltl::Not(a), n) => b(a, !n),
        (Ltl::And(x, y), false) | (Ltl::Or(x, y), true) => Ltl::and(b(x, neg), b(y, neg)),
        (Ltl::Or(x, y), false) | (Ltl::And(x, y), true) => Ltl::or(b(x, neg), b(y, neg)),
        (Ltl::Implies(x, y), false) => Ltl::or(b(x, true), b(y, false)),
        (Ltl::Implies(x, y), true) => Ltl::and(b(x, false), b(y, true)),
        (Ltl::Iff(x, y), false) => Ltl::or(
            Ltl::and(b(x, false), b(y, false)),
            Ltl::and(b(x, true), b(y, true)),
        ),
        (Ltl::Iff(x, y), true) => Ltl::or(
            Ltl::and(b(x, false), b(y, true)),
            Ltl::and(b(x, true), b(y, false)),
        ),
        (Ltl::Next(a), n) => Ltl::next(b(a, n)),
        (Ltl::Until(x, y), false) | (Ltl::Release(x, y), true) => Ltl::until(b(x, neg), b(y, neg)),
        (Ltl::Release(x, y), false) | (Ltl::Until(x, y), true) => {
            Ltl::release(b(x, neg), b(y, neg))
        }
        (Ltl::Eventually(a), false) | (Ltl::Globally(a), true) => Ltl::eventually(b(a, neg)),
        (Ltl::Globally(a), false) | (Ltl::Eventually(a), true) => Ltl::globally(b(a, neg)),
    }
}

/// Binding strength used by the printer; higher binds tighter.
fn prec(f: &Ltl) -> u8 {
    match f {
        Ltl::Iff(..) => 1,
        Ltl::Implies(..) => 2,
        Ltl::Or(..) => 3,
        Ltl::And(..) => 4,
        Ltl::Until(..) | Ltl::Release(..) => 5,
        Ltl::Not(_) | Ltl::Next(_) | Ltl::Eventually(_) | Ltl::Globally(_) => 6,
        Ltl::True | Ltl::False | Ltl::Atom(_) => 7,
    }
}

impl fmt::Display for Ltl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Child printed in parentheses unless it binds strictly tighter; unary
        // operands only need them when they are binary.
        let wrap = |f: &mut fmt::Formatter<'_>, child: &Ltl, min: u8| -> fmt::Result {
            if prec(child) >= min {
                write!(f, "{child}")
            } else {
                write!(f, "({child})")
            }
        };
        match self {
            Ltl::True => write!(f, "true"),
            Ltl::False => write!(f, "false"),
            Ltl::Atom(a) => write!(f, "{a}"),
            Ltl::Not(a) => {
                write!(f, "!")?;
                wrap(f, a, 6)
            }
            Ltl::Next(a) | Ltl::Eventually(a) | Ltl::Globally(a) => {
                let op = match self {
                    Ltl::Next(_) => "X",
                    Ltl::Eventually(_) => "F",
                    _ => "G",
                };
                write!(f, "{op} ")?;
                wrap(f, a, 6)
            }
            Ltl::And(x, y) | Ltl::Or(x, y) | Ltl::Implies(x, y) | Ltl::Iff(x, y) | Ltl::Until(x, y) | Ltl::Release(x, y) => {
                let (op, p) = match self {
                    Ltl::And(..) => ("&&", 4),
                    Ltl::Or(..) => ("||", 3),
                    Ltl::Implies(..) => ("->", 2),
                    Ltl::Iff(..) => ("<->", 1),
                    Ltl::Until(..) => ("U", 5),
                    _ => ("R", 5),
                };
                // && and || are parsed left-associative, the rest right-associative.
                let left_assoc = matches!(self, Ltl::And(..) | Ltl::Or(..));
                wrap(f, x, if left_assoc { p } else { p + 1 })?;
                write!(f, " {op} ")?;
                wrap(f, y, if left_assoc { p + 1 } else { p })
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quantifier {
    Forall,
    Exists,
}

impl Quantifier {
    pub fn flip(self) -> Quantifier {
        match self {
            Quantifier::Forall => Quantifier::Exists,
            Quantifier::Exists => Quantifier::Forall,
        }
    }
}

impl fmt::Display for Quantifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Quantifier::Forall => write!(f, "forall"),
            Quantifier::Exists => write!(f, "exists"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HyperLtl {
    pub prefix: Vec<(Quantifier, String)>,
    pub body: Ltl,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LogicError {
    #[error("syntax error at {0}")]
    Syntax(#[from] ParseError),
    #[error("trace variable '{0}' is not bound by the quantifier prefix")]
    Unbound(String),
    #[error("trace variable '{0}' is quantified twice")]
    Duplicate(String),
    #[error("no trace assigned to variable '{0}'")]
    MissingTrace(String),
}

impl HyperLtl {
    pub fn new(prefix: Vec<(Quantifier, String)>, body: Ltl) -> Result<Self, LogicError> {
        for (i, (_, v)) in prefix.iter().enumerate() {
            if prefix[..i].iter().any(|(_, w)| w == v) {
                return Err(LogicError::Duplicate(v.clone()));
            }
        }
        for v in body.trace_vars() {
            if !prefix.iter().any(|(_, w)| *w == v) {
                return Err(LogicError::Unbound(v));
            }
        }
        Ok(HyperLtl { prefix, body })
    }

    pub fn num_vars(&self) -> usize {
        self.prefix.len()
    }

    pub fn vars(&self) -> Vec<&str> {
        self.prefix.iter().map(|(_, v)| v.as_str()).collect()
    }

    pub fn var_index(&self, var: &str) -> Option<usize> {
        self.prefix.iter().position(|(_, v)| v == var)
    }

    pub fn quantifiers(&self) -> Vec<Quantifier> {
        self.prefix.iter().map(|(q, _)| *q).collect()
    }

    /// 1-based indices of existentially quantified variables.
    pub fn existential_players(&self) -> Vec<usize> {
        self.prefix
            .iter()
            .enumerate()
            .filter(|(_, (q, _))| *q == Quantifier::Exists)
            .map(|(i, _)| i + 1)
            .collect()
    }

    /// `∀π₁∃π₂` exactly.
    pub fn is_forall_exists_pair(&self) -> bool {
        self.quantifiers() == [Quantifier::Forall, Quantifier::Exists]
    }

    /// All existentials precede all universals (`∃*∀*`).
    pub fn is_exists_forall(&self) -> bool {
        let q = self.quantifiers();
        let k = q.iter().take_while(|&&x| x == Quantifier::Exists).count();
        q[k..].iter().all(|&x| x == Quantifier::Forall)
    }

    /// All universals precede all existentials (`∀*∃*`).
    pub fn is_forall_exists(&self) -> bool {
        let q = self.quantifiers();
        let k = q.iter().take_while(|&&x| x == Quantifier::Forall).count();
        q[k..].iter().all(|&x| x == Quantifier::Exists)
    }

    /// Strictly alternating `∀∃∀∃…∀∃`.
    pub fn is_strictly_alternating(&self) -> bool {
        let q = self.quantifiers();
        q.len() % 2 == 0
            && q.iter().enumerate().all(|(i, &x)| {
                x == if i % 2 == 0 {
                    Quantifier::Forall
                } else {
                    Quantifier::Exists
                }
            })
    }
}

impl fmt::Display for HyperLtl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (q, v) in &self.prefix {
            write!(f, "{q} {v}. ")?;
        }
        write!(f, "{}", self.body)
    }
}

const RESERVED: &[&str] = &[
    "X", "F", "G", "U", "R", "true", "false", "forall", "exists",
];

/// Parses a formula such as
/// `exists p1. forall p2. (X X X a[p1]) <-> (X X a[p2])`.
pub fn parse_hyperltl(src: &str) -> Result<HyperLtl, LogicError> {
    let mut cur = Cursor::new(src)?;
    let mut prefix = Vec::new();
    loop {
        let q = if cur.eat_keyword("forall") {
            Quantifier::Forall
        } else if cur.eat_keyword("exists") {
            Quantifier::Exists
        } else {
            break;
        };
        let (v, _, _) = cur.expect_ident()?;
        if RESERVED.contains(&v.as_str()) {
            return Err(cur.error_here(format!("'{v}' is reserved")).into());
        }
        cur.expect_sym(".")?;
        prefix.push((q, v));
    }
    let body = parse_body(&mut cur)?;
    if !cur.at_end() {
        return Err(cur.error_here("trailing input after formula").into());
    }
    HyperLtl::new(prefix, body)
}

/// Parses a quantifier-free body; trace variables are not checked.
pub fn parse_ltl(src: &str) -> Result<Ltl, LogicError> {
    let mut cur = Cursor::new(src)?;
    let body = parse_body(&mut cur)?;
    if !cur.at_end() {
        return Err(cur.error_here("trailing input after formula").into());
    }
    Ok(body)
}

pub(crate) fn parse_body(cur: &mut Cursor) -> Result<Ltl, ParseError> {
    parse_iff(cur)
}

fn parse_iff(cur: &mut Cursor) -> Result<Ltl, ParseError> {
    let lhs = parse_implies(cur)?;
    if cur.eat_sym("<->") {
        let rhs = parse_iff(cur)?;
        return Ok(Ltl::iff(lhs, rhs));
    }
    Ok(lhs)
}

fn parse_implies(cur: &mut Cursor) -> Result<Ltl, ParseError> {
    let lhs = parse_or(cur)?;
    if cur.eat_sym("->") {
        let rhs = parse_implies(cur)?;
        return Ok(Ltl::implies(lhs, rhs));
    }
    Ok(lhs)
}

fn parse_or(cur: &mut Cursor) -> Result<Ltl, ParseError> {
    let mut lhs = parse_and(cur)?;
    while cur.eat_sym("||") {
        lhs = Ltl::or(lhs, parse_and(cur)?);
    }
    Ok(lhs)
}

fn parse_and(cur: &mut Cursor) -> Result<Ltl, ParseError> {
    let mut lhs = parse_until(cur)?;
    while cur.eat_sym("&&") {
        lhs = Ltl::and(lhs, parse_until(cur)?);
    }
    Ok(lhs)
}

fn parse_until(cur: &mut Cursor) -> Result<Ltl, ParseError> {
    let lhs = parse_unary(cur)?;
    if cur.eat_keyword("U") {
        return Ok(Ltl::until(lhs, parse_until(cur)?));
    }
    if cur.eat_keyword("R") {
        return Ok(Ltl::release(lhs, parse_until(cur)?));
    }
    Ok(lhs)
}

fn parse_unary(cur: &mut Cursor) -> Result<Ltl, ParseError> {
    if cur.eat_sym("!") {
        return Ok(Ltl::not(parse_unary(cur)?));
    }
    if cur.eat_sym("(") {
        let inner = parse_body(cur)?;
        cur.expect_sym(")")?;
        return Ok(inner);
    }
    for (kw, ctor) in [
        ("X", Ltl::next as fn(Ltl) -> Ltl),
        ("F", Ltl::eventually),
        ("G", Ltl::globally),
    ] {
        if cur.eat_keyword(kw) {
            return Ok(ctor(parse_unary(cur)?));
        }
    }
    if cur.eat_keyword("true") {
        return Ok(Ltl::True);
    }
    if cur.eat_keyword("false") {
        return Ok(Ltl::False);
    }
    match cur.peek_kind() {
        Some(TokenKind::Ident(name)) if !RESERVED.contains(&name.as_str()) => {
            let (ap, _, _) = cur.expect_ident()?;
            cur.expect_sym("[")?;
            let (var, _, _) = cur.expect_ident()?;
            cur.expect_sym("]")?;
            Ok(Ltl::Atom(IndexedAp::new(ap, var)))
        }
        _ => Err(cur.error_here("expected a formula")),
    }
}

/// Flips every quantifier and negates the body into negation normal form.
pub fn negate_hyperltl(f: &HyperLtl) -> HyperLtl {
    HyperLtl {
        prefix: f.prefix.iter().map(|(q, v)| (q.flip(), v.clone())).collect(),
        body: nnf(&f.body, true),
    }
}

/// The indexed propositions occurring in `body`.
pub fn indexed_aps(body: &Ltl) -> BTreeSet<IndexedAp> {
    fn go(f: &Ltl, out: &mut BTreeSet<IndexedAp>) {
        if let Ltl::Atom(a) = f {
            out.insert(a.clone());
        }
        for c in f.children() {
            go(c, out);
        }
    }
    let mut out = BTreeSet::new();
    go(body, &mut out);
    out
}

/// Label sequence over proposition names.
pub type NamedTrace = UpWord<BTreeSet<String>>;

/// Truth value of `body` at position 0 under `assignment`.
pub fn eval_body_on_lassos(
    body: &Ltl,
    assignment: &BTreeMap<String, NamedTrace>,
) -> Result<bool, LogicError> {
    let atoms: Vec<IndexedAp> = indexed_aps(body).into_iter().collect();
    for a in &atoms {
        if !assignment.contains_key(&a.var) {
            return Err(LogicError::MissingTrace(a.var.clone()));
        }
    }
    let vars: Vec<&String> = assignment.keys().collect();
    let words: Vec<&NamedTrace> = vars.iter().map(|v| &assignment[*v]).collect();
    let joint = zip_with(&words, |letters| {
        let mut mask = 0u64;
        for (bit, a) in atoms.iter().enumerate() {
            let k = vars.iter().position(|v| **v == a.var).unwrap();
            if letters[k].contains(&a.ap) {
                mask |= 1 << bit;
            }
        }
        mask
    });
    Ok(BodyEvaluator::new(body, &atoms).eval(&joint))
}

#[derive(Debug, Clone)]
enum EvalNode {
    True,
    Atom(u32),
    Not(usize),
    And(usize, usize),
    Or(usize, usize),
    Next(usize),
    Until(usize, usize),
    Release(usize, usize),
}

/// Evaluator for a fixed body over joint letters, where bit `i` of a letter is
/// the truth of the `i`-th indexed proposition of the alphabet it was built with.
///
/// Positions of a word `stem · cycle^ω` are folded onto `0..stem+period`;
/// until and release are the least and greatest fixpoints of their unfolding
/// on that finite graph, which is exact for ultimately periodic words.
#[derive(Debug, Clone)]
pub struct BodyEvaluator {
    nodes: Vec<EvalNode>,
}

impl BodyEvaluator {
    /// Panics if `body` mentions an atom missing from `alphabet`.
    pub fn new(body: &Ltl, alphabet: &[IndexedAp]) -> Self {
        let mut nodes = Vec::new();
        let mut memo = HashMap::new();
        compile(&body.core(), alphabet, &mut nodes, &mut memo);
        BodyEvaluator { nodes }
    }

    pub fn eval(&self, word: &UpWord<u64>) -> bool {
        let stem = word.stem.len();
        let n = word.span();
        let succ = |i: usize| if i + 1 < n { i + 1 } else { stem };
        let mut vals: Vec<Vec<bool>> = Vec::with_capacity(self.nodes.len());
        for node in &self.nodes {
            let v: Vec<bool> = match *node {
                EvalNode::True => vec![true; n],
                EvalNode::Atom(bit) => (0..n).map(|i| word.at(i) >> bit & 1 == 1).collect(),
                EvalNode::Not(a) => vals[a].iter().map(|x| !x).collect(),
                EvalNode::And(a, b) => (0..n).map(|i| vals[a][i] && vals[b][i]).collect(),
                EvalNode::Or(a, b) => (0..n).map(|i| vals[a][i] || vals[b][i]).collect(),
                EvalNode::Next(a) => (0..n).map(|i| vals[a][succ(i)]).collect(),
                EvalNode::Until(a, b) => fixpoint(n, stem, false, |i, next| {
                    vals[b][i] || (vals[a][i] && next)
                }),
                EvalNode::Release(a, b) => fixpoint(n, stem, true, |i, next| {
                    vals[b][i] && (vals[a][i] || next)
                }),
            };
            vals.push(v);
        }
        vals.last().map(|v| v[0]).unwrap_or(true)
    }
}

/// Iterates `val[i] = step(i, val[succ(i)])` from `init` until stable.
fn fixpoint(n: usize, stem: usize, init: bool, step: impl Fn(usize, bool) -> bool) -> Vec<bool> {
    let mut val = vec![init; n];
    loop {
        let mut changed = false;
        for i in (stem..n).rev() {
            let next = if i + 1 < n { val[i + 1] } else { val[stem] };
            let v = step(i, next);
            if v != val[i] {
                val[i] = v;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    for i in (0..stem).rev() {
        val[i] = step(i, val[i + 1]);
    }
    val
}

fn compile(
    f: &Ltl,
    alphabet: &[IndexedAp],
    nodes: &mut Vec<EvalNode>,
    memo: &mut HashMap<Ltl, usize>,
) -> usize {
    if let Some(&i) = memo.get(f) {
        return i;
    }
    let mut sub = |g: &Ltl| compile(g, alphabet, nodes, memo);
    let node = match f {
        Ltl::True => EvalNode::True,
        Ltl::Atom(a) => {
            let bit = alphabet
                .iter()
                .position(|b| b == a)
                .unwrap_or_else(|| panic!("atom {a} missing from alphabet"));
            EvalNode::Atom(bit as u32)
        }
        Ltl::Not(a) => EvalNode::Not(sub(a)),
        Ltl::And(a, b) => {
            let (x, y) = (sub(a), sub(b));
            EvalNode::And(x, y)
        }
        Ltl::Or(a, b) => {
            let (x, y) = (sub(a), sub(b));
            EvalNode::Or(x, y)
        }
        Ltl::Next(a) => EvalNode::Next(sub(a)),
        Ltl::Until(a, b) => {
            let (x, y) = (sub(a), sub(b));
            EvalNode::Until(x, y)
        }
        Ltl::Release(a, b) => {
            let (x, y) = (sub(a), sub(b));
            EvalNode::Release(x, y)
        }
        other => unreachable!("not in core form: {other}"),
    };
    nodes.push(node);
    memo.insert(f.clone(), nodes.len() - 1);
    nodes.len() - 1
}
