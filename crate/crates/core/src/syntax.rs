//! Shared formula and guard AST for all supported logics, with the concrete
//! ASCII grammar, printer, size measure and per-logic admissibility checks.
//!
//! Grammar summary (unary binds tightest, then `U`/`R`, `&`, `|`, `->`):
//!
//! ```text
//! f ::= tt | ff | p | ! f | f & f | f | f | f -> f | X f | f U f | f R f
//!     | F f | G f | Fp f | < r > f | [ r ] f | <p r > f | ( f )
//! r ::= prop | { f }? | r + r | r ; r | r* | ( r )
//! ```
//!
//! `! p` on an identifier is always the atomic negation `NegAtom`; general
//! negation of an atom is written `!(p)`.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum PropFormula {
    True,
    False,
    Atom(String),
    Not(Box<PropFormula>),
    And(Box<PropFormula>, Box<PropFormula>),
    Or(Box<PropFormula>, Box<PropFormula>),
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Guard {
    Prop(PropFormula),
    Test(Box<Formula>),
    Alt(Box<Guard>, Box<Guard>),
    Concat(Box<Guard>, Box<Guard>),
    Star(Box<Guard>),
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Formula {
    True,
    False,
    Atom(String),
    NegAtom(String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Next(Box<Formula>),
    Until(Box<Formula>, Box<Formula>),
    Release(Box<Formula>, Box<Formula>),
    Eventually(Box<Formula>),
    Always(Box<Formula>),
    PromptEventually(Box<Formula>),
    Diamond(Guard, Box<Formula>),
    Box(Guard, Box<Formula>),
    PromptDiamond(Guard, Box<Formula>),
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum LogicId {
    LtlFrag,
    Ldl,
    PromptLtl,
    PromptLdl,
    Rltl,
    RPromptLtl,
    Rldl,
    RPromptLdl,
}

impl LogicId {
    pub const ALL: [LogicId; 8] = [
        LogicId::LtlFrag,
        LogicId::Ldl,
        LogicId::PromptLtl,
        LogicId::PromptLdl,
        LogicId::Rltl,
        LogicId::RPromptLtl,
        LogicId::Rldl,
        LogicId::RPromptLdl,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LogicId::LtlFrag => "ltl",
            LogicId::Ldl => "ldl",
            LogicId::PromptLtl => "promptltl",
            LogicId::PromptLdl => "promptldl",
            LogicId::Rltl => "rltl",
            LogicId::RPromptLtl => "rpromptltl",
            LogicId::Rldl => "rldl",
            LogicId::RPromptLdl => "rpromptldl",
        }
    }

    pub fn is_robust(self) -> bool {
        matches!(
            self,
            LogicId::Rltl | LogicId::RPromptLtl | LogicId::Rldl | LogicId::RPromptLdl
        )
    }

    pub fn is_prompt(self) -> bool {
        matches!(
            self,
            LogicId::PromptLtl | LogicId::PromptLdl | LogicId::RPromptLtl | LogicId::RPromptLdl
        )
    }

    fn general_negation(self) -> bool {
        matches!(
            self,
            LogicId::LtlFrag | LogicId::Ldl | LogicId::Rltl | LogicId::Rldl
        )
    }

    fn temporal_ltl(self) -> bool {
        matches!(
            self,
            LogicId::LtlFrag | LogicId::PromptLtl | LogicId::Rltl | LogicId::RPromptLtl
        )
    }

    fn dynamic(self) -> bool {
        matches!(
            self,
            LogicId::Ldl | LogicId::PromptLdl | LogicId::Rldl | LogicId::RPromptLdl
        )
    }
}

impl fmt::Display for LogicId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LogicId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.to_ascii_lowercase().replace(['-', '_'], "");
        LogicId::ALL
            .iter()
            .copied()
            .find(|l| l.name() == lower || (lower == "ltlfrag" && *l == LogicId::LtlFrag))
            .ok_or_else(|| format!("unknown logic `{s}`"))
    }
}

/// A construct not admissible in the requested logic.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Violation {
    pub construct: &'static str,
    pub at: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} in `{}`", self.construct, self.at)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SyntaxError {
    #[error("syntax error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("not a {logic} formula: {}", list(.violations))]
    LogicViolation {
        logic: LogicId,
        violations: Vec<Violation>,
    },
}

fn list(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

// ---------------------------------------------------------------------------
// constructors and queries

impl PropFormula {
    pub fn atom(p: &str) -> Self {
        PropFormula::Atom(p.to_string())
    }

    pub fn not(a: PropFormula) -> Self {
        PropFormula::Not(Box::new(a))
    }

    pub fn and(a: PropFormula, b: PropFormula) -> Self {
        PropFormula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: PropFormula, b: PropFormula) -> Self {
        PropFormula::Or(Box::new(a), Box::new(b))
    }

    /// Evaluate against a letter given as a membership predicate.
    pub fn holds(&self, has: &dyn Fn(&str) -> bool) -> bool {
        match self {
            PropFormula::True => true,
            PropFormula::False => false,
            PropFormula::Atom(p) => has(p),
            PropFormula::Not(a) => !a.holds(has),
            PropFormula::And(a, b) => a.holds(has) && b.holds(has),
            PropFormula::Or(a, b) => a.holds(has) || b.holds(has),
        }
    }

    pub fn collect_props(&self, out: &mut BTreeSet<String>) {
        match self {
            PropFormula::True | PropFormula::False => {}
            PropFormula::Atom(p) => {
                out.insert(p.clone());
            }
            PropFormula::Not(a) => a.collect_props(out),
            PropFormula::And(a, b) | PropFormula::Or(a, b) => {
                a.collect_props(out);
                b.collect_props(out);
            }
        }
    }
}

impl Guard {
    pub fn tt() -> Self {
        Guard::Prop(PropFormula::True)
    }

    pub fn ff() -> Self {
        Guard::Prop(PropFormula::False)
    }

    pub fn prop(p: &str) -> Self {
        Guard::Prop(PropFormula::atom(p))
    }

    pub fn test(f: Formula) -> Self {
        Guard::Test(Box::new(f))
    }

    pub fn alt(a: Guard, b: Guard) -> Self {
        Guard::Alt(Box::new(a), Box::new(b))
    }

    pub fn concat(a: Guard, b: Guard) -> Self {
        Guard::Concat(Box::new(a), Box::new(b))
    }

    pub fn star(a: Guard) -> Self {
        Guard::Star(Box::new(a))
    }

    /// `tt*`, matching every prefix length.
    pub fn universal() -> Self {
        Guard::star(Guard::tt())
    }

    /// Number of syntax nodes; propositional formulas and tests count once.
    pub fn length(&self) -> usize {
        match self {
            Guard::Prop(_) | Guard::Test(_) => 1,
            Guard::Alt(a, b) | Guard::Concat(a, b) => 1 + a.length() + b.length(),
            Guard::Star(a) => 1 + a.length(),
        }
    }

    pub fn is_test_free(&self) -> bool {
        match self {
            Guard::Prop(_) => true,
            Guard::Test(_) => false,
            Guard::Alt(a, b) | Guard::Concat(a, b) => a.is_test_free() && b.is_test_free(),
            Guard::Star(a) => a.is_test_free(),
        }
    }

    /// Test formulas in left-to-right order (with repetitions).
    pub fn tests(&self) -> Vec<&Formula> {
        let mut out = Vec::new();
        self.collect_tests(&mut out);
        out
    }

    fn collect_tests<'a>(&'a self, out: &mut Vec<&'a Formula>) {
        match self {
            Guard::Prop(_) => {}
            Guard::Test(f) => out.push(f),
            Guard::Alt(a, b) | Guard::Concat(a, b) => {
                a.collect_tests(out);
                b.collect_tests(out);
            }
            Guard::Star(a) => a.collect_tests(out),
        }
    }

    pub fn collect_props(&self, out: &mut BTreeSet<String>) {
        match self {
            Guard::Prop(p) => p.collect_props(out),
            Guard::Test(f) => f.collect_props(out),
            Guard::Alt(a, b) | Guard::Concat(a, b) => {
                a.collect_props(out);
                b.collect_props(out);
            }
            Guard::Star(a) => a.collect_props(out),
        }
    }

    /// Rebuild the guard with every test formula mapped through `f`.
    pub fn map_tests(&self, f: &mut dyn FnMut(&Formula) -> Formula) -> Guard {
        match self {
            Guard::Prop(p) => Guard::Prop(p.clone()),
            Guard::Test(t) => Guard::Test(Box::new(f(t))),
            Guard::Alt(a, b) => Guard::alt(a.map_tests(f), b.map_tests(f)),
            Guard::Concat(a, b) => Guard::concat(a.map_tests(f), b.map_tests(f)),
            Guard::Star(a) => Guard::star(a.map_tests(f)),
        }
    }
}

impl Formula {
    pub fn atom(p: &str) -> Self {
        Formula::Atom(p.to_string())
    }

    pub fn neg_atom(p: &str) -> Self {
        Formula::NegAtom(p.to_string())
    }

    pub fn not(a: Formula) -> Self {
        Formula::Not(Box::new(a))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn next(a: Formula) -> Self {
        Formula::Next(Box::new(a))
    }

    pub fn until(a: Formula, b: Formula) -> Self {
        Formula::Until(Box::new(a), Box::new(b))
    }

    pub fn release(a: Formula, b: Formula) -> Self {
        Formula::Release(Box::new(a), Box::new(b))
    }

    pub fn eventually(a: Formula) -> Self {
        Formula::Eventually(Box::new(a))
    }

    pub fn always(a: Formula) -> Self {
        Formula::Always(Box::new(a))
    }

    pub fn prompt_eventually(a: Formula) -> Self {
        Formula::PromptEventually(Box::new(a))
    }

    pub fn diamond(g: Guard, a: Formula) -> Self {
        Formula::Diamond(g, Box::new(a))
    }

    pub fn boxed(g: Guard, a: Formula) -> Self {
        Formula::Box(g, Box::new(a))
    }

    pub fn prompt_diamond(g: Guard, a: Formula) -> Self {
        Formula::PromptDiamond(g, Box::new(a))
    }

    /// Conjunction of a list; `tt` when empty.
    pub fn and_all(items: Vec<Formula>) -> Formula {
        let mut it = items.into_iter();
        match it.next() {
            None => Formula::True,
            Some(first) => it.fold(first, Formula::and),
        }
    }

    /// Disjunction of a list; `ff` when empty.
    pub fn or_all(items: Vec<Formula>) -> Formula {
        let mut it = items.into_iter();
        match it.next() {
            None => Formula::False,
            Some(first) => it.fold(first, Formula::or),
        }
    }

    /// Direct children: operands first, then test formulas of the guard.
    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) | Formula::NegAtom(_) => vec![],
            Formula::Not(a)
            | Formula::Next(a)
            | Formula::Eventually(a)
            | Formula::Always(a)
            | Formula::PromptEventually(a) => vec![a],
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Until(a, b)
            | Formula::Release(a, b) => vec![a, b],
            Formula::Diamond(g, a) | Formula::Box(g, a) | Formula::PromptDiamond(g, a) => {
                let mut v: Vec<&Formula> = vec![a];
                v.extend(g.tests());
                v
            }
        }
    }

    pub fn guard(&self) -> Option<&Guard> {
        match self {
            Formula::Diamond(g, _) | Formula::Box(g, _) | Formula::PromptDiamond(g, _) => Some(g),
            _ => None,
        }
    }

    /// All distinct subformulas, including formulas inside tests.
    pub fn closure(&self) -> BTreeSet<Formula> {
        let mut out = BTreeSet::new();
        self.collect_closure(&mut out);
        out
    }

    fn collect_closure(&self, out: &mut BTreeSet<Formula>) {
        if out.contains(self) {
            return;
        }
        out.insert(self.clone());
        for c in self.children() {
            c.collect_closure(out);
        }
    }

    /// Number of distinct subformulas plus the lengths of their guards.
    pub fn size(&self) -> usize {
        let cl = self.closure();
        cl.len() + cl.iter().filter_map(|f| f.guard()).map(Guard::length).sum::<usize>()
    }

    pub fn is_test_free(&self) -> bool {
        if let Some(g) = self.guard() {
            if !g.is_test_free() {
                return false;
            }
        }
        self.children().into_iter().all(Formula::is_test_free)
    }

    /// Atomic propositions occurring anywhere, including guards.
    pub fn props(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_props(&mut out);
        out
    }

    pub fn collect_props(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::Atom(p) | Formula::NegAtom(p) => {
                out.insert(p.clone());
            }
            Formula::Diamond(g, a) | Formula::Box(g, a) | Formula::PromptDiamond(g, a) => {
                g.collect_props(out);
                a.collect_props(out);
            }
            _ => {
                for c in self.children() {
                    c.collect_props(out);
                }
            }
        }
    }

    /// Every guard occurring in the formula, outermost first.
    pub fn guards(&self) -> Vec<&Guard> {
        let mut out = Vec::new();
        self.collect_guards(&mut out);
        out
    }

    fn collect_guards<'a>(&'a self, out: &mut Vec<&'a Guard>) {
        if let Some(g) = self.guard() {
            out.push(g);
        }
        for c in self.children() {
            c.collect_guards(out);
        }
    }

    pub fn has_prompt(&self) -> bool {
        matches!(self, Formula::PromptEventually(_) | Formula::PromptDiamond(..))
            || self.children().into_iter().any(Formula::has_prompt)
    }
}

// ---------------------------------------------------------------------------
// admissibility

pub fn check_logic(phi: &Formula, logic: LogicId) -> Vec<Violation> {
    let mut out = Vec::new();
    check_rec(phi, logic, &mut out);
    out
}

fn check_rec(phi: &Formula, logic: LogicId, out: &mut Vec<Violation>) {
    let bad = |construct: &'static str, out: &mut Vec<Violation>| {
        out.push(Violation {
            construct,
            at: phi.to_string(),
        })
    };
    match phi {
        Formula::True | Formula::False | Formula::Atom(_) | Formula::NegAtom(_) => {}
        Formula::Not(_) if !logic.general_negation() => bad("non-atomic negation", out),
        Formula::Implies(..) if !logic.general_negation() => bad("implication", out),
        Formula::Next(_) if !matches!(logic, LogicId::LtlFrag | LogicId::PromptLtl) => {
            bad("next", out)
        }
        Formula::Until(..) if !matches!(logic, LogicId::LtlFrag | LogicId::PromptLtl) => {
            bad("until", out)
        }
        Formula::Release(..) if !matches!(logic, LogicId::LtlFrag | LogicId::PromptLtl) => {
            bad("release", out)
        }
        Formula::Eventually(_) if !logic.temporal_ltl() => bad("eventually", out),
        Formula::Always(_) if !logic.temporal_ltl() => bad("always", out),
        Formula::PromptEventually(_)
            if !matches!(logic, LogicId::PromptLtl | LogicId::RPromptLtl) =>
        {
            bad("prompt eventually", out)
        }
        Formula::Diamond(..) if !logic.dynamic() => bad("diamond", out),
        Formula::Box(..) if !logic.dynamic() => bad("box", out),
        Formula::PromptDiamond(..)
            if !matches!(logic, LogicId::PromptLdl | LogicId::RPromptLdl) =>
        {
            bad("prompt diamond", out)
        }
        _ => {}
    }
    for c in phi.children() {
        check_rec(c, logic, out);
    }
}

pub fn require_logic(phi: &Formula, logic: LogicId) -> Result<(), SyntaxError> {
    let violations = check_logic(phi, logic);
    if violations.is_empty() {
        Ok(())
    } else {
        Err(SyntaxError::LogicViolation { logic, violations })
    }
}

// ---------------------------------------------------------------------------
// printing

const P_IMP: u8 = 1;
const P_OR: u8 = 2;
const P_AND: u8 = 3;
const P_UNTIL: u8 = 4;
const P_UNARY: u8 = 5;
const P_ATOM: u8 = 6;

fn formula_prec(f: &Formula) -> u8 {
    match f {
        Formula::Implies(..) => P_IMP,
        Formula::Or(..) => P_OR,
        Formula::And(..) => P_AND,
        Formula::Until(..) | Formula::Release(..) => P_UNTIL,
        Formula::True | Formula::False | Formula::Atom(_) => P_ATOM,
        _ => P_UNARY,
    }
}

fn write_formula(f: &Formula, min: u8, out: &mut String) {
    let paren = formula_prec(f) < min;
    if paren {
        out.push('(');
    }
    match f {
        Formula::True => out.push_str("tt"),
        Formula::False => out.push_str("ff"),
        Formula::Atom(p) => out.push_str(p),
        Formula::NegAtom(p) => {
            out.push_str("! ");
            out.push_str(p);
        }
        Formula::Not(a) => {
            if matches!(**a, Formula::Atom(_)) {
                out.push_str("!(");
                write_formula(a, 0, out);
                out.push(')');
            } else {
                out.push_str("! ");
                write_formula(a, P_UNARY, out);
            }
        }
        Formula::And(a, b) => binary(a, " & ", b, P_AND, P_AND + 1, out),
        Formula::Or(a, b) => binary(a, " | ", b, P_OR, P_OR + 1, out),
        Formula::Implies(a, b) => binary(a, " -> ", b, P_IMP + 1, P_IMP, out),
        Formula::Until(a, b) => binary(a, " U ", b, P_UNTIL + 1, P_UNTIL, out),
        Formula::Release(a, b) => binary(a, " R ", b, P_UNTIL + 1, P_UNTIL, out),
        Formula::Next(a) => unary("X ", a, out),
        Formula::Eventually(a) => unary("F ", a, out),
        Formula::Always(a) => unary("G ", a, out),
        Formula::PromptEventually(a) => unary("Fp ", a, out),
        Formula::Diamond(g, a) => modal("< ", g, " > ", a, out),
        Formula::Box(g, a) => modal("[ ", g, " ] ", a, out),
        Formula::PromptDiamond(g, a) => modal("<p ", g, " > ", a, out),
    }
    if paren {
        out.push(')');
    }
}

fn binary(a: &Formula, op: &str, b: &Formula, lmin: u8, rmin: u8, out: &mut String) {
    write_formula(a, lmin, out);
    out.push_str(op);
    write_formula(b, rmin, out);
}

fn unary(op: &str, a: &Formula, out: &mut String) {
    out.push_str(op);
    write_formula(a, P_UNARY, out);
}

fn modal(open: &str, g: &Guard, close: &str, a: &Formula, out: &mut String) {
    out.push_str(open);
    write_guard(g, 0, out);
    out.push_str(close);
    write_formula(a, P_UNARY, out);
}

const G_ALT: u8 = 1;
const G_CONCAT: u8 = 2;
const G_OR: u8 = 3;
const G_AND: u8 = 4;
const G_NOT: u8 = 5;
const G_STAR: u8 = 6;
const G_ATOM: u8 = 7;

fn prop_prec(p: &PropFormula) -> u8 {
    match p {
        PropFormula::Or(..) => G_OR,
        PropFormula::And(..) => G_AND,
        PropFormula::Not(_) => G_NOT,
        _ => G_ATOM,
    }
}

fn write_prop(p: &PropFormula, min: u8, out: &mut String) {
    let paren = prop_prec(p) < min;
    if paren {
        out.push('(');
    }
    match p {
        PropFormula::True => out.push_str("tt"),
        PropFormula::False => out.push_str("ff"),
        PropFormula::Atom(a) => out.push_str(a),
        PropFormula::Not(a) => {
            out.push('!');
            write_prop(a, G_NOT, out);
        }
        PropFormula::And(a, b) => {
            write_prop(a, G_AND, out);
            out.push_str(" & ");
            write_prop(b, G_AND + 1, out);
        }
        PropFormula::Or(a, b) => {
            write_prop(a, G_OR, out);
            out.push_str(" | ");
            write_prop(b, G_OR + 1, out);
        }
    }
    if paren {
        out.push(')');
    }
}

fn guard_prec(g: &Guard) -> u8 {
    match g {
        Guard::Prop(p) => prop_prec(p),
        Guard::Test(_) => G_ATOM,
        Guard::Alt(..) => G_ALT,
        Guard::Concat(..) => G_CONCAT,
        Guard::Star(_) => G_STAR,
    }
}

fn write_guard(g: &Guard, min: u8, out: &mut String) {
    if let Guard::Prop(p) = g {
        write_prop(p, min, out);
        return;
    }
    let paren = guard_prec(g) < min;
    if paren {
        out.push('(');
    }
    match g {
        Guard::Prop(_) => unreachable!(),
        Guard::Test(f) => {
            out.push_str("{ ");
            write_formula(f, 0, out);
            out.push_str(" }?");
        }
        Guard::Alt(a, b) => {
            write_guard(a, G_ALT, out);
            out.push_str(" + ");
            write_guard(b, G_ALT + 1, out);
        }
        Guard::Concat(a, b) => {
            write_guard(a, G_CONCAT, out);
            out.push(';');
            write_guard(b, G_CONCAT + 1, out);
        }
        Guard::Star(a) => {
            write_guard(a, G_STAR, out);
            out.push('*');
        }
    }
    if paren {
        out.push(')');
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        write_formula(self, 0, &mut s);
        f.write_str(&s)
    }
}

impl fmt::Display for Guard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        write_guard(self, 0, &mut s);
        f.write_str(&s)
    }
}

impl fmt::Display for PropFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        write_prop(self, 0, &mut s);
        f.write_str(&s)
    }
}

pub fn print(phi: &Formula) -> String {
    phi.to_string()
}

// ---------------------------------------------------------------------------
// lexing and parsing

#[derive(Clone, PartialEq, Eq, Debug)]
enum Tok {
    Ident(String),
    TT,
    FF,
    Next,
    Ev,
    Alw,
    PromptEv,
    Until,
    Release,
    Not,
    And,
    Or,
    Arrow,
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBrack,
    RBrack,
    Lt,
    PromptLt,
    Gt,
    Plus,
    Semi,
    Star,
    Question,
    Eof,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("identifier `{s}`"),
        Tok::Eof => "end of input".to_string(),
        other => format!("{other:?}"),
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, SyntaxError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let simple = match c {
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '{' => Some(Tok::LBrace),
            '}' => Some(Tok::RBrace),
            '[' => Some(Tok::LBrack),
            ']' => Some(Tok::RBrack),
            '>' => Some(Tok::Gt),
            '+' => Some(Tok::Plus),
            ';' => Some(Tok::Semi),
            '*' => Some(Tok::Star),
            '?' => Some(Tok::Question),
            '!' => Some(Tok::Not),
            '&' => Some(Tok::And),
            '|' => Some(Tok::Or),
            _ => None,
        };
        if let Some(t) = simple {
            out.push((t, start));
            i += 1;
            continue;
        }
        if c == '-' {
            if bytes.get(i + 1) == Some(&b'>') {
                out.push((Tok::Arrow, start));
                i += 2;
                continue;
            }
            return Err(SyntaxError::Parse {
                pos: start,
                msg: "expected `->`".into(),
            });
        }
        if c == '<' {
            // `<p` opens a prompt diamond only when followed by a separator.
            let after = bytes.get(i + 2).map(|b| *b as char);
            if bytes.get(i + 1) == Some(&b'p')
                && after.is_some_and(|a| a.is_whitespace() || a == '(' || a == '{')
            {
                out.push((Tok::PromptLt, start));
                i += 2;
            } else {
                out.push((Tok::Lt, start));
                i += 1;
            }
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let mut j = i;
            while j < bytes.len() {
                let d = bytes[j] as char;
                if d.is_ascii_alphanumeric() || d == '_' || d == '\'' {
                    j += 1;
                } else {
                    break;
                }
            }
            let word = &text[i..j];
            let t = match word {
                "tt" => Tok::TT,
                "ff" => Tok::FF,
                "X" => Tok::Next,
                "F" => Tok::Ev,
                "G" => Tok::Alw,
                "Fp" => Tok::PromptEv,
                "U" => Tok::Until,
                "R" => Tok::Release,
                _ => Tok::Ident(word.to_string()),
            };
            out.push((t, start));
            i = j;
            continue;
        }
        return Err(SyntaxError::Parse {
            pos: start,
            msg: format!("unexpected character `{c}`"),
        });
    }
    out.push((Tok::Eof, text.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    general_negation: bool,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, SyntaxError> {
        Err(SyntaxError::Parse {
            pos: self.offset(),
            msg: msg.into(),
        })
    }

    fn expect(&mut self, t: Tok) -> Result<(), SyntaxError> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            self.err(format!("expected {}, found {}", describe(&t), describe(self.peek())))
        }
    }

    fn implication(&mut self) -> Result<Formula, SyntaxError> {
        let lhs = self.disjunction()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.implication()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula, SyntaxError> {
        let mut lhs = self.conjunction()?;
        while *self.peek() == Tok::Or {
            self.bump();
            let rhs = self.conjunction()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Formula, SyntaxError> {
        let mut lhs = self.binary_temporal()?;
        while *self.peek() == Tok::And {
            self.bump();
            let rhs = self.binary_temporal()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn binary_temporal(&mut self) -> Result<Formula, SyntaxError> {
        let lhs = self.unary()?;
        match self.peek() {
            Tok::Until => {
                self.bump();
                let rhs = self.binary_temporal()?;
                Ok(Formula::until(lhs, rhs))
            }
            Tok::Release => {
                self.bump();
                let rhs = self.binary_temporal()?;
                Ok(Formula::release(lhs, rhs))
            }
            _ => Ok(lhs),
        }
    }

    fn unary(&mut self) -> Result<Formula, SyntaxError> {
        match self.peek().clone() {
            Tok::Not => {
                self.bump();
                if let Tok::Ident(p) = self.peek().clone() {
                    self.bump();
                    return Ok(Formula::NegAtom(p));
                }
                let inner = self.unary()?;
                match inner {
                    Formula::Atom(p) if !self.general_negation => Ok(Formula::NegAtom(p)),
                    other => Ok(Formula::not(other)),
                }
            }
            Tok::Next => {
                self.bump();
                Ok(Formula::next(self.unary()?))
            }
            Tok::Ev => {
                self.bump();
                Ok(Formula::eventually(self.unary()?))
            }
            Tok::Alw => {
                self.bump();
                Ok(Formula::always(self.unary()?))
            }
            Tok::PromptEv => {
                self.bump();
                Ok(Formula::prompt_eventually(self.unary()?))
            }
            Tok::Lt => {
                self.bump();
                let g = self.guard()?;
                self.expect(Tok::Gt)?;
                Ok(Formula::diamond(g, self.unary()?))
            }
            Tok::PromptLt => {
                self.bump();
                let g = self.guard()?;
                self.expect(Tok::Gt)?;
                Ok(Formula::prompt_diamond(g, self.unary()?))
            }
            Tok::LBrack => {
                self.bump();
                let g = self.guard()?;
                self.expect(Tok::RBrack)?;
                Ok(Formula::boxed(g, self.unary()?))
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<Formula, SyntaxError> {
        let f = match self.peek().clone() {
            Tok::TT => Formula::True,
            Tok::FF => Formula::False,
            Tok::Ident(p) => Formula::Atom(p),
            Tok::LParen => {
                self.bump();
                let f = self.implication()?;
                self.expect(Tok::RParen)?;
                return Ok(f);
            }
            other => return self.err(format!("expected a formula, found {}", describe(&other))),
        };
        self.bump();
        Ok(f)
    }

    fn guard(&mut self) -> Result<Guard, SyntaxError> {
        let mut lhs = self.guard_concat()?;
        while *self.peek() == Tok::Plus {
            self.bump();
            let rhs = self.guard_concat()?;
            lhs = Guard::alt(lhs, rhs);
        }
        Ok(lhs)
    }

    fn guard_concat(&mut self) -> Result<Guard, SyntaxError> {
        let mut lhs = self.guard_or()?;
        while *self.peek() == Tok::Semi {
            self.bump();
            let rhs = self.guard_or()?;
            lhs = Guard::concat(lhs, rhs);
        }
        Ok(lhs)
    }

    fn as_prop(&self, g: Guard, op: &str) -> Result<PropFormula, SyntaxError> {
        match g {
            Guard::Prop(p) => Ok(p),
            other => self.err(format!("`{op}` applied to non-propositional guard `{other}`")),
        }
    }

    fn guard_or(&mut self) -> Result<Guard, SyntaxError> {
        let mut lhs = self.guard_and()?;
        while *self.peek() == Tok::Or {
            self.bump();
            let rhs = self.guard_and()?;
            let a = self.as_prop(lhs, "|")?;
            let b = self.as_prop(rhs, "|")?;
            lhs = Guard::Prop(PropFormula::or(a, b));
        }
        Ok(lhs)
    }

    fn guard_and(&mut self) -> Result<Guard, SyntaxError> {
        let mut lhs = self.guard_not()?;
        while *self.peek() == Tok::And {
            self.bump();
            let rhs = self.guard_not()?;
            let a = self.as_prop(lhs, "&")?;
            let b = self.as_prop(rhs, "&")?;
            lhs = Guard::Prop(PropFormula::and(a, b));
        }
        Ok(lhs)
    }

    fn guard_not(&mut self) -> Result<Guard, SyntaxError> {
        if *self.peek() == Tok::Not {
            self.bump();
            let inner = self.guard_not()?;
            let p = self.as_prop(inner, "!")?;
            return Ok(Guard::Prop(PropFormula::not(p)));
        }
        self.guard_star()
    }

    fn guard_star(&mut self) -> Result<Guard, SyntaxError> {
        let mut g = self.guard_primary()?;
        while *self.peek() == Tok::Star {
            self.bump();
            g = Guard::star(g);
        }
        Ok(g)
    }

    fn guard_primary(&mut self) -> Result<Guard, SyntaxError> {
        match self.peek().clone() {
            Tok::TT => {
                self.bump();
                Ok(Guard::tt())
            }
            Tok::FF => {
                self.bump();
                Ok(Guard::ff())
            }
            Tok::Ident(p) => {
                self.bump();
                Ok(Guard::Prop(PropFormula::Atom(p)))
            }
            Tok::LBrace => {
                self.bump();
                let f = self.implication()?;
                self.expect(Tok::RBrace)?;
                self.expect(Tok::Question)?;
                Ok(Guard::test(f))
            }
            Tok::LParen => {
                self.bump();
                let g = self.guard()?;
                self.expect(Tok::RParen)?;
                Ok(g)
            }
            other => self.err(format!("expected a guard, found {}", describe(&other))),
        }
    }
}

/// Parse without any logic check. Atomic negation of an identifier is
/// `NegAtom`; `!(p)` is general negation.
pub fn parse_any(text: &str) -> Result<Formula, SyntaxError> {
    parse_with(text, true)
}

fn parse_with(text: &str, general_negation: bool) -> Result<Formula, SyntaxError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
        general_negation,
    };
    let f = p.implication()?;
    if *p.peek() != Tok::Eof {
        return p.err(format!("unexpected {}", describe(p.peek())));
    }
    Ok(f)
}

/// Parse and check membership in `logic`. In logics without general
/// negation, `!(p)` is read as the atomic negation of `p`.
pub fn parse(text: &str, logic: LogicId) -> Result<Formula, SyntaxError> {
    let f = parse_with(text, logic.general_negation())?;
    require_logic(&f, logic)?;
    Ok(f)
}

pub fn parse_guard(text: &str) -> Result<Guard, SyntaxError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
        general_negation: true,
    };
    let g = p.guard()?;
    if *p.peek() != Tok::Eof {
        return p.err(format!("unexpected {}", describe(p.peek())));
    }
    Ok(g)
}
