//! Alternating parity automata and the translation of rLDL formulas into
//! them.
//!
//! Acceptance is max-parity: a run DAG is accepting iff on every infinite
//! path the largest color seen infinitely often is even.
//!
//! The translation builds one shared family of sub-automata, keyed by
//! (formula, threshold), so subformulas used at several thresholds or in
//! several places are built once. A sub-automaton is represented by a
//! [`Handle`]: a constant or its initial state. Starting a sub-automaton at
//! the current position means inlining the transition formula of its
//! initial state for the current letter.
//!
//! Every strongly connected set of states has a single color parity: guard
//! states of diamonds are odd (a match must eventually be reached), guard
//! states of boxes and of infinite-match witnesses are even, and fresh
//! combination states are transient. The result is therefore weak, which
//! [`Apa::is_weak`] checks.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::rc::Rc;

use thiserror::Error;

use crate::alphabet::Alphabet;
use crate::games::{solve_parity, ParityGame, Player};
use crate::guards::{thompson, GuardNfa, TestSet};
use crate::lasso::LassoTrace;
use crate::syntax::{require_logic, Formula, Guard, LogicId, SyntaxError};
use crate::truth4::TruthValue4;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ApaError {
    #[error("cannot combine an empty list of automata")]
    EmptyList,
    #[error("automata are over different alphabets: {0} and {1}")]
    AlphabetMismatch(Alphabet, Alphabet),
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("alphabet {0} misses propositions of the formula")]
    MissingProps(Alphabet),
}

/// Positive Boolean combination of states.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum PositiveBool {
    True,
    False,
    Var(usize),
    And(Vec<PositiveBool>),
    Or(Vec<PositiveBool>),
}

impl PositiveBool {
    /// Conjunction with constant folding and flattening.
    pub fn and(items: Vec<PositiveBool>) -> PositiveBool {
        let mut out: Vec<PositiveBool> = Vec::new();
        for it in items {
            match it {
                PositiveBool::True => {}
                PositiveBool::False => return PositiveBool::False,
                PositiveBool::And(xs) => out.extend(xs),
                other => out.push(other),
            }
        }
        out.sort();
        out.dedup();
        match out.len() {
            0 => PositiveBool::True,
            1 => out.pop().expect("one element"),
            _ => PositiveBool::And(out),
        }
    }

    /// Disjunction with constant folding and flattening.
    pub fn or(items: Vec<PositiveBool>) -> PositiveBool {
        let mut out: Vec<PositiveBool> = Vec::new();
        for it in items {
            match it {
                PositiveBool::False => {}
                PositiveBool::True => return PositiveBool::True,
                PositiveBool::Or(xs) => out.extend(xs),
                other => out.push(other),
            }
        }
        out.sort();
        out.dedup();
        match out.len() {
            0 => PositiveBool::False,
            1 => out.pop().expect("one element"),
            _ => PositiveBool::Or(out),
        }
    }

    pub fn map_vars(&self, f: &mut dyn FnMut(usize) -> usize) -> PositiveBool {
        match self {
            PositiveBool::True => PositiveBool::True,
            PositiveBool::False => PositiveBool::False,
            PositiveBool::Var(q) => PositiveBool::Var(f(*q)),
            PositiveBool::And(xs) => PositiveBool::and(xs.iter().map(|x| x.map_vars(f)).collect()),
            PositiveBool::Or(xs) => PositiveBool::or(xs.iter().map(|x| x.map_vars(f)).collect()),
        }
    }

    /// Swap conjunctions with disjunctions and the constants, renaming
    /// variables through `f`.
    pub fn dual_with(&self, f: &mut dyn FnMut(usize) -> usize) -> PositiveBool {
        match self {
            PositiveBool::True => PositiveBool::False,
            PositiveBool::False => PositiveBool::True,
            PositiveBool::Var(q) => PositiveBool::Var(f(*q)),
            PositiveBool::And(xs) => PositiveBool::or(xs.iter().map(|x| x.dual_with(f)).collect()),
            PositiveBool::Or(xs) => PositiveBool::and(xs.iter().map(|x| x.dual_with(f)).collect()),
        }
    }

    pub fn eval(&self, holds: &dyn Fn(usize) -> bool) -> bool {
        match self {
            PositiveBool::True => true,
            PositiveBool::False => false,
            PositiveBool::Var(q) => holds(*q),
            PositiveBool::And(xs) => xs.iter().all(|x| x.eval(holds)),
            PositiveBool::Or(xs) => xs.iter().any(|x| x.eval(holds)),
        }
    }

    pub fn vars(&self, out: &mut BTreeSet<usize>) {
        match self {
            PositiveBool::Var(q) => {
                out.insert(*q);
            }
            PositiveBool::And(xs) | PositiveBool::Or(xs) => xs.iter().for_each(|x| x.vars(out)),
            _ => {}
        }
    }

    /// Minimal satisfying sets of variables, each sorted.
    pub fn min_models(&self) -> Vec<Vec<usize>> {
        match self {
            PositiveBool::True => vec![vec![]],
            PositiveBool::False => vec![],
            PositiveBool::Var(q) => vec![vec![*q]],
            PositiveBool::Or(xs) => {
                minimize(xs.iter().flat_map(|x| x.min_models()).collect())
            }
            PositiveBool::And(xs) => {
                let mut acc: Vec<Vec<usize>> = vec![vec![]];
                for x in xs {
                    let ms = x.min_models();
                    let mut next = Vec::with_capacity(acc.len() * ms.len());
                    for a in &acc {
                        for m in &ms {
                            next.push(union_sorted(a, m));
                        }
                    }
                    acc = minimize(next);
                    if acc.is_empty() {
                        break;
                    }
                }
                acc
            }
        }
    }
}

pub(crate) fn union_sorted(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

pub(crate) fn is_subset_sorted(a: &[usize], b: &[usize]) -> bool {
    let mut j = 0;
    for x in a {
        while j < b.len() && b[j] < *x {
            j += 1;
        }
        if j == b.len() || b[j] != *x {
            return false;
        }
        j += 1;
    }
    true
}

/// Keep only the inclusion-minimal sets.
pub(crate) fn minimize(mut sets: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
    sets.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    sets.dedup();
    let mut out: Vec<Vec<usize>> = Vec::new();
    for s in sets {
        if !out.iter().any(|m| is_subset_sorted(m, &s)) {
            out.push(s);
        }
    }
    out
}

impl fmt::Display for PositiveBool {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PositiveBool::True => write!(f, "tt"),
            PositiveBool::False => write!(f, "ff"),
            PositiveBool::Var(q) => write!(f, "q{q}"),
            PositiveBool::And(xs) | PositiveBool::Or(xs) => {
                let op = if matches!(self, PositiveBool::And(_)) { " & " } else { " | " };
                let parts: Vec<String> = xs.iter().map(|x| x.to_string()).collect();
                write!(f, "({})", parts.join(op))
            }
        }
    }
}

/// Alternating parity automaton over the full alphabet `2^P`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Apa {
    pub alphabet: Alphabet,
    pub initial: usize,
    /// `delta[q][letter]`.
    pub delta: Vec<Vec<PositiveBool>>,
    pub color: Vec<u32>,
}

impl Apa {
    pub fn num_states(&self) -> usize {
        self.color.len()
    }

    /// One state whose transitions are all `tt` (or all `ff`).
    pub fn constant(alphabet: &Alphabet, accept: bool) -> Apa {
        let f = if accept { PositiveBool::True } else { PositiveBool::False };
        Apa {
            alphabet: alphabet.clone(),
            initial: 0,
            delta: vec![vec![f; alphabet.num_letters()]],
            color: vec![0],
        }
    }

    pub fn successors(&self) -> Vec<Vec<usize>> {
        self.delta
            .iter()
            .map(|row| {
                let mut vs = BTreeSet::new();
                for f in row {
                    f.vars(&mut vs);
                }
                vs.into_iter().collect()
            })
            .collect()
    }

    /// Every strongly connected component has colors of a single parity.
    pub fn is_weak(&self) -> bool {
        let succ = self.successors();
        let comp = crate::graph::scc(&succ);
        let mut parity: HashMap<usize, u32> = HashMap::new();
        for q in 0..self.num_states() {
            let p = self.color[q] % 2;
            if *parity.entry(comp[q]).or_insert(p) != p {
                // A singleton without a self-loop never repeats.
                let members = comp.iter().filter(|&&c| c == comp[q]).count();
                if members > 1 || succ[q].contains(&q) {
                    return false;
                }
            }
        }
        true
    }

    /// Copy restricted to the states reachable from the initial state.
    pub fn trimmed(&self) -> Apa {
        let succ = self.successors();
        let reach = crate::graph::reachable(&succ, [self.initial]);
        let mut map = vec![usize::MAX; self.num_states()];
        let mut order = Vec::new();
        for q in 0..self.num_states() {
            if reach[q] {
                map[q] = order.len();
                order.push(q);
            }
        }
        Apa {
            alphabet: self.alphabet.clone(),
            initial: map[self.initial],
            delta: order
                .iter()
                .map(|&q| self.delta[q].iter().map(|f| f.map_vars(&mut |v| map[v])).collect())
                .collect(),
            color: order.iter().map(|&q| self.color[q]).collect(),
        }
    }
}

/// Dualize every transition formula and shift colors by one.
pub fn complement(a: &Apa) -> Apa {
    Apa {
        alphabet: a.alphabet.clone(),
        initial: a.initial,
        delta: a
            .delta
            .iter()
            .map(|row| row.iter().map(|f| f.dual_with(&mut |q| q)).collect())
            .collect(),
        color: a.color.iter().map(|c| c + 1).collect(),
    }
}

fn combine(automata: &[Apa], conjunctive: bool) -> Result<Apa, ApaError> {
    let first = automata.first().ok_or(ApaError::EmptyList)?;
    for a in automata {
        if a.alphabet != first.alphabet {
            return Err(ApaError::AlphabetMismatch(first.alphabet.clone(), a.alphabet.clone()));
        }
    }
    let letters = first.alphabet.num_letters();
    let mut delta: Vec<Vec<PositiveBool>> = vec![Vec::new()];
    let mut color = vec![0];
    let mut inits = Vec::new();
    for a in automata {
        let off = delta.len();
        inits.push(a.initial + off);
        for row in &a.delta {
            delta.push(row.iter().map(|f| f.map_vars(&mut |q| q + off)).collect());
        }
        color.extend(a.color.iter().copied());
    }
    delta[0] = (0..letters)
        .map(|m| {
            let parts: Vec<PositiveBool> = inits.iter().map(|&q| delta[q][m].clone()).collect();
            if conjunctive {
                PositiveBool::and(parts)
            } else {
                PositiveBool::or(parts)
            }
        })
        .collect();
    Ok(Apa {
        alphabet: first.alphabet.clone(),
        initial: 0,
        delta,
        color,
    })
}

/// Disjoint union with one fresh initial state.
pub fn union(automata: &[Apa]) -> Result<Apa, ApaError> {
    combine(automata, false)
}

/// Disjoint union with one fresh conjunctive initial state.
pub fn intersection(automata: &[Apa]) -> Result<Apa, ApaError> {
    combine(automata, true)
}

/// Membership of a lasso, decided by solving the acceptance game between
/// the automaton (resolving disjunctions) and the pathfinder (resolving
/// conjunctions) over state/position pairs.
pub fn accepts_lasso(a: &Apa, w: &LassoTrace) -> bool {
    let masks = w.masks(&a.alphabet);
    let mut game = ParityGame::default();
    let top = game.add_vertex(Player::Even, 0);
    game.add_edge(top, top);
    let bottom = game.add_vertex(Player::Even, 1);
    game.add_edge(bottom, bottom);

    // State vertices carry the state color and lead to the root of the
    // transition formula; formula vertices are colored 0.
    let mut index: HashMap<(usize, usize), usize> = HashMap::new();
    let start = game.add_vertex(Player::Even, a.color[a.initial]);
    index.insert((a.initial, 0), start);
    let mut work: Vec<(usize, usize)> = vec![(a.initial, 0)];
    while let Some((q, c)) = work.pop() {
        let v = index[&(q, c)];
        let next = w.successor(c);
        let mut pending: Vec<(usize, &PositiveBool)> = vec![(v, &a.delta[q][masks[c] as usize])];
        while let Some((from, g)) = pending.pop() {
            let to = match g {
                PositiveBool::True => top,
                PositiveBool::False => bottom,
                PositiveBool::Var(s) => *index.entry((*s, next)).or_insert_with(|| {
                    work.push((*s, next));
                    game.add_vertex(Player::Even, a.color[*s])
                }),
                PositiveBool::And(xs) | PositiveBool::Or(xs) => {
                    let owner = if matches!(g, PositiveBool::And(_)) { Player::Odd } else { Player::Even };
                    let m = game.add_vertex(owner, 0);
                    pending.extend(xs.iter().map(|x| (m, x)));
                    m
                }
            };
            game.add_edge(from, to);
        }
    }
    let sol = solve_parity(&game).expect("no dead ends");
    sol.winner[start] == Player::Even
}

// ---------------------------------------------------------------------------
// rLDL translation

/// A sub-automaton: a constant or the initial state of the automaton.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Handle {
    True,
    False,
    State(usize),
}

struct GuardInfo {
    nfa: GuardNfa,
    closures: Vec<Vec<(usize, Vec<TestSet>)>>,
    /// Initial state followed by all letter-edge targets.
    entry_points: Vec<usize>,
}

enum Expr {
    H(Handle),
    And(Vec<Expr>),
    Or(Vec<Expr>),
}

/// Shared construction of `A_{φ,β}` for all subformulas and thresholds.
pub struct RldlBuilder {
    alphabet: Alphabet,
    delta: Vec<Vec<PositiveBool>>,
    color: Vec<u32>,
    formulas: HashMap<(Formula, TruthValue4), Handle>,
    duals: HashMap<usize, usize>,
    guards: HashMap<Guard, Rc<GuardInfo>>,
    diamonds: HashMap<(Guard, Handle, usize), Rc<Vec<usize>>>,
    boxes: HashMap<(Guard, Formula, usize), Handle>,
    infinite: HashMap<(Guard, Handle, usize), Handle>,
}

impl RldlBuilder {
    pub fn new(alphabet: &Alphabet) -> Self {
        RldlBuilder {
            alphabet: alphabet.clone(),
            delta: Vec::new(),
            color: Vec::new(),
            formulas: HashMap::new(),
            duals: HashMap::new(),
            guards: HashMap::new(),
            diamonds: HashMap::new(),
            boxes: HashMap::new(),
            infinite: HashMap::new(),
        }
    }

    pub fn num_states(&self) -> usize {
        self.color.len()
    }

    fn letters(&self) -> usize {
        self.alphabet.num_letters()
    }

    fn alloc(&mut self, color: u32) -> usize {
        self.delta.push(Vec::new());
        self.color.push(color);
        self.color.len() - 1
    }

    fn spawn(&self, h: Handle, a: usize) -> PositiveBool {
        match h {
            Handle::True => PositiveBool::True,
            Handle::False => PositiveBool::False,
            Handle::State(q) => self.delta[q][a].clone(),
        }
    }

    fn dual_state(&mut self, q: usize) -> usize {
        if let Some(&d) = self.duals.get(&q) {
            return d;
        }
        let d = self.alloc(self.color[q] + 1);
        self.duals.insert(q, d);
        self.duals.insert(d, q);
        let mut work = vec![(q, d)];
        while let Some((x, dx)) = work.pop() {
            let row: Vec<PositiveBool> = self.delta[x].clone();
            let mut out = Vec::with_capacity(row.len());
            for f in &row {
                let g = f.dual_with(&mut |v| {
                    if let Some(&dv) = self.duals.get(&v) {
                        return dv;
                    }
                    self.delta.push(Vec::new());
                    self.color.push(self.color[v] + 1);
                    let dv = self.color.len() - 1;
                    self.duals.insert(v, dv);
                    self.duals.insert(dv, v);
                    work.push((v, dv));
                    dv
                });
                out.push(g);
            }
            self.delta[dx] = out;
        }
        d
    }

    pub fn dual(&mut self, h: Handle) -> Handle {
        match h {
            Handle::True => Handle::False,
            Handle::False => Handle::True,
            Handle::State(q) => Handle::State(self.dual_state(q)),
        }
    }

    fn eval_expr(&self, e: &Expr, a: usize) -> PositiveBool {
        match e {
            Expr::H(h) => self.spawn(*h, a),
            Expr::And(xs) => PositiveBool::and(xs.iter().map(|x| self.eval_expr(x, a)).collect()),
            Expr::Or(xs) => PositiveBool::or(xs.iter().map(|x| self.eval_expr(x, a)).collect()),
        }
    }

    /// A fresh transient state starting a Boolean combination of
    /// sub-automata.
    fn combine(&mut self, e: Expr) -> Handle {
        let row: Vec<PositiveBool> = (0..self.letters()).map(|a| self.eval_expr(&e, a)).collect();
        if row.iter().all(|f| *f == PositiveBool::True) {
            return Handle::True;
        }
        if row.iter().all(|f| *f == PositiveBool::False) {
            return Handle::False;
        }
        let q = self.alloc(0);
        self.delta[q] = row;
        Handle::State(q)
    }

    fn guard_info(&mut self, r: &Guard) -> Rc<GuardInfo> {
        if let Some(g) = self.guards.get(r) {
            return g.clone();
        }
        let nfa = thompson(r);
        let closures = (0..nfa.num_states()).map(|q| nfa.simple_eps_closure(q)).collect();
        let mut entry_points = vec![nfa.initial];
        for edges in &nfa.letter_edges {
            for (_, t) in edges {
                if !entry_points.contains(t) {
                    entry_points.push(*t);
                }
            }
        }
        let info = Rc::new(GuardInfo {
            nfa,
            closures,
            entry_points,
        });
        self.guards.insert(r.clone(), info.clone());
        info
    }

    fn test_handles(&mut self, info: &GuardInfo, level: usize) -> Vec<Handle> {
        let beta = TruthValue4::degree(level);
        info.nfa
            .tests
            .clone()
            .iter()
            .map(|t| self.formula(t, beta))
            .collect()
    }

    fn tests_hold(&self, tests: &[Handle], mask: TestSet, a: usize) -> Vec<PositiveBool> {
        (0..tests.len())
            .filter(|t| mask & (1 << t) != 0)
            .map(|t| self.spawn(tests[t], a))
            .collect()
    }

    /// Guard simulation that must reach a match where `end` accepts; one
    /// odd-colored state per entry point of the guard automaton. Returns the
    /// states indexed like `entry_points`.
    fn diamond_block(&mut self, r: &Guard, end: Handle, level: usize) -> Rc<Vec<usize>> {
        let key = (r.clone(), end, level);
        if let Some(b) = self.diamonds.get(&key) {
            return b.clone();
        }
        let info = self.guard_info(r);
        let tests = self.test_handles(&info, level);
        let ids: Vec<usize> = info.entry_points.iter().map(|_| self.alloc(1)).collect();
        let id_of = |g: usize| ids[info.entry_points.iter().position(|&x| x == g).expect("entry")];
        for (k, &g) in info.entry_points.iter().enumerate() {
            let row: Vec<PositiveBool> = (0..self.letters())
                .map(|a| {
                    let mut disj = Vec::new();
                    for (g2, masks) in &info.closures[g] {
                        let mut step: Vec<PositiveBool> = info.nfa.letter_edges[*g2]
                            .iter()
                            .filter(|(phi, _)| self.alphabet.holds(phi, a as u32))
                            .map(|(_, h)| PositiveBool::Var(id_of(*h)))
                            .collect();
                        if info.nfa.finals[*g2] {
                            step.push(self.spawn(end, a));
                        }
                        let step = PositiveBool::or(step);
                        for &m in masks {
                            let mut conj = self.tests_hold(&tests, m, a);
                            conj.push(step.clone());
                            disj.push(PositiveBool::and(conj));
                        }
                    }
                    PositiveBool::or(disj)
                })
                .collect();
            self.delta[ids[k]] = row;
        }
        let ids = Rc::new(ids);
        self.diamonds.insert(key, ids.clone());
        ids
    }

    fn diamond(&mut self, r: &Guard, end: Handle, level: usize) -> Handle {
        Handle::State(self.diamond_block(r, end, level)[0])
    }

    /// Every match (tests at `level`) satisfies the body at `level`; guard
    /// states are even so the simulation may run forever.
    fn dual_box(&mut self, r: &Guard, body: &Formula, level: usize) -> Handle {
        let key = (r.clone(), body.clone(), level);
        if let Some(h) = self.boxes.get(&key) {
            return *h;
        }
        let info = self.guard_info(r);
        let tests = self.test_handles(&info, level);
        let failing: Vec<Handle> = tests.iter().map(|&t| self.dual(t)).collect();
        let end = self.formula(body, TruthValue4::degree(level));
        let ids: Vec<usize> = info.entry_points.iter().map(|_| self.alloc(0)).collect();
        let id_of = |g: usize| ids[info.entry_points.iter().position(|&x| x == g).expect("entry")];
        for (k, &g) in info.entry_points.iter().enumerate() {
            let row: Vec<PositiveBool> = (0..self.letters())
                .map(|a| {
                    let mut conj = Vec::new();
                    for (g2, masks) in &info.closures[g] {
                        let mut cont: Vec<PositiveBool> = info.nfa.letter_edges[*g2]
                            .iter()
                            .filter(|(phi, _)| self.alphabet.holds(phi, a as u32))
                            .map(|(_, h)| PositiveBool::Var(id_of(*h)))
                            .collect();
                        if info.nfa.finals[*g2] {
                            cont.push(self.spawn(end, a));
                        }
                        let cont = PositiveBool::and(cont);
                        for &m in masks {
                            let mut disj = self.tests_hold(&failing, m, a);
                            disj.push(cont.clone());
                            conj.push(PositiveBool::or(disj));
                        }
                    }
                    PositiveBool::and(conj)
                })
                .collect();
            self.delta[ids[k]] = row;
        }
        let h = Handle::State(ids[0]);
        self.boxes.insert(key, h);
        h
    }

    /// Infinitely many matches at which `end` accepts. By König's lemma
    /// this holds iff some infinite guard run has, at every step, a
    /// continuation reaching such a match; the run is followed by even
    /// states and each step launches the odd diamond simulation.
    fn infinitely_many(&mut self, r: &Guard, end: Handle, level: usize) -> Handle {
        let key = (r.clone(), end, level);
        if let Some(h) = self.infinite.get(&key) {
            return *h;
        }
        let info = self.guard_info(r);
        let tests = self.test_handles(&info, level);
        let diamond = self.diamond_block(r, end, level);
        let ids: Vec<usize> = info.entry_points.iter().map(|_| self.alloc(0)).collect();
        let id_of = |g: usize| ids[info.entry_points.iter().position(|&x| x == g).expect("entry")];
        for (k, &g) in info.entry_points.iter().enumerate() {
            let row: Vec<PositiveBool> = (0..self.letters())
                .map(|a| {
                    let mut disj = Vec::new();
                    for (g2, masks) in &info.closures[g] {
                        let step = PositiveBool::or(
                            info.nfa.letter_edges[*g2]
                                .iter()
                                .filter(|(phi, _)| self.alphabet.holds(phi, a as u32))
                                .map(|(_, h)| PositiveBool::Var(id_of(*h)))
                                .collect(),
                        );
                        for &m in masks {
                            let mut conj = self.tests_hold(&tests, m, a);
                            conj.push(step.clone());
                            disj.push(PositiveBool::and(conj));
                        }
                    }
                    PositiveBool::and(vec![self.delta[diamond[k]][a].clone(), PositiveBool::or(disj)])
                })
                .collect();
            self.delta[ids[k]] = row;
        }
        let h = Handle::State(ids[0]);
        self.infinite.insert(key, h);
        h
    }

    /// Raw box bit `level` (before the max-lift) equals one.
    fn box_bit(&mut self, r: &Guard, body: &Formula, level: usize) -> Handle {
        let at = TruthValue4::degree(level);
        match level {
            1 => self.dual_box(r, body, 1),
            2 => {
                let sat = self.formula(body, at);
                let unsat = self.dual(sat);
                let inf_unsat = self.infinitely_many(r, unsat, 2);
                let fin_unsat = self.dual(inf_unsat);
                let inf = self.infinitely_many(r, Handle::True, 2);
                let all = self.dual_box(r, body, 2);
                self.combine(Expr::And(vec![
                    Expr::H(fin_unsat),
                    Expr::Or(vec![Expr::H(inf), Expr::H(all)]),
                ]))
            }
            3 => {
                let sat = self.formula(body, at);
                let inf_sat = self.infinitely_many(r, sat, 3);
                let inf = self.infinitely_many(r, Handle::True, 3);
                let fin = self.dual(inf);
                let some = self.diamond(r, sat, 3);
                let any = self.diamond(r, Handle::True, 3);
                let none = self.dual(any);
                self.combine(Expr::Or(vec![
                    Expr::H(inf_sat),
                    Expr::And(vec![Expr::H(fin), Expr::Or(vec![Expr::H(some), Expr::H(none)])]),
                ]))
            }
            _ => {
                let sat = self.formula(body, at);
                let some = self.diamond(r, sat, 4);
                let any = self.diamond(r, Handle::True, 4);
                let none = self.dual(any);
                self.combine(Expr::Or(vec![Expr::H(some), Expr::H(none)]))
            }
        }
    }

    /// Sub-automaton for `{w | V(w, phi) ⪰ beta}`. The formula must be in
    /// rLDL and use only propositions of the builder's alphabet.
    pub fn formula(&mut self, phi: &Formula, beta: TruthValue4) -> Handle {
        if beta == TruthValue4::F0000 {
            return Handle::True;
        }
        let key = (phi.clone(), beta);
        if let Some(h) = self.formulas.get(&key) {
            return *h;
        }
        let level = beta.bit_index().expect("nonzero threshold");
        let h = match phi {
            Formula::True => Handle::True,
            Formula::False => Handle::False,
            Formula::Atom(p) | Formula::NegAtom(p) => {
                let positive = matches!(phi, Formula::Atom(_));
                let q = self.alloc(0);
                self.delta[q] = self
                    .alphabet
                    .letters()
                    .map(|m| {
                        if self.alphabet.has(m, p) == positive {
                            PositiveBool::True
                        } else {
                            PositiveBool::False
                        }
                    })
                    .collect();
                Handle::State(q)
            }
            Formula::Not(a) => {
                let top = self.formula(a, TruthValue4::F1111);
                self.dual(top)
            }
            Formula::And(a, b) => {
                let ha = self.formula(a, beta);
                let hb = self.formula(b, beta);
                self.combine(Expr::And(vec![Expr::H(ha), Expr::H(hb)]))
            }
            Formula::Or(a, b) => {
                let ha = self.formula(a, beta);
                let hb = self.formula(b, beta);
                self.combine(Expr::Or(vec![Expr::H(ha), Expr::H(hb)]))
            }
            Formula::Implies(a, b) => {
                // The value is the consequent's unless the antecedent is
                // below the consequent, in which case it is 1111.
                let direct = self.formula(b, beta);
                let mut below = Vec::new();
                for gamma in TruthValue4::DEGREES {
                    let ant = self.formula(a, gamma);
                    let not_ant = self.dual(ant);
                    let cons = self.formula(b, gamma);
                    below.push(Expr::Or(vec![Expr::H(not_ant), Expr::H(cons)]));
                }
                self.combine(Expr::Or(vec![Expr::H(direct), Expr::And(below)]))
            }
            Formula::Diamond(r, a) => {
                let end = self.formula(a, beta);
                self.diamond(r, end, level)
            }
            Formula::Box(r, a) => {
                let bits: Vec<Expr> = (1..=level).map(|l| Expr::H(self.box_bit(r, a, l))).collect();
                self.combine(Expr::Or(bits))
            }
            other => panic!("`{other}` is not an rLDL formula"),
        };
        self.formulas.insert(key, h);
        h
    }

    /// The automaton started in `h`, restricted to reachable states.
    pub fn extract(&self, h: Handle) -> Apa {
        match h {
            Handle::True => Apa::constant(&self.alphabet, true),
            Handle::False => Apa::constant(&self.alphabet, false),
            Handle::State(q) => Apa {
                alphabet: self.alphabet.clone(),
                initial: q,
                delta: self.delta.clone(),
                color: self.color.clone(),
            }
            .trimmed(),
        }
    }
}

/// `A_{φ,β}` over the propositions of `phi`.
pub fn from_rldl(phi: &Formula, beta: TruthValue4) -> Result<Apa, ApaError> {
    from_rldl_over(phi, beta, &Alphabet::new(phi.props()))
}

/// `A_{φ,β}` over a given alphabet containing the propositions of `phi`.
pub fn from_rldl_over(phi: &Formula, beta: TruthValue4, alphabet: &Alphabet) -> Result<Apa, ApaError> {
    require_logic(phi, LogicId::Rldl)?;
    if !alphabet.contains_all(&phi.props()) {
        return Err(ApaError::MissingProps(alphabet.clone()));
    }
    let mut b = RldlBuilder::new(alphabet);
    let h = b.formula(phi, beta);
    Ok(b.extract(h))
}

/// The size constant: `from_rldl` yields at most this many states per unit
/// of formula size. The largest ratio seen on random formulas up to size 20
/// is below 5.5.
pub const STATES_PER_SIZE: usize = 8;
