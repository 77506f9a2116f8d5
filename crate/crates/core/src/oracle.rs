//! Reference evaluation of every supported logic on lasso traces.
//!
//! Each subformula is evaluated once into a vector indexed by canonical
//! position. Guard match sets are computed by structural recursion on the
//! guard over truncated offset bitsets, one row per canonical start. With
//! `m` the Thompson-automaton bound of the guard and `N` the number of
//! canonical positions, a match at offset `j >= m*N` can be pumped in both
//! directions without changing the canonical end position. Hence offsets
//! below `T = m*N` give all matches of finite classes, and offsets in
//! `[T, 2T)` contain a representative of every infinitely matched class.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::lasso::LassoTrace;
use crate::syntax::{require_logic, Formula, Guard, LogicId, PropFormula, SyntaxError};
use crate::truth4::TruthValue4;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("bit index {0} out of range 1..=4")]
    BitIndex(usize),
}

/// Match set of a guard from position 0, summarized up to the horizon.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MatchSetSummary {
    /// All matches below `horizon`.
    pub finite_matches: BTreeSet<usize>,
    /// Canonical end positions hit by infinitely many matches.
    pub infinite_classes: BTreeSet<usize>,
    /// Matches at or above this offset belong to infinite classes.
    pub threshold: usize,
    pub horizon: usize,
}

impl MatchSetSummary {
    pub fn is_empty(&self) -> bool {
        self.finite_matches.is_empty()
    }

    pub fn is_infinite(&self) -> bool {
        !self.infinite_classes.is_empty()
    }
}

// ---------------------------------------------------------------------------
// offset bitsets

#[derive(Clone, PartialEq, Eq, Debug)]
struct Row {
    words: Vec<u64>,
    len: usize,
}

impl Row {
    fn new(len: usize) -> Self {
        Row {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    fn set(&mut self, j: usize) {
        if j < self.len {
            self.words[j / 64] |= 1 << (j % 64);
        }
    }

    fn get(&self, j: usize) -> bool {
        j < self.len && self.words[j / 64] & (1 << (j % 64)) != 0
    }

    fn or_with(&mut self, other: &Row) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= *b;
        }
    }

    /// `self |= other << shift`, truncated to the row length.
    fn or_shifted(&mut self, other: &Row, shift: usize) {
        let ws = shift / 64;
        let bs = shift % 64;
        let n = self.words.len();
        for i in (ws..n).rev() {
            let src = i - ws;
            let mut v = other.words[src] << bs;
            if bs != 0 && src > 0 {
                v |= other.words[src - 1] >> (64 - bs);
            }
            self.words[i] |= v;
        }
        self.mask_tail();
    }

    fn mask_tail(&mut self) {
        let extra = self.words.len() * 64 - self.len;
        if extra > 0 {
            let last = self.words.len() - 1;
            self.words[last] &= u64::MAX >> extra;
        }
    }

    fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut bits = w;
            std::iter::from_fn(move || {
                if bits == 0 {
                    None
                } else {
                    let t = bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    Some(wi * 64 + t)
                }
            })
        })
    }
}

/// Guard with tests replaced by their truth vectors.
enum Compiled {
    Prop(Vec<bool>),
    Test(Vec<bool>),
    Alt(Box<Compiled>, Box<Compiled>),
    Concat(Box<Compiled>, Box<Compiled>),
    Star(Box<Compiled>),
}

/// Upper bound on the states of the Thompson automaton of a guard.
pub fn thompson_bound(r: &Guard) -> usize {
    2 * r.length()
}

// ---------------------------------------------------------------------------
// evaluator

/// Evaluator over one lasso with a fixed prompt bound.
pub struct Oracle<'a> {
    w: &'a LassoTrace,
    n: usize,
    u: usize,
    k: usize,
    horizon_scale: usize,
}

impl<'a> Oracle<'a> {
    pub fn new(w: &'a LassoTrace, k: usize) -> Self {
        Oracle {
            w,
            n: w.positions(),
            u: w.prefix().len(),
            k,
            horizon_scale: 2,
        }
    }

    /// Use horizon `scale * T` instead of `2 * T`; results must not change
    /// for any `scale >= 2`.
    pub fn with_horizon_scale(mut self, scale: usize) -> Self {
        self.horizon_scale = scale.max(2);
        self
    }

    fn canon(&self, c: usize, j: usize) -> usize {
        self.w.canonical_index(c + j)
    }

    fn reachable(&self, c: usize) -> std::ops::Range<usize> {
        if c < self.u {
            c..self.n
        } else {
            self.u..self.n
        }
    }

    fn loop_positions(&self) -> std::ops::Range<usize> {
        self.u..self.n
    }

    fn threshold(&self, r: &Guard) -> usize {
        thompson_bound(r) * self.n
    }

    fn prop_vector(&self, p: &PropFormula) -> Vec<bool> {
        (0..self.n)
            .map(|c| {
                let l = self.w.letter_at(c);
                p.holds(&|a| l.contains(a))
            })
            .collect()
    }

    fn compile(&self, r: &Guard, test: &mut dyn FnMut(&Formula) -> Vec<bool>) -> Compiled {
        match r {
            Guard::Prop(p) => Compiled::Prop(self.prop_vector(p)),
            Guard::Test(f) => Compiled::Test(test(f)),
            Guard::Alt(a, b) => {
                Compiled::Alt(Box::new(self.compile(a, test)), Box::new(self.compile(b, test)))
            }
            Guard::Concat(a, b) => {
                Compiled::Concat(Box::new(self.compile(a, test)), Box::new(self.compile(b, test)))
            }
            Guard::Star(a) => Compiled::Star(Box::new(self.compile(a, test))),
        }
    }

    fn rows(&self, g: &Compiled, h: usize) -> Vec<Row> {
        match g {
            Compiled::Prop(v) => (0..self.n)
                .map(|c| {
                    let mut r = Row::new(h);
                    if v[c] {
                        r.set(1);
                    }
                    r
                })
                .collect(),
            Compiled::Test(v) => (0..self.n)
                .map(|c| {
                    let mut r = Row::new(h);
                    if v[c] {
                        r.set(0);
                    }
                    r
                })
                .collect(),
            Compiled::Alt(a, b) => {
                let mut ra = self.rows(a, h);
                let rb = self.rows(b, h);
                for (x, y) in ra.iter_mut().zip(&rb) {
                    x.or_with(y);
                }
                ra
            }
            Compiled::Concat(a, b) => {
                let ra = self.rows(a, h);
                let rb = self.rows(b, h);
                (0..self.n)
                    .map(|c| {
                        let mut out = Row::new(h);
                        for j0 in ra[c].ones() {
                            out.or_shifted(&rb[self.canon(c, j0)], j0);
                        }
                        out
                    })
                    .collect()
            }
            Compiled::Star(a) => {
                // Zero-length iterations add nothing, so offsets can be
                // filled in increasing order.
                let ra = self.rows(a, h);
                let steps: Vec<Vec<usize>> = ra
                    .iter()
                    .map(|r| r.ones().filter(|&j| j > 0).collect())
                    .collect();
                let mut out: Vec<Row> = (0..self.n).map(|_| Row::new(h)).collect();
                for row in out.iter_mut() {
                    row.set(0);
                }
                for j in 1..h {
                    for c in 0..self.n {
                        let hit = steps[c]
                            .iter()
                            .take_while(|&&j1| j1 <= j)
                            .any(|&j1| out[self.canon(c, j1)].get(j - j1));
                        if hit {
                            out[c].set(j);
                        }
                    }
                }
                out
            }
        }
    }

    fn summaries(&self, r: &Guard, test: &mut dyn FnMut(&Formula) -> Vec<bool>) -> Vec<Summary> {
        let t = self.threshold(r);
        let h = self.horizon_scale * t;
        let g = self.compile(r, test);
        self.rows(&g, h)
            .into_iter()
            .enumerate()
            .map(|(c, row)| {
                let matches: Vec<usize> = row.ones().collect();
                let infinite: BTreeSet<usize> = matches
                    .iter()
                    .filter(|&&j| j >= t)
                    .map(|&j| self.canon(c, j))
                    .collect();
                let ends: Vec<usize> = matches.iter().map(|&j| self.canon(c, j)).collect();
                Summary {
                    matches,
                    ends,
                    infinite,
                    threshold: t,
                    horizon: h,
                }
            })
            .collect()
    }

    // -- robust ------------------------------------------------------------

    /// Robust values of `phi` at every canonical position.
    pub fn robust(&self, phi: &Formula) -> Vec<TruthValue4> {
        type T = TruthValue4;
        let n = self.n;
        match phi {
            Formula::True => vec![T::F1111; n],
            Formula::False => vec![T::F0000; n],
            Formula::Atom(p) => (0..n)
                .map(|c| T::from_bool(self.w.letter_at(c).contains(p)))
                .collect(),
            Formula::NegAtom(p) => (0..n)
                .map(|c| T::from_bool(!self.w.letter_at(c).contains(p)))
                .collect(),
            Formula::Not(a) => self.robust(a).into_iter().map(T::negate).collect(),
            Formula::And(a, b) => zip_with(self.robust(a), self.robust(b), T::meet),
            Formula::Or(a, b) => zip_with(self.robust(a), self.robust(b), T::join),
            Formula::Implies(a, b) => zip_with(self.robust(a), self.robust(b), T::imply),
            Formula::Eventually(a) => {
                let v = self.robust(a);
                (0..n)
                    .map(|c| T::join_all(self.reachable(c).map(|d| v[d])))
                    .collect()
            }
            Formula::Always(a) => {
                let v = self.robust(a);
                let lp = self.loop_positions();
                let b2 = lp.clone().all(|d| v[d].bit(2));
                let b3 = lp.clone().any(|d| v[d].bit(3));
                (0..n)
                    .map(|c| {
                        let b1 = self.reachable(c).all(|d| v[d].bit(1));
                        let b4 = self.reachable(c).any(|d| v[d].bit(4));
                        T::from_bits(b1 as u8, b2 as u8, b3 as u8, b4 as u8)
                            .expect("always yields monotone bits")
                    })
                    .collect()
            }
            Formula::PromptEventually(a) => {
                let v = self.robust(a);
                (0..n)
                    .map(|c| T::join_all((0..=self.k).map(|j| v[self.canon(c, j)])))
                    .collect()
            }
            Formula::Next(_) | Formula::Until(..) | Formula::Release(..) => {
                panic!("next/until/release have no robust semantics")
            }
            Formula::Diamond(r, a) => self.robust_diamond(r, a, None),
            Formula::PromptDiamond(r, a) => self.robust_diamond(r, a, Some(self.k)),
            Formula::Box(r, a) => {
                let raw = self.robust_box_raw(r, a);
                raw.into_iter().map(T::from_bits_max_lift).collect()
            }
        }
    }

    fn robust_summaries(&self, r: &Guard) -> [Vec<Summary>; 4] {
        let mut cache: Vec<(Formula, Vec<TruthValue4>)> = Vec::new();
        let mut values = |f: &Formula| -> Vec<TruthValue4> {
            if let Some((_, v)) = cache.iter().find(|(g, _)| g == f) {
                return v.clone();
            }
            let v = self.robust(f);
            cache.push((f.clone(), v.clone()));
            v
        };
        let mut by_bit = |i: usize| {
            self.summaries(r, &mut |f| values(f).iter().map(|t| t.bit(i)).collect())
        };
        [by_bit(1), by_bit(2), by_bit(3), by_bit(4)]
    }

    fn robust_diamond(&self, r: &Guard, a: &Formula, bound: Option<usize>) -> Vec<TruthValue4> {
        let v = self.robust(a);
        let sums = self.robust_summaries(r);
        (0..self.n)
            .map(|c| {
                let mut bits = [false; 4];
                for (i, bit) in bits.iter_mut().enumerate() {
                    let s = &sums[i][c];
                    *bit = s
                        .matches
                        .iter()
                        .zip(&s.ends)
                        .filter(|(j, _)| bound.is_none_or(|k| **j <= k))
                        .any(|(_, e)| v[*e].bit(i + 1));
                }
                TruthValue4::from_bits_max_lift(bits)
            })
            .collect()
    }

    /// The four box bits before the max-lift, per canonical position.
    pub fn robust_box_raw(&self, r: &Guard, a: &Formula) -> Vec<[bool; 4]> {
        let v = self.robust(a);
        let sums = self.robust_summaries(r);
        (0..self.n)
            .map(|c| {
                let bit_at = |i: usize, e: usize| v[e].bit(i);
                let s1 = &sums[0][c];
                let b1 = s1.ends.iter().all(|&e| bit_at(1, e));
                let s2 = &sums[1][c];
                let b2 = if !s2.infinite.is_empty() {
                    s2.infinite.iter().all(|&e| bit_at(2, e))
                } else {
                    s2.ends.iter().all(|&e| bit_at(2, e))
                };
                let s3 = &sums[2][c];
                let b3 = if !s3.infinite.is_empty() {
                    s3.infinite.iter().any(|&e| bit_at(3, e))
                } else if !s3.ends.is_empty() {
                    s3.ends.iter().any(|&e| bit_at(3, e))
                } else {
                    true
                };
                let s4 = &sums[3][c];
                let b4 = s4.ends.is_empty() || s4.ends.iter().any(|&e| bit_at(4, e));
                [b1, b2, b3, b4]
            })
            .collect()
    }

    pub fn robust_match_set(&self, r: &Guard, i: usize) -> MatchSetSummary {
        let sums = self.robust_summaries(r);
        sums[i - 1][0].public()
    }

    // -- classical ---------------------------------------------------------

    /// Classical values of `phi` at every canonical position.
    pub fn classical(&self, phi: &Formula) -> Vec<bool> {
        let n = self.n;
        match phi {
            Formula::True => vec![true; n],
            Formula::False => vec![false; n],
            Formula::Atom(p) => (0..n).map(|c| self.w.letter_at(c).contains(p)).collect(),
            Formula::NegAtom(p) => (0..n).map(|c| !self.w.letter_at(c).contains(p)).collect(),
            Formula::Not(a) => self.classical(a).into_iter().map(|b| !b).collect(),
            Formula::And(a, b) => zip_with(self.classical(a), self.classical(b), |x, y| x && y),
            Formula::Or(a, b) => zip_with(self.classical(a), self.classical(b), |x, y| x || y),
            Formula::Implies(a, b) => {
                zip_with(self.classical(a), self.classical(b), |x, y| !x || y)
            }
            Formula::Next(a) => {
                let v = self.classical(a);
                (0..n).map(|c| v[self.w.successor(c)]).collect()
            }
            Formula::Until(a, b) => {
                let va = self.classical(a);
                let vb = self.classical(b);
                let mut u = vec![false; n];
                loop {
                    let next: Vec<bool> = (0..n)
                        .map(|c| vb[c] || (va[c] && u[self.w.successor(c)]))
                        .collect();
                    if next == u {
                        return u;
                    }
                    u = next;
                }
            }
            Formula::Release(a, b) => {
                let va = self.classical(a);
                let vb = self.classical(b);
                let mut r = vec![true; n];
                loop {
                    let next: Vec<bool> = (0..n)
                        .map(|c| vb[c] && (va[c] || r[self.w.successor(c)]))
                        .collect();
                    if next == r {
                        return r;
                    }
                    r = next;
                }
            }
            Formula::Eventually(a) => {
                let v = self.classical(a);
                (0..n).map(|c| self.reachable(c).any(|d| v[d])).collect()
            }
            Formula::Always(a) => {
                let v = self.classical(a);
                (0..n).map(|c| self.reachable(c).all(|d| v[d])).collect()
            }
            Formula::PromptEventually(a) => {
                let v = self.classical(a);
                (0..n)
                    .map(|c| (0..=self.k).any(|j| v[self.canon(c, j)]))
                    .collect()
            }
            Formula::Diamond(r, a) | Formula::PromptDiamond(r, a) => {
                let bound = matches!(phi, Formula::PromptDiamond(..)).then_some(self.k);
                let v = self.classical(a);
                let sums = self.summaries(r, &mut |f| self.classical(f));
                sums.iter()
                    .map(|s| {
                        s.matches
                            .iter()
                            .zip(&s.ends)
                            .filter(|(j, _)| bound.is_none_or(|k| **j <= k))
                            .any(|(_, e)| v[*e])
                    })
                    .collect()
            }
            Formula::Box(r, a) => {
                let v = self.classical(a);
                let sums = self.summaries(r, &mut |f| self.classical(f));
                sums.iter().map(|s| s.ends.iter().all(|e| v[*e])).collect()
            }
        }
    }

    pub fn classical_match_set(&self, r: &Guard) -> MatchSetSummary {
        self.summaries(r, &mut |f| self.classical(f))[0].public()
    }
}

struct Summary {
    matches: Vec<usize>,
    ends: Vec<usize>,
    infinite: BTreeSet<usize>,
    threshold: usize,
    horizon: usize,
}

impl Summary {
    fn public(&self) -> MatchSetSummary {
        MatchSetSummary {
            finite_matches: self.matches.iter().copied().collect(),
            infinite_classes: self.infinite.clone(),
            threshold: self.threshold,
            horizon: self.horizon,
        }
    }
}

fn zip_with<A: Copy, F: Fn(A, A) -> A>(a: Vec<A>, b: Vec<A>, f: F) -> Vec<A> {
    a.into_iter().zip(b).map(|(x, y)| f(x, y)).collect()
}

// ---------------------------------------------------------------------------
// public entry points

/// Match set of `r` on `w` with tests read through bit `i` of the robust
/// semantics.
pub fn match_set(
    w: &LassoTrace,
    r: &Guard,
    i: usize,
    k: Option<usize>,
) -> Result<MatchSetSummary, OracleError> {
    if !(1..=4).contains(&i) {
        return Err(OracleError::BitIndex(i));
    }
    Ok(Oracle::new(w, k.unwrap_or(0)).robust_match_set(r, i))
}

/// Match set of `r` on `w` with tests read classically.
pub fn match_set_classical(w: &LassoTrace, r: &Guard, k: Option<usize>) -> MatchSetSummary {
    Oracle::new(w, k.unwrap_or(0)).classical_match_set(r)
}

/// Robust value at position 0 without any logic check.
pub fn eval_robust(w: &LassoTrace, k: usize, phi: &Formula) -> TruthValue4 {
    Oracle::new(w, k).robust(phi)[0]
}

/// Classical value at position 0 without any logic check.
pub fn eval_classical(w: &LassoTrace, k: usize, phi: &Formula) -> bool {
    Oracle::new(w, k).classical(phi)[0]
}

pub fn eval_rltl(w: &LassoTrace, phi: &Formula) -> Result<TruthValue4, OracleError> {
    require_logic(phi, LogicId::Rltl)?;
    Ok(eval_robust(w, 0, phi))
}

pub fn eval_rldl(w: &LassoTrace, phi: &Formula) -> Result<TruthValue4, OracleError> {
    require_logic(phi, LogicId::Rldl)?;
    Ok(eval_robust(w, 0, phi))
}

pub fn eval_rprompt_ltl(w: &LassoTrace, k: usize, phi: &Formula) -> Result<TruthValue4, OracleError> {
    require_logic(phi, LogicId::RPromptLtl)?;
    Ok(eval_robust(w, k, phi))
}

pub fn eval_rprompt_ldl(w: &LassoTrace, k: usize, phi: &Formula) -> Result<TruthValue4, OracleError> {
    require_logic(phi, LogicId::RPromptLdl)?;
    Ok(eval_robust(w, k, phi))
}

pub fn eval_ltl(w: &LassoTrace, phi: &Formula) -> Result<bool, OracleError> {
    require_logic(phi, LogicId::LtlFrag)?;
    Ok(eval_classical(w, 0, phi))
}

pub fn eval_ldl(w: &LassoTrace, phi: &Formula) -> Result<bool, OracleError> {
    require_logic(phi, LogicId::Ldl)?;
    Ok(eval_classical(w, 0, phi))
}

pub fn eval_prompt_ltl(w: &LassoTrace, k: usize, phi: &Formula) -> Result<bool, OracleError> {
    require_logic(phi, LogicId::PromptLtl)?;
    Ok(eval_classical(w, k, phi))
}

pub fn eval_prompt_ldl(w: &LassoTrace, k: usize, phi: &Formula) -> Result<bool, OracleError> {
    require_logic(phi, LogicId::PromptLdl)?;
    Ok(eval_classical(w, k, phi))
}

/// Dispatch on the logic: robust logics yield a truth value, classical ones
/// `0000` or `1111`.
pub fn eval_in(
    logic: LogicId,
    w: &LassoTrace,
    k: usize,
    phi: &Formula,
) -> Result<TruthValue4, OracleError> {
    require_logic(phi, logic)?;
    Ok(if logic.is_robust() {
        eval_robust(w, k, phi)
    } else {
        TruthValue4::from_bool(eval_classical(w, k, phi))
    })
}
