//! The alternating-color technique for prompt operators.
//!
//! A fresh proposition splits a trace into blocks of equal color. A prompt
//! diamond is relaxed to "a match within the current block or the next
//! one". If every block has at least `k + 1` positions, the bounded formula
//! with bound `k` implies the relaxed one; if every block has at most `L`
//! positions, the relaxed formula implies the bounded one with bound `2L`.

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use crate::alphabet::Alphabet;
use crate::apa::{from_rldl_over, ApaError};
use crate::guards::{determinize, extract_regex, thompson, GuardDfa};
use crate::lasso::LassoTrace;
use crate::omega::{apa_to_nba, Nba};
use crate::syntax::{Formula, Guard};
use crate::translate::{embed_ldl_in_rldl, ltl_surface_to_ldl, TranslateError};
use crate::truth4::TruthValue4;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PromptError {
    #[error("prompt diamond guard `{0}` contains tests")]
    TestInPromptGuard(String),
    #[error(transparent)]
    Translate(#[from] TranslateError),
    #[error(transparent)]
    Apa(#[from] ApaError),
}

/// A proposition name not among `props`.
pub fn fresh_color(props: &BTreeSet<String>) -> String {
    let mut name = "c".to_string();
    let mut i = 0;
    while props.contains(&name) {
        i += 1;
        name = format!("c{i}");
    }
    name
}

/// Infinitely many positions of each color.
pub fn alternation(color: &str) -> Formula {
    let inf = |f: Formula| Formula::boxed(Guard::star(Guard::tt()), Formula::diamond(Guard::star(Guard::tt()), f));
    Formula::and(inf(Formula::atom(color)), inf(Formula::not(Formula::atom(color))))
}

/// Relax every prompt diamond of a Prompt-LTL or Prompt-LDL formula. The
/// result is an LDL formula over the extra proposition `color`.
pub fn relax(psi: &Formula, color: &str) -> Result<Formula, PromptError> {
    let mut memo = HashMap::new();
    relax_ldl(&ltl_surface_to_ldl(psi), color, &mut memo)
}

fn relax_ldl(phi: &Formula, color: &str, memo: &mut HashMap<Guard, (Guard, Guard)>) -> Result<Formula, PromptError> {
    let rec = |f: &Formula, memo: &mut HashMap<Guard, (Guard, Guard)>| relax_ldl(f, color, memo);
    Ok(match phi {
        Formula::True | Formula::False | Formula::Atom(_) | Formula::NegAtom(_) => phi.clone(),
        Formula::Not(a) => Formula::not(rec(a, memo)?),
        Formula::And(a, b) => Formula::and(rec(a, memo)?, rec(b, memo)?),
        Formula::Or(a, b) => Formula::or(rec(a, memo)?, rec(b, memo)?),
        Formula::Implies(a, b) => Formula::implies(rec(a, memo)?, rec(b, memo)?),
        Formula::Diamond(r, a) => Formula::diamond(relax_tests(r, color, memo)?, rec(a, memo)?),
        Formula::Box(r, a) => Formula::boxed(relax_tests(r, color, memo)?, rec(a, memo)?),
        Formula::PromptDiamond(r, a) => {
            if !r.is_test_free() {
                return Err(PromptError::TestInPromptGuard(r.to_string()));
            }
            let body = rec(a, memo)?;
            let (on, off) = memo.entry(r.clone()).or_insert_with(|| two_blocks(r, color)).clone();
            Formula::or(
                Formula::and(Formula::atom(color), Formula::diamond(on, body.clone())),
                Formula::and(Formula::neg_atom(color), Formula::diamond(off, body)),
            )
        }
        other => unreachable!("`{other}` survives the LDL surface translation"),
    })
}

fn relax_tests(r: &Guard, color: &str, memo: &mut HashMap<Guard, (Guard, Guard)>) -> Result<Guard, PromptError> {
    let mut err = None;
    let g = r.map_tests(&mut |t| match relax_ldl(t, color, memo) {
        Ok(f) => f,
        Err(e) => {
            err = Some(e);
            t.clone()
        }
    });
    err.map_or(Ok(g), Err)
}

/// `r` restricted to words spanning at most the current color block and the
/// next, starting in color on and in color off respectively.
fn two_blocks(r: &Guard, color: &str) -> (Guard, Guard) {
    let mut props = BTreeSet::new();
    r.collect_props(&mut props);
    props.insert(color.to_string());
    let alphabet = Alphabet::new(props);
    let d = determinize(&thompson(r), &alphabet).expect("test-free guard");
    (
        restrict_blocks(&d, color, true),
        restrict_blocks(&d, color, false),
    )
}

fn restrict_blocks(d: &GuardDfa, color: &str, start_on: bool) -> Guard {
    // Phase 0: still in the first block, 1: in the second, 2: dead.
    let n = d.num_states();
    let id = |q: usize, phase: usize| q * 3 + phase;
    let mut trans = vec![vec![0; d.alphabet.num_letters()]; n * 3];
    let mut finals = vec![false; n * 3];
    for q in 0..n {
        for phase in 0..3 {
            finals[id(q, phase)] = phase < 2 && d.finals[q];
            for a in d.alphabet.letters() {
                let on = d.alphabet.has(a, color);
                let next = match phase {
                    0 if on == start_on => 0,
                    0 | 1 if on != start_on => 1,
                    _ => 2,
                };
                trans[id(q, phase)][a as usize] = id(d.trans[q][a as usize], next);
            }
        }
    }
    let product = GuardDfa {
        alphabet: d.alphabet.clone(),
        initial: id(d.initial, 0),
        trans,
        finals: finals.clone(),
    };
    let to: BTreeSet<usize> = (0..n * 3).filter(|&s| finals[s]).collect();
    extract_regex(&product, product.initial, &to)
}

/// Büchi automaton for an LDL formula over `alphabet`.
pub fn ldl_to_nba(phi: &Formula, alphabet: &Alphabet) -> Result<Nba, PromptError> {
    let robust = embed_ldl_in_rldl(phi)?;
    Ok(apa_to_nba(&from_rldl_over(&robust, TruthValue4::F1111, alphabet)?))
}

/// Longest run of equal colors in one unrolling of the lasso, counting the
/// loop as repeating.
pub fn max_block(w: &LassoTrace, color: &str) -> usize {
    let n = w.positions();
    let horizon = w.prefix().len() + 2 * w.cycle().len();
    let bits: Vec<bool> = (0..horizon.max(n)).map(|j| w.letter_at(j).contains(color)).collect();
    if w.cycle().iter().all(|l| l.contains(color) == bits[w.prefix().len()]) {
        return usize::MAX;
    }
    let mut best = 0;
    let mut run = 0;
    for j in 0..bits.len() {
        run = if j > 0 && bits[j] == bits[j - 1] { run + 1 } else { 1 };
        best = best.max(run);
    }
    best
}
