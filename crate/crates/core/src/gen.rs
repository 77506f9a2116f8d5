//! Seeded random formulas, guards, lassos, transition systems and arenas
//! for property tests and fuzzing.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::alphabet::Letter;
use crate::guards::is_limit_matching;
use crate::games::{LabeledGameGraph, ParityGame, Player};
use crate::lasso::LassoTrace;
use crate::mc::TransitionSystem;
use crate::syntax::{Formula, Guard, LogicId, PropFormula};

pub type GenRng = ChaCha8Rng;

pub fn rng(seed: u64) -> GenRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn default_props() -> Vec<String> {
    vec!["p".to_string(), "q".to_string()]
}

#[derive(Clone, Copy)]
enum Op {
    Not,
    And,
    Or,
    Implies,
    Next,
    Until,
    Release,
    Eventually,
    Always,
    Prompt,
    Diamond,
    Box,
    PromptDiamond,
}

fn ops(logic: LogicId) -> &'static [Op] {
    use Op::*;
    match logic {
        LogicId::LtlFrag => &[Not, And, Or, Implies, Next, Until, Release, Eventually, Always],
        LogicId::Rltl => &[Not, And, Or, Implies, Eventually, Always],
        LogicId::PromptLtl => &[And, Or, Next, Until, Release, Eventually, Always, Prompt],
        LogicId::RPromptLtl => &[And, Or, Eventually, Always, Prompt],
        LogicId::Ldl | LogicId::Rldl => &[Not, And, Or, Implies, Diamond, Box],
        LogicId::PromptLdl | LogicId::RPromptLdl => &[And, Or, Diamond, Box, PromptDiamond],
    }
}

fn leaf(rng: &mut GenRng, props: &[String], negation: bool) -> Formula {
    let p = props.choose(rng).expect("nonempty props");
    match rng.gen_range(0..10) {
        0 => Formula::True,
        1 => Formula::False,
        2..=4 if negation => Formula::not(Formula::atom(p)),
        2..=4 => Formula::neg_atom(p),
        _ => Formula::atom(p),
    }
}

fn prop_leaf(rng: &mut GenRng, props: &[String]) -> PropFormula {
    let p = props.choose(rng).expect("nonempty props");
    match rng.gen_range(0..6) {
        0 | 1 => PropFormula::True,
        2 => PropFormula::not(PropFormula::atom(p)),
        _ => PropFormula::atom(p),
    }
}

/// Random guard with about `budget` nodes. Tests are drawn from `test`
/// when given.
pub fn random_guard(
    rng: &mut GenRng,
    budget: usize,
    props: &[String],
    test: &mut Option<&mut dyn FnMut(&mut GenRng, usize) -> Formula>,
) -> Guard {
    if budget <= 1 {
        if let Some(t) = test.as_mut() {
            if rng.gen_bool(0.25) {
                return Guard::test(t(rng, 1));
            }
        }
        return Guard::Prop(prop_leaf(rng, props));
    }
    match rng.gen_range(0..5) {
        0 | 4 => Guard::star(random_guard(rng, budget - 1, props, test)),
        1 => {
            let left = rng.gen_range(1..budget);
            Guard::alt(
                random_guard(rng, left, props, test),
                random_guard(rng, budget - left, props, test),
            )
        }
        2 => {
            let left = rng.gen_range(1..budget);
            Guard::concat(
                random_guard(rng, left, props, test),
                random_guard(rng, budget - left, props, test),
            )
        }
        _ => match test.as_mut() {
            Some(t) => Guard::test(t(rng, budget - 1)),
            None => Guard::star(random_guard(rng, budget - 1, props, test)),
        },
    }
}

/// Random formula of `logic` with about `budget` syntax nodes.
pub fn random_formula(rng: &mut GenRng, logic: LogicId, budget: usize, props: &[String]) -> Formula {
    let negation = matches!(logic, LogicId::LtlFrag | LogicId::Ldl | LogicId::Rltl | LogicId::Rldl);
    if budget <= 1 {
        return leaf(rng, props, negation);
    }
    let op = *ops(logic).choose(rng).expect("nonempty ops");
    let sub = |rng: &mut GenRng, b: usize| random_formula(rng, logic, b.max(1), props);
    let split = |rng: &mut GenRng| {
        let left = rng.gen_range(1..budget.max(2));
        (left, (budget - 1).saturating_sub(left).max(1))
    };
    match op {
        Op::Not => Formula::not(sub(rng, budget - 1)),
        Op::Next => Formula::next(sub(rng, budget - 1)),
        Op::Eventually => Formula::eventually(sub(rng, budget - 1)),
        Op::Always => Formula::always(sub(rng, budget - 1)),
        Op::Prompt => Formula::prompt_eventually(sub(rng, budget - 1)),
        Op::And | Op::Or | Op::Implies | Op::Until | Op::Release => {
            let (l, r) = split(rng);
            let (a, b) = (sub(rng, l), sub(rng, r));
            match op {
                Op::And => Formula::and(a, b),
                Op::Or => Formula::or(a, b),
                Op::Implies => Formula::implies(a, b),
                Op::Until => Formula::until(a, b),
                _ => Formula::release(a, b),
            }
        }
        Op::Diamond | Op::Box | Op::PromptDiamond => {
            let gb = rng.gen_range(1..=budget.div_ceil(2).clamp(1, 4));
            let body = sub(rng, budget.saturating_sub(gb + 1));
            let tests_allowed = !matches!(op, Op::PromptDiamond) && !logic.is_prompt();
            let mut make_test = |rng: &mut GenRng, b: usize| random_formula(rng, logic, b.min(3), props);
            let mut test: Option<&mut dyn FnMut(&mut GenRng, usize) -> Formula> =
                if tests_allowed { Some(&mut make_test) } else { None };
            let g = random_guard(rng, gb, props, &mut test);
            match op {
                Op::Diamond => Formula::diamond(g, body),
                Op::Box => Formula::boxed(g, body),
                _ => Formula::prompt_diamond(g, body),
            }
        }
    }
}

/// Random formula whose `size()` is at most `max_size`.
pub fn random_formula_sized(rng: &mut GenRng, logic: LogicId, max_size: usize, props: &[String]) -> Formula {
    loop {
        let budget = rng.gen_range(1..=max_size);
        let f = random_formula(rng, logic, budget, props);
        if f.size() <= max_size {
            return f;
        }
    }
}

fn random_letter(rng: &mut GenRng, props: &[String]) -> Letter {
    props.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect()
}

/// Random lasso with at most `max_positions` positions in total.
pub fn random_lasso(rng: &mut GenRng, props: &[String], max_positions: usize) -> LassoTrace {
    let total = rng.gen_range(1..=max_positions.max(1));
    let cycle = rng.gen_range(1..=total);
    let letters: Vec<Letter> = (0..total).map(|_| random_letter(rng, props)).collect();
    LassoTrace::new(letters[..total - cycle].to_vec(), letters[total - cycle..].to_vec()).expect("nonempty cycle")
}

/// Every lasso over `props` with exactly `prefix` plus `cycle` positions.
pub fn all_lassos(props: &[String], prefix: usize, cycle: usize) -> Vec<LassoTrace> {
    let letters: Vec<Letter> = (0..1u32 << props.len())
        .map(|m| {
            props
                .iter()
                .enumerate()
                .filter(|(i, _)| m >> i & 1 == 1)
                .map(|(_, p)| p.clone())
                .collect()
        })
        .collect();
    let n = prefix + cycle;
    let base = letters.len();
    (0..base.pow(n as u32))
        .map(|mut code| {
            let word: Vec<Letter> = (0..n)
                .map(|_| {
                    let l = letters[code % base].clone();
                    code /= base;
                    l
                })
                .collect();
            LassoTrace::new(word[..prefix].to_vec(), word[prefix..].to_vec()).expect("cycle > 0")
        })
        .collect()
}

/// Random transition system; every state gets one to three successors.
pub fn random_ts(rng: &mut GenRng, props: &[String], max_states: usize) -> TransitionSystem {
    let n = rng.gen_range(1..=max_states.max(1));
    let succ = random_succ(rng, n);
    TransitionSystem {
        names: (0..n).map(|i| format!("s{i}")).collect(),
        labels: (0..n).map(|_| random_letter(rng, props)).collect(),
        succ,
        initial: 0,
    }
}

fn random_succ(rng: &mut GenRng, n: usize) -> Vec<Vec<usize>> {
    (0..n)
        .map(|_| {
            let k = rng.gen_range(1..=3.min(n));
            let mut all: Vec<usize> = (0..n).collect();
            all.shuffle(rng);
            let mut out = all[..k].to_vec();
            out.sort_unstable();
            out
        })
        .collect()
}

pub fn random_arena(rng: &mut GenRng, props: &[String], max_vertices: usize) -> LabeledGameGraph {
    let n = rng.gen_range(1..=max_vertices.max(1));
    LabeledGameGraph {
        names: (0..n).map(|i| format!("v{i}")).collect(),
        owner: (0..n)
            .map(|_| if rng.gen_bool(0.5) { Player::Even } else { Player::Odd })
            .collect(),
        labels: (0..n).map(|_| random_letter(rng, props)).collect(),
        succ: random_succ(rng, n),
    }
}

pub fn random_parity_game(rng: &mut GenRng, max_vertices: usize, max_color: u32) -> ParityGame {
    let n = rng.gen_range(1..=max_vertices.max(1));
    let mut g = ParityGame::default();
    for _ in 0..n {
        let owner = if rng.gen_bool(0.5) { Player::Even } else { Player::Odd };
        g.add_vertex(owner, rng.gen_range(0..=max_color));
    }
    for (v, succ) in random_succ(rng, n).into_iter().enumerate() {
        for t in succ {
            g.add_edge(v, t);
        }
    }
    g
}

/// Random test-free rPrompt-LDL formula whose guards are all
/// limit-matching: each guard is redrawn until it is, falling back to `tt*`.
pub fn random_fragment_formula(rng: &mut GenRng, max_size: usize, props: &[String]) -> Formula {
    let phi = random_formula_sized(rng, LogicId::RPromptLdl, max_size, props);
    limit_guards(rng, &phi, props)
}

fn limit_guards(rng: &mut GenRng, phi: &Formula, props: &[String]) -> Formula {
    let redraw = |rng: &mut GenRng, g: &Guard| {
        if is_limit_matching(g).unwrap_or(false) {
            return g.clone();
        }
        for _ in 0..8 {
            let h = random_plain_guard(rng, g.length().max(2), props);
            if is_limit_matching(&h).unwrap_or(false) {
                return h;
            }
        }
        Guard::universal()
    };
    match phi {
        Formula::And(a, b) => Formula::and(limit_guards(rng, a, props), limit_guards(rng, b, props)),
        Formula::Or(a, b) => Formula::or(limit_guards(rng, a, props), limit_guards(rng, b, props)),
        Formula::Diamond(g, a) => Formula::diamond(redraw(rng, g), limit_guards(rng, a, props)),
        Formula::Box(g, a) => Formula::boxed(redraw(rng, g), limit_guards(rng, a, props)),
        Formula::PromptDiamond(g, a) => Formula::prompt_diamond(redraw(rng, g), limit_guards(rng, a, props)),
        other => other.clone(),
    }
}

/// Random test-free guard over `props`.
pub fn random_plain_guard(rng: &mut GenRng, budget: usize, props: &[String]) -> Guard {
    random_guard(rng, budget, props, &mut None)
}

pub fn props_of(words: &[&str]) -> Vec<String> {
    words.iter().map(|s| s.to_string()).collect::<BTreeSet<_>>().into_iter().collect()
}
