//! Formula-to-formula translations: derobustification of rPrompt-LTL,
//! embeddings into rLDL, LTL operators as LDL guards, and the translation
//! of test-free limit-matching rPrompt-LDL into Prompt-LDL.

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use crate::guards::{determinize, extract_regex, guard_alphabet, is_limit_matching, thompson, GuardError};
use crate::syntax::{require_logic, Formula, Guard, LogicId, SyntaxError};
use crate::truth4::TruthValue4;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TranslateError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("formula is not test-free: guard `{0}` contains a test")]
    NotTestFree(String),
    #[error("guards are not limit-matching: {}", .0.join(", "))]
    NotLimitMatching(Vec<String>),
    #[error(transparent)]
    Guard(#[from] GuardError),
}

type Memo = HashMap<(Formula, TruthValue4), Formula>;

/// Prompt-LTL formula `φ_β` with `V(w, k, φ) ⪰ β` iff `φ_β` holds on `w`
/// with bound `k`.
pub fn rprompt_to_prompt(phi: &Formula, beta: TruthValue4) -> Result<Formula, TranslateError> {
    require_logic(phi, LogicId::RPromptLtl)?;
    Ok(derobust(phi, beta, &mut Memo::new()))
}

fn derobust(phi: &Formula, beta: TruthValue4, memo: &mut Memo) -> Formula {
    if beta == TruthValue4::F0000 {
        return Formula::True;
    }
    if let Some(f) = memo.get(&(phi.clone(), beta)) {
        return f.clone();
    }
    let out = match phi {
        Formula::True | Formula::False | Formula::Atom(_) | Formula::NegAtom(_) => phi.clone(),
        Formula::And(a, b) => Formula::and(derobust(a, beta, memo), derobust(b, beta, memo)),
        Formula::Or(a, b) => Formula::or(derobust(a, beta, memo), derobust(b, beta, memo)),
        Formula::Eventually(a) => Formula::eventually(derobust(a, beta, memo)),
        Formula::PromptEventually(a) => Formula::prompt_eventually(derobust(a, beta, memo)),
        Formula::Always(a) => {
            let inner = derobust(a, beta, memo);
            match beta {
                TruthValue4::F1111 => Formula::always(inner),
                TruthValue4::F0111 => Formula::eventually(Formula::always(inner)),
                TruthValue4::F0011 => Formula::always(Formula::eventually(inner)),
                _ => Formula::eventually(inner),
            }
        }
        other => unreachable!("`{other}` is not rPrompt-LTL"),
    };
    memo.insert((phi.clone(), beta), out.clone());
    out
}

/// Replace the robust eventually and always by `⟨⟨tt*⟩⟩` and `⟦tt*⟧`.
pub fn embed_rltl_in_rldl(phi: &Formula) -> Result<Formula, TranslateError> {
    require_logic(phi, LogicId::Rltl)?;
    Ok(embed_rltl(phi))
}

fn embed_rltl(phi: &Formula) -> Formula {
    let star = || Guard::star(Guard::tt());
    match phi {
        Formula::Eventually(a) => Formula::diamond(star(), embed_rltl(a)),
        Formula::Always(a) => Formula::boxed(star(), embed_rltl(a)),
        _ => map_children(phi, &mut embed_rltl),
    }
}

/// Rewrite implications `a → b` as `¬a ∨ b`; modalities carry over.
pub fn embed_ldl_in_rldl(phi: &Formula) -> Result<Formula, TranslateError> {
    require_logic(phi, LogicId::Ldl)?;
    Ok(embed_ldl(phi))
}

fn embed_ldl(phi: &Formula) -> Formula {
    match phi {
        Formula::Implies(a, b) => Formula::or(Formula::not(embed_ldl(a)), embed_ldl(b)),
        _ => map_children(phi, &mut embed_ldl),
    }
}

/// Rebuild `phi` with `f` applied to each direct subformula, including the
/// tests of its guard.
fn map_children(phi: &Formula, f: &mut dyn FnMut(&Formula) -> Formula) -> Formula {
    match phi {
        Formula::True | Formula::False | Formula::Atom(_) | Formula::NegAtom(_) => phi.clone(),
        Formula::Not(a) => Formula::not(f(a)),
        Formula::And(a, b) => Formula::and(f(a), f(b)),
        Formula::Or(a, b) => Formula::or(f(a), f(b)),
        Formula::Implies(a, b) => Formula::implies(f(a), f(b)),
        Formula::Next(a) => Formula::next(f(a)),
        Formula::Until(a, b) => Formula::until(f(a), f(b)),
        Formula::Release(a, b) => Formula::release(f(a), f(b)),
        Formula::Eventually(a) => Formula::eventually(f(a)),
        Formula::Always(a) => Formula::always(f(a)),
        Formula::PromptEventually(a) => Formula::prompt_eventually(f(a)),
        Formula::Diamond(r, a) => Formula::diamond(r.map_tests(f), f(a)),
        Formula::Box(r, a) => Formula::boxed(r.map_tests(f), f(a)),
        Formula::PromptDiamond(r, a) => Formula::prompt_diamond(r.map_tests(f), f(a)),
    }
}

/// Express next, until, release, eventually, always and prompt-eventually
/// through guarded modalities. Other operators are kept.
pub fn ltl_surface_to_ldl(phi: &Formula) -> Formula {
    let star = || Guard::star(Guard::tt());
    match phi {
        Formula::Next(a) => Formula::diamond(Guard::tt(), ltl_surface_to_ldl(a)),
        Formula::Until(a, b) => Formula::diamond(
            Guard::star(Guard::concat(Guard::test(ltl_surface_to_ldl(a)), Guard::tt())),
            ltl_surface_to_ldl(b),
        ),
        Formula::Release(a, b) => Formula::boxed(
            Guard::star(Guard::concat(Guard::test(Formula::not(ltl_surface_to_ldl(a))), Guard::tt())),
            ltl_surface_to_ldl(b),
        ),
        Formula::Eventually(a) => Formula::diamond(star(), ltl_surface_to_ldl(a)),
        Formula::Always(a) => Formula::boxed(star(), ltl_surface_to_ldl(a)),
        Formula::PromptEventually(a) => Formula::prompt_diamond(star(), ltl_surface_to_ldl(a)),
        _ => map_children(phi, &mut ltl_surface_to_ldl),
    }
}

/// Reject formulas outside the test-free limit-matching fragment, naming
/// every offending guard.
pub fn check_fragment(phi: &Formula) -> Result<(), TranslateError> {
    require_logic(phi, LogicId::RPromptLdl)?;
    if let Some(r) = phi.closure().iter().filter_map(Formula::guard).find(|r| !r.is_test_free()) {
        return Err(TranslateError::NotTestFree(r.to_string()));
    }
    let mut bad = BTreeSet::new();
    for f in phi.closure() {
        if let Some(r) = f.guard() {
            if !is_limit_matching(r)? {
                bad.insert(r.to_string());
            }
        }
    }
    if bad.is_empty() {
        Ok(())
    } else {
        Err(TranslateError::NotLimitMatching(bad.into_iter().collect()))
    }
}

/// Prompt-LDL formula `φ_β` with `V(w, k, φ) ⪰ β` iff `φ_β` holds on `w`
/// with bound `k`, for test-free formulas whose guards are limit-matching.
/// Robust boxes split their guard at each state of its minimal-free subset
/// automaton: some prefix after which all matches satisfy (`0111`), or
/// after every prefix some match satisfies (`0011`).
pub fn fragment_translate(phi: &Formula, beta: TruthValue4) -> Result<Formula, TranslateError> {
    check_fragment(phi)?;
    let mut splits = HashMap::new();
    Ok(fragment(phi, beta, &mut Memo::new(), &mut splits))
}

type Splits = HashMap<Guard, Vec<(Guard, Guard)>>;

/// Pairs (guard to state q, guard from q to acceptance) for the reachable
/// states of the deterministic guard automaton.
fn split_guard(r: &Guard, splits: &mut Splits) -> Vec<(Guard, Guard)> {
    if let Some(s) = splits.get(r) {
        return s.clone();
    }
    let alphabet = guard_alphabet(r);
    let dfa = determinize(&thompson(r), &alphabet).expect("test-free guard");
    let finals: BTreeSet<usize> = (0..dfa.num_states()).filter(|&q| dfa.finals[q]).collect();
    let out: Vec<(Guard, Guard)> = (0..dfa.num_states())
        .map(|q| {
            (
                extract_regex(&dfa, dfa.initial, &BTreeSet::from([q])),
                extract_regex(&dfa, q, &finals),
            )
        })
        .collect();
    splits.insert(r.clone(), out.clone());
    out
}

fn fragment(phi: &Formula, beta: TruthValue4, memo: &mut Memo, splits: &mut Splits) -> Formula {
    if beta == TruthValue4::F0000 {
        return Formula::True;
    }
    if let Some(f) = memo.get(&(phi.clone(), beta)) {
        return f.clone();
    }
    let out = match phi {
        Formula::True | Formula::False | Formula::Atom(_) | Formula::NegAtom(_) => phi.clone(),
        Formula::And(a, b) => Formula::and(fragment(a, beta, memo, splits), fragment(b, beta, memo, splits)),
        Formula::Or(a, b) => Formula::or(fragment(a, beta, memo, splits), fragment(b, beta, memo, splits)),
        Formula::Diamond(r, a) => Formula::diamond(r.clone(), fragment(a, beta, memo, splits)),
        Formula::PromptDiamond(r, a) => Formula::prompt_diamond(r.clone(), fragment(a, beta, memo, splits)),
        Formula::Box(r, a) => {
            let body = fragment(a, beta, memo, splits);
            match beta {
                TruthValue4::F1111 => Formula::boxed(r.clone(), body),
                TruthValue4::F0111 => Formula::or_all(
                    split_guard(r, splits)
                        .into_iter()
                        .map(|(to, from)| Formula::diamond(to, Formula::boxed(from, body.clone())))
                        .collect(),
                ),
                TruthValue4::F0011 => Formula::and_all(
                    split_guard(r, splits)
                        .into_iter()
                        .map(|(to, from)| Formula::boxed(to, Formula::diamond(from, body.clone())))
                        .collect(),
                ),
                _ => Formula::diamond(r.clone(), body),
            }
        }
        other => unreachable!("`{other}` is not in the fragment"),
    };
    memo.insert((phi.clone(), beta), out.clone());
    out
}
