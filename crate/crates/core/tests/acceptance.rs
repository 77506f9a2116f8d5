//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each
//! and exits non-zero if any fails.

mod common;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rtl_core::apa::{accepts_lasso, from_rldl_over, STATES_PER_SIZE};
use rtl_core::games::{check_strategies, solve_parity, ParityGame, Player};
use rtl_core::gen::{self, default_props, random_formula_sized, random_lasso};
use rtl_core::guards::{is_limit_matching, thompson};
use rtl_core::mc::{mc_fragment, mc_rldl, mc_rprompt_ltl, McError, PromptVerdict, TransitionSystem, Verdict};
use rtl_core::omega::{apa_to_nba, dpa_accepts_lasso, nba_accepts_lasso, nba_to_dpa};
use rtl_core::oracle::{
    eval_in, eval_ldl, eval_prompt_ltl, eval_rldl, eval_rltl, eval_rprompt_ldl, eval_rprompt_ltl, match_set, Oracle,
};
use rtl_core::syntax::{parse, parse_guard};
use rtl_core::translate::{embed_ldl_in_rldl, embed_rltl_in_rldl, rprompt_to_prompt, TranslateError};
use rtl_core::{Alphabet, Formula, LassoTrace, LogicId, TruthValue4};

// Pinned thresholds.
const ORACLE_EVALUATIONS: usize = 10_000;
const ORACLE_TIME_LIMIT: Duration = Duration::from_secs(60);
const PIPELINE_FORMULAS: usize = 500;
const PIPELINE_LASSOS_PER_FORMULA: usize = 8;
const MAX_FORMULA_SIZE: usize = 12;
const MAX_LASSO_POSITIONS: usize = 6;
const PIPELINE_TIME_LIMIT: Duration = Duration::from_secs(600);
const DEROBUSTIFY_FORMULAS: usize = 500;
const DEROBUSTIFY_MAX_K: usize = 5;
/// Derobustified size is at most `DEROBUSTIFY_FACTOR * size + DEROBUSTIFY_FACTOR`.
const DEROBUSTIFY_FACTOR: usize = 3;
const MIN_MC_SYSTEMS: usize = 20;
const MAX_MC_STATES: usize = 8;
/// Transition-system lassos enumerated for oracle validation.
const ENUM_LASSO_LEN: usize = 8;
/// A `yes` for a prompt objective must be witnessed by some `k` up to this.
const WITNESS_MAX_K: usize = 8;
/// A `no` must be witnessed for every `k` up to this.
const REFUTE_MAX_K: usize = 3;
const MIN_PARITY_GAMES: usize = 2_000;
const RANDOM_GAMES_PER_SIZE: usize = 2_000;
const MIN_FRAGMENT_INSTANCES: usize = 10;
const EMBEDDING_PAIRS: usize = 1_000;
const GUARD_CORPUS: usize = 2_000;
/// Thompson automata have at most this many states per guard node.
const THOMPSON_FACTOR: usize = 2;
const SEED: u64 = 0x5eed;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(failures: &[String], summary: String) -> Outcome {
    match failures.first() {
        None => Outcome {
            pass: true,
            detail: summary,
        },
        Some(first) => Outcome {
            pass: false,
            detail: format!("{summary}; {} failure(s), first: {first}", failures.len()),
        },
    }
}

fn l(s: &str) -> LassoTrace {
    s.parse().expect("lasso literal")
}

fn robust_logics() -> [LogicId; 4] {
    [LogicId::Rltl, LogicId::Rldl, LogicId::RPromptLtl, LogicId::RPromptLdl]
}

fn oracle_values_in_b4() -> Outcome {
    let props = default_props();
    let mut r = gen::rng(SEED);
    let start = Instant::now();
    let mut failures = Vec::new();
    for i in 0..ORACLE_EVALUATIONS {
        let logic = robust_logics()[i % 4];
        let phi = random_formula_sized(&mut r, logic, MAX_FORMULA_SIZE, &props);
        let w = random_lasso(&mut r, &props, MAX_LASSO_POSITIONS);
        let k = i % (DEROBUSTIFY_MAX_K + 1);
        match eval_in(logic, &w, k, &phi) {
            Ok(v) if TruthValue4::ALL.contains(&v) => {}
            other => failures.push(format!("{phi} on {w}: {other:?}")),
        }
        let all = Oracle::new(&w, k).robust(&phi);
        if all.len() != w.positions() {
            failures.push(format!("{phi} on {w}: {} positions evaluated", all.len()));
        }
    }
    let took = start.elapsed();
    if took > ORACLE_TIME_LIMIT {
        failures.push(format!("took {took:?}"));
    }
    outcome(&failures, format!("{ORACLE_EVALUATIONS} evaluations in {:.1}s", took.as_secs_f64()))
}

fn monotonicity_example() -> Outcome {
    let mut failures = Vec::new();
    let w = l("{} ; {p}");
    let always_p = parse("[ tt* ] p", LogicId::Rldl).expect("formula");
    let v = eval_rldl(&w, &always_p).expect("eval");
    if v != TruthValue4::F0111 {
        failures.push(format!("value {v}, expected 0111"));
    }
    let test = parse_guard("{ [ tt* ] p }?").expect("guard");
    let deg1 = match_set(&w, &test, 1, None).expect("match set");
    let deg2 = match_set(&w, &test, 2, None).expect("match set");
    if !deg1.finite_matches.is_empty() || deg1.is_infinite() {
        failures.push(format!("degree-1 matches {:?}", deg1.finite_matches));
    }
    if deg2.finite_matches != BTreeSet::from([0]) || deg2.is_infinite() {
        failures.push(format!("degree-2 matches {:?}", deg2.finite_matches));
    }
    // Raw bits of [test] ff before the max-lift, at position 0.
    for (trace, raw) in [
        ("{} ; {p}", [true, false, false, false]),
        ("; {} {p}", [true, true, false, false]),
        ("{p} ; {}", [true, true, true, false]),
    ] {
        let w = l(trace);
        let got = Oracle::new(&w, 0).robust_box_raw(&test, &Formula::False)[0];
        if got != raw {
            failures.push(format!("raw bits on {trace}: {got:?}, expected {raw:?}"));
        }
        let lifted = eval_rldl(&w, &Formula::boxed(test.clone(), Formula::False)).expect("eval");
        if lifted != TruthValue4::F1111 {
            failures.push(format!("lifted value on {trace}: {lifted}"));
        }
    }
    outcome(&failures, "value 0111, matches {} and {0}, three raw-bit violations".to_string())
}

struct PipelineRow {
    formula: Formula,
    lassos: Vec<LassoTrace>,
    /// Acceptance by the automaton for each threshold in `TruthValue4::ALL`.
    accepted: Vec<Vec<bool>>,
}

fn pipeline_corpus() -> (Vec<PipelineRow>, Vec<String>, String) {
    let props = default_props();
    let alphabet = Alphabet::new(props.clone());
    let mut r = gen::rng(SEED + 3);
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut rows = Vec::new();
    let mut worst_ratio = 0.0f64;
    for _ in 0..PIPELINE_FORMULAS {
        let phi = random_formula_sized(&mut r, LogicId::Rldl, MAX_FORMULA_SIZE, &props);
        let lassos: Vec<LassoTrace> = (0..PIPELINE_LASSOS_PER_FORMULA)
            .map(|_| random_lasso(&mut r, &props, MAX_LASSO_POSITIONS))
            .collect();
        let values: Vec<TruthValue4> = lassos.iter().map(|w| eval_rldl(w, &phi).expect("eval")).collect();
        let mut accepted = Vec::new();
        for beta in TruthValue4::ALL {
            let apa = from_rldl_over(&phi, beta, &alphabet).expect("compile");
            worst_ratio = worst_ratio.max(apa.num_states() as f64 / phi.size() as f64);
            if apa.num_states() > STATES_PER_SIZE * phi.size() {
                failures.push(format!("{phi} at {beta}: {} states", apa.num_states()));
            }
            let nba = apa_to_nba(&apa);
            let dpa = nba_to_dpa(&nba);
            let mut row = Vec::new();
            for (w, v) in lassos.iter().zip(&values) {
                let want = *v >= beta;
                let got = [accepts_lasso(&apa, w), nba_accepts_lasso(&nba, w), dpa_accepts_lasso(&dpa, w)];
                if got != [want; 3] {
                    failures.push(format!("{phi} at {beta} on {w}: oracle {v}, automata {got:?}"));
                }
                row.push(got[0]);
            }
            accepted.push(row);
        }
        rows.push(PipelineRow {
            formula: phi,
            lassos,
            accepted,
        });
    }
    let took = start.elapsed();
    if took > PIPELINE_TIME_LIMIT {
        failures.push(format!("took {took:?}"));
    }
    let summary = format!(
        "{} formulas x 5 thresholds x {} lassos in {:.1}s, max states/size {:.2} (C = {STATES_PER_SIZE})",
        PIPELINE_FORMULAS,
        PIPELINE_LASSOS_PER_FORMULA,
        took.as_secs_f64(),
        worst_ratio
    );
    (rows, failures, summary)
}

fn threshold_monotonicity(rows: &[PipelineRow]) -> Outcome {
    let mut failures = Vec::new();
    let mut checks = 0;
    for row in rows {
        for (hi, beta_hi) in TruthValue4::ALL.iter().enumerate() {
            for (lo, beta_lo) in TruthValue4::ALL.iter().enumerate() {
                if beta_lo > beta_hi {
                    continue;
                }
                for (j, w) in row.lassos.iter().enumerate() {
                    checks += 1;
                    if row.accepted[hi][j] && !row.accepted[lo][j] {
                        failures.push(format!("{} on {w}: accepted at {beta_hi}, not at {beta_lo}", row.formula));
                    }
                }
            }
        }
    }
    outcome(&failures, format!("{checks} threshold pairs"))
}

fn derobustification() -> Outcome {
    let props = vec!["p".to_string(), "s".to_string()];
    let mut r = gen::rng(SEED + 4);
    let mut failures = Vec::new();
    let mut checks = 0;
    let mut worst = 0.0f64;
    for _ in 0..DEROBUSTIFY_FORMULAS {
        let phi = random_formula_sized(&mut r, LogicId::RPromptLtl, MAX_FORMULA_SIZE, &props);
        let lassos: Vec<LassoTrace> = (0..4).map(|_| random_lasso(&mut r, &props, MAX_LASSO_POSITIONS)).collect();
        for beta in TruthValue4::ALL {
            let psi = rprompt_to_prompt(&phi, beta).expect("translate");
            let bound = DEROBUSTIFY_FACTOR * phi.size() + DEROBUSTIFY_FACTOR;
            worst = worst.max(psi.size() as f64 / phi.size() as f64);
            if psi.size() > bound {
                failures.push(format!("{phi} at {beta}: size {} > {bound}", psi.size()));
            }
            for w in &lassos {
                for k in 0..=DEROBUSTIFY_MAX_K {
                    checks += 1;
                    let robust = eval_rprompt_ltl(w, k, &phi).expect("eval") >= beta;
                    let classical = eval_prompt_ltl(w, k, &psi).expect("eval");
                    if robust != classical {
                        failures.push(format!("{phi} at {beta} on {w}, k = {k}: {robust} vs {classical} for {psi}"));
                    }
                }
            }
        }
    }
    outcome(
        &failures,
        format!("{checks} evaluations, max size ratio {worst:.2} (c = {DEROBUSTIFY_FACTOR})"),
    )
}

#[derive(Clone, Copy)]
enum McLogic {
    Rldl,
    RPromptLtl,
}

/// Expected verdicts in the order of `TruthValue4::DEGREES` followed by 0000.
struct McCase {
    name: &'static str,
    system: &'static str,
    logic: McLogic,
    formula: &'static str,
    expect: [bool; 5],
}

const LOOP_P: &str = "state a init { p }\nedge a a\n";
const DROP: &str = "state a init { p }\nstate b {}\nedge a b\nedge b b\n";
const ALT: &str = "state a init { p }\nstate b {}\nedge a b\nedge b a\n";
const STAY_OR_GO: &str = "state a init {}\nstate b { p }\nedge a a\nedge a b\nedge b b\n";
const LATE_P: &str = "state a init {}\nstate b { p }\nedge a b\nedge b b\n";
const NEVER: &str = "state a init {}\nedge a a\n";
const MIXED: &str = "state a init { p }\nstate b { p }\nstate c {}\nedge a b\nedge a c\nedge b a\nedge c a\n";
const ODD: &str = "state a init {}\nstate b { p }\nedge a b\nedge b a\n";
const RING3: &str = "state a init { p }\nstate b {}\nstate c {}\nedge a b\nedge b c\nedge c a\n";
const RING8: &str = "state s0 init { p, s }\nstate s1 {}\nstate s2 {}\nstate s3 {}\nstate s4 {}\nstate s5 {}\nstate s6 {}\nstate s7 {}\n\
edge s0 s1\nedge s1 s2\nedge s2 s3\nedge s3 s4\nedge s4 s5\nedge s5 s6\nedge s6 s7\nedge s7 s0\n";
const PQ: &str = "state a init { p, q }\nstate b { q }\nedge a b\nedge b a\n";
const SYNC3: &str = "state a init { s }\nstate b {}\nstate c {}\nedge a b\nedge b c\nedge c a\n";
const SYNC3_WAIT: &str = "state a init { s }\nstate b {}\nstate c {}\nedge a b\nedge b c\nedge b b\nedge c a\n";
const REACH2: &str = "state a init {}\nstate b {}\nstate c { s }\nedge a b\nedge b c\nedge c c\n";
const RESTART: &str = "state a init {}\nstate b { s }\nedge a a\nedge a b\nedge b a\n";
const STUTTER: &str = "state a init { s }\nstate b {}\nedge a a\nedge a b\nedge b a\n";
const SETTLE: &str = "state a init {}\nstate b { s }\nedge a b\nedge b b\n";
const ESCAPE: &str = "state a init { s }\nstate b {}\nedge a b\nedge b b\nedge b a\n";
const S_ALT: &str = "state a init { s }\nstate b {}\nedge a b\nedge b a\n";
const ALT_S: &str = "state a init {}\nstate b { s }\nedge a b\nedge b a\n";

const DIAMOND4: &str = "state a init { p }\nstate b { p }\nstate c {}\nstate d { p }\nedge a b\nedge a c\nedge b d\nedge c d\nedge d a\n";
const FORK_S: &str =
    "state a init {}\nstate b { s }\nstate c {}\nstate d {}\nstate e { s }\nedge a b\nedge b c\nedge c a\nedge a d\nedge d e\nedge e a\n";
const LADDER: &str = "state a init { s }\nstate b {}\nstate c {}\nstate d {}\nedge a b\nedge b c\nedge c d\nedge d b\nedge d a\n";

const Y: bool = true;
const N: bool = false;

fn mc_cases() -> Vec<McCase> {
    use McLogic::*;
    let c = |name, system, logic, formula, expect| McCase {
        name,
        system,
        logic,
        formula,
        expect,
    };
    vec![
        c("loop_p", LOOP_P, Rldl, "[ tt* ] p", [Y, Y, Y, Y, Y]),
        c("drop", DROP, Rldl, "[ tt* ] p", [N, N, N, Y, Y]),
        c("alt", ALT, Rldl, "[ tt* ] p", [N, N, Y, Y, Y]),
        c("stay_or_go", STAY_OR_GO, Rldl, "[ tt* ] p", [N, N, N, N, Y]),
        c("late_p", LATE_P, Rldl, "[ tt* ] p", [N, Y, Y, Y, Y]),
        c("never", NEVER, Rldl, "[ tt* ] p", [N, N, N, N, Y]),
        c("mixed", MIXED, Rldl, "[ tt* ] p", [N, N, Y, Y, Y]),
        c("alt_even", ALT, Rldl, "[ (tt;tt)* ] p", [Y, Y, Y, Y, Y]),
        c("odd_even", ODD, Rldl, "[ (tt;tt)* ] p", [N, N, N, N, Y]),
        c("ring3_even", RING3, Rldl, "[ (tt;tt)* ] p", [N, N, Y, Y, Y]),
        c("drop_eventually", DROP, Rldl, "< tt* > p", [Y, Y, Y, Y, Y]),
        c("never_eventually", NEVER, Rldl, "< tt* > p", [N, N, N, N, Y]),
        c("ring8", RING8, Rldl, "[ tt* ] p", [N, N, Y, Y, Y]),
        c("pq_implies", PQ, Rldl, "[ tt* ] p -> [ tt* ] q", [Y, Y, Y, Y, Y]),
        c("pq_converse", PQ, Rldl, "[ tt* ] q -> [ tt* ] p", [N, N, Y, Y, Y]),
        c("sync3", SYNC3, RPromptLtl, "G Fp s", [Y, Y, Y, Y, Y]),
        c("sync3_wait", SYNC3_WAIT, RPromptLtl, "G Fp s", [N, N, N, Y, Y]),
        c("idle", NEVER, RPromptLtl, "Fp s", [N, N, N, N, Y]),
        c("reach2", REACH2, RPromptLtl, "Fp s", [Y, Y, Y, Y, Y]),
        c("reach2_always", REACH2, RPromptLtl, "G Fp s", [Y, Y, Y, Y, Y]),
        c("restart", RESTART, RPromptLtl, "G Fp s", [N, N, N, N, Y]),
        c("stutter", STUTTER, RPromptLtl, "G Fp s", [Y, Y, Y, Y, Y]),
        c("settle", SETTLE, RPromptLtl, "G Fp s", [Y, Y, Y, Y, Y]),
        c("escape", ESCAPE, RPromptLtl, "G Fp s", [N, N, N, Y, Y]),
        c("drop_prompt_always", DROP, RPromptLtl, "G p", [N, N, N, Y, Y]),
        c("diamond4", DIAMOND4, Rldl, "[ tt* ] p", [N, N, Y, Y, Y]),
        c("fork_s", FORK_S, RPromptLtl, "G Fp s", [Y, Y, Y, Y, Y]),
        c("ladder", LADDER, RPromptLtl, "G Fp s", [N, N, N, Y, Y]),
        c("ring8_prompt", RING8, RPromptLtl, "G Fp s", [Y, Y, Y, Y, Y]),
    ]
}

fn thresholds() -> [TruthValue4; 5] {
    [
        TruthValue4::F1111,
        TruthValue4::F0111,
        TruthValue4::F0011,
        TruthValue4::F0001,
        TruthValue4::F0000,
    ]
}

/// Oracle verdict over enumerated lassos: `Some(true)` if some bound up to
/// `WITNESS_MAX_K` meets `beta` on all of them, `Some(false)` if every bound
/// up to `REFUTE_MAX_K` is refuted by one of them, `None` otherwise.
fn enumerated_verdict(
    ts: &TransitionSystem,
    beta: TruthValue4,
    eval: &dyn Fn(&LassoTrace, usize) -> TruthValue4,
    prompt: bool,
) -> Option<bool> {
    let traces: Vec<LassoTrace> = common::ts_lassos(ts, ENUM_LASSO_LEN)
        .iter()
        .map(|(p, c)| ts.trace(p, c))
        .collect();
    let meets = |k: usize| traces.iter().all(|w| eval(w, k) >= beta);
    if !prompt {
        return Some(meets(0));
    }
    if (0..=WITNESS_MAX_K).any(meets) {
        Some(true)
    } else if (0..=REFUTE_MAX_K).all(|k| !meets(k)) {
        Some(false)
    } else {
        None
    }
}

fn check_prompt_cex(
    ts: &TransitionSystem,
    verdict: &PromptVerdict,
    beta: TruthValue4,
    eval: &dyn Fn(&LassoTrace, usize) -> TruthValue4,
) -> Result<(), String> {
    let PromptVerdict::Violated(cex) = verdict else {
        return Ok(());
    };
    for k in 0..=WITNESS_MAX_K {
        let (p, c) = cex.instantiate(k + 1);
        if !ts.is_path(&p, &c) {
            return Err(format!("counterexample for k = {k} is not a path"));
        }
        let w = ts.trace(&p, &c);
        let v = eval(&w, k);
        if v >= beta {
            return Err(format!("counterexample {w} has value {v} at k = {k}"));
        }
    }
    Ok(())
}

fn model_checking() -> Outcome {
    let mut failures = Vec::new();
    let cases = mc_cases();
    let mut systems = BTreeSet::new();
    let mut verdicts = 0;
    for case in &cases {
        let ts: TransitionSystem = case.system.parse().expect("system");
        systems.insert(case.system);
        if ts.num_states() > MAX_MC_STATES {
            failures.push(format!("{}: too many states", case.name));
        }
        let logic = match case.logic {
            McLogic::Rldl => LogicId::Rldl,
            McLogic::RPromptLtl => LogicId::RPromptLtl,
        };
        let phi = parse(case.formula, logic).expect("formula");
        let eval = |w: &LassoTrace, k: usize| match case.logic {
            McLogic::Rldl => eval_rldl(w, &phi).expect("eval"),
            McLogic::RPromptLtl => eval_rprompt_ltl(w, k, &phi).expect("eval"),
        };
        for (beta, &expect) in thresholds().iter().zip(&case.expect) {
            verdicts += 1;
            let tag = format!("{} at {beta}", case.name);
            let prompt = matches!(case.logic, McLogic::RPromptLtl);
            if enumerated_verdict(&ts, *beta, &eval, prompt) != Some(expect) {
                failures.push(format!("{tag}: expected verdict not confirmed by the oracle"));
            }
            let got = match case.logic {
                McLogic::Rldl => match mc_rldl(&ts, &phi, *beta) {
                    Ok(Verdict::Holds) => Ok(true),
                    Ok(Verdict::Violated(cex)) => {
                        if !ts.is_path(&cex.prefix, &cex.cycle) || eval(&cex.trace, 0) >= *beta {
                            failures.push(format!("{tag}: bad counterexample {}", cex.trace));
                        }
                        Ok(false)
                    }
                    Err(e) => Err(e),
                },
                McLogic::RPromptLtl => mc_rprompt_ltl(&ts, &phi, *beta).map(|v| {
                    if let Err(e) = check_prompt_cex(&ts, &v, *beta, &eval) {
                        failures.push(format!("{tag}: {e}"));
                    }
                    v.holds()
                }),
            };
            match got {
                Ok(h) if h == expect => {}
                other => failures.push(format!("{tag}: got {other:?}")),
            }
        }
    }
    if systems.len() < MIN_MC_SYSTEMS {
        failures.push(format!("only {} systems", systems.len()));
    }
    // The synchronization system needs exactly the loop gap as bound.
    let sync: TransitionSystem = SYNC3.parse().expect("system");
    let w = sync.trace(&[], &[0, 1, 2]);
    let gf = parse("G Fp s", LogicId::RPromptLtl).expect("formula");
    let at = |k| eval_rprompt_ltl(&w, k, &gf).expect("eval");
    if at(2) != TruthValue4::F1111 || at(1) == TruthValue4::F1111 {
        failures.push(format!("synchronization bound: k=1 gives {}, k=2 gives {}", at(1), at(2)));
    }
    outcome(
        &failures,
        format!("{} systems, {} cases, {verdicts} verdicts", systems.len(), cases.len()),
    )
}

fn all_small_games() -> Vec<ParityGame> {
    let mut out = Vec::new();
    for n in 1..=3usize {
        let owners = 1usize << n;
        let colors = 3usize.pow(n as u32);
        let edge_sets = ((1usize << n) - 1).pow(n as u32);
        for o in 0..owners {
            for c in 0..colors {
                for e in 0..edge_sets {
                    let mut g = ParityGame::default();
                    let mut cc = c;
                    for v in 0..n {
                        let owner = if o >> v & 1 == 1 { Player::Odd } else { Player::Even };
                        g.add_vertex(owner, (cc % 3) as u32);
                        cc /= 3;
                    }
                    let mut ee = e;
                    for v in 0..n {
                        let mask = ee % ((1 << n) - 1) + 1;
                        ee /= (1 << n) - 1;
                        for t in 0..n {
                            if mask >> t & 1 == 1 {
                                g.add_edge(v, t);
                            }
                        }
                    }
                    out.push(g);
                }
            }
        }
    }
    out
}

fn parity_solver() -> Outcome {
    let mut games = all_small_games();
    let exhaustive = games.len();
    let mut r = gen::rng(SEED + 7);
    for n in 4..=5 {
        for _ in 0..RANDOM_GAMES_PER_SIZE {
            loop {
                let g = gen::random_parity_game(&mut r, n, 2);
                if g.num_vertices() == n {
                    games.push(g);
                    break;
                }
            }
        }
    }
    let mut failures = Vec::new();
    for g in &games {
        let sol = solve_parity(g).expect("no dead ends");
        let brute = common::brute_force_winners(g);
        if sol.winner != brute {
            failures.push(format!("{g:?}: {:?} vs brute force {brute:?}", sol.winner));
        }
        if !check_strategies(g, &sol) {
            failures.push(format!("{g:?}: strategy check failed"));
        }
    }
    if games.len() < MIN_PARITY_GAMES {
        failures.push(format!("only {} games", games.len()));
    }
    outcome(
        &failures,
        format!("{} games ({exhaustive} exhaustive up to 3 vertices)", games.len()),
    )
}

/// Hand-built fragment instances: system, formula, threshold, verdict.
fn fragment_instances() -> Vec<(&'static str, &'static str, &'static str, TruthValue4, bool)> {
    use TruthValue4 as T;
    let even = "[ (tt;tt)* ] <p tt* > s";
    vec![
        ("s_alt", S_ALT, even, T::F1111, true),
        ("alt_s", ALT_S, even, T::F1111, true),
        ("never", NEVER, even, T::F0001, false),
        ("never_trivial", NEVER, even, T::F0000, true),
        ("escape", ESCAPE, even, T::F1111, false),
        ("escape_infinitely", ESCAPE, even, T::F0011, false),
        ("escape_once", ESCAPE, even, T::F0001, true),
        ("sync3", SYNC3, "[ tt* ] <p tt* > s", T::F1111, true),
        ("sync3_wait", SYNC3_WAIT, "[ tt* ] <p tt* > s", T::F1111, false),
        ("alt_plain", ALT, "[ (tt;tt)* ] p", T::F1111, true),
        ("odd_plain", ODD, "[ (tt;tt)* ] p", T::F0001, false),
        ("reach2_diamond", REACH2, "< tt* > <p tt* > s", T::F1111, true),
        ("idle_diamond", NEVER, "< tt* > <p tt* > s", T::F0001, false),
        ("ring3_even", RING3, "[ (tt;tt)* ] <p tt* > p", T::F1111, true),
        ("s_alt_parity", S_ALT, "[ tt* ] <p (tt;tt)* > s", T::F1111, false),
        ("s_alt_parity_often", S_ALT, "[ tt* ] <p (tt;tt)* > s", T::F0011, true),
    ]
}

fn fragment_pipeline() -> Outcome {
    let mut failures = Vec::new();
    let instances = fragment_instances();
    for (name, system, formula, beta, expect) in &instances {
        let ts: TransitionSystem = system.parse().expect("system");
        let phi = parse(formula, LogicId::RPromptLdl).expect("formula");
        let eval = |w: &LassoTrace, k: usize| eval_rprompt_ldl(w, k, &phi).expect("eval");
        let oracle = enumerated_verdict(&ts, *beta, &eval, true);
        if oracle != Some(*expect) {
            failures.push(format!("{name}: oracle verdict {oracle:?}"));
        }
        match mc_fragment(&ts, &phi, *beta) {
            Ok(v) => {
                if v.holds() != *expect {
                    failures.push(format!("{name}: model checker says {}", v.holds()));
                }
                if let Err(e) = check_prompt_cex(&ts, &v, *beta, &eval) {
                    failures.push(format!("{name}: {e}"));
                }
            }
            Err(e) => failures.push(format!("{name}: {e}")),
        }
    }
    let bad = parse("[ ((!t)*;t;(!t)*;t)* ] <p tt* > s", LogicId::RPromptLdl).expect("formula");
    let ts: TransitionSystem = SYNC3.parse().expect("system");
    let diagnostic = match mc_fragment(&ts, &bad, TruthValue4::F1111) {
        Err(McError::Translate(TranslateError::NotLimitMatching(guards))) => guards.join(", "),
        other => {
            failures.push(format!("non-limit-matching guard not rejected: {other:?}"));
            String::new()
        }
    };
    if instances.len() < MIN_FRAGMENT_INSTANCES {
        failures.push(format!("only {} instances", instances.len()));
    }
    if !bad.is_test_free() {
        failures.push("rejected formula should be test-free".to_string());
    }
    outcome(
        &failures,
        format!("{} instances, rejected guard `{diagnostic}`", instances.len()),
    )
}

fn embedding_coherence() -> Outcome {
    let props = default_props();
    let mut r = gen::rng(SEED + 9);
    let mut failures = Vec::new();
    for _ in 0..EMBEDDING_PAIRS {
        let phi = random_formula_sized(&mut r, LogicId::Ldl, MAX_FORMULA_SIZE, &props);
        let w = random_lasso(&mut r, &props, MAX_LASSO_POSITIONS);
        let robust = eval_rldl(&w, &embed_ldl_in_rldl(&phi).expect("embed")).expect("eval");
        let classical = eval_ldl(&w, &phi).expect("eval");
        if robust.bit(1) != classical {
            failures.push(format!("LDL {phi} on {w}: {robust} vs {classical}"));
        }
    }
    for _ in 0..EMBEDDING_PAIRS {
        let phi = random_formula_sized(&mut r, LogicId::Rltl, MAX_FORMULA_SIZE, &props);
        let w = random_lasso(&mut r, &props, MAX_LASSO_POSITIONS);
        let dynamic = eval_rldl(&w, &embed_rltl_in_rldl(&phi).expect("embed")).expect("eval");
        let temporal = eval_rltl(&w, &phi).expect("eval");
        if dynamic != temporal {
            failures.push(format!("rLTL {phi} on {w}: {dynamic} vs {temporal}"));
        }
    }
    outcome(&failures, format!("{EMBEDDING_PAIRS} LDL pairs, {EMBEDDING_PAIRS} rLTL pairs"))
}

fn guard_analysis() -> Outcome {
    let mut failures = Vec::new();
    for (text, expect) in [("tt*", true), ("(tt;tt)*", true), ("((!t)*;t;(!t)*;t)*", false)] {
        let g = parse_guard(text).expect("guard");
        match is_limit_matching(&g) {
            Ok(b) if b == expect => {}
            other => failures.push(format!("{text}: {other:?}")),
        }
    }
    let props = default_props();
    let mut r = gen::rng(SEED + 10);
    let mut worst = 0.0f64;
    for i in 0..GUARD_CORPUS {
        let g = if i % 2 == 0 {
            gen::random_plain_guard(&mut r, 1 + i % 12, &props)
        } else {
            let phi = random_formula_sized(&mut r, LogicId::Rldl, MAX_FORMULA_SIZE, &props);
            match phi.guards().first() {
                Some(g) => (*g).clone(),
                None => continue,
            }
        };
        let states = thompson(&g).num_states();
        worst = worst.max(states as f64 / g.length() as f64);
        if states > THOMPSON_FACTOR * g.length() {
            failures.push(format!("{g}: {states} states for length {}", g.length()));
        }
    }
    outcome(
        &failures,
        format!("limit-matching examples, {GUARD_CORPUS} guards, max states/length {worst:.2}"),
    )
}

fn run(label: &str, f: impl FnOnce() -> Outcome) -> bool {
    let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| Outcome {
        pass: false,
        detail: format!(
            "panicked: {}",
            e.downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default()
        ),
    });
    println!("{} {label}: {}", if result.pass { "PASS" } else { "FAIL" }, result.detail);
    result.pass
}

fn main() -> ExitCode {
    let mut ok = true;
    ok &= run("1 oracle values lie in B4", oracle_values_in_b4);
    ok &= run("2 box bits before the max-lift", monotonicity_example);
    let corpus = catch_unwind(pipeline_corpus).ok();
    ok &= run("3 rLDL automata agree with the oracle", || match &corpus {
        Some((_, failures, summary)) => outcome(failures, summary.clone()),
        None => Outcome {
            pass: false,
            detail: "corpus construction panicked".to_string(),
        },
    });
    ok &= run("4 derobustification", derobustification);
    ok &= run("5 threshold monotonicity", || match &corpus {
        Some((rows, _, _)) => threshold_monotonicity(rows),
        None => Outcome {
            pass: false,
            detail: "no corpus".to_string(),
        },
    });
    ok &= run("6 model checking", model_checking);
    ok &= run("7 parity solver", parity_solver);
    ok &= run("8 fragment pipeline", fragment_pipeline);
    ok &= run("9 embeddings", embedding_coherence);
    ok &= run("10 guard analysis", guard_analysis);
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
