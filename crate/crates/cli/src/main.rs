//! `rtl`: evaluate, translate, compile, model check and synthesize robust
//! and prompt temporal logic specifications.
//!
//! Exit codes: 0 success or property holds, 1 property violated or game
//! lost, 2 usage or input error.

use std::collections::BTreeSet;
use std::fs;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand::Rng;

use rtl_core::apa::{accepts_lasso, from_rldl_over};
use rtl_core::games::{solve_rldl_game, solve_rprompt_game, GameOutcome, LabeledGameGraph, Player};
use rtl_core::gen;
use rtl_core::guards::is_limit_matching;
use rtl_core::mc::{mc_fragment, mc_rldl, mc_rprompt_ltl, prompt_mc, McError, PromptVerdict, TransitionSystem, Verdict};
use rtl_core::omega::{apa_to_nba, dpa_accepts_lasso, dpa_to_hoa, nba_accepts_lasso, nba_to_dpa, nba_to_hoa};
use rtl_core::oracle::{eval_in, eval_rldl};
use rtl_core::syntax::{parse, parse_guard, print};
use rtl_core::translate::{
    embed_ldl_in_rldl, embed_rltl_in_rldl, fragment_translate, ltl_surface_to_ldl, rprompt_to_prompt,
};
use rtl_core::{Alphabet, Formula, LassoTrace, LogicId, TruthValue4};

#[derive(Parser)]
#[command(name = "rtl", version, about = "Robust and prompt linear temporal logics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    Nba,
    Dpa,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a formula on a lasso trace such as "{a} ; {b} {}".
    Eval {
        #[arg(long)]
        logic: LogicId,
        #[arg(long)]
        formula: String,
        #[arg(long)]
        trace: String,
        /// Bound for prompt operators.
        #[arg(long)]
        k: Option<usize>,
    },
    /// Translate between logics.
    Translate {
        #[arg(long)]
        from: LogicId,
        #[arg(long)]
        to: LogicId,
        #[arg(long)]
        formula: String,
        #[arg(long)]
        beta: Option<TruthValue4>,
    },
    /// Compile an rLDL formula and threshold into an automaton in HOA format.
    Compile {
        #[arg(long)]
        formula: String,
        #[arg(long)]
        beta: TruthValue4,
        #[arg(long, value_enum)]
        target: Target,
        /// Source logic: rldl, rltl, ldl or ltl.
        #[arg(long, default_value = "rldl")]
        logic: LogicId,
        /// Print state and color counts to standard error.
        #[arg(long)]
        stats: bool,
        /// Report whether the automaton accepts this lasso.
        #[arg(long)]
        check_trace: Option<String>,
        /// Comma-separated proposition set, overriding inference.
        #[arg(long, value_delimiter = ',')]
        props: Option<Vec<String>>,
    },
    /// Model check a transition system file.
    Mc {
        #[arg(long)]
        system: String,
        #[arg(long)]
        logic: LogicId,
        #[arg(long)]
        formula: String,
        #[arg(long, default_value = "1111")]
        beta: TruthValue4,
    },
    /// Solve a game on an arena file and print a winning strategy.
    Synth {
        #[arg(long)]
        arena: String,
        #[arg(long)]
        logic: LogicId,
        #[arg(long)]
        formula: String,
        #[arg(long, default_value = "1111")]
        beta: TruthValue4,
        /// Initial vertex; defaults to the first one declared.
        #[arg(long)]
        vertex: Option<String>,
    },
    /// Report whether a guard is test-free and limit-matching.
    GuardCheck { guard: String },
    /// Compare the automata pipeline with the oracle on random inputs.
    Fuzz {
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

enum Failure {
    /// Exit 1: property violated, game lost, divergence found.
    Negative,
    /// Exit 2.
    Input(String),
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Input(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Eval { logic, formula, trace, k } => eval(logic, &formula, &trace, k),
        Command::Translate { from, to, formula, beta } => translate(from, to, &formula, beta),
        Command::Compile {
            formula,
            beta,
            target,
            logic,
            stats,
            check_trace,
            props,
        } => compile(&formula, beta, target, logic, stats, check_trace.as_deref(), props),
        Command::Mc { system, logic, formula, beta } => model_check(&system, logic, &formula, beta),
        Command::Synth {
            arena,
            logic,
            formula,
            beta,
            vertex,
        } => synth(&arena, logic, &formula, beta, vertex.as_deref()),
        Command::GuardCheck { guard } => guard_check(&guard),
        Command::Fuzz { trials, seed } => fuzz(trials, seed),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Negative) => ExitCode::from(1),
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn eval(logic: LogicId, formula: &str, trace: &str, k: Option<usize>) -> Outcome {
    let phi = parse(formula, logic)?;
    let w: LassoTrace = trace.parse()?;
    let k = match k {
        Some(k) => k,
        None if logic.is_prompt() => {
            return Err(Failure::Input(format!("logic {logic} needs a bound: pass --k")));
        }
        None => 0,
    };
    let v = eval_in(logic, &w, k, &phi)?;
    if logic.is_robust() {
        println!("{v}");
    } else {
        println!("{}", u8::from(v == TruthValue4::F1111));
    }
    Ok(())
}

fn need_beta(beta: Option<TruthValue4>) -> Result<TruthValue4, Failure> {
    beta.ok_or_else(|| Failure::Input("this translation needs --beta".to_string()))
}

fn translate(from: LogicId, to: LogicId, formula: &str, beta: Option<TruthValue4>) -> Outcome {
    use LogicId::*;
    let phi = parse(formula, from)?;
    let out = match (from, to) {
        (RPromptLtl, PromptLtl) => rprompt_to_prompt(&phi, need_beta(beta)?)?,
        (RPromptLdl, PromptLdl) => fragment_translate(&phi, need_beta(beta)?)?,
        (Rltl, Rldl) => embed_rltl_in_rldl(&phi)?,
        (Ldl, Rldl) => embed_ldl_in_rldl(&phi)?,
        (LtlFrag, Ldl) | (PromptLtl, PromptLdl) => ltl_surface_to_ldl(&phi),
        (LtlFrag, Rldl) => embed_ldl_in_rldl(&ltl_surface_to_ldl(&phi))?,
        _ => return Err(Failure::Input(format!("no translation from {from} to {to}"))),
    };
    println!("{}", print(&out));
    Ok(())
}

/// The formula as rLDL, for logics that embed into it.
fn as_rldl(phi: &Formula, logic: LogicId) -> Result<Formula, Failure> {
    Ok(match logic {
        LogicId::Rldl => phi.clone(),
        LogicId::Rltl => embed_rltl_in_rldl(phi)?,
        LogicId::Ldl => embed_ldl_in_rldl(phi)?,
        LogicId::LtlFrag => embed_ldl_in_rldl(&ltl_surface_to_ldl(phi))?,
        other => return Err(Failure::Input(format!("logic {other} does not embed into rldl"))),
    })
}

fn compile(
    formula: &str,
    beta: TruthValue4,
    target: Target,
    logic: LogicId,
    stats: bool,
    check_trace: Option<&str>,
    props: Option<Vec<String>>,
) -> Outcome {
    let phi = as_rldl(&parse(formula, logic)?, logic)?;
    let trace: Option<LassoTrace> = check_trace.map(str::parse).transpose()?;
    let props: BTreeSet<String> = match props {
        Some(ps) => ps.into_iter().map(|p| p.trim().to_string()).filter(|p| !p.is_empty()).collect(),
        None => {
            let mut ps = phi.props();
            if let Some(w) = &trace {
                ps.extend(w.props());
            }
            ps
        }
    };
    if !phi.props().is_subset(&props) {
        return Err(Failure::Input("--props misses propositions of the formula".to_string()));
    }
    let alphabet = Alphabet::new(props);
    let apa = from_rldl_over(&phi, beta, &alphabet)?;
    let nba = apa_to_nba(&apa);
    let (hoa, accepted, counts) = match target {
        Target::Nba => (
            nba_to_hoa(&nba),
            trace.as_ref().map(|w| nba_accepts_lasso(&nba, w)),
            format!(
                "states: {}\naccepting: {}",
                nba.num_states(),
                nba.accepting.iter().filter(|&&a| a).count()
            ),
        ),
        Target::Dpa => {
            let dpa = nba_to_dpa(&nba);
            let colors: BTreeSet<u32> = dpa.color.iter().copied().collect();
            (
                dpa_to_hoa(&dpa),
                trace.as_ref().map(|w| dpa_accepts_lasso(&dpa, w)),
                format!("states: {}\ncolors: {}", dpa.num_states(), colors.len()),
            )
        }
    };
    print!("{hoa}");
    if stats {
        eprintln!("apa states: {}\n{counts}", apa.num_states());
    }
    match (trace, accepted) {
        (Some(w), Some(true)) => {
            eprintln!("trace {w}: accepted");
            Ok(())
        }
        (Some(w), Some(false)) => {
            eprintln!("trace {w}: rejected");
            Err(Failure::Negative)
        }
        _ => Ok(()),
    }
}

fn read(path: &str) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{path}: {e}")))
}

fn report_prompt(ts: &TransitionSystem, v: PromptVerdict) -> Outcome {
    match v {
        PromptVerdict::Holds => {
            println!("yes");
            Ok(())
        }
        PromptVerdict::Violated(cex) => {
            println!("no");
            for k in 0..3 {
                println!("counterexample for k = {k}: {}", cex.trace_for(ts, k));
            }
            if !cex.pumps.is_empty() {
                println!("(pumping {} cycle(s) k + 1 times refutes bound k)", cex.pumps.len());
            }
            Err(Failure::Negative)
        }
    }
}

fn model_check(path: &str, logic: LogicId, formula: &str, beta: TruthValue4) -> Outcome {
    let ts: TransitionSystem = read(path)?.parse()?;
    let phi = parse(formula, logic)?;
    match logic {
        LogicId::RPromptLtl => report_prompt(&ts, mc_rprompt_ltl(&ts, &phi, beta)?),
        LogicId::PromptLtl | LogicId::PromptLdl => report_prompt(&ts, prompt_mc(&ts, &phi)?),
        LogicId::RPromptLdl => match mc_fragment(&ts, &phi, beta) {
            Err(McError::Translate(e)) => Err(Failure::Input(format!(
                "model checking rpromptldl is only supported for test-free formulas with limit-matching guards: {e}"
            ))),
            other => report_prompt(&ts, other?),
        },
        _ => {
            let beta = if logic.is_robust() { beta } else { TruthValue4::F1111 };
            match mc_rldl(&ts, &as_rldl(&phi, logic)?, beta)? {
                Verdict::Holds => {
                    println!("yes");
                    Ok(())
                }
                Verdict::Violated(cex) => {
                    println!("no");
                    println!("counterexample: {}", cex.trace);
                    let names = |xs: &[usize]| xs.iter().map(|&s| ts.names[s].as_str()).collect::<Vec<_>>().join(" ");
                    println!("states: {} ; {}", names(&cex.prefix), names(&cex.cycle));
                    Err(Failure::Negative)
                }
            }
        }
    }
}

fn synth(path: &str, logic: LogicId, formula: &str, beta: TruthValue4, vertex: Option<&str>) -> Outcome {
    let g: LabeledGameGraph = read(path)?.parse()?;
    let phi = parse(formula, logic)?;
    let v = match vertex {
        Some(name) => g
            .vertex(name)
            .ok_or_else(|| Failure::Input(format!("unknown vertex `{name}`")))?,
        None => 0,
    };
    let out: GameOutcome = match logic {
        LogicId::RPromptLtl => solve_rprompt_game(&g, &phi, beta, v)?,
        _ => {
            let beta = if logic.is_robust() { beta } else { TruthValue4::F1111 };
            solve_rldl_game(&g, &as_rldl(&phi, logic)?, beta, v)?
        }
    };
    match (out.winner, out.strategy) {
        (Player::Even, Some(s)) => {
            println!("winner: player 0");
            if logic == LogicId::RPromptLtl {
                if let Some(k) = out.bound {
                    println!("bound: {k}");
                }
            }
            println!("initial memory: m{}", s.initial);
            print!("{}", s.render(&g));
            Ok(())
        }
        _ => {
            println!("winner: player 1");
            Err(Failure::Negative)
        }
    }
}

fn guard_check(text: &str) -> Outcome {
    let r = parse_guard(text)?;
    if !r.is_test_free() {
        println!("test-free: no, limit-matching: n/a");
        return Ok(());
    }
    let lm = is_limit_matching(&r)?;
    println!("test-free: yes, limit-matching: {}", if lm { "yes" } else { "no" });
    Ok(())
}

fn fuzz(trials: u64, seed: u64) -> Outcome {
    let props = gen::default_props();
    let alphabet = Alphabet::new(props.clone());
    for i in 0..trials {
        let trial_seed = seed.wrapping_add(i);
        let mut r = gen::rng(trial_seed);
        let phi = gen::random_formula_sized(&mut r, LogicId::Rldl, 12, &props);
        let beta = TruthValue4::ALL[r.gen_range(0..5)];
        let w = gen::random_lasso(&mut r, &props, 6);
        let want = eval_rldl(&w, &phi)? >= beta;
        let apa = from_rldl_over(&phi, beta, &alphabet)?;
        let nba = apa_to_nba(&apa);
        let dpa = nba_to_dpa(&nba);
        let got = [accepts_lasso(&apa, &w), nba_accepts_lasso(&nba, &w), dpa_accepts_lasso(&dpa, &w)];
        if got != [want; 3] {
            println!(
                "divergence in trial {i} (rerun with --trials 1 --seed {trial_seed}): formula {}, beta {beta}, trace {w}, oracle {want}, apa {}, nba {}, dpa {}",
                print(&phi),
                got[0],
                got[1],
                got[2]
            );
            return Err(Failure::Negative);
        }
    }
    println!("ok");
    Ok(())
}
