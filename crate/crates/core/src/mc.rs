//! Model checking finite transition systems against rLDL, rPrompt-LTL, and
//! the test-free limit-matching fragment of rPrompt-LDL.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::alphabet::{format_letter, Alphabet, Letter};
use crate::apa::{complement, from_rldl_over, ApaError};
use crate::games::parse_label_set;
use crate::graph;
use crate::lasso::LassoTrace;
use crate::omega::{apa_to_nba, nba_emptiness, nba_intersection, Nba};
use crate::oracle::{eval_classical, eval_robust};
use crate::prompt::{alternation, fresh_color, ldl_to_nba, relax, PromptError};
use crate::syntax::{check_logic, require_logic, Formula, LogicId, SyntaxError};
use crate::translate::{fragment_translate, ltl_surface_to_ldl, rprompt_to_prompt, TranslateError};
use crate::truth4::TruthValue4;

/// Pumped counterexamples are confirmed for every bound up to this one.
pub const PUMP_CHECK_BOUND: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum McError {
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("no initial state")]
    NoInitial,
    #[error("more than one initial state")]
    MultipleInitial,
    #[error("state {0} has no outgoing edge")]
    TerminalState(String),
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error(transparent)]
    Translate(#[from] TranslateError),
    #[error(transparent)]
    Apa(#[from] ApaError),
    #[error(transparent)]
    Prompt(#[from] PromptError),
    #[error("counterexample {0} failed oracle confirmation")]
    Unconfirmed(String),
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TransitionSystem {
    pub names: Vec<String>,
    pub labels: Vec<Letter>,
    pub succ: Vec<Vec<usize>>,
    pub initial: usize,
}

impl TransitionSystem {
    pub fn num_states(&self) -> usize {
        self.names.len()
    }

    pub fn state(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn props(&self) -> BTreeSet<String> {
        self.labels.iter().flatten().cloned().collect()
    }

    pub fn validate(&self) -> Result<(), McError> {
        match (0..self.num_states()).find(|&s| self.succ[s].is_empty()) {
            Some(s) => Err(McError::TerminalState(self.names[s].clone())),
            None => Ok(()),
        }
    }

    pub fn trace(&self, prefix: &[usize], cycle: &[usize]) -> LassoTrace {
        LassoTrace::new(
            prefix.iter().map(|&s| self.labels[s].clone()).collect(),
            cycle.iter().map(|&s| self.labels[s].clone()).collect(),
        )
        .expect("nonempty cycle")
    }

    /// Whether the state lasso is a path from the initial state.
    pub fn is_path(&self, prefix: &[usize], cycle: &[usize]) -> bool {
        let seq: Vec<usize> = prefix.iter().chain(cycle).copied().collect();
        !cycle.is_empty()
            && seq[0] == self.initial
            && seq.windows(2).all(|p| self.succ[p[0]].contains(&p[1]))
            && self.succ[*cycle.last().expect("nonempty")].contains(&cycle[0])
    }
}

impl FromStr for TransitionSystem {
    type Err = McError;

    /// Lines `state <name> [init] { p, q }` and `edge <a> <b>`; `#` starts a
    /// comment.
    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut names = Vec::new();
        let mut labels = Vec::new();
        let mut initial = None;
        let mut edges = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            let bad = |msg: &str| McError::Malformed {
                line: i + 1,
                msg: msg.to_string(),
            };
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("state ") {
                let rest = rest.trim();
                let brace = rest.find('{').ok_or_else(|| bad("expected `{ ... }` label"))?;
                let mut head = rest[..brace].split_whitespace();
                let name = head.next().ok_or_else(|| bad("missing state name"))?;
                let is_init = match head.next() {
                    None => false,
                    Some("init") => true,
                    Some(_) => return Err(bad("expected `init` or a label")),
                };
                if head.next().is_some() {
                    return Err(bad("trailing input before label"));
                }
                if names.iter().any(|n| n == name) {
                    return Err(bad("duplicate state"));
                }
                let label = parse_label_set(&rest[brace..]).ok_or_else(|| bad("malformed label"))?;
                if is_init {
                    if initial.is_some() {
                        return Err(McError::MultipleInitial);
                    }
                    initial = Some(names.len());
                }
                names.push(name.to_string());
                labels.push(label);
            } else if let Some(rest) = line.strip_prefix("edge ") {
                let parts: Vec<&str> = rest.split_whitespace().collect();
                if parts.len() != 2 {
                    return Err(bad("expected `edge <a> <b>`"));
                }
                edges.push((parts[0].to_string(), parts[1].to_string()));
            } else {
                return Err(bad("expected `state` or `edge`"));
            }
        }
        let mut succ = vec![Vec::new(); names.len()];
        for (a, b) in edges {
            let x = names.iter().position(|n| *n == a).ok_or(McError::UnknownState(a))?;
            let y = names.iter().position(|n| *n == b).ok_or(McError::UnknownState(b))?;
            if !succ[x].contains(&y) {
                succ[x].push(y);
            }
        }
        let ts = TransitionSystem {
            names,
            labels,
            succ,
            initial: initial.ok_or(McError::NoInitial)?,
        };
        ts.validate()?;
        Ok(ts)
    }
}

impl fmt::Display for TransitionSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in 0..self.num_states() {
            let init = if s == self.initial { " init" } else { "" };
            writeln!(f, "state {}{init} {}", self.names[s], format_letter(&self.labels[s]))?;
        }
        for s in 0..self.num_states() {
            for &t in &self.succ[s] {
                writeln!(f, "edge {} {}", self.names[s], self.names[t])?;
            }
        }
        Ok(())
    }
}

/// The traces of `ts`, read through `alphabet`: states are kept, a state
/// reads its own label and every state accepts.
pub fn ts_to_nba_over(ts: &TransitionSystem, alphabet: &Alphabet) -> Result<Nba, McError> {
    ts.validate()?;
    let letters = alphabet.num_letters();
    Ok(Nba {
        alphabet: alphabet.clone(),
        initials: vec![ts.initial],
        trans: (0..ts.num_states())
            .map(|s| {
                let mut row = vec![Vec::new(); letters];
                row[alphabet.mask(&ts.labels[s]) as usize] = ts.succ[s].clone();
                row
            })
            .collect(),
        accepting: vec![true; ts.num_states()],
    })
}

pub fn ts_to_nba(ts: &TransitionSystem) -> Result<Nba, McError> {
    ts_to_nba_over(ts, &Alphabet::new(ts.props()))
}

/// A path of the system as a lasso of states, with its trace.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Counterexample {
    pub prefix: Vec<usize>,
    pub cycle: Vec<usize>,
    pub trace: LassoTrace,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Verdict {
    Holds,
    Violated(Counterexample),
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds)
    }
}

/// Search the product of the system with a Büchi automaton for bad traces.
fn find_bad_path(ts: &TransitionSystem, bad: &Nba) -> Result<Option<(Vec<usize>, Vec<usize>)>, McError> {
    let sys = ts_to_nba_over(ts, &bad.alphabet)?;
    let product = nba_intersection(&sys, bad).expect("same alphabet");
    let per_state = bad.num_states() * 2;
    Ok(nba_emptiness(&product).map(|w| {
        (
            w.run_prefix.iter().map(|x| x / per_state).collect(),
            w.run_loop.iter().map(|x| x / per_state).collect(),
        )
    }))
}

/// Shorten a state lasso by cutting repeated states, keeping `violates`.
fn shrink(
    ts: &TransitionSystem,
    mut prefix: Vec<usize>,
    mut cycle: Vec<usize>,
    violates: &dyn Fn(&LassoTrace) -> bool,
) -> (Vec<usize>, Vec<usize>) {
    loop {
        let mut candidates: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
        // Enter the cycle at the first prefix state that lies on it.
        for (i, s) in prefix.iter().enumerate() {
            if let Some(t) = cycle.iter().position(|c| c == s) {
                let mut rot = cycle[t..].to_vec();
                rot.extend_from_slice(&cycle[..t]);
                candidates.push((prefix[..i].to_vec(), rot));
                break;
            }
        }
        for i in 0..prefix.len() {
            for j in i + 1..prefix.len() + 1 {
                let next = if j < prefix.len() { prefix[j] } else { cycle[0] };
                if prefix[i] == next {
                    let mut p = prefix[..i].to_vec();
                    p.extend_from_slice(&prefix[j..]);
                    candidates.push((p, cycle.clone()));
                }
            }
        }
        for i in 0..cycle.len() {
            for j in i + 1..cycle.len() {
                if cycle[i] == cycle[j] {
                    let mut c = cycle[..i].to_vec();
                    c.extend_from_slice(&cycle[j..]);
                    candidates.push((prefix.clone(), c));
                }
            }
        }
        candidates.sort_by_key(|(p, c)| p.len() + c.len());
        match candidates
            .into_iter()
            .find(|(p, c)| p.len() + c.len() < prefix.len() + cycle.len() && ts.is_path(p, c) && violates(&ts.trace(p, c)))
        {
            Some((p, c)) => {
                prefix = p;
                cycle = c;
            }
            None => return (prefix, cycle),
        }
    }
}

/// Does every path of `ts` have value at least `beta`? A violation comes
/// with a path whose value the oracle confirms to be below `beta`.
pub fn mc_rldl(ts: &TransitionSystem, phi: &Formula, beta: TruthValue4) -> Result<Verdict, McError> {
    require_logic(phi, LogicId::Rldl)?;
    ts.validate()?;
    let alphabet = Alphabet::new(phi.props());
    let bad = apa_to_nba(&complement(&from_rldl_over(phi, beta, &alphabet)?));
    let Some((prefix, cycle)) = find_bad_path(ts, &bad)? else {
        return Ok(Verdict::Holds);
    };
    let violates = |w: &LassoTrace| eval_robust(w, 0, phi) < beta;
    let trace = ts.trace(&prefix, &cycle);
    if !violates(&trace) {
        return Err(McError::Unconfirmed(trace.to_string()));
    }
    let (prefix, cycle) = shrink(ts, prefix, cycle, &violates);
    let trace = ts.trace(&prefix, &cycle);
    Ok(Verdict::Violated(Counterexample { prefix, cycle, trace }))
}

/// A family of counterexamples indexed by a pumping count: each listed
/// cycle is repeated that many times at its position, which makes every
/// color block of the underlying run long.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PumpedCounterexample {
    pub prefix: Vec<usize>,
    pub cycle: Vec<usize>,
    /// (position in prefix followed by cycle, states of a cycle starting
    /// at the state found there).
    pub pumps: Vec<(usize, Vec<usize>)>,
}

impl PumpedCounterexample {
    pub fn instantiate(&self, times: usize) -> (Vec<usize>, Vec<usize>) {
        let mut prefix = Vec::new();
        let mut cycle = Vec::new();
        let all: Vec<usize> = self.prefix.iter().chain(&self.cycle).copied().collect();
        for (i, &s) in all.iter().enumerate() {
            let out = if i < self.prefix.len() { &mut prefix } else { &mut cycle };
            for (at, pump) in &self.pumps {
                if *at == i {
                    for _ in 0..times {
                        out.extend_from_slice(pump);
                    }
                }
            }
            out.push(s);
        }
        (prefix, cycle)
    }

    /// The trace refuting bound `k`.
    pub fn trace_for(&self, ts: &TransitionSystem, k: usize) -> LassoTrace {
        let (p, c) = self.instantiate(k + 1);
        ts.trace(&p, &c)
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum PromptVerdict {
    Holds,
    Violated(PumpedCounterexample),
}

impl PromptVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, PromptVerdict::Holds)
    }
}

/// Is there a bound `k` such that every path satisfies `psi` (Prompt-LTL
/// or Prompt-LDL)? A violation is a pumpable path that, with a color change
/// only after a pumpable stretch, satisfies the negated relaxed formula.
pub fn prompt_mc(ts: &TransitionSystem, psi: &Formula) -> Result<PromptVerdict, McError> {
    let logic = if check_logic(psi, LogicId::PromptLtl).is_empty() {
        LogicId::PromptLtl
    } else {
        require_logic(psi, LogicId::PromptLdl)?;
        LogicId::PromptLdl
    };
    ts.validate()?;
    let refutes = |w: &LassoTrace, k: usize| !eval_classical(w, k, psi);
    if !psi.has_prompt() {
        let alphabet = Alphabet::new(psi.props());
        let bad = ldl_to_nba(&Formula::not(ltl_surface_to_ldl(psi)), &alphabet)?;
        return Ok(match find_bad_path(ts, &bad)? {
            None => PromptVerdict::Holds,
            Some((prefix, cycle)) => {
                let (prefix, cycle) = shrink(ts, prefix, cycle, &|w| refutes(w, 0));
                PromptVerdict::Violated(PumpedCounterexample {
                    prefix,
                    cycle,
                    pumps: Vec::new(),
                })
            }
        });
    }
    let _ = logic;
    let mut props = psi.props();
    let color = fresh_color(&props.union(&ts.props()).cloned().collect());
    props.insert(color.clone());
    let alphabet = Alphabet::new(props);
    let objective = Formula::and(Formula::not(relax(psi, &color)?), alternation(&color));
    let bad = ldl_to_nba(&objective, &alphabet)?;
    let Some(cex) = pumpable_bad_path(ts, &bad, &color) else {
        return Ok(PromptVerdict::Holds);
    };
    for k in 0..=PUMP_CHECK_BOUND {
        let w = cex.trace_for(ts, k);
        if !refutes(&w, k) {
            return Err(McError::Unconfirmed(format!("{w} at bound {k}")));
        }
    }
    Ok(PromptVerdict::Violated(cex))
}

/// Search (state, color, automaton state, flag) for an accepting lasso in
/// which the color only changes after the current block has visited a
/// pumpable node, one lying on a same-color cycle.
fn pumpable_bad_path(ts: &TransitionSystem, bad: &Nba, color: &str) -> Option<PumpedCounterexample> {
    let qn = bad.num_states();
    let node = |s: usize, b: usize, q: usize| (s * 2 + b) * qn + q;
    let unpack = |x: usize| (x / qn / 2, (x / qn) % 2, x % qn);
    let total = ts.num_states() * 2 * qn;
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); total];
    for s in 0..ts.num_states() {
        for b in 0..2 {
            let mut label = ts.labels[s].clone();
            if b == 1 {
                label.insert(color.to_string());
            }
            let letter = bad.alphabet.mask(&label) as usize;
            for q in 0..qn {
                for &q2 in &bad.trans[q][letter] {
                    for &t in &ts.succ[s] {
                        for b2 in 0..2 {
                            succ[node(s, b, q)].push(node(t, b2, q2));
                        }
                    }
                }
            }
        }
    }
    let same: Vec<Vec<usize>> = (0..total)
        .map(|x| succ[x].iter().copied().filter(|&y| unpack(y).1 == unpack(x).1).collect())
        .collect();
    let pumpable = graph::cyclic_nodes(&same);

    // Flagged graph: index x * 2 + flag.
    let mut fsucc: Vec<Vec<usize>> = vec![Vec::new(); total * 2];
    for x in 0..total {
        for f in 0..2 {
            for &y in &succ[x] {
                if unpack(y).1 == unpack(x).1 {
                    let f2 = f.max(pumpable[y] as usize);
                    fsucc[x * 2 + f].push(y * 2 + f2);
                } else if f == 1 {
                    fsucc[x * 2 + f].push(y * 2 + pumpable[y] as usize);
                }
            }
        }
    }
    let seeds: Vec<usize> = bad
        .initials
        .iter()
        .flat_map(|&q| (0..2).map(move |b| node(ts.initial, b, q)))
        .map(|x| x * 2 + pumpable[x] as usize)
        .collect();
    let reach = graph::reachable(&fsucc, seeds.iter().copied());
    let cyc = graph::cyclic_nodes(&fsucc);
    let target = (0..total * 2).find(|&v| reach[v] && cyc[v] && bad.accepting[unpack(v / 2).2])?;
    let comp = graph::scc(&fsucc);
    let stem = graph::bfs_path(&fsucc, seeds, |v| v == target, |_, _| true)?;
    let lp = graph::cycle_through(&fsucc, target, |a, b| comp[a] == comp[b])?;

    let nodes: Vec<usize> = stem[..stem.len() - 1].iter().chain(&lp).copied().collect();
    let prefix_len = stem.len() - 1;
    let mut pumps = Vec::new();
    for (i, &v) in nodes.iter().enumerate() {
        let x = v / 2;
        let starts_block = i == 0 || unpack(nodes[i - 1] / 2).1 != unpack(x).1;
        let flag_rises = i > 0 && nodes[i - 1] % 2 == 0 && v % 2 == 1 && !starts_block;
        if pumpable[x] && (starts_block || flag_rises) {
            let around = graph::cycle_through(&same, x, |_, _| true).expect("pumpable");
            pumps.push((i, around.iter().map(|&y| unpack(y).0).collect()));
        }
    }
    let states: Vec<usize> = nodes.iter().map(|&v| unpack(v / 2).0).collect();
    Some(PumpedCounterexample {
        prefix: states[..prefix_len].to_vec(),
        cycle: states[prefix_len..].to_vec(),
        pumps,
    })
}

/// Is there a bound `k` such that every path has value at least `beta`?
pub fn mc_rprompt_ltl(ts: &TransitionSystem, phi: &Formula, beta: TruthValue4) -> Result<PromptVerdict, McError> {
    require_logic(phi, LogicId::RPromptLtl)?;
    ts.validate()?;
    if beta == TruthValue4::F0000 {
        return Ok(PromptVerdict::Holds);
    }
    let verdict = prompt_mc(ts, &rprompt_to_prompt(phi, beta)?)?;
    confirm_robust(ts, phi, beta, &verdict)?;
    Ok(verdict)
}

/// Model checking for test-free rPrompt-LDL formulas with limit-matching
/// guards.
pub fn mc_fragment(ts: &TransitionSystem, phi: &Formula, beta: TruthValue4) -> Result<PromptVerdict, McError> {
    let psi = fragment_translate(phi, beta)?;
    ts.validate()?;
    let verdict = prompt_mc(ts, &psi)?;
    confirm_robust(ts, phi, beta, &verdict)?;
    Ok(verdict)
}

fn confirm_robust(ts: &TransitionSystem, phi: &Formula, beta: TruthValue4, v: &PromptVerdict) -> Result<(), McError> {
    if let PromptVerdict::Violated(cex) = v {
        for k in 0..=PUMP_CHECK_BOUND {
            let w = cex.trace_for(ts, k);
            if eval_robust(&w, k, phi) >= beta {
                return Err(McError::Unconfirmed(format!("{w} at bound {k}")));
            }
        }
    }
    Ok(())
}
