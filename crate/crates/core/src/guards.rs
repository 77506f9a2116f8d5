//! Automata for guards: Thompson ε-NFAs with tests, ε-closure over simple
//! paths, subset determinization of test-free guards, regular-expression
//! extraction by state elimination, and the limit-matching check.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use thiserror::Error;

use crate::alphabet::Alphabet;
use crate::lasso::LassoTrace;
use crate::omega::{dpa_complement, dpa_is_empty, nba_to_dpa, Nba};
use crate::oracle::MatchSetSummary;
use crate::syntax::{Formula, Guard, PropFormula};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GuardError {
    #[error("guard `{0}` contains tests")]
    HasTests(String),
    #[error("guard uses {0} distinct tests; at most 64 are supported")]
    TooManyTests(usize),
}

/// A set of tests, as a bitmask over [`GuardNfa::tests`].
pub type TestSet = u64;

/// ε-NFA whose states may carry a test formula.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GuardNfa {
    pub initial: usize,
    pub eps: Vec<Vec<usize>>,
    pub letter_edges: Vec<Vec<(PropFormula, usize)>>,
    pub finals: Vec<bool>,
    pub test_label: Vec<Option<usize>>,
    pub tests: Vec<Formula>,
}

impl GuardNfa {
    pub fn num_states(&self) -> usize {
        self.finals.len()
    }

    fn add_state(&mut self) -> usize {
        self.eps.push(Vec::new());
        self.letter_edges.push(Vec::new());
        self.finals.push(false);
        self.test_label.push(None);
        self.finals.len() - 1
    }

    pub fn has_tests(&self) -> bool {
        self.test_label.iter().any(Option::is_some)
    }

    pub fn has_eps(&self) -> bool {
        self.eps.iter().any(|e| !e.is_empty())
    }

    fn label_mask(&self, q: usize) -> TestSet {
        self.test_label[q].map_or(0, |t| 1 << t)
    }

    /// States reachable from `q` by ε-paths, each with the minimal test sets
    /// over all such paths. Tests of both endpoints are included. Removing
    /// an ε-cycle from a path only removes tests, so the minima are attained
    /// on simple paths.
    pub fn simple_eps_closure(&self, q: usize) -> Vec<(usize, Vec<TestSet>)> {
        let mut sets: BTreeMap<usize, Vec<TestSet>> = BTreeMap::new();
        sets.insert(q, vec![self.label_mask(q)]);
        let mut work = VecDeque::from([(q, self.label_mask(q))]);
        while let Some((x, m)) = work.pop_front() {
            if !sets[&x].contains(&m) {
                continue;
            }
            for &y in &self.eps[x] {
                let my = m | self.label_mask(y);
                let entry = sets.entry(y).or_default();
                if entry.iter().any(|&o| o & my == o) {
                    continue;
                }
                entry.retain(|&o| o & my != my);
                entry.push(my);
                work.push_back((y, my));
            }
        }
        sets.into_iter()
            .map(|(s, mut v)| {
                v.sort_unstable();
                (s, v)
            })
            .collect()
    }

    fn plain_closure(&self, seeds: impl IntoIterator<Item = usize>) -> BTreeSet<usize> {
        let mut seen: BTreeSet<usize> = BTreeSet::new();
        let mut stack: Vec<usize> = seeds.into_iter().collect();
        while let Some(x) = stack.pop() {
            if seen.insert(x) {
                stack.extend(self.eps[x].iter().copied());
            }
        }
        seen
    }

    /// Exact match summary of the automaton on `w` from position 0, computed
    /// on the product of states with canonical positions. `test_holds(t, c)`
    /// decides test `t` at canonical position `c`. Finite matches are listed
    /// below `horizon`; infinite classes come from the product's cycles.
    pub fn match_summary(
        &self,
        w: &LassoTrace,
        horizon: usize,
        test_holds: &dyn Fn(usize, usize) -> bool,
    ) -> MatchSetSummary {
        let n = w.positions();
        let q = self.num_states();
        let closures: Vec<Vec<(usize, Vec<TestSet>)>> =
            (0..q).map(|s| self.simple_eps_closure(s)).collect();
        let feasible = |mask: TestSet, c: usize| {
            (0..self.tests.len()).all(|t| mask & (1 << t) == 0 || test_holds(t, c))
        };
        let reach_at = |s: usize, c: usize| -> Vec<usize> {
            closures[s]
                .iter()
                .filter(|(_, ms)| ms.iter().any(|&m| feasible(m, c)))
                .map(|(x, _)| *x)
                .collect()
        };
        let accepting = |s: usize, c: usize| reach_at(s, c).iter().any(|&x| self.finals[x]);
        let step = |s: usize, c: usize| -> BTreeSet<usize> {
            let letter = w.letter_at(c);
            let mut out = BTreeSet::new();
            for x in reach_at(s, c) {
                for (phi, y) in &self.letter_edges[x] {
                    if phi.holds(&|p| letter.contains(p)) {
                        out.insert(*y);
                    }
                }
            }
            out
        };

        let mut finite = BTreeSet::new();
        let mut layer: BTreeSet<usize> = BTreeSet::from([self.initial]);
        for j in 0..horizon {
            let c = w.canonical_index(j);
            if layer.iter().any(|&s| accepting(s, c)) {
                finite.insert(j);
            }
            let mut next = BTreeSet::new();
            for &s in &layer {
                next.extend(step(s, c));
            }
            layer = next;
        }

        // Product graph over (state, canonical position).
        let id = |s: usize, c: usize| s * n + c;
        let mut succ: Vec<Vec<usize>> = vec![Vec::new(); q * n];
        for s in 0..q {
            for c in 0..n {
                succ[id(s, c)] = step(s, c).into_iter().map(|t| id(t, w.successor(c))).collect();
            }
        }
        let reach = crate::graph::reachable(&succ, [id(self.initial, 0)]);
        let on_cycle = crate::graph::cyclic_nodes(&succ);
        let pumped = crate::graph::reachable(
            &succ,
            (0..q * n).filter(|&v| reach[v] && on_cycle[v]),
        );
        let infinite = (0..q * n)
            .filter(|&v| pumped[v] && accepting(v / n, v % n))
            .map(|v| v % n)
            .collect();
        MatchSetSummary {
            finite_matches: finite,
            infinite_classes: infinite,
            threshold: horizon / 2,
            horizon,
        }
    }
}

/// Thompson construction. Final states are terminal and test states have a
/// single ε-successor.
pub fn thompson(r: &Guard) -> GuardNfa {
    let mut a = GuardNfa {
        initial: 0,
        eps: Vec::new(),
        letter_edges: Vec::new(),
        finals: Vec::new(),
        test_label: Vec::new(),
        tests: Vec::new(),
    };
    let (s, f) = build(&mut a, r);
    a.initial = s;
    a.finals[f] = true;
    a
}

fn build(a: &mut GuardNfa, r: &Guard) -> (usize, usize) {
    match r {
        Guard::Prop(phi) => {
            let s = a.add_state();
            let f = a.add_state();
            a.letter_edges[s].push((phi.clone(), f));
            (s, f)
        }
        Guard::Test(phi) => {
            let s = a.add_state();
            let f = a.add_state();
            let t = match a.tests.iter().position(|x| x == &**phi) {
                Some(t) => t,
                None => {
                    a.tests.push((**phi).clone());
                    a.tests.len() - 1
                }
            };
            a.test_label[s] = Some(t);
            a.eps[s].push(f);
            (s, f)
        }
        Guard::Alt(x, y) => {
            let s = a.add_state();
            let (s1, f1) = build(a, x);
            let (s2, f2) = build(a, y);
            let f = a.add_state();
            a.eps[s].extend([s1, s2]);
            a.eps[f1].push(f);
            a.eps[f2].push(f);
            (s, f)
        }
        Guard::Concat(x, y) => {
            let (s1, f1) = build(a, x);
            let (s2, f2) = build(a, y);
            a.eps[f1].push(s2);
            (s1, f2)
        }
        Guard::Star(x) => {
            let s = a.add_state();
            let (s1, f1) = build(a, x);
            let f = a.add_state();
            a.eps[s].extend([s1, f]);
            a.eps[f1].extend([s1, f]);
            (s, f)
        }
    }
}

/// Remove ε-edges from a test-free automaton. States are kept; a state
/// becomes final if its ε-closure contains a final state.
pub fn eps_eliminate_test_free(a: &GuardNfa) -> Result<GuardNfa, GuardError> {
    if a.has_tests() {
        return Err(GuardError::HasTests(format!("{} tests", a.tests.len())));
    }
    let n = a.num_states();
    let mut out = GuardNfa {
        initial: a.initial,
        eps: vec![Vec::new(); n],
        letter_edges: vec![Vec::new(); n],
        finals: vec![false; n],
        test_label: vec![None; n],
        tests: Vec::new(),
    };
    for q in 0..n {
        let cl = a.plain_closure([q]);
        out.finals[q] = cl.iter().any(|&x| a.finals[x]);
        let mut edges: Vec<(PropFormula, usize)> = cl
            .iter()
            .flat_map(|&x| a.letter_edges[x].iter().cloned())
            .collect();
        edges.sort();
        edges.dedup();
        out.letter_edges[q] = edges;
    }
    Ok(out)
}

/// Complete deterministic automaton over the letters of `alphabet`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GuardDfa {
    pub alphabet: Alphabet,
    pub initial: usize,
    pub trans: Vec<Vec<usize>>,
    pub finals: Vec<bool>,
}

impl GuardDfa {
    pub fn num_states(&self) -> usize {
        self.finals.len()
    }

    pub fn run(&self, from: usize, word: &[u32]) -> usize {
        word.iter().fold(from, |q, &a| self.trans[q][a as usize])
    }

    pub fn accepts(&self, word: &[u32]) -> bool {
        self.finals[self.run(self.initial, word)]
    }

    /// Read as a deterministic Büchi automaton with the final states
    /// accepting.
    pub fn as_buchi(&self) -> Nba {
        Nba {
            alphabet: self.alphabet.clone(),
            initials: vec![self.initial],
            trans: self
                .trans
                .iter()
                .map(|row| row.iter().map(|&t| vec![t]).collect())
                .collect(),
            accepting: self.finals.clone(),
        }
    }
}

/// Subset construction over the states that carry letter edges or are
/// final; ε-edges are followed inside each step. The empty subset is kept
/// as a rejecting sink, so the result is complete.
pub fn determinize(a: &GuardNfa, alphabet: &Alphabet) -> Result<GuardDfa, GuardError> {
    if a.has_tests() {
        return Err(GuardError::HasTests(format!("{} tests", a.tests.len())));
    }
    let important =
        |q: &usize| !a.letter_edges[*q].is_empty() || a.finals[*q];
    let core = |set: BTreeSet<usize>| -> Vec<usize> {
        a.plain_closure(set).into_iter().filter(important).collect()
    };
    let start = core(BTreeSet::from([a.initial]));
    let mut index: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut subsets: Vec<Vec<usize>> = Vec::new();
    let mut trans: Vec<Vec<usize>> = Vec::new();
    index.insert(start.clone(), 0);
    subsets.push(start);
    let mut i = 0;
    while i < subsets.len() {
        let cur = subsets[i].clone();
        let mut row = Vec::with_capacity(alphabet.num_letters());
        for m in alphabet.letters() {
            let targets: BTreeSet<usize> = cur
                .iter()
                .flat_map(|&q| a.letter_edges[q].iter())
                .filter(|(phi, _)| alphabet.holds(phi, m))
                .map(|(_, t)| *t)
                .collect();
            let next = core(targets);
            let id = match index.get(&next) {
                Some(&id) => id,
                None => {
                    let id = subsets.len();
                    index.insert(next.clone(), id);
                    subsets.push(next);
                    id
                }
            };
            row.push(id);
        }
        trans.push(row);
        i += 1;
    }
    let finals = subsets
        .iter()
        .map(|s| s.iter().any(|&q| a.finals[q]))
        .collect();
    Ok(GuardDfa {
        alphabet: alphabet.clone(),
        initial: 0,
        trans,
        finals,
    })
}

// ---------------------------------------------------------------------------
// state elimination

#[derive(Clone, PartialEq, Debug)]
enum Re {
    Empty,
    Eps,
    G(Guard),
}

fn eps_guard() -> Guard {
    Guard::star(Guard::ff())
}

fn re_union(a: Re, b: Re) -> Re {
    match (a, b) {
        (Re::Empty, x) | (x, Re::Empty) => x,
        (Re::Eps, Re::Eps) => Re::Eps,
        (Re::Eps, Re::G(g)) | (Re::G(g), Re::Eps) => match g {
            Guard::Star(_) => Re::G(g),
            other => Re::G(Guard::alt(other, eps_guard())),
        },
        (Re::G(x), Re::G(y)) => {
            if x == y {
                Re::G(x)
            } else if let (Guard::Prop(p), Guard::Prop(q)) = (&x, &y) {
                Re::G(Guard::Prop(PropFormula::or(p.clone(), q.clone())))
            } else {
                Re::G(Guard::alt(x, y))
            }
        }
    }
}

fn re_concat(a: Re, b: Re) -> Re {
    match (a, b) {
        (Re::Empty, _) | (_, Re::Empty) => Re::Empty,
        (Re::Eps, x) | (x, Re::Eps) => x,
        (Re::G(x), Re::G(y)) => Re::G(Guard::concat(x, y)),
    }
}

fn re_star(a: Re) -> Re {
    match a {
        Re::Empty | Re::Eps => Re::Eps,
        Re::G(Guard::Star(g)) => Re::G(Guard::Star(g)),
        Re::G(g) => Re::G(Guard::star(g)),
    }
}

/// A test-free guard matching exactly the words that drive `d` from `from`
/// into a state of `to`. States are eliminated lowest-degree first.
pub fn extract_regex(d: &GuardDfa, from: usize, to: &BTreeSet<usize>) -> Guard {
    let n = d.num_states();
    // Restrict to states on some path from `from` into `to`.
    let succ: Vec<Vec<usize>> = d.trans.clone();
    let fwd = crate::graph::reachable(&succ, [from]);
    let pred = crate::graph::reverse(&succ);
    let bwd = crate::graph::reachable(&pred, to.iter().copied());
    let live: Vec<usize> = (0..n).filter(|&q| fwd[q] && bwd[q]).collect();
    if !live.contains(&from) {
        return Guard::ff();
    }
    // Nodes: live DFA states, then source and sink.
    let src = n;
    let snk = n + 1;
    let mut label: BTreeMap<(usize, usize), Re> = BTreeMap::new();
    for &p in &live {
        let mut letters: BTreeMap<usize, BTreeSet<u32>> = BTreeMap::new();
        for m in d.alphabet.letters() {
            let q = d.trans[p][m as usize];
            if fwd[q] && bwd[q] {
                letters.entry(q).or_default().insert(m);
            }
        }
        for (q, ls) in letters {
            label.insert((p, q), Re::G(Guard::Prop(d.alphabet.describe(&ls))));
        }
        if to.contains(&p) {
            label.insert((p, snk), Re::Eps);
        }
    }
    label.insert((src, from), Re::Eps);

    let mut remaining: BTreeSet<usize> = live.iter().copied().collect();
    while !remaining.is_empty() {
        let degree = |x: usize| label.keys().filter(|(a, b)| *a == x || *b == x).count();
        let x = *remaining
            .iter()
            .min_by_key(|&&x| (degree(x), x))
            .expect("nonempty");
        remaining.remove(&x);
        let self_loop = re_star(label.remove(&(x, x)).unwrap_or(Re::Empty));
        let ins: Vec<(usize, Re)> = label
            .iter()
            .filter(|((_, b), _)| *b == x)
            .map(|((a, _), r)| (*a, r.clone()))
            .collect();
        let outs: Vec<(usize, Re)> = label
            .iter()
            .filter(|((a, _), _)| *a == x)
            .map(|((_, b), r)| (*b, r.clone()))
            .collect();
        label.retain(|(a, b), _| *a != x && *b != x);
        for (p, rin) in &ins {
            for (q, rout) in &outs {
                let through = re_concat(re_concat(rin.clone(), self_loop.clone()), rout.clone());
                let old = label.remove(&(*p, *q)).unwrap_or(Re::Empty);
                let merged = re_union(old, through);
                if merged != Re::Empty {
                    label.insert((*p, *q), merged);
                }
            }
        }
    }
    match label.remove(&(src, snk)).unwrap_or(Re::Empty) {
        Re::Empty => Guard::ff(),
        Re::Eps => eps_guard(),
        Re::G(g) => g,
    }
}

/// The alphabet over the propositions of a guard.
pub fn guard_alphabet(r: &Guard) -> Alphabet {
    let mut props = BTreeSet::new();
    r.collect_props(&mut props);
    Alphabet::new(props)
}

/// Whether every infinite word has infinitely many `r`-matched prefixes.
/// The guard's DFA is read as a deterministic Büchi automaton; the guard is
/// limit-matching iff that automaton is universal, decided by determinizing
/// to parity, complementing and checking emptiness.
pub fn is_limit_matching(r: &Guard) -> Result<bool, GuardError> {
    if !r.is_test_free() {
        return Err(GuardError::HasTests(r.to_string()));
    }
    let d = determinize(&thompson(r), &guard_alphabet(r))?;
    let parity = nba_to_dpa(&d.as_buchi());
    Ok(dpa_is_empty(&dpa_complement(&parity)))
}

/// Same decision by a direct cycle search: the guard is not limit-matching
/// iff some reachable cycle of the DFA avoids final states.
pub fn is_limit_matching_direct(r: &Guard) -> Result<bool, GuardError> {
    if !r.is_test_free() {
        return Err(GuardError::HasTests(r.to_string()));
    }
    let d = determinize(&thompson(r), &guard_alphabet(r))?;
    let reach = crate::graph::reachable(&d.trans, [d.initial]);
    let restricted: Vec<Vec<usize>> = (0..d.num_states())
        .map(|q| {
            if d.finals[q] || !reach[q] {
                Vec::new()
            } else {
                d.trans[q].iter().copied().filter(|&t| !d.finals[t]).collect()
            }
        })
        .collect();
    let cyc = crate::graph::cyclic_nodes(&restricted);
    Ok(!cyc.iter().any(|&b| b))
}
