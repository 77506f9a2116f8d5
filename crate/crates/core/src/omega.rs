//! Nondeterministic Büchi and deterministic parity automata.
//!
//! Both work over the full alphabet `2^P` with letters given by their
//! masks. Parity acceptance is max-parity: even wins.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt::Write as _;

use thiserror::Error;

use crate::alphabet::Alphabet;
use crate::apa::{minimize, union_sorted, Apa, PositiveBool};
use crate::graph;
use crate::lasso::LassoTrace;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OmegaError {
    #[error("automata are over different alphabets: {0} and {1}")]
    AlphabetMismatch(Alphabet, Alphabet),
    #[error("malformed HOA input at line {line}: {msg}")]
    Hoa { line: usize, msg: String },
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Nba {
    pub alphabet: Alphabet,
    pub initials: Vec<usize>,
    /// `trans[q][letter]`.
    pub trans: Vec<Vec<Vec<usize>>>,
    pub accepting: Vec<bool>,
}

/// An accepted lasso with the run that accepts it: `run_prefix[i]` is the
/// state before reading prefix letter `i`, likewise for the loop, and the
/// run returns to `run_loop[0]` after the loop.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct NbaWitness {
    pub trace: LassoTrace,
    pub run_prefix: Vec<usize>,
    pub run_loop: Vec<usize>,
}

impl Nba {
    pub fn num_states(&self) -> usize {
        self.accepting.len()
    }

    pub fn empty(alphabet: &Alphabet) -> Nba {
        Nba {
            alphabet: alphabet.clone(),
            initials: Vec::new(),
            trans: Vec::new(),
            accepting: Vec::new(),
        }
    }

    pub fn universal(alphabet: &Alphabet) -> Nba {
        Nba {
            alphabet: alphabet.clone(),
            initials: vec![0],
            trans: vec![vec![vec![0]; alphabet.num_letters()]],
            accepting: vec![true],
        }
    }

    /// Successor states ignoring letters.
    pub fn graph(&self) -> Vec<Vec<usize>> {
        self.trans
            .iter()
            .map(|row| {
                let s: BTreeSet<usize> = row.iter().flatten().copied().collect();
                s.into_iter().collect()
            })
            .collect()
    }

    /// Drop states that are unreachable or cannot reach an accepting cycle.
    pub fn trimmed(&self) -> Nba {
        let succ = self.graph();
        let reach = graph::reachable(&succ, self.initials.iter().copied());
        let cyc = graph::cyclic_nodes(&succ);
        let good: Vec<usize> = (0..self.num_states())
            .filter(|&q| reach[q] && self.accepting[q] && cyc[q])
            .collect();
        let coreach = graph::reachable(&graph::reverse(&succ), good);
        let mut map = vec![usize::MAX; self.num_states()];
        let mut keep = Vec::new();
        for q in 0..self.num_states() {
            if reach[q] && coreach[q] {
                map[q] = keep.len();
                keep.push(q);
            }
        }
        Nba {
            alphabet: self.alphabet.clone(),
            initials: self.initials.iter().filter(|&&q| map[q] != usize::MAX).map(|&q| map[q]).collect(),
            trans: keep
                .iter()
                .map(|&q| {
                    self.trans[q]
                        .iter()
                        .map(|ts| ts.iter().filter(|&&t| map[t] != usize::MAX).map(|&t| map[t]).collect())
                        .collect()
                })
                .collect(),
            accepting: keep.iter().map(|&q| self.accepting[q]).collect(),
        }
    }
}

/// Membership of a lasso: an accepting state on a cycle of the product with
/// the lasso's canonical positions, reachable from the start.
pub fn nba_accepts_lasso(b: &Nba, w: &LassoTrace) -> bool {
    let masks = w.masks(&b.alphabet);
    let n = w.positions();
    let node = |q: usize, c: usize| q * n + c;
    let succ: Vec<Vec<usize>> = (0..b.num_states() * n)
        .map(|v| {
            let (q, c) = (v / n, v % n);
            let next = w.successor(c);
            b.trans[q][masks[c] as usize].iter().map(|&t| node(t, next)).collect()
        })
        .collect();
    let reach = graph::reachable(&succ, b.initials.iter().map(|&q| node(q, 0)));
    let cyc = graph::cyclic_nodes(&succ);
    (0..succ.len()).any(|v| reach[v] && cyc[v] && b.accepting[v / n])
}

#[derive(Clone, Copy, PartialEq, Debug)]
enum Mark {
    White,
    Cyan,
    Blue,
}

/// Nested depth-first search. Returns an accepted lasso with its run, or
/// `None` if the language is empty.
pub fn nba_emptiness(b: &Nba) -> Option<NbaWitness> {
    let n = b.num_states();
    // One letter per distinct successor suffices for a witness.
    let edges: Vec<Vec<(u32, usize)>> = (0..n)
        .map(|q| {
            let mut seen = BTreeSet::new();
            let mut out = Vec::new();
            for (a, ts) in b.trans[q].iter().enumerate() {
                for &t in ts {
                    if seen.insert(t) {
                        out.push((a as u32, t));
                    }
                }
            }
            out
        })
        .collect();
    let mut mark = vec![Mark::White; n];
    let mut red = vec![false; n];
    let mut on_stack_at = vec![usize::MAX; n];
    for &init in &b.initials {
        if mark[init] != Mark::White {
            continue;
        }
        // Blue stack: (state, next edge, letter taken to reach it).
        let mut blue: Vec<(usize, usize, u32)> = vec![(init, 0, 0)];
        mark[init] = Mark::Cyan;
        on_stack_at[init] = 0;
        while let Some(&mut (q, ref mut next, _)) = blue.last_mut() {
            if *next < edges[q].len() {
                let (a, t) = edges[q][*next];
                *next += 1;
                if mark[t] == Mark::White {
                    mark[t] = Mark::Cyan;
                    on_stack_at[t] = blue.len();
                    blue.push((t, 0, a));
                }
                continue;
            }
            if b.accepting[q] {
                if let Some(red_path) = red_search(&edges, q, &mark, &mut red) {
                    // red_path: letters and states from q to a cyan state.
                    let (target, _) = *red_path.last().expect("nonempty");
                    let t_at = on_stack_at[target];
                    let stack_states: Vec<usize> = blue.iter().map(|f| f.0).collect();
                    let stack_letters: Vec<u32> = blue.iter().map(|f| f.2).collect();
                    let prefix_letters = &stack_letters[1..=t_at];
                    let run_prefix = stack_states[..t_at].to_vec();
                    let mut loop_letters: Vec<u32> = stack_letters[t_at + 1..].to_vec();
                    let mut run_loop: Vec<usize> = stack_states[t_at..].to_vec();
                    for (i, (s, a)) in red_path.iter().enumerate() {
                        loop_letters.push(*a);
                        if i + 1 < red_path.len() {
                            run_loop.push(*s);
                        }
                    }
                    let trace = LassoTrace::from_masks(&b.alphabet, prefix_letters, &loop_letters);
                    return Some(NbaWitness {
                        trace,
                        run_prefix,
                        run_loop,
                    });
                }
            }
            mark[q] = Mark::Blue;
            on_stack_at[q] = usize::MAX;
            blue.pop();
        }
    }
    None
}

/// Search from `seed` for a cyan state. Returns the path as
/// (state reached, letter read) pairs.
fn red_search(edges: &[Vec<(u32, usize)>], seed: usize, mark: &[Mark], red: &mut [bool]) -> Option<Vec<(usize, u32)>> {
    let mut stack: Vec<(usize, usize)> = vec![(seed, 0)];
    let mut path: Vec<(usize, u32)> = Vec::new();
    red[seed] = true;
    while let Some(&mut (q, ref mut next)) = stack.last_mut() {
        if *next < edges[q].len() {
            let (a, t) = edges[q][*next];
            *next += 1;
            if mark[t] == Mark::Cyan {
                path.push((t, a));
                return Some(path);
            }
            if !red[t] {
                red[t] = true;
                path.push((t, a));
                stack.push((t, 0));
            }
            continue;
        }
        stack.pop();
        path.pop();
    }
    None
}

/// Product accepting the intersection. States are `(q1, q2, track)` with
/// index `(q1 * |B2| + q2) * 2 + track`; the track flips from 0 to 1 after an
/// accepting state of the first automaton and back after one of the second.
pub fn nba_intersection(b1: &Nba, b2: &Nba) -> Result<Nba, OmegaError> {
    if b1.alphabet != b2.alphabet {
        return Err(OmegaError::AlphabetMismatch(b1.alphabet.clone(), b2.alphabet.clone()));
    }
    let (n1, n2) = (b1.num_states(), b2.num_states());
    let idx = |q1: usize, q2: usize, t: usize| (q1 * n2 + q2) * 2 + t;
    let letters = b1.alphabet.num_letters();
    let mut trans = vec![vec![Vec::new(); letters]; n1 * n2 * 2];
    let mut accepting = vec![false; n1 * n2 * 2];
    for q1 in 0..n1 {
        for q2 in 0..n2 {
            for t in 0..2 {
                let nt = match t {
                    0 if b1.accepting[q1] => 1,
                    1 if b2.accepting[q2] => 0,
                    _ => t,
                };
                let v = idx(q1, q2, t);
                accepting[v] = t == 0 && b1.accepting[q1];
                for a in 0..letters {
                    for &s1 in &b1.trans[q1][a] {
                        for &s2 in &b2.trans[q2][a] {
                            trans[v][a].push(idx(s1, s2, nt));
                        }
                    }
                }
            }
        }
    }
    let mut initials = Vec::new();
    for &i1 in &b1.initials {
        for &i2 in &b2.initials {
            initials.push(idx(i1, i2, 0));
        }
    }
    Ok(Nba {
        alphabet: b1.alphabet.clone(),
        initials,
        trans,
        accepting,
    })
}

/// Alternating parity to Büchi. A weak automaton is read as alternating
/// Büchi with the even states accepting; otherwise each copy guesses an even
/// bound `c` from which on all its colors are at most `c` and `c` recurs.
/// The alternating Büchi automaton is then turned nondeterministic by the
/// breakpoint (subset, obligation) construction.
pub fn apa_to_nba(a: &Apa) -> Nba {
    let first = &a.delta[a.initial];
    if first.iter().all(|f| *f == PositiveBool::True) {
        return Nba::universal(&a.alphabet);
    }
    if first.iter().all(|f| *f == PositiveBool::False) {
        return Nba::empty(&a.alphabet);
    }
    let (delta, accepting, initial) = if a.is_weak() {
        let acc: Vec<bool> = a.color.iter().map(|c| c % 2 == 0).collect();
        (a.delta.clone(), acc, a.initial)
    } else {
        index_reduction(a)
    };
    breakpoint(&a.alphabet, &delta, &accepting, initial).trimmed()
}

fn index_reduction(a: &Apa) -> (Vec<Vec<PositiveBool>>, Vec<bool>, usize) {
    let mut evens: Vec<u32> = a.color.iter().map(|c| c + c % 2).collect();
    evens.sort();
    evens.dedup();
    let n = a.num_states();
    let slots = evens.len() + 1;
    // Slot 0: uncommitted copy; slot k: committed to evens[k - 1].
    let id = |q: usize, slot: usize| q * slots + slot;
    let mut delta = vec![Vec::new(); n * slots];
    let mut accepting = vec![false; n * slots];
    for q in 0..n {
        delta[id(q, 0)] = a.delta[q]
            .iter()
            .map(|f| {
                let mut g = f.clone();
                g = subst(&g, &mut |s| {
                    PositiveBool::or((0..slots).map(|k| PositiveBool::Var(id(s, k))).collect())
                });
                g
            })
            .collect();
        for (k, &c) in evens.iter().enumerate() {
            let slot = k + 1;
            accepting[id(q, slot)] = a.color[q] == c;
            delta[id(q, slot)] = if a.color[q] > c {
                vec![PositiveBool::False; a.alphabet.num_letters()]
            } else {
                a.delta[q].iter().map(|f| f.map_vars(&mut |s| id(s, slot))).collect()
            };
        }
    }
    (delta, accepting, id(a.initial, 0))
}

fn subst(f: &PositiveBool, g: &mut dyn FnMut(usize) -> PositiveBool) -> PositiveBool {
    match f {
        PositiveBool::True | PositiveBool::False => f.clone(),
        PositiveBool::Var(q) => g(*q),
        PositiveBool::And(xs) => PositiveBool::and(xs.iter().map(|x| subst(x, g)).collect()),
        PositiveBool::Or(xs) => PositiveBool::or(xs.iter().map(|x| subst(x, g)).collect()),
    }
}

fn breakpoint(alphabet: &Alphabet, delta: &[Vec<PositiveBool>], accepting: &[bool], initial: usize) -> Nba {
    let letters = alphabet.num_letters();
    let mut models: HashMap<(usize, usize), Vec<Vec<usize>>> = HashMap::new();
    let mut models_of = |q: usize, a: usize| -> Vec<Vec<usize>> {
        models.entry((q, a)).or_insert_with(|| delta[q][a].min_models()).clone()
    };
    let conj_models = |states: &[usize], a: usize, models_of: &mut dyn FnMut(usize, usize) -> Vec<Vec<usize>>| {
        let mut acc: Vec<Vec<usize>> = vec![vec![]];
        for &q in states {
            let ms = models_of(q, a);
            let mut next = Vec::with_capacity(acc.len() * ms.len());
            for x in &acc {
                for m in &ms {
                    next.push(union_sorted(x, m));
                }
            }
            acc = minimize(next);
            if acc.is_empty() {
                break;
            }
        }
        acc
    };
    type Key = (Vec<usize>, Vec<usize>);
    let mut ids: HashMap<Key, usize> = HashMap::new();
    let mut keys: Vec<Key> = Vec::new();
    let mut trans: Vec<Vec<Vec<usize>>> = Vec::new();
    let start: Key = (vec![initial], vec![]);
    ids.insert(start.clone(), 0);
    keys.push(start);
    let mut queue = VecDeque::from([0usize]);
    while let Some(v) = queue.pop_front() {
        let (set, owing) = keys[v].clone();
        let mut row = vec![Vec::new(); letters];
        for (a, out) in row.iter_mut().enumerate() {
            let mut succs: BTreeSet<Key> = BTreeSet::new();
            if owing.is_empty() {
                for s in conj_models(&set, a, &mut models_of) {
                    let o: Vec<usize> = s.iter().copied().filter(|&q| !accepting[q]).collect();
                    succs.insert((s, o));
                }
            } else {
                let rest: Vec<usize> = set.iter().copied().filter(|q| owing.binary_search(q).is_err()).collect();
                let xs = conj_models(&rest, a, &mut models_of);
                let ys = conj_models(&owing, a, &mut models_of);
                for x in &xs {
                    for y in &ys {
                        let o: Vec<usize> = y.iter().copied().filter(|&q| !accepting[q]).collect();
                        succs.insert((union_sorted(x, y), o));
                    }
                }
            }
            for k in succs {
                let id = *ids.entry(k.clone()).or_insert_with(|| {
                    keys.push(k);
                    trans.push(Vec::new());
                    queue.push_back(keys.len() - 1);
                    keys.len() - 1
                });
                out.push(id);
            }
        }
        if trans.len() <= v {
            trans.resize(v + 1, Vec::new());
        }
        trans[v] = row;
    }
    trans.resize(keys.len(), vec![Vec::new(); letters]);
    Nba {
        alphabet: alphabet.clone(),
        initials: vec![0],
        trans,
        accepting: keys.iter().map(|(_, o)| o.is_empty()).collect(),
    }
}

// ---------------------------------------------------------------------------
// Deterministic parity automata

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Dpa {
    pub alphabet: Alphabet,
    pub initial: usize,
    /// `trans[q][letter]`.
    pub trans: Vec<Vec<usize>>,
    pub color: Vec<u32>,
}

impl Dpa {
    pub fn num_states(&self) -> usize {
        self.color.len()
    }

    pub fn step(&self, q: usize, letter: u32) -> usize {
        self.trans[q][letter as usize]
    }

    pub fn graph(&self) -> Vec<Vec<usize>> {
        self.trans
            .iter()
            .map(|row| {
                let s: BTreeSet<usize> = row.iter().copied().collect();
                s.into_iter().collect()
            })
            .collect()
    }

    /// Map colors onto a dense range, keeping order and parity.
    pub fn normalized(&self) -> Dpa {
        let mut used: Vec<u32> = self.color.clone();
        used.sort();
        used.dedup();
        let mut map = HashMap::new();
        let mut cur = used.first().map_or(0, |c| c % 2);
        for (i, &c) in used.iter().enumerate() {
            if i > 0 && c % 2 != used[i - 1] % 2 {
                cur += 1;
            }
            map.insert(c, cur);
        }
        Dpa {
            color: self.color.iter().map(|c| map[c]).collect(),
            ..self.clone()
        }
    }
}

pub fn dpa_complement(d: &Dpa) -> Dpa {
    Dpa {
        color: d.color.iter().map(|c| c + 1).collect(),
        ..d.clone()
    }
}

pub fn dpa_accepts_lasso(d: &Dpa, w: &LassoTrace) -> bool {
    let masks = w.masks(&d.alphabet);
    let mut seen: HashMap<(usize, usize), usize> = HashMap::new();
    let mut colors = Vec::new();
    let (mut q, mut c) = (d.initial, 0);
    loop {
        if let Some(&first) = seen.get(&(q, c)) {
            return colors[first..].iter().max().is_some_and(|m: &u32| m % 2 == 0);
        }
        seen.insert((q, c), colors.len());
        colors.push(d.color[q]);
        q = d.step(q, masks[c]);
        c = w.successor(c);
    }
}

/// Empty iff no reachable cycle has an even maximal color.
pub fn dpa_is_empty(d: &Dpa) -> bool {
    dpa_accepting_cycle(d).is_none()
}

/// Some reachable state lying on a cycle whose maximal color is even and
/// attained at that state.
pub fn dpa_accepting_cycle(d: &Dpa) -> Option<usize> {
    let succ = d.graph();
    let reach = graph::reachable(&succ, [d.initial]);
    let mut evens: Vec<u32> = d.color.iter().copied().filter(|c| c % 2 == 0).collect();
    evens.sort();
    evens.dedup();
    for c in evens {
        let allowed: Vec<bool> = (0..d.num_states()).map(|q| reach[q] && d.color[q] <= c).collect();
        let sub: Vec<Vec<usize>> = succ
            .iter()
            .enumerate()
            .map(|(q, ts)| {
                if allowed[q] {
                    ts.iter().copied().filter(|&t| allowed[t]).collect()
                } else {
                    Vec::new()
                }
            })
            .collect();
        let cyc = graph::cyclic_nodes(&sub);
        if let Some(q) = (0..d.num_states()).find(|&q| allowed[q] && cyc[q] && d.color[q] == c) {
            return Some(q);
        }
    }
    None
}

/// An accepted lasso, if any.
pub fn dpa_witness(d: &Dpa) -> Option<LassoTrace> {
    let q = dpa_accepting_cycle(d)?;
    let c = d.color[q];
    let succ = d.graph();
    let stem = graph::bfs_path(&succ, [d.initial], |v| v == q, |_, _| true)?;
    let cyc = graph::cycle_through(&succ, q, |_, t| d.color[t] <= c)?;
    let letter = |x: usize, y: usize| (0..d.alphabet.num_letters() as u32).find(|&a| d.step(x, a) == y).expect("edge");
    let prefix: Vec<u32> = stem.windows(2).map(|p| letter(p[0], p[1])).collect();
    let mut lp: Vec<u32> = cyc.windows(2).map(|p| letter(p[0], p[1])).collect();
    lp.push(letter(*cyc.last().expect("nonempty"), q));
    Some(LassoTrace::from_masks(&d.alphabet, &prefix, &lp))
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
struct SafraNode {
    name: usize,
    label: Vec<usize>,
    children: Vec<SafraNode>,
}

impl SafraNode {
    fn max_name(&self) -> usize {
        self.children.iter().map(SafraNode::max_name).fold(self.name, usize::max)
    }

    fn spawn(&mut self, accepting: &[bool], fresh: &mut usize) {
        for ch in &mut self.children {
            ch.spawn(accepting, fresh);
        }
        let acc: Vec<usize> = self.label.iter().copied().filter(|&q| accepting[q]).collect();
        if !acc.is_empty() {
            self.children.push(SafraNode {
                name: *fresh,
                label: acc,
                children: Vec::new(),
            });
            *fresh += 1;
        }
    }

    fn advance(&mut self, b: &Nba, letter: usize) {
        let mut next = BTreeSet::new();
        for &q in &self.label {
            next.extend(b.trans[q][letter].iter().copied());
        }
        self.label = next.into_iter().collect();
        for ch in &mut self.children {
            ch.advance(b, letter);
        }
    }

    fn restrict(&mut self, keep: &[usize]) {
        self.label.retain(|q| keep.binary_search(q).is_ok());
        for ch in &mut self.children {
            ch.restrict(keep);
        }
    }

    /// A state belongs to the oldest sibling holding it.
    fn merge_horizontally(&mut self) {
        let mut claimed: Vec<usize> = Vec::new();
        for ch in &mut self.children {
            let keep: Vec<usize> = ch.label.iter().copied().filter(|q| claimed.binary_search(q).is_err()).collect();
            ch.restrict(&keep);
            claimed = union_sorted(&claimed, &ch.label);
            ch.merge_horizontally();
        }
    }

    fn collect_names(&self, out: &mut Vec<usize>) {
        out.push(self.name);
        for ch in &self.children {
            ch.collect_names(out);
        }
    }

    fn drop_empty(&mut self, removed: &mut Vec<usize>) {
        let mut kept = Vec::new();
        for mut ch in std::mem::take(&mut self.children) {
            if ch.label.is_empty() {
                ch.collect_names(removed);
            } else {
                ch.drop_empty(removed);
                kept.push(ch);
            }
        }
        self.children = kept;
    }

    fn merge_vertically(&mut self, removed: &mut Vec<usize>, green: &mut Vec<usize>) {
        if self.children.is_empty() {
            return;
        }
        let mut union = Vec::new();
        for ch in &self.children {
            union = union_sorted(&union, &ch.label);
        }
        if union == self.label {
            for ch in &self.children {
                ch.collect_names(removed);
            }
            self.children.clear();
            green.push(self.name);
        } else {
            for ch in &mut self.children {
                ch.merge_vertically(removed, green);
            }
        }
    }

    fn rename(&mut self, map: &HashMap<usize, usize>) {
        self.name = map[&self.name];
        for ch in &mut self.children {
            ch.rename(map);
        }
    }
}

/// Safra trees with compact dynamic names. Each step reports the smallest
/// removed name and the smallest name whose children were merged back;
/// these give min-parity colors that are then flipped into max-parity.
pub fn nba_to_dpa(b: &Nba) -> Dpa {
    let letters = b.alphabet.num_letters();
    let n = b.num_states().max(1);
    // Names during a step stay below 2n + 2, so min-colors stay below this.
    let quiet = 4 * n + 5;
    let step = |tree: &SafraNode, a: usize| -> (Option<SafraNode>, usize) {
        let mut t = tree.clone();
        let mut fresh = t.max_name() + 1;
        t.spawn(&b.accepting, &mut fresh);
        t.advance(b, a);
        t.merge_horizontally();
        let mut removed = Vec::new();
        let mut green = Vec::new();
        if t.label.is_empty() {
            return (None, 1);
        }
        t.drop_empty(&mut removed);
        t.merge_vertically(&mut removed, &mut green);
        let f = removed.iter().min().copied();
        let e = green.iter().min().copied();
        let min_color = match (e, f) {
            (Some(e), Some(f)) if e < f => 2 * e,
            (Some(e), None) => 2 * e,
            (_, Some(f)) => 2 * f - 1,
            (None, None) => quiet,
        };
        let mut names = Vec::new();
        t.collect_names(&mut names);
        names.sort();
        let map: HashMap<usize, usize> = names.iter().enumerate().map(|(i, &x)| (x, i + 1)).collect();
        t.rename(&map);
        (Some(t), min_color)
    };
    let flip = |c: usize| (quiet + 1 - c) as u32;

    // States: (tree, color of the entering step); `None` is the dead sink.
    type Key = (Option<SafraNode>, u32);
    let root = SafraNode {
        name: 1,
        label: {
            let s: BTreeSet<usize> = b.initials.iter().copied().collect();
            s.into_iter().collect()
        },
        children: Vec::new(),
    };
    let start: Key = if root.label.is_empty() { (None, 1) } else { (Some(root), 0) };
    let mut ids: HashMap<Key, usize> = HashMap::new();
    let mut keys: Vec<Key> = vec![start.clone()];
    ids.insert(start, 0);
    let mut trans: Vec<Vec<usize>> = Vec::new();
    let mut i = 0;
    while i < keys.len() {
        let (tree, _) = keys[i].clone();
        let mut row = Vec::with_capacity(letters);
        for a in 0..letters {
            let key: Key = match &tree {
                None => (None, 1),
                Some(t) => match step(t, a) {
                    (None, _) => (None, 1),
                    (Some(nt), c) => (Some(nt), flip(c)),
                },
            };
            let id = *ids.entry(key.clone()).or_insert_with(|| {
                keys.push(key);
                keys.len() - 1
            });
            row.push(id);
        }
        trans.push(row);
        i += 1;
    }
    Dpa {
        alphabet: b.alphabet.clone(),
        initial: 0,
        trans,
        color: keys.iter().map(|(_, c)| *c).collect(),
    }
    .normalized()
}

// ---------------------------------------------------------------------------
// HOA

fn hoa_label(alphabet: &Alphabet, letter: usize) -> String {
    if alphabet.num_props() == 0 {
        return "t".to_string();
    }
    (0..alphabet.num_props())
        .map(|i| if letter & (1 << i) != 0 { i.to_string() } else { format!("!{i}") })
        .collect::<Vec<_>>()
        .join("&")
}

fn hoa_header(out: &mut String, alphabet: &Alphabet, states: usize, starts: &[usize]) {
    let _ = writeln!(out, "HOA: v1");
    let _ = writeln!(out, "States: {states}");
    for s in starts {
        let _ = writeln!(out, "Start: {s}");
    }
    let props: Vec<String> = alphabet.props().iter().map(|p| format!("\"{p}\"")).collect();
    let _ = writeln!(out, "AP: {}", std::iter::once(props.len().to_string()).chain(props).collect::<Vec<_>>().join(" "));
}

pub fn nba_to_hoa(b: &Nba) -> String {
    let mut out = String::new();
    hoa_header(&mut out, &b.alphabet, b.num_states(), &b.initials);
    out.push_str("acc-name: Buchi\nAcceptance: 1 Inf(0)\nproperties: explicit-labels state-acc\n--BODY--\n");
    for q in 0..b.num_states() {
        let acc = if b.accepting[q] { " {0}" } else { "" };
        let _ = writeln!(out, "State: {q}{acc}");
        for (a, ts) in b.trans[q].iter().enumerate() {
            for t in ts {
                let _ = writeln!(out, "[{}] {t}", hoa_label(&b.alphabet, a));
            }
        }
    }
    out.push_str("--END--\n");
    out
}

fn parity_condition(colors: u32) -> String {
    // Max-even over colors 0..colors.
    fn go(i: u32) -> String {
        if i == 0 {
            return "Inf(0)".to_string();
        }
        let rest = go(i - 1);
        if i % 2 == 0 {
            format!("Inf({i}) | ({rest})")
        } else {
            format!("Fin({i}) & ({rest})")
        }
    }
    if colors == 0 {
        "t".to_string()
    } else {
        go(colors - 1)
    }
}

pub fn dpa_to_hoa(d: &Dpa) -> String {
    let mut out = String::new();
    hoa_header(&mut out, &d.alphabet, d.num_states(), &[d.initial]);
    let k = d.color.iter().max().map_or(1, |m| m + 1);
    let _ = writeln!(out, "acc-name: parity max even {k}");
    let _ = writeln!(out, "Acceptance: {k} {}", parity_condition(k));
    out.push_str("properties: explicit-labels state-acc deterministic complete\n--BODY--\n");
    for q in 0..d.num_states() {
        let _ = writeln!(out, "State: {q} {{{}}}", d.color[q]);
        for (a, t) in d.trans[q].iter().enumerate() {
            let _ = writeln!(out, "[{}] {t}", hoa_label(&d.alphabet, a));
        }
    }
    out.push_str("--END--\n");
    out
}

/// Parse a label made of `t`, `f`, proposition indices, `!`, `&`, `|` and
/// parentheses into the set of letters it holds on.
fn parse_label(text: &str, props: usize, line: usize) -> Result<BTreeSet<usize>, OmegaError> {
    let err = |msg: &str| OmegaError::Hoa {
        line,
        msg: msg.to_string(),
    };
    let chars: Vec<char> = text.chars().filter(|c| !c.is_whitespace()).collect();
    fn disj(c: &[char], i: &mut usize, props: usize) -> Option<Vec<bool>> {
        let mut acc = conj(c, i, props)?;
        while *i < c.len() && c[*i] == '|' {
            *i += 1;
            let r = conj(c, i, props)?;
            acc.iter_mut().zip(r).for_each(|(a, b)| *a |= b);
        }
        Some(acc)
    }
    fn conj(c: &[char], i: &mut usize, props: usize) -> Option<Vec<bool>> {
        let mut acc = atom(c, i, props)?;
        while *i < c.len() && c[*i] == '&' {
            *i += 1;
            let r = atom(c, i, props)?;
            acc.iter_mut().zip(r).for_each(|(a, b)| *a &= b);
        }
        Some(acc)
    }
    fn atom(c: &[char], i: &mut usize, props: usize) -> Option<Vec<bool>> {
        let n = 1usize << props;
        match c.get(*i)? {
            '!' => {
                *i += 1;
                Some(atom(c, i, props)?.into_iter().map(|b| !b).collect())
            }
            '(' => {
                *i += 1;
                let v = disj(c, i, props)?;
                if c.get(*i) != Some(&')') {
                    return None;
                }
                *i += 1;
                Some(v)
            }
            't' => {
                *i += 1;
                Some(vec![true; n])
            }
            'f' => {
                *i += 1;
                Some(vec![false; n])
            }
            d if d.is_ascii_digit() => {
                let mut k = 0usize;
                while let Some(d) = c.get(*i).and_then(|x| x.to_digit(10)) {
                    k = k * 10 + d as usize;
                    *i += 1;
                }
                if k >= props {
                    return None;
                }
                Some((0..n).map(|m| m & (1 << k) != 0).collect())
            }
            _ => None,
        }
    }
    let mut i = 0;
    let v = disj(&chars, &mut i, props).ok_or_else(|| err("bad label"))?;
    if i != chars.len() {
        return Err(err("trailing characters in label"));
    }
    Ok(v.iter().enumerate().filter(|(_, b)| **b).map(|(m, _)| m).collect())
}

struct ParsedHoa {
    alphabet: Alphabet,
    starts: Vec<usize>,
    marks: Vec<Vec<u32>>,
    edges: Vec<Vec<(BTreeSet<usize>, usize)>>,
}

fn parse_hoa(text: &str) -> Result<ParsedHoa, OmegaError> {
    let mut states = 0usize;
    let mut starts = Vec::new();
    let mut props: Vec<String> = Vec::new();
    let mut body = false;
    let mut cur: Option<usize> = None;
    let mut marks: Vec<Vec<u32>> = Vec::new();
    let mut edges: Vec<Vec<(BTreeSet<usize>, usize)>> = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let err = |msg: &str| OmegaError::Hoa {
            line: ln + 1,
            msg: msg.to_string(),
        };
        if line.is_empty() {
            continue;
        }
        if !body {
            if line == "--BODY--" {
                body = true;
                marks = vec![Vec::new(); states];
                edges = vec![Vec::new(); states];
            } else if let Some(v) = line.strip_prefix("States:") {
                states = v.trim().parse().map_err(|_| err("bad state count"))?;
            } else if let Some(v) = line.strip_prefix("Start:") {
                starts.push(v.trim().parse().map_err(|_| err("bad start state"))?);
            } else if let Some(v) = line.strip_prefix("AP:") {
                let mut parts = v.split('"');
                let count: usize = parts.next().unwrap_or("").trim().parse().map_err(|_| err("bad AP count"))?;
                props = parts.step_by(2).map(str::to_string).filter(|s| !s.trim().is_empty()).collect();
                if props.len() != count {
                    return Err(err("AP count does not match names"));
                }
            }
            continue;
        }
        if line == "--END--" {
            break;
        }
        if let Some(v) = line.strip_prefix("State:") {
            let v = v.trim();
            let (num, rest) = v.split_once(' ').unwrap_or((v, ""));
            let q: usize = num.parse().map_err(|_| err("bad state number"))?;
            if q >= states {
                return Err(err("state out of range"));
            }
            if let Some(inner) = rest.trim().strip_prefix('{').and_then(|r| r.strip_suffix('}')) {
                marks[q] = inner
                    .split_whitespace()
                    .map(|x| x.parse().map_err(|_| err("bad acceptance mark")))
                    .collect::<Result<_, _>>()?;
            }
            cur = Some(q);
        } else if let Some(rest) = line.strip_prefix('[') {
            let q = cur.ok_or_else(|| err("edge outside a state"))?;
            let (label, target) = rest.split_once(']').ok_or_else(|| err("unclosed label"))?;
            let t: usize = target.trim().parse().map_err(|_| err("bad edge target"))?;
            if t >= states {
                return Err(err("edge target out of range"));
            }
            let letters = parse_label(label, props.len(), ln + 1)?;
            edges[q].push((letters, t));
        } else {
            return Err(err("unexpected line"));
        }
    }
    if !body {
        return Err(OmegaError::Hoa {
            line: 0,
            msg: "missing --BODY--".to_string(),
        });
    }
    // Letter masks follow the AP order; our alphabet sorts propositions.
    let alphabet = Alphabet::new(props.iter().cloned());
    let perm: Vec<usize> = props.iter().map(|p| alphabet.index_of(p).expect("present")).collect();
    let remap = |m: usize| perm.iter().enumerate().fold(0usize, |acc, (i, &j)| acc | (((m >> i) & 1) << j));
    let edges = edges
        .into_iter()
        .map(|es| es.into_iter().map(|(ls, t)| (ls.into_iter().map(remap).collect(), t)).collect())
        .collect();
    Ok(ParsedHoa {
        alphabet,
        starts,
        marks,
        edges,
    })
}

/// Parse a state-based Büchi automaton as written by [`nba_to_hoa`].
pub fn nba_from_hoa(text: &str) -> Result<Nba, OmegaError> {
    let p = parse_hoa(text)?;
    let letters = p.alphabet.num_letters();
    let n = p.marks.len();
    let mut trans = vec![vec![Vec::new(); letters]; n];
    for (q, es) in p.edges.iter().enumerate() {
        for (ls, t) in es {
            for &a in ls {
                if !trans[q][a].contains(t) {
                    trans[q][a].push(*t);
                }
            }
        }
    }
    Ok(Nba {
        alphabet: p.alphabet,
        initials: p.starts,
        trans,
        accepting: p.marks.iter().map(|m| m.contains(&0)).collect(),
    })
}

/// Parse a complete deterministic max-even parity automaton as written by
/// [`dpa_to_hoa`].
pub fn dpa_from_hoa(text: &str) -> Result<Dpa, OmegaError> {
    let p = parse_hoa(text)?;
    let letters = p.alphabet.num_letters();
    let n = p.marks.len();
    let mut trans = vec![vec![usize::MAX; letters]; n];
    for (q, es) in p.edges.iter().enumerate() {
        for (ls, t) in es {
            for &a in ls {
                trans[q][a] = *t;
            }
        }
    }
    if trans.iter().flatten().any(|&t| t == usize::MAX) {
        return Err(OmegaError::Hoa {
            line: 0,
            msg: "automaton is not complete".to_string(),
        });
    }
    let initial = *p.starts.first().ok_or(OmegaError::Hoa {
        line: 0,
        msg: "no start state".to_string(),
    })?;
    Ok(Dpa {
        alphabet: p.alphabet,
        initial,
        trans,
        color: p.marks.iter().map(|m| m.first().copied().unwrap_or(0)).collect(),
    })
}
