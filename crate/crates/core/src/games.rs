//! Parity games, labeled game graphs, and solving games whose winning
//! condition is an rLDL or rPrompt-LTL formula.
//!
//! Player 0 ([`Player::Even`]) wins a play of a parity game iff the largest
//! color seen infinitely often is even.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::alphabet::{format_letter, Alphabet, Letter};
use crate::apa::{from_rldl_over, ApaError};
use crate::graph;
use crate::lasso::LassoTrace;
use crate::omega::{apa_to_nba, nba_to_dpa, Dpa};
use crate::prompt::{alternation, fresh_color, ldl_to_nba, relax, PromptError};
use crate::syntax::{require_logic, Formula, LogicId, SyntaxError};
use crate::translate::{rprompt_to_prompt, TranslateError};
use crate::truth4::TruthValue4;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GameError {
    #[error("vertex {0} has no outgoing edge")]
    TerminalVertex(String),
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error(transparent)]
    Translate(#[from] TranslateError),
    #[error(transparent)]
    Apa(#[from] ApaError),
    #[error(transparent)]
    Prompt(#[from] PromptError),
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Player {
    /// Player 0.
    Even,
    /// Player 1.
    Odd,
}

impl Player {
    pub fn opponent(self) -> Player {
        match self {
            Player::Even => Player::Odd,
            Player::Odd => Player::Even,
        }
    }

    pub fn of_color(c: u32) -> Player {
        if c % 2 == 0 {
            Player::Even
        } else {
            Player::Odd
        }
    }

    pub fn index(self) -> usize {
        match self {
            Player::Even => 0,
            Player::Odd => 1,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct ParityGame {
    pub owner: Vec<Player>,
    pub succ: Vec<Vec<usize>>,
    pub color: Vec<u32>,
}

impl ParityGame {
    pub fn num_vertices(&self) -> usize {
        self.owner.len()
    }

    pub fn add_vertex(&mut self, owner: Player, color: u32) -> usize {
        self.owner.push(owner);
        self.succ.push(Vec::new());
        self.color.push(color);
        self.owner.len() - 1
    }

    pub fn add_edge(&mut self, from: usize, to: usize) {
        if !self.succ[from].contains(&to) {
            self.succ[from].push(to);
        }
    }
}

/// Winning regions with a positional strategy for each vertex owned by the
/// player winning it.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ParitySolution {
    pub winner: Vec<Player>,
    pub strategy: Vec<Option<usize>>,
}

impl ParitySolution {
    pub fn region(&self, p: Player) -> Vec<usize> {
        (0..self.winner.len()).filter(|&v| self.winner[v] == p).collect()
    }
}

/// Zielonka's recursive algorithm.
pub fn solve_parity(g: &ParityGame) -> Result<ParitySolution, GameError> {
    if let Some(v) = (0..g.num_vertices()).find(|&v| g.succ[v].is_empty()) {
        return Err(GameError::TerminalVertex(v.to_string()));
    }
    let n = g.num_vertices();
    let pred = graph::reverse(&g.succ);
    let mut winner = vec![Player::Even; n];
    let mut strategy = vec![None; n];
    let all = vec![true; n];
    zielonka(g, &pred, &all, &mut winner, &mut strategy);
    Ok(ParitySolution { winner, strategy })
}

/// Vertices of `within` from which `p` can force a visit to `target`, with
/// attracting moves recorded in `strategy`.
fn attractor(
    g: &ParityGame,
    pred: &[Vec<usize>],
    within: &[bool],
    target: &[usize],
    p: Player,
    strategy: &mut [Option<usize>],
) -> Vec<bool> {
    let mut attr = vec![false; g.num_vertices()];
    let mut count: Vec<usize> = (0..g.num_vertices())
        .map(|v| if within[v] { g.succ[v].iter().filter(|&&t| within[t]).count() } else { 0 })
        .collect();
    let mut queue: Vec<usize> = Vec::new();
    for &t in target {
        if within[t] && !attr[t] {
            attr[t] = true;
            queue.push(t);
        }
    }
    while let Some(t) = queue.pop() {
        for &v in &pred[t] {
            if !within[v] || attr[v] {
                continue;
            }
            if g.owner[v] == p {
                attr[v] = true;
                strategy[v] = Some(t);
                queue.push(v);
            } else {
                count[v] -= 1;
                if count[v] == 0 {
                    attr[v] = true;
                    queue.push(v);
                }
            }
        }
    }
    attr
}

fn zielonka(
    g: &ParityGame,
    pred: &[Vec<usize>],
    within: &[bool],
    winner: &mut [Player],
    strategy: &mut [Option<usize>],
) {
    let verts: Vec<usize> = (0..g.num_vertices()).filter(|&v| within[v]).collect();
    let Some(top) = verts.iter().map(|&v| g.color[v]).max() else {
        return;
    };
    let p = Player::of_color(top);
    let tops: Vec<usize> = verts.iter().copied().filter(|&v| g.color[v] == top).collect();
    let mut attr_strat = vec![None; g.num_vertices()];
    let a = attractor(g, pred, within, &tops, p, &mut attr_strat);
    let rest: Vec<bool> = (0..g.num_vertices()).map(|v| within[v] && !a[v]).collect();
    zielonka(g, pred, &rest, winner, strategy);
    let opp_wins: Vec<usize> = verts.iter().copied().filter(|&v| rest[v] && winner[v] != p).collect();
    if opp_wins.is_empty() {
        for &v in &verts {
            winner[v] = p;
            if a[v] && g.owner[v] == p {
                strategy[v] = attr_strat[v].or_else(|| g.succ[v].iter().copied().find(|&t| within[t]));
            }
        }
        return;
    }
    let mut b_strat = vec![None; g.num_vertices()];
    let b = attractor(g, pred, within, &opp_wins, p.opponent(), &mut b_strat);
    // Strategies inside the opponent's dominion from the first call stay.
    for &v in &verts {
        if b[v] && !opp_wins.contains(&v) {
            winner[v] = p.opponent();
            if g.owner[v] == p.opponent() {
                strategy[v] = b_strat[v];
            }
        }
    }
    let rest2: Vec<bool> = (0..g.num_vertices()).map(|v| within[v] && !b[v]).collect();
    zielonka(g, pred, &rest2, winner, strategy);
}

/// The strategy-restricted cycle check: each player's strategy keeps play
/// inside its region, and every cycle of the region under the strategy has
/// a maximal color of that player's parity.
pub fn check_strategies(g: &ParityGame, sol: &ParitySolution) -> bool {
    [Player::Even, Player::Odd].iter().all(|&p| check_player(g, sol, p))
}

fn check_player(g: &ParityGame, sol: &ParitySolution, p: Player) -> bool {
    let n = g.num_vertices();
    let inside: Vec<bool> = (0..n).map(|v| sol.winner[v] == p).collect();
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n];
    for v in (0..n).filter(|&v| inside[v]) {
        if g.owner[v] == p {
            match sol.strategy[v] {
                Some(t) if inside[t] && g.succ[v].contains(&t) => succ[v].push(t),
                _ => return false,
            }
        } else {
            if g.succ[v].iter().any(|&t| !inside[t]) {
                return false;
            }
            succ[v] = g.succ[v].clone();
        }
    }
    let mut bad_colors: Vec<u32> = (0..n).filter(|&v| inside[v]).map(|v| g.color[v]).filter(|&c| Player::of_color(c) != p).collect();
    bad_colors.sort();
    bad_colors.dedup();
    for c in bad_colors {
        let sub: Vec<Vec<usize>> = (0..n)
            .map(|v| {
                if g.color[v] <= c {
                    succ[v].iter().copied().filter(|&t| g.color[t] <= c).collect()
                } else {
                    Vec::new()
                }
            })
            .collect();
        let cyc = graph::cyclic_nodes(&sub);
        if (0..n).any(|v| inside[v] && cyc[v] && g.color[v] == c) {
            return false;
        }
    }
    true
}

// ---------------------------------------------------------------------------
// Labeled arenas

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LabeledGameGraph {
    pub names: Vec<String>,
    pub owner: Vec<Player>,
    pub labels: Vec<Letter>,
    pub succ: Vec<Vec<usize>>,
}

impl LabeledGameGraph {
    pub fn num_vertices(&self) -> usize {
        self.names.len()
    }

    pub fn vertex(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn props(&self) -> BTreeSet<String> {
        self.labels.iter().flatten().cloned().collect()
    }

    pub fn validate(&self) -> Result<(), GameError> {
        match (0..self.num_vertices()).find(|&v| self.succ[v].is_empty()) {
            Some(v) => Err(GameError::TerminalVertex(self.names[v].clone())),
            None => Ok(()),
        }
    }

    /// The trace of a lasso of vertices.
    pub fn trace(&self, prefix: &[usize], cycle: &[usize]) -> LassoTrace {
        LassoTrace::new(
            prefix.iter().map(|&v| self.labels[v].clone()).collect(),
            cycle.iter().map(|&v| self.labels[v].clone()).collect(),
        )
        .expect("nonempty cycle")
    }
}

impl FromStr for LabeledGameGraph {
    type Err = GameError;

    /// Lines `v <name> <0|1> { p, q }` and `e <a> <b>`; `#` starts a comment.
    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut g = LabeledGameGraph {
            names: Vec::new(),
            owner: Vec::new(),
            labels: Vec::new(),
            succ: Vec::new(),
        };
        let mut edges = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            let bad = |msg: &str| GameError::Malformed {
                line: i + 1,
                msg: msg.to_string(),
            };
            if line.is_empty() {
                continue;
            }
            let mut words = line.split_whitespace();
            match words.next() {
                Some("v") => {
                    let name = words.next().ok_or_else(|| bad("missing vertex name"))?;
                    let owner = match words.next() {
                        Some("0") => Player::Even,
                        Some("1") => Player::Odd,
                        _ => return Err(bad("owner must be 0 or 1")),
                    };
                    if g.vertex(name).is_some() {
                        return Err(bad("duplicate vertex"));
                    }
                    let rest = line.splitn(4, char::is_whitespace).nth(3).unwrap_or("").trim();
                    let label = parse_label_set(rest).ok_or_else(|| bad("expected `{ ... }` label"))?;
                    g.names.push(name.to_string());
                    g.owner.push(owner);
                    g.labels.push(label);
                    g.succ.push(Vec::new());
                }
                Some("e") => {
                    let a = words.next().ok_or_else(|| bad("missing edge source"))?;
                    let b = words.next().ok_or_else(|| bad("missing edge target"))?;
                    if words.next().is_some() {
                        return Err(bad("trailing input"));
                    }
                    edges.push((a.to_string(), b.to_string()));
                }
                _ => return Err(bad("expected `v` or `e`")),
            }
        }
        for (a, b) in edges {
            let x = g.vertex(&a).ok_or(GameError::UnknownVertex(a))?;
            let y = g.vertex(&b).ok_or(GameError::UnknownVertex(b))?;
            if !g.succ[x].contains(&y) {
                g.succ[x].push(y);
            }
        }
        g.validate()?;
        Ok(g)
    }
}

impl fmt::Display for LabeledGameGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in 0..self.num_vertices() {
            writeln!(f, "v {} {} {}", self.names[v], self.owner[v].index(), format_letter(&self.labels[v]))?;
        }
        for v in 0..self.num_vertices() {
            for &t in &self.succ[v] {
                writeln!(f, "e {} {}", self.names[v], self.names[t])?;
            }
        }
        Ok(())
    }
}

/// Parse `{ p, q }` into a letter.
pub(crate) fn parse_label_set(text: &str) -> Option<Letter> {
    let inner = text.trim().strip_prefix('{')?.strip_suffix('}')?;
    let mut out = Letter::new();
    for p in inner.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if !p.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'') {
            return None;
        }
        out.insert(p.to_string());
    }
    Some(out)
}

/// Product of an arena with a deterministic automaton reading the vertex
/// labels. Vertex `v * |Q| + q` is `(v, q)`, colored by `q`.
#[derive(Clone, Debug)]
pub struct ReducedGame {
    pub game: ParityGame,
    pub states: usize,
}

impl ReducedGame {
    pub fn index(&self, v: usize, q: usize) -> usize {
        v * self.states + q
    }

    /// Arena vertex and automaton state of a product vertex.
    pub fn project(&self, x: usize) -> (usize, usize) {
        (x / self.states, x % self.states)
    }
}

pub fn reduce_game(g: &LabeledGameGraph, d: &Dpa) -> ReducedGame {
    let states = d.num_states();
    let mut game = ParityGame::default();
    for v in 0..g.num_vertices() {
        for q in 0..states {
            game.add_vertex(g.owner[v], d.color[q]);
        }
    }
    for v in 0..g.num_vertices() {
        let letter = d.alphabet.mask(&g.labels[v]);
        for q in 0..states {
            let next = d.step(q, letter);
            for &t in &g.succ[v] {
                game.add_edge(v * states + q, t * states + next);
            }
        }
    }
    ReducedGame { game, states }
}

/// Finite-memory strategy for Player 0: at vertex `v` with memory `m`, move
/// to `choice[m][v]`; after visiting `v` the memory becomes `update[m][v]`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MealyStrategy {
    pub initial: usize,
    pub update: Vec<Vec<usize>>,
    pub choice: Vec<Vec<Option<usize>>>,
}

impl MealyStrategy {
    pub fn memory_size(&self) -> usize {
        self.update.len()
    }

    /// Lines `m, vertex -> m', choice` for the Player-0 vertices with a
    /// defined choice.
    pub fn render(&self, g: &LabeledGameGraph) -> String {
        let mut out = String::new();
        for m in 0..self.memory_size() {
            for v in 0..g.num_vertices() {
                if let Some(c) = self.choice[m][v] {
                    out.push_str(&format!("m{m}, {} -> m{}, {}\n", g.names[v], self.update[m][v], g.names[c]));
                }
            }
        }
        out
    }

    /// Follow the strategy from `v`, resolving Player-1 moves with `pick`,
    /// until a (vertex, memory) pair repeats. Returns the vertex lasso.
    pub fn play(
        &self,
        g: &LabeledGameGraph,
        v: usize,
        pick: &mut dyn FnMut(&[usize]) -> usize,
    ) -> (Vec<usize>, Vec<usize>) {
        let mut seen: HashMap<(usize, usize), usize> = HashMap::new();
        let mut path = Vec::new();
        let (mut v, mut m) = (v, self.initial);
        loop {
            if let Some(&i) = seen.get(&(v, m)) {
                return (path[..i].to_vec(), path[i..].to_vec());
            }
            seen.insert((v, m), path.len());
            path.push(v);
            let next = match (g.owner[v], self.choice[m][v]) {
                (Player::Even, Some(c)) => c,
                _ => g.succ[v][pick(&g.succ[v])],
            };
            m = self.update[m][v];
            v = next;
        }
    }
}

#[derive(Clone, Debug)]
pub struct GameOutcome {
    pub winner: Player,
    /// Present when Player 0 wins.
    pub strategy: Option<MealyStrategy>,
    /// For prompt games won by Player 0: a bound `k` met by every
    /// consistent play.
    pub bound: Option<usize>,
}

fn trivial_win(g: &LabeledGameGraph) -> GameOutcome {
    let n = g.num_vertices();
    GameOutcome {
        winner: Player::Even,
        strategy: Some(MealyStrategy {
            initial: 0,
            update: vec![vec![0; n]],
            choice: vec![(0..n).map(|v| (g.owner[v] == Player::Even).then(|| g.succ[v][0])).collect()],
        }),
        bound: Some(0),
    }
}

/// Solve the game from `(v, q_init)` in the product with the parity
/// automaton for `{w | V(w, φ) ⪰ β}`; the strategy's memory is the automaton
/// state.
pub fn solve_rldl_game(
    g: &LabeledGameGraph,
    phi: &Formula,
    beta: TruthValue4,
    v: usize,
) -> Result<GameOutcome, GameError> {
    require_logic(phi, LogicId::Rldl)?;
    g.validate()?;
    if beta == TruthValue4::F0000 {
        return Ok(trivial_win(g));
    }
    let alphabet = Alphabet::new(phi.props());
    let dpa = nba_to_dpa(&apa_to_nba(&from_rldl_over(phi, beta, &alphabet)?));
    let red = reduce_game(g, &dpa);
    let sol = solve_parity(&red.game)?;
    let start = red.index(v, dpa.initial);
    if sol.winner[start] != Player::Even {
        return Ok(GameOutcome {
            winner: Player::Odd,
            strategy: None,
            bound: None,
        });
    }
    let n = g.num_vertices();
    let mut update = vec![vec![0; n]; dpa.num_states()];
    let mut choice = vec![vec![None; n]; dpa.num_states()];
    for q in 0..dpa.num_states() {
        for u in 0..n {
            update[q][u] = dpa.step(q, dpa.alphabet.mask(&g.labels[u]));
            if g.owner[u] == Player::Even {
                choice[q][u] = sol.strategy[red.index(u, q)].map(|x| red.project(x).0);
            }
        }
    }
    Ok(GameOutcome {
        winner: Player::Even,
        strategy: Some(MealyStrategy {
            initial: dpa.initial,
            update,
            choice,
        }),
        bound: None,
    })
}

/// Solve the game for `∃k`: Player 0 wins iff some bound makes every play
/// meet the threshold. Player 0 also chooses a color for every position; she
/// must change it infinitely often while the relaxed formula holds. The
/// product has vertices `(v, colour, q)` and, before each, a Player-0
/// vertex choosing the colour.
pub fn solve_rprompt_game(
    g: &LabeledGameGraph,
    phi: &Formula,
    beta: TruthValue4,
    v: usize,
) -> Result<GameOutcome, GameError> {
    require_logic(phi, LogicId::RPromptLtl)?;
    g.validate()?;
    if beta == TruthValue4::F0000 {
        return Ok(trivial_win(g));
    }
    let psi = rprompt_to_prompt(phi, beta)?;
    let mut props = phi.props();
    let color = fresh_color(&props.union(&g.props()).cloned().collect());
    props.insert(color.clone());
    let alphabet = Alphabet::new(props);
    let objective = Formula::and(relax(&psi, &color)?, alternation(&color));
    let dpa = nba_to_dpa(&ldl_to_nba(&objective, &alphabet)?);
    let qn = dpa.num_states();
    let n = g.num_vertices();
    // main(u, bit, q) = (u * 2 + bit) * qn + q; pick(u, q) after those.
    let main = |u: usize, bit: usize, q: usize| (u * 2 + bit) * qn + q;
    let pick_base = n * 2 * qn;
    let pick = |u: usize, q: usize| pick_base + u * qn + q;
    let mut game = ParityGame::default();
    for u in 0..n {
        for _bit in 0..2 {
            for q in 0..qn {
                game.add_vertex(g.owner[u], dpa.color[q]);
            }
        }
    }
    for _u in 0..n {
        for _q in 0..qn {
            game.add_vertex(Player::Even, 0);
        }
    }
    for u in 0..n {
        for bit in 0..2 {
            let mut label = g.labels[u].clone();
            if bit == 1 {
                label.insert(color.clone());
            }
            let letter = alphabet.mask(&label);
            for q in 0..qn {
                let next = dpa.step(q, letter);
                for &t in &g.succ[u] {
                    game.add_edge(main(u, bit, q), pick(t, next));
                }
            }
        }
        for q in 0..qn {
            game.add_edge(pick(u, q), main(u, 0, q));
            game.add_edge(pick(u, q), main(u, 1, q));
        }
    }
    let sol = solve_parity(&game)?;
    if sol.winner[pick(v, dpa.initial)] != Player::Even {
        return Ok(GameOutcome {
            winner: Player::Odd,
            strategy: None,
            bound: None,
        });
    }
    // Memory: the automaton state before reading the current vertex. The
    // colour of the current vertex is the pick vertex's choice.
    let mut update = vec![vec![0; n]; qn];
    let mut choice = vec![vec![None; n]; qn];
    for q in 0..qn {
        for u in 0..n {
            let bit = match sol.strategy[pick(u, q)] {
                Some(x) if x == main(u, 1, q) => 1,
                _ => 0,
            };
            let mut label = g.labels[u].clone();
            if bit == 1 {
                label.insert(color.clone());
            }
            update[q][u] = dpa.step(q, alphabet.mask(&label));
            if g.owner[u] == Player::Even {
                choice[q][u] = sol.strategy[main(u, bit, q)].map(|x| (x - pick_base) / qn);
            }
        }
    }
    Ok(GameOutcome {
        winner: Player::Even,
        strategy: Some(MealyStrategy {
            initial: dpa.initial,
            update,
            choice,
        }),
        // A block longer than the strategy's product would let Player 1
        // repeat it forever.
        bound: Some(2 * n * qn),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn game(owner: &[u8], color: &[u32], edges: &[(usize, usize)]) -> ParityGame {
        let mut g = ParityGame::default();
        for (o, c) in owner.iter().zip(color) {
            g.add_vertex(if *o == 0 { Player::Even } else { Player::Odd }, *c);
        }
        for &(a, b) in edges {
            g.add_edge(a, b);
        }
        g
    }

    #[test]
    fn single_vertex_games() {
        let s = solve_parity(&game(&[0], &[0], &[(0, 0)])).unwrap();
        assert_eq!(s.winner, vec![Player::Even]);
        let s = solve_parity(&game(&[0], &[1], &[(0, 0)])).unwrap();
        assert_eq!(s.winner, vec![Player::Odd]);
        assert!(matches!(solve_parity(&game(&[0], &[0], &[])), Err(GameError::TerminalVertex(_))));
    }

    #[test]
    fn choice_matters() {
        // Player 0 at 0 chooses between an even and an odd sink.
        let g = game(&[0, 0, 0], &[0, 2, 1], &[(0, 1), (0, 2), (1, 1), (2, 2)]);
        let s = solve_parity(&g).unwrap();
        assert_eq!(s.winner, vec![Player::Even, Player::Even, Player::Odd]);
        assert_eq!(s.strategy[0], Some(1));
        assert!(check_strategies(&g, &s));
        // The same arena with Player 1 choosing.
        let g = game(&[1, 0, 0], &[0, 2, 1], &[(0, 1), (0, 2), (1, 1), (2, 2)]);
        let s = solve_parity(&g).unwrap();
        assert_eq!(s.winner[0], Player::Odd);
        assert!(check_strategies(&g, &s));
    }

    #[test]
    fn arena_text_round_trip() {
        let text = "# two vertices\nv a 0 { p }\nv b 1 {}\ne a b\ne b a\ne b b\n";
        let g: LabeledGameGraph = text.parse().unwrap();
        assert_eq!(g.num_vertices(), 2);
        assert_eq!(g.to_string().parse::<LabeledGameGraph>().unwrap(), g);
        assert!(matches!("v a 0 {}\n".parse::<LabeledGameGraph>(), Err(GameError::TerminalVertex(_))));
        assert!(matches!("v a 0 {}\ne a z\n".parse::<LabeledGameGraph>(), Err(GameError::UnknownVertex(_))));
        assert!("v a 2 {}\n".parse::<LabeledGameGraph>().is_err());
    }

    fn arena(text: &str) -> LabeledGameGraph {
        text.parse().unwrap()
    }

    /// Plays consistent with the strategy, Player 1 resolving choices by
    /// a fixed sequence of picks.
    fn sampled_plays(g: &LabeledGameGraph, s: &MealyStrategy, v: usize) -> Vec<LassoTrace> {
        (0..64u64)
            .map(|seed| {
                let mut x = seed;
                let (p, c) = s.play(g, v, &mut |succ| {
                    x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    (x >> 33) as usize % succ.len()
                });
                g.trace(&p, &c)
            })
            .collect()
    }

    #[test]
    fn rldl_games() {
        use crate::oracle::eval_rldl;
        use crate::syntax::parse;
        let phi = parse("[ tt* ] p", LogicId::Rldl).unwrap();
        let mine = arena("v a 0 { p }\nv b 0 {}\ne a a\ne a b\ne b a\n");
        let out = solve_rldl_game(&mine, &phi, TruthValue4::F1111, 0).unwrap();
        assert_eq!(out.winner, Player::Even);
        let s = out.strategy.unwrap();
        for w in sampled_plays(&mine, &s, 0) {
            assert_eq!(eval_rldl(&w, &phi).unwrap(), TruthValue4::F1111);
        }
        let theirs = arena("v a 1 { p }\nv b 0 {}\ne a a\ne a b\ne b a\n");
        assert_eq!(solve_rldl_game(&theirs, &phi, TruthValue4::F0111, 0).unwrap().winner, Player::Odd);
        let out = solve_rldl_game(&theirs, &phi, TruthValue4::F0001, 0).unwrap();
        assert_eq!(out.winner, Player::Even);
        assert_eq!(solve_rldl_game(&theirs, &phi, TruthValue4::F0000, 0).unwrap().winner, Player::Even);
    }

    #[test]
    fn prompt_games() {
        use crate::oracle::eval_rprompt_ltl;
        use crate::syntax::parse;
        let ev = parse("Fp s", LogicId::RPromptLtl).unwrap();
        let reach = arena("v a 0 {}\nv b 0 {}\nv c 0 { s }\ne a b\ne a a\ne b c\ne c c\n");
        let out = solve_rprompt_game(&reach, &ev, TruthValue4::F1111, 0).unwrap();
        assert_eq!(out.winner, Player::Even);
        let (s, k) = (out.strategy.unwrap(), out.bound.unwrap());
        for w in sampled_plays(&reach, &s, 0) {
            assert_eq!(eval_rprompt_ltl(&w, k, &ev).unwrap(), TruthValue4::F1111);
        }
        let gf = parse("G Fp s", LogicId::RPromptLtl).unwrap();
        let delay = arena("v a 1 {}\nv b 0 { s }\ne a a\ne a b\ne b a\n");
        assert_eq!(solve_rprompt_game(&delay, &gf, TruthValue4::F1111, 0).unwrap().winner, Player::Odd);
        let cycle = arena("v a 0 { s }\nv b 1 {}\nv c 1 {}\ne a b\ne b c\ne c a\n");
        let out = solve_rprompt_game(&cycle, &gf, TruthValue4::F1111, 0).unwrap();
        assert_eq!(out.winner, Player::Even);
        assert_eq!(solve_rprompt_game(&delay, &gf, TruthValue4::F0000, 0).unwrap().winner, Player::Even);
    }
}
