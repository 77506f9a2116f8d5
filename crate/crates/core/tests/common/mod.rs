//! Independent reference implementations shared by integration tests.

#![allow(dead_code)]

use rtl_core::games::{ParityGame, Player};
use rtl_core::mc::TransitionSystem;

/// Every positional strategy profile, one successor index per vertex.
fn profiles(g: &ParityGame, who: Player) -> Vec<Vec<usize>> {
    let n = g.num_vertices();
    let mut out = vec![vec![0; n]];
    for v in 0..n {
        if g.owner[v] != who {
            continue;
        }
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..g.succ[v].len()).map(move |i| {
                    let mut q = p.clone();
                    q[v] = i;
                    q
                })
            })
            .collect();
    }
    out
}

/// Winner of the unique play from `v` when both players are positional.
fn play_winner(g: &ParityGame, even: &[usize], odd: &[usize], v: usize) -> Player {
    let mut seen = vec![usize::MAX; g.num_vertices()];
    let mut path = Vec::new();
    let mut cur = v;
    while seen[cur] == usize::MAX {
        seen[cur] = path.len();
        path.push(cur);
        let pick = if g.owner[cur] == Player::Even { even[cur] } else { odd[cur] };
        cur = g.succ[cur][pick];
    }
    let top = path[seen[cur]..].iter().map(|&x| g.color[x]).max().expect("nonempty cycle");
    Player::of_color(top)
}

/// Winning regions by enumerating positional strategies: Player 0 wins
/// from `v` iff one of her strategies beats every positional reply.
pub fn brute_force_winners(g: &ParityGame) -> Vec<Player> {
    let evens = profiles(g, Player::Even);
    let odds = profiles(g, Player::Odd);
    (0..g.num_vertices())
        .map(|v| {
            let wins = evens
                .iter()
                .any(|s| odds.iter().all(|t| play_winner(g, s, t, v) == Player::Even));
            if wins {
                Player::Even
            } else {
                Player::Odd
            }
        })
        .collect()
}

/// All state lassos from the initial state with at most `max_len` states
/// in prefix plus cycle.
pub fn ts_lassos(ts: &TransitionSystem, max_len: usize) -> Vec<(Vec<usize>, Vec<usize>)> {
    let mut out = Vec::new();
    let mut stack = vec![vec![ts.initial]];
    while let Some(path) = stack.pop() {
        let last = *path.last().expect("nonempty");
        for i in 0..path.len() {
            if ts.succ[last].contains(&path[i]) {
                out.push((path[..i].to_vec(), path[i..].to_vec()));
            }
        }
        if path.len() < max_len {
            for &t in &ts.succ[last] {
                let mut next = path.clone();
                next.push(t);
                stack.push(next);
            }
        }
    }
    out
}
