//! Small explicit-graph utilities on adjacency lists.

use std::collections::VecDeque;

pub fn reachable(succ: &[Vec<usize>], seeds: impl IntoIterator<Item = usize>) -> Vec<bool> {
    let mut seen = vec![false; succ.len()];
    let mut stack: Vec<usize> = Vec::new();
    for s in seeds {
        if !seen[s] {
            seen[s] = true;
            stack.push(s);
        }
    }
    while let Some(v) = stack.pop() {
        for &t in &succ[v] {
            if !seen[t] {
                seen[t] = true;
                stack.push(t);
            }
        }
    }
    seen
}

pub fn reverse(succ: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut pred = vec![Vec::new(); succ.len()];
    for (v, ts) in succ.iter().enumerate() {
        for &t in ts {
            pred[t].push(v);
        }
    }
    pred
}

/// Strongly connected components (iterative Tarjan). Returns the component
/// id of every node; ids are in reverse topological order.
pub fn scc(succ: &[Vec<usize>]) -> Vec<usize> {
    let n = succ.len();
    const NONE: usize = usize::MAX;
    let mut index = vec![NONE; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![NONE; n];
    let mut stack = Vec::new();
    let mut next_index = 0;
    let mut next_comp = 0;
    for root in 0..n {
        if index[root] != NONE {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut i)) = call.last_mut() {
            if *i < succ[v].len() {
                let w = succ[v][*i];
                *i += 1;
                if index[w] == NONE {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    loop {
                        let w = stack.pop().expect("tarjan stack");
                        on_stack[w] = false;
                        comp[w] = next_comp;
                        if w == v {
                            break;
                        }
                    }
                    next_comp += 1;
                }
            }
        }
    }
    comp
}

/// Nodes lying on some cycle (nontrivial component or self-loop).
pub fn cyclic_nodes(succ: &[Vec<usize>]) -> Vec<bool> {
    let comp = scc(succ);
    let mut size = vec![0usize; succ.len()];
    for &c in &comp {
        size[c] += 1;
    }
    (0..succ.len())
        .map(|v| size[comp[v]] > 1 || succ[v].contains(&v))
        .collect()
}

/// Shortest path from any seed to a node satisfying `goal`, following only
/// edges accepted by `allow`. Returns the node sequence including both ends.
pub fn bfs_path(
    succ: &[Vec<usize>],
    seeds: impl IntoIterator<Item = usize>,
    goal: impl Fn(usize) -> bool,
    allow: impl Fn(usize, usize) -> bool,
) -> Option<Vec<usize>> {
    let n = succ.len();
    let mut parent = vec![usize::MAX; n];
    let mut seen = vec![false; n];
    let mut queue = VecDeque::new();
    for s in seeds {
        if !seen[s] {
            seen[s] = true;
            queue.push_back(s);
        }
    }
    while let Some(v) = queue.pop_front() {
        if goal(v) {
            let mut path = vec![v];
            let mut cur = v;
            while parent[cur] != usize::MAX {
                cur = parent[cur];
                path.push(cur);
            }
            path.reverse();
            return Some(path);
        }
        for &t in &succ[v] {
            if !seen[t] && allow(v, t) {
                seen[t] = true;
                parent[t] = v;
                queue.push_back(t);
            }
        }
    }
    None
}

/// A cycle through `start` of length at least one, following edges accepted
/// by `allow`. Returns nodes `start, ..., last` where `last -> start`.
pub fn cycle_through(
    succ: &[Vec<usize>],
    start: usize,
    allow: impl Fn(usize, usize) -> bool,
) -> Option<Vec<usize>> {
    if succ[start].contains(&start) && allow(start, start) {
        return Some(vec![start]);
    }
    let pred_start: Vec<bool> = (0..succ.len())
        .map(|v| succ[v].contains(&start) && allow(v, start))
        .collect();
    let firsts: Vec<usize> = succ[start]
        .iter()
        .copied()
        .filter(|&t| allow(start, t))
        .collect();
    // BFS from the successors of start back to a predecessor of start.
    let path = bfs_path(succ, firsts, |v| pred_start[v], |a, b| b != start && allow(a, b))?;
    let mut cyc = vec![start];
    cyc.extend(path);
    Some(cyc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scc_and_cycles() {
        let g = vec![vec![1], vec![2], vec![0, 3], vec![3], vec![]];
        let c = scc(&g);
        assert_eq!(c[0], c[1]);
        assert_eq!(c[1], c[2]);
        assert_ne!(c[2], c[3]);
        assert_eq!(cyclic_nodes(&g), vec![true, true, true, true, false]);
        assert_eq!(cycle_through(&g, 1, |_, _| true), Some(vec![1, 2, 0]));
        assert_eq!(cycle_through(&g, 4, |_, _| true), None);
        assert_eq!(bfs_path(&g, [0], |v| v == 3, |_, _| true), Some(vec![0, 1, 2, 3]));
        let r = reachable(&g, [3]);
        assert_eq!(r, vec![false, false, false, true, false]);
    }
}
