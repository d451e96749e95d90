//! Small directed-graph utilities shared by the automata and the oracle.

use std::collections::{BTreeSet, VecDeque};

/// Strongly connected components of the subgraph induced by `alive`, via an
/// iterative Tarjan. `succ[v]` lists `(target, payload)` pairs.
pub fn sccs<T>(succ: &[Vec<(usize, T)>], alive: &[bool]) -> Vec<Vec<usize>> {
    let n = succ.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = vec![];
    let mut out = vec![];
    let mut counter = 0;
    for root in 0..n {
        if !alive[root] || index[root] != usize::MAX {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut i)) = call.last_mut() {
            if *i < succ[v].len() {
                let w = succ[v][*i].0;
                *i += 1;
                if !alive[w] {
                    continue;
                }
                if index[w] == usize::MAX {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(u, _)) = call.last() {
                    low[u] = low[u].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = vec![];
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comp.sort_unstable();
                    out.push(comp);
                }
            }
        }
    }
    out
}

/// Nodes reachable from `from` along edges whose endpoints are `alive`.
pub fn reachable<T>(succ: &[Vec<(usize, T)>], from: impl IntoIterator<Item = usize>, alive: &[bool]) -> Vec<bool> {
    let mut seen = vec![false; succ.len()];
    let mut queue = VecDeque::new();
    for s in from {
        if alive[s] && !seen[s] {
            seen[s] = true;
            queue.push_back(s);
        }
    }
    while let Some(v) = queue.pop_front() {
        for (w, _) in &succ[v] {
            if alive[*w] && !seen[*w] {
                seen[*w] = true;
                queue.push_back(*w);
            }
        }
    }
    seen
}

/// Shortest path (as payloads) from any of `from` to a node in `to`,
/// staying inside `alive`. Returns the payloads and the end node.
pub fn shortest_path<T: Clone>(
    succ: &[Vec<(usize, T)>],
    from: &[usize],
    to: &dyn Fn(usize) -> bool,
    alive: &[bool],
) -> Option<(Vec<T>, usize)> {
    let n = succ.len();
    let mut parent: Vec<Option<(usize, T)>> = vec![None; n];
    let mut seen = vec![false; n];
    let mut queue = VecDeque::new();
    for &s in from {
        if alive[s] && !seen[s] {
            seen[s] = true;
            queue.push_back(s);
        }
    }
    while let Some(v) = queue.pop_front() {
        if to(v) {
            let mut path = vec![];
            let mut cur = v;
            while let Some((p, t)) = parent[cur].clone() {
                path.push(t);
                cur = p;
            }
            path.reverse();
            return Some((path, v));
        }
        for (w, t) in &succ[v] {
            if alive[*w] && !seen[*w] {
                seen[*w] = true;
                parent[*w] = Some((v, t.clone()));
                queue.push_back(*w);
            }
        }
    }
    None
}

/// A closed walk from `start` through every node of the strongly connected
/// set `comp` and back, using only edges inside `comp`.
pub fn covering_cycle<T: Clone>(succ: &[Vec<(usize, T)>], comp: &BTreeSet<usize>, start: usize) -> Vec<T> {
    let alive: Vec<bool> = (0..succ.len()).map(|v| comp.contains(&v)).collect();
    let mut walk = vec![];
    let mut cur = start;
    let mut todo: BTreeSet<usize> = comp.clone();
    todo.remove(&start);
    while let Some(&target) = todo.iter().next() {
        let (p, end) = shortest_path(succ, &[cur], &|v| v == target, &alive).expect("component is strongly connected");
        walk.extend(p);
        cur = end;
        todo.remove(&target);
    }
    // at least one edge, even for a single node with a self-loop
    let first: Vec<(usize, T)> = succ[cur].iter().filter(|(w, _)| alive[*w]).cloned().collect();
    let (w, t) = first.into_iter().next().expect("component has an internal edge");
    walk.push(t);
    let (back, _) = shortest_path(succ, &[w], &|v| v == start, &alive).expect("component is strongly connected");
    walk.extend(back);
    walk
}

/// Whether `comp` carries at least one internal edge.
pub fn nontrivial<T>(succ: &[Vec<(usize, T)>], comp: &[usize]) -> bool {
    comp.len() > 1 || succ[comp[0]].iter().any(|(w, _)| *w == comp[0])
}
