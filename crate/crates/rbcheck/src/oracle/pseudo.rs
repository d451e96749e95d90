//! Pseudo-cycles of the unwound system: closed walks in counter space,
//! found exhaustively for a fixed number of processes, and pumped into
//! genuine cycles.

use std::collections::{BTreeMap, HashMap, VecDeque};

use serde::Serialize;

use super::{counts_of, multisets, CounterStep, Counts, Stepper};
use crate::graph::{sccs, shortest_path};
use crate::model::{Config, EdgeId, Run, StateId, Step, Template};
use crate::unwinding::Unwinding;

/// A pseudo-cycle: `steps` lead from `start` back to `start` in counter form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PseudoCycle {
    pub processes: u32,
    pub start: Counts,
    pub steps: Vec<CounterStep>,
    pub broadcasts: usize,
    /// Component of the start configuration.
    pub component: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PseudoQuery {
    pub edge: EdgeId,
    /// `false` searches without broadcasts, `true` with exactly `r`.
    pub with_broadcasts: bool,
    pub max_processes: u32,
    /// Edges the walk may use; all when `None`.
    pub restrict: Option<Vec<bool>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum SearchOutcome {
    Found(PseudoCycle),
    /// Nothing up to the budget; not a refutation.
    Inconclusive { max_processes: u32 },
}

/// Budgets for the explicit searches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Budget {
    pub processes: u32,
    pub depth: usize,
    pub pseudo_processes: u32,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { processes: 6, depth: 12, pseudo_processes: 8 }
    }
}

struct Graph {
    succ: Vec<Vec<(usize, usize)>>,
    steps: Vec<CounterStep>,
}

impl Graph {
    fn new(n: usize) -> Self {
        Graph { succ: vec![vec![]; n], steps: vec![] }
    }

    fn add(&mut self, u: usize, step: CounterStep, v: usize) {
        self.steps.push(step);
        self.succ[u].push((v, self.steps.len() - 1));
    }

    fn path(&self, from: usize, to: usize) -> Vec<CounterStep> {
        let alive = vec![true; self.succ.len()];
        if from == to {
            return vec![];
        }
        let (p, _) = shortest_path(&self.succ, &[from], &|v| v == to, &alive).expect("target is reachable");
        p.into_iter().map(|i| self.steps[i].clone()).collect()
    }
}

/// Every flat edge that lies on a pseudo-cycle with exactly `n` processes,
/// with one witness each. Without broadcasts the walk stays in one
/// component; with broadcasts it starts in the first noose component and
/// takes exactly `r` broadcasts.
pub fn pseudo_cycle_edges(uw: &Unwinding, with_broadcasts: bool, n: u32, restrict: Option<&[bool]>) -> BTreeMap<EdgeId, PseudoCycle> {
    if with_broadcasts {
        spiral_edges(uw, n, restrict)
    } else {
        local_edges(uw, n, restrict)
    }
}

fn local_edges(uw: &Unwinding, n: u32, restrict: Option<&[bool]>) -> BTreeMap<EdgeId, PseudoCycle> {
    let flat = &uw.flat;
    let st = Stepper::restricted(flat, restrict, false);
    let mut out = BTreeMap::new();
    for i in 0..uw.components.len() {
        let confs = multisets(&uw.states_of(i), n, flat.num_states());
        let index: HashMap<&Counts, usize> = confs.iter().enumerate().map(|(j, c)| (c, j)).collect();
        let mut g = Graph::new(confs.len());
        for (u, c) in confs.iter().enumerate() {
            for (step, d) in st.successors(c) {
                g.add(u, step, index[&d]);
            }
        }
        let alive = vec![true; confs.len()];
        let mut scc_of = vec![usize::MAX; confs.len()];
        for (k, comp) in sccs(&g.succ, &alive).into_iter().enumerate() {
            for v in comp {
                scc_of[v] = k;
            }
        }
        for u in 0..confs.len() {
            for &(v, si) in &g.succ[u] {
                if scc_of[u] != scc_of[v] {
                    continue;
                }
                for (e, _) in g.steps[si].edge_counts() {
                    out.entry(e).or_insert_with(|| {
                        let mut steps = vec![g.steps[si].clone()];
                        steps.extend(g.path(v, u));
                        PseudoCycle { processes: n, start: confs[u].clone(), steps, broadcasts: 0, component: i }
                    });
                }
            }
        }
    }
    out
}

type Bits = Vec<u64>;

fn bit_or(a: &mut Bits, b: &Bits) -> bool {
    let mut changed = false;
    for (x, y) in a.iter_mut().zip(b) {
        let z = *x | *y;
        changed |= z != *x;
        *x = z;
    }
    changed
}

fn first_common(a: &Bits, b: &Bits) -> Option<usize> {
    a.iter().zip(b).enumerate().find_map(|(w, (x, y))| {
        let z = x & y;
        (z != 0).then(|| w * 64 + z.trailing_zeros() as usize)
    })
}

fn spiral_edges(uw: &Unwinding, n: u32, restrict: Option<&[bool]>) -> BTreeMap<EdgeId, PseudoCycle> {
    let flat = &uw.flat;
    let st = Stepper::restricted(flat, restrict, true);
    let (first, r) = (uw.prefix, uw.period);
    // layer l holds configurations of component first + l; layer r repeats
    // component `first` as the end of the walk
    let layers: Vec<Vec<Counts>> = (0..=r).map(|l| multisets(&uw.states_of(first + l % r), n, flat.num_states())).collect();
    let mut offset = vec![0];
    for l in &layers {
        offset.push(offset.last().unwrap() + l.len());
    }
    let total = *offset.last().unwrap();
    let index: Vec<HashMap<&Counts, usize>> = layers.iter().map(|l| l.iter().enumerate().map(|(j, c)| (c, j)).collect()).collect();
    let mut g = Graph::new(total);
    let mut pred: Vec<Vec<usize>> = vec![vec![]; total];
    for (l, confs) in layers.iter().enumerate() {
        for (j, c) in confs.iter().enumerate() {
            for (step, d) in st.successors(c) {
                let tl = if step.is_broadcast() { l + 1 } else { l };
                if tl > r {
                    continue;
                }
                let v = offset[tl] + index[tl][&d];
                g.add(offset[l] + j, step, v);
                pred[v].push(offset[l] + j);
            }
        }
    }
    let starts = layers[0].len();
    let words = starts.div_ceil(64).max(1);
    let mut fwd: Vec<Bits> = vec![vec![0; words]; total];
    let mut bwd: Vec<Bits> = vec![vec![0; words]; total];
    let mut queue = VecDeque::new();
    for i in 0..starts {
        fwd[i][i / 64] |= 1 << (i % 64);
        queue.push_back(i);
    }
    while let Some(u) = queue.pop_front() {
        let cur = fwd[u].clone();
        for &(v, _) in &g.succ[u] {
            if bit_or(&mut fwd[v], &cur) {
                queue.push_back(v);
            }
        }
    }
    for i in 0..starts {
        let v = offset[r] + i;
        bwd[v][i / 64] |= 1 << (i % 64);
        queue.push_back(v);
    }
    while let Some(v) = queue.pop_front() {
        let cur = bwd[v].clone();
        for &u in &pred[v] {
            if bit_or(&mut bwd[u], &cur) {
                queue.push_back(u);
            }
        }
    }
    let mut out = BTreeMap::new();
    for u in 0..total {
        for &(v, si) in &g.succ[u] {
            let Some(i) = first_common(&fwd[u], &bwd[v]) else { continue };
            for (e, _) in g.steps[si].edge_counts() {
                out.entry(e).or_insert_with(|| {
                    let mut steps = g.path(i, u);
                    steps.push(g.steps[si].clone());
                    steps.extend(g.path(v, offset[r] + i));
                    let broadcasts = steps.iter().filter(|s| s.is_broadcast()).count();
                    PseudoCycle { processes: n, start: layers[0][i].clone(), steps, broadcasts, component: first }
                });
            }
        }
    }
    out
}

/// Searches with 1, 2, … up to `max_processes` processes.
pub fn pseudo_cycle_search(uw: &Unwinding, q: &PseudoQuery) -> SearchOutcome {
    for n in 1..=q.max_processes {
        let found = pseudo_cycle_edges(uw, q.with_broadcasts, n, q.restrict.as_deref());
        if let Some(pc) = found.get(&q.edge) {
            return SearchOutcome::Found(pc.clone());
        }
    }
    SearchOutcome::Inconclusive { max_processes: q.max_processes }
}

fn config_of(c: &Counts) -> Config {
    let mut out = vec![];
    for (s, &x) in c.iter().enumerate() {
        out.extend(std::iter::repeat_n(s as StateId, x as usize));
    }
    out
}

/// A process-level step realizing `cs` from `cfg`, lowest process first.
fn realize(tpl: &Template, cfg: &Config, cs: &CounterStep) -> Option<Step> {
    let take = |pool: &mut Vec<(EdgeId, u32)>, s: StateId| -> Option<EdgeId> {
        let slot = pool.iter_mut().find(|(e, m)| *m > 0 && tpl.edges[*e].src == s)?;
        slot.1 -= 1;
        Some(slot.0)
    };
    match cs {
        CounterStep::Broadcast { moves } => {
            let mut pool = moves.clone();
            let edges = cfg.iter().map(|&s| take(&mut pool, s)).collect::<Option<Vec<_>>>()?;
            Some(Step::Broadcast { edges })
        }
        CounterStep::Rendezvous { action, edges } => {
            let mut used = vec![false; cfg.len()];
            let mut moves = vec![];
            for &e in edges {
                let p = (0..cfg.len()).find(|&p| !used[p] && cfg[p] == tpl.edges[e].src)?;
                used[p] = true;
                moves.push((p, e));
            }
            Some(Step::Rendezvous { action: action.clone(), moves })
        }
        CounterStep::Asym { action, sender, moves } => {
            let sp = (0..cfg.len()).find(|&p| cfg[p] == tpl.edges[*sender].src)?;
            let mut pool = moves.clone();
            let mut edges = vec![];
            for (p, &s) in cfg.iter().enumerate() {
                edges.push(if p == sp { *sender } else { take(&mut pool, s)? });
            }
            Some(Step::Asym { action: action.clone(), sender: sp, edges })
        }
    }
}

/// Process `p` of the renamed step does what `perm[p]` did.
fn rename(step: &Step, perm: &[usize]) -> Step {
    let mut inv = vec![0; perm.len()];
    for (p, &q) in perm.iter().enumerate() {
        inv[q] = p;
    }
    match step {
        Step::Broadcast { edges } => Step::Broadcast { edges: perm.iter().map(|&q| edges[q]).collect() },
        Step::Rendezvous { action, moves } => Step::Rendezvous { action: action.clone(), moves: moves.iter().map(|&(q, e)| (inv[q], e)).collect() },
        Step::Asym { action, sender, edges } => {
            Step::Asym { action: action.clone(), sender: inv[*sender], edges: perm.iter().map(|&q| edges[q]).collect() }
        }
    }
}

/// Turns a pseudo-cycle into a cycle of process vectors by repeating it
/// with identities permuted until every process is back where it started.
pub fn pump(tpl: &Template, pc: &PseudoCycle) -> Result<Run, String> {
    let f = config_of(&pc.start);
    let mut run = Run::empty(f.clone());
    let mut steps = vec![];
    for cs in &pc.steps {
        let step = realize(tpl, run.last(), cs).ok_or("counter step cannot be realized")?;
        run.push(tpl, step.clone()).map_err(|e| e.to_string())?;
        steps.push(step);
    }
    let end = run.last().clone();
    if counts_of(&end, tpl.num_states()) != pc.start {
        return Err("walk does not end in a twin of its start".into());
    }
    // theta with end[p] = f[theta[p]]
    let mut theta = vec![0; f.len()];
    for s in 0..tpl.num_states() {
        let at_f: Vec<usize> = (0..f.len()).filter(|&p| f[p] == s).collect();
        let at_end: Vec<usize> = (0..f.len()).filter(|&p| end[p] == s).collect();
        for (a, b) in at_end.into_iter().zip(at_f) {
            theta[a] = b;
        }
    }
    let mut perm: Vec<usize> = theta.clone();
    while run.last() != &f {
        for s in &steps {
            run.push(tpl, rename(s, &perm)).map_err(|e| e.to_string())?;
        }
        perm = perm.iter().map(|&q| theta[q]).collect();
        if run.transitions.len() > steps.len() * (f.len() + 1).pow(2) * 64 {
            return Err("pumping did not close".into());
        }
    }
    Ok(run)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samples;
    use crate::unwinding::build_unwinding;

    #[test]
    fn relay_pseudo_cycle_uses_both_actions() {
        let uw = build_unwinding(&samples::relay(), None).unwrap();
        let found = pseudo_cycle_edges(&uw, false, 4, None);
        assert_eq!(found.len(), uw.flat.edges.len());
        let pc = &found[&0];
        let run = pump(&uw.flat, pc).unwrap();
        assert_eq!(run.last(), &run.init);
        assert!(run.is_valid(&uw.flat, false));
        assert!(pseudo_cycle_edges(&uw, false, 1, None).is_empty());
    }

    #[test]
    fn reset_star_edges_need_broadcasts() {
        let uw = build_unwinding(&samples::reset_star(), None).unwrap();
        for n in 1..=6 {
            assert!(pseudo_cycle_edges(&uw, false, n, None).is_empty());
        }
        let e = (0..uw.flat.edges.len()).find(|&e| uw.flat.edge_name(e) == "r@0 -a1-> p@0").unwrap();
        let q = PseudoQuery { edge: e, with_broadcasts: true, max_processes: 4, restrict: None };
        let SearchOutcome::Found(pc) = pseudo_cycle_search(&uw, &q) else { panic!("no witness") };
        assert_eq!(pc.broadcasts, uw.period);
        let run = pump(&uw.flat, &pc).unwrap();
        assert_eq!(run.last(), &run.init);
    }

    #[test]
    fn prefix_chain_has_no_pseudo_cycles() {
        let uw = build_unwinding(&samples::prefix_chain(), None).unwrap();
        let q = PseudoQuery { edge: 0, with_broadcasts: false, max_processes: 5, restrict: None };
        assert_eq!(pseudo_cycle_search(&uw, &q), SearchOutcome::Inconclusive { max_processes: 5 });
    }
}
