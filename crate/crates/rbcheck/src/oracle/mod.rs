//! Brute-force ground truth over explicit instances: counter BFS, execution
//! enumeration, pseudo-cycle search, run composition, bisimulation, VRS
//! search, loading, and seeded random generators.

mod compose;
mod loading;
mod pseudo;
pub mod random;
mod vrs;

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};

use serde::Serialize;

use crate::model::{product, successors, Config, EdgeId, EdgeLabel, Letter, Role, Run, StateId, Template};

pub use compose::{check_bisimulation, compose_runs, restrict_run, ComposeError};
pub use loading::{loading_check, LoadingReport};
pub use pseudo::{pseudo_cycle_edges, pseudo_cycle_search, pump, Budget, PseudoCycle, PseudoQuery, SearchOutcome};
pub use vrs::{scaled_vrs_reachable, vrs_reachable};

/// Number of processes per state.
pub type Counts = Vec<u32>;

/// A global move in counter form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub enum CounterStep {
    /// `(edge, how many processes take it)`, covering every process.
    Broadcast { moves: Vec<(EdgeId, u32)> },
    /// One edge per index, in index order.
    Rendezvous { action: String, edges: Vec<EdgeId> },
    Asym { action: String, sender: EdgeId, moves: Vec<(EdgeId, u32)> },
}

impl CounterStep {
    pub fn is_broadcast(&self) -> bool {
        !matches!(self, CounterStep::Rendezvous { .. })
    }

    /// Every edge taken, with multiplicity.
    pub fn edge_counts(&self) -> Vec<(EdgeId, u32)> {
        match self {
            CounterStep::Broadcast { moves } => moves.clone(),
            CounterStep::Rendezvous { edges, .. } => edges.iter().map(|&e| (e, 1)).collect(),
            CounterStep::Asym { sender, moves, .. } => std::iter::once((*sender, 1)).chain(moves.iter().copied()).collect(),
        }
    }

    pub fn uses(&self, e: EdgeId) -> bool {
        self.edge_counts().iter().any(|&(f, m)| f == e && m > 0)
    }
}

pub fn counts_of(cfg: &Config, n_states: usize) -> Counts {
    let mut c = vec![0; n_states];
    for &s in cfg {
        c[s] += 1;
    }
    c
}

/// All ways to split `total` into `parts` ordered nonnegative summands.
fn compositions(total: u32, parts: usize) -> Vec<Vec<u32>> {
    if parts == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    if parts == 1 {
        return vec![vec![total]];
    }
    let mut out = vec![];
    for first in (0..=total).rev() {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// All multisets of size `n` over `pool`, as count vectors over `n_states`.
pub fn multisets(pool: &[StateId], n: u32, n_states: usize) -> Vec<Counts> {
    let pool: Vec<StateId> = pool.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
    compositions(n, pool.len())
        .into_iter()
        .map(|split| {
            let mut c = vec![0; n_states];
            for (&s, x) in pool.iter().zip(split) {
                c[s] += x;
            }
            c
        })
        .collect()
}

/// Successor generation in counter form, optionally restricted to a subset
/// of edges and to rendezvous only.
pub struct Stepper<'a> {
    pub tpl: &'a Template,
    allowed: Vec<bool>,
    broadcasts: bool,
    bcast_from: Vec<Vec<EdgeId>>,
    rdz: BTreeMap<String, Vec<Vec<EdgeId>>>,
    snd: BTreeMap<String, Vec<EdgeId>>,
    rcv_from: BTreeMap<String, Vec<Vec<EdgeId>>>,
}

impl<'a> Stepper<'a> {
    pub fn new(tpl: &'a Template) -> Self {
        Self::restricted(tpl, None, true)
    }

    pub fn restricted(tpl: &'a Template, allowed: Option<&[bool]>, broadcasts: bool) -> Self {
        let allowed: Vec<bool> = allowed.map(|a| a.to_vec()).unwrap_or_else(|| vec![true; tpl.edges.len()]);
        let n = tpl.num_states();
        let mut bcast_from = vec![vec![]; n];
        let mut rdz: BTreeMap<String, Vec<Vec<EdgeId>>> = BTreeMap::new();
        let mut snd: BTreeMap<String, Vec<EdgeId>> = BTreeMap::new();
        let mut rcv_from: BTreeMap<String, Vec<Vec<EdgeId>>> = BTreeMap::new();
        for (i, e) in tpl.edges.iter().enumerate() {
            if !allowed[i] {
                continue;
            }
            match &e.label {
                EdgeLabel::Broadcast => bcast_from[e.src].push(i),
                EdgeLabel::Rendezvous { action, index } => {
                    rdz.entry(action.clone()).or_insert_with(|| vec![vec![]; tpl.k])[index - 1].push(i);
                }
                EdgeLabel::Asym { action, role: Role::Snd } => snd.entry(action.clone()).or_default().push(i),
                EdgeLabel::Asym { action, role: Role::Rcv } => {
                    rcv_from.entry(action.clone()).or_insert_with(|| vec![vec![]; n])[e.src].push(i);
                }
            }
        }
        Stepper { tpl, allowed, broadcasts, bcast_from, rdz, snd, rcv_from }
    }

    pub fn allows(&self, e: EdgeId) -> bool {
        self.allowed[e]
    }

    /// Distributes the processes of `c` over per-state edge lists; `None`
    /// when an occupied state has no edge.
    fn spread(&self, c: &Counts, from: &[Vec<EdgeId>]) -> Option<Vec<Vec<(EdgeId, u32)>>> {
        let mut choices: Vec<Vec<Vec<(EdgeId, u32)>>> = vec![];
        for (s, &x) in c.iter().enumerate() {
            if x == 0 {
                continue;
            }
            if from[s].is_empty() {
                return None;
            }
            let opts = compositions(x, from[s].len())
                .into_iter()
                .map(|split| from[s].iter().copied().zip(split).filter(|&(_, m)| m > 0).collect())
                .collect();
            choices.push(opts);
        }
        Some(product(&choices).into_iter().map(|parts: Vec<Vec<(EdgeId, u32)>>| parts.concat()).collect())
    }

    fn apply(&self, c: &Counts, moves: &[(EdgeId, u32)]) -> Counts {
        let mut d = c.clone();
        for &(e, m) in moves {
            d[self.tpl.edges[e].src] -= m;
        }
        for &(e, m) in moves {
            d[self.tpl.edges[e].dst] += m;
        }
        d
    }

    pub fn successors(&self, c: &Counts) -> Vec<(CounterStep, Counts)> {
        let mut out = vec![];
        let total: u32 = c.iter().sum();
        if total == 0 {
            return out;
        }
        if self.broadcasts {
            if let Some(all) = self.spread(c, &self.bcast_from) {
                for moves in all {
                    let d = self.apply(c, &moves);
                    out.push((CounterStep::Broadcast { moves }, d));
                }
            }
        }
        for (a, per_index) in &self.rdz {
            if per_index.iter().any(|v| v.is_empty()) {
                continue;
            }
            'tuple: for edges in product(per_index) {
                let mut need = vec![0u32; c.len()];
                for &e in &edges {
                    let s = self.tpl.edges[e].src;
                    need[s] += 1;
                    if need[s] > c[s] {
                        continue 'tuple;
                    }
                }
                let moves: Vec<(EdgeId, u32)> = edges.iter().map(|&e| (e, 1)).collect();
                let d = self.apply(c, &moves);
                out.push((CounterStep::Rendezvous { action: a.clone(), edges }, d));
            }
        }
        if self.broadcasts {
            for (b, snds) in &self.snd {
                let Some(rcv) = self.rcv_from.get(b) else { continue };
                for &se in snds {
                    let s = self.tpl.edges[se].src;
                    if c[s] == 0 {
                        continue;
                    }
                    let mut rest = c.clone();
                    rest[s] -= 1;
                    if let Some(all) = self.spread(&rest, rcv) {
                        for moves in all {
                            let mut full = moves.clone();
                            full.push((se, 1));
                            let d = self.apply(c, &full);
                            out.push((CounterStep::Asym { action: b.clone(), sender: se, moves }, d));
                        }
                    }
                }
            }
        }
        out
    }
}

/// Who starts where: one tracked process and groups of anonymous ones.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Population {
    pub tracked: Vec<StateId>,
    pub groups: Vec<(Vec<StateId>, u32)>,
}

impl Population {
    /// `n` identical processes starting in the initial states.
    pub fn plain(tpl: &Template, n: u32) -> Self {
        assert!(n >= 1, "at least one process");
        Population { tracked: tpl.initial.clone(), groups: vec![(tpl.initial.clone(), n - 1)] }
    }

    pub fn size(&self) -> u32 {
        1 + self.groups.iter().map(|g| g.1).sum::<u32>()
    }

    /// Initial counter configurations of everybody but the tracked process.
    fn others(&self, n_states: usize) -> Vec<Counts> {
        let per_group: Vec<Vec<Counts>> = self.groups.iter().map(|(pool, m)| multisets(pool, *m, n_states)).collect();
        product(&per_group)
            .into_iter()
            .map(|parts| {
                let mut c = vec![0; n_states];
                for p in parts {
                    for (s, x) in p.into_iter().enumerate() {
                        c[s] += x;
                    }
                }
                c
            })
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect()
    }

    pub fn initial_tracked(&self, n_states: usize) -> Vec<Tracked> {
        let mut out = vec![];
        for &t in self.tracked.iter().collect::<BTreeSet<_>>() {
            for others in self.others(n_states) {
                out.push(Tracked { state: t, others });
            }
        }
        out
    }

    pub fn initial_counts(&self, n_states: usize) -> Vec<Counts> {
        self.initial_tracked(n_states).into_iter().map(|t| t.full()).collect::<BTreeSet<_>>().into_iter().collect()
    }
}

/// A configuration seen from one distinguished process.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Tracked {
    pub state: StateId,
    pub others: Counts,
}

impl Tracked {
    pub fn full(&self) -> Counts {
        let mut c = self.others.clone();
        c[self.state] += 1;
        c
    }
}

impl Stepper<'_> {
    /// Successors of a tracked configuration: the step, the edge taken by
    /// the tracked process (if it moves), and the result.
    pub fn tracked_successors(&self, t: &Tracked) -> Vec<(CounterStep, Option<EdgeId>, Tracked)> {
        let full = t.full();
        let mut out = vec![];
        let mut seen = HashSet::new();
        let edges = &self.tpl.edges;
        for (step, dst) in self.successors(&full) {
            let mut opts: Vec<Option<EdgeId>> = vec![];
            match &step {
                CounterStep::Broadcast { moves } => {
                    opts.extend(moves.iter().filter(|(e, _)| edges[*e].src == t.state).map(|&(e, _)| Some(e)));
                }
                CounterStep::Rendezvous { edges: es, .. } => {
                    opts.extend(es.iter().filter(|&&e| edges[e].src == t.state).map(|&e| Some(e)));
                    let busy = es.iter().filter(|&&e| edges[e].src == t.state).count() as u32;
                    if busy < full[t.state] {
                        opts.push(None);
                    }
                }
                CounterStep::Asym { sender, moves, .. } => {
                    if edges[*sender].src == t.state {
                        opts.push(Some(*sender));
                    }
                    opts.extend(moves.iter().filter(|(e, _)| edges[*e].src == t.state).map(|&(e, _)| Some(e)));
                }
            }
            for o in opts {
                let state = o.map_or(t.state, |e| edges[e].dst);
                let mut others = dst.clone();
                others[state] -= 1;
                let next = Tracked { state, others };
                if seen.insert((o, next.clone())) {
                    out.push((step.clone(), o, next));
                }
            }
        }
        out
    }
}

/// Counter configurations reachable within `depth` steps (unbounded if
/// `None`).
pub fn enumerate_reachable(tpl: &Template, pop: &Population, depth: Option<usize>) -> BTreeSet<Counts> {
    let st = Stepper::new(tpl);
    let mut seen: BTreeSet<Counts> = BTreeSet::new();
    let mut queue = VecDeque::new();
    for c in pop.initial_counts(tpl.num_states()) {
        if seen.insert(c.clone()) {
            queue.push_back((c, 0));
        }
    }
    while let Some((c, d)) = queue.pop_front() {
        if depth.is_some_and(|m| d >= m) {
            continue;
        }
        for (_, next) in st.successors(&c) {
            if seen.insert(next.clone()) {
                queue.push_back((next, d + 1));
            }
        }
    }
    seen
}

/// The same set computed over process vectors with the model's own
/// successor relation, as an independent check of the counter abstraction.
pub fn explicit_reachable(tpl: &Template, inits: &[Config], depth: usize) -> BTreeSet<Counts> {
    let mut seen: BTreeSet<Config> = inits.iter().cloned().collect();
    let mut frontier: Vec<Config> = seen.iter().cloned().collect();
    for _ in 0..depth {
        let mut next = vec![];
        for c in &frontier {
            for t in successors(tpl, c) {
                if seen.insert(t.dst.clone()) {
                    next.push(t.dst);
                }
            }
        }
        frontier = next;
    }
    seen.iter().map(|c| counts_of(c, tpl.num_states())).collect()
}

/// Initial process vectors of `n` processes.
pub fn initial_configs(tpl: &Template, n: usize) -> Vec<Config> {
    product(&vec![tpl.initial.clone(); n])
}

/// Calls `f` on every run of length at most `depth` from `inits`.
pub fn for_each_run(tpl: &Template, inits: &[Config], depth: usize, f: &mut dyn FnMut(&Run)) {
    fn go(tpl: &Template, run: &mut Run, depth: usize, f: &mut dyn FnMut(&Run)) {
        f(run);
        if run.transitions.len() == depth {
            return;
        }
        for t in successors(tpl, run.last()) {
            run.transitions.push(t);
            go(tpl, run, depth, f);
            run.transitions.pop();
        }
    }
    for c in inits {
        go(tpl, &mut Run::empty(c.clone()), depth, f);
    }
}

/// Label words of the tracked process with at most `max_len` letters.
pub fn executions_upto(tpl: &Template, pop: &Population, max_len: usize) -> BTreeSet<Vec<Letter>> {
    let st = Stepper::new(tpl);
    let mut seen: HashSet<(Tracked, Vec<Letter>)> = HashSet::new();
    let mut queue = VecDeque::new();
    if max_len == 0 {
        return BTreeSet::new();
    }
    for t in pop.initial_tracked(tpl.num_states()) {
        let w = vec![tpl.labels[t.state].clone()];
        if seen.insert((t.clone(), w.clone())) {
            queue.push_back((t, w));
        }
    }
    while let Some((t, w)) = queue.pop_front() {
        for (_, moved, next) in st.tracked_successors(&t) {
            let mut w2 = w.clone();
            if moved.is_some() {
                if w.len() == max_len {
                    continue;
                }
                w2.push(tpl.labels[next.state].clone());
            }
            let key = (next, w2);
            if !seen.contains(&key) {
                seen.insert(key.clone());
                queue.push_back(key);
            }
        }
    }
    seen.into_iter().map(|(_, w)| w).collect()
}

/// Counter configurations reachable in tracked form, forgetting identities.
pub fn tracked_reachable(tpl: &Template, pop: &Population, depth: Option<usize>) -> BTreeSet<Counts> {
    let st = Stepper::new(tpl);
    let mut seen: BTreeSet<Tracked> = BTreeSet::new();
    let mut queue = VecDeque::new();
    for t in pop.initial_tracked(tpl.num_states()) {
        if seen.insert(t.clone()) {
            queue.push_back((t, 0));
        }
    }
    while let Some((t, d)) = queue.pop_front() {
        if depth.is_some_and(|m| d >= m) {
            continue;
        }
        for (_, _, next) in st.tracked_successors(&t) {
            if seen.insert(next.clone()) {
                queue.push_back((next, d + 1));
            }
        }
    }
    seen.iter().map(Tracked::full).collect()
}

/// Whether some process of `P^n` can produce exactly `word`.
pub fn produces(tpl: &Template, n: u32, word: &[Letter]) -> bool {
    let Some(first) = word.first() else { return false };
    let st = Stepper::new(tpl);
    let mut seen: HashSet<(Tracked, usize)> = HashSet::new();
    let mut queue = VecDeque::new();
    for t in Population::plain(tpl, n).initial_tracked(tpl.num_states()) {
        if &tpl.labels[t.state] == first && seen.insert((t.clone(), 1)) {
            queue.push_back((t, 1));
        }
    }
    while let Some((t, pos)) = queue.pop_front() {
        if pos == word.len() {
            return true;
        }
        for (_, moved, next) in st.tracked_successors(&t) {
            let pos2 = match moved {
                Some(_) if tpl.labels[next.state] == word[pos] => pos + 1,
                Some(_) => continue,
                None => pos,
            };
            if seen.insert((next.clone(), pos2)) {
                queue.push_back((next, pos2));
            }
        }
    }
    false
}

/// Smallest `n` in `1, 2, 4, ...` up to `max_processes` at which `word` is
/// an execution.
pub fn realize_execution(tpl: &Template, word: &[Letter], max_processes: u32) -> Option<u32> {
    std::iter::successors(Some(1u32), |n| Some(n * 2)).take_while(|&n| n <= max_processes).find(|&n| produces(tpl, n, word))
}

/// Removes consecutive repeated letters.
pub fn destutter(w: &[Letter]) -> Vec<Letter> {
    let mut out: Vec<Letter> = vec![];
    for l in w {
        if out.last() != Some(l) {
            out.push(l.clone());
        }
    }
    out
}
