//! Streett automata and their emptiness check by recursive SCC refinement.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::Guard;
use crate::graph;

/// A run is fair for the pair iff visiting `if_inf` infinitely often
/// implies visiting `then_inf` infinitely often.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StreettPair {
    pub if_inf: BTreeSet<usize>,
    pub then_inf: BTreeSet<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StreettAutomaton {
    pub states: Vec<String>,
    pub initial: Vec<usize>,
    pub trans: Vec<(usize, Guard, usize)>,
    pub pairs: Vec<StreettPair>,
}

/// Transition indices of an accepting lasso: `stem` then `cycle` forever.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LassoRun {
    pub stem: Vec<usize>,
    pub cycle: Vec<usize>,
}

impl StreettAutomaton {
    fn successors(&self) -> Vec<Vec<(usize, usize)>> {
        let mut out = vec![vec![]; self.states.len()];
        for (i, t) in self.trans.iter().enumerate() {
            out[t.0].push((t.2, i));
        }
        out
    }
}

/// `None` iff no run satisfies every pair; otherwise a lasso whose cycle
/// visits every state of a fair strongly connected set.
pub fn streett_emptiness(st: &StreettAutomaton) -> Option<LassoRun> {
    let succ = st.successors();
    let n = st.states.len();
    let reach = graph::reachable(&succ, st.initial.iter().copied(), &vec![true; n]);
    let good = fair_scc(&succ, &st.pairs, reach)?;
    let alive = vec![true; n];
    let (stem, start) = graph::shortest_path(&succ, &st.initial, &|v| good.contains(&v), &alive)?;
    let cycle = graph::covering_cycle(&succ, &good, start);
    Some(LassoRun { stem, cycle })
}

fn fair_scc(succ: &[Vec<(usize, usize)>], pairs: &[StreettPair], alive: Vec<bool>) -> Option<BTreeSet<usize>> {
    for comp in graph::sccs(succ, &alive) {
        if !nontrivial_within(succ, &comp) {
            continue;
        }
        let set: BTreeSet<usize> = comp.iter().copied().collect();
        let mut bad = BTreeSet::new();
        for p in pairs {
            let hit = p.if_inf.iter().any(|s| set.contains(s));
            let answered = p.then_inf.iter().any(|s| set.contains(s));
            if hit && !answered {
                bad.extend(p.if_inf.intersection(&set).copied());
            }
        }
        if bad.is_empty() {
            return Some(set);
        }
        let inner: Vec<bool> = (0..succ.len()).map(|v| set.contains(&v) && !bad.contains(&v)).collect();
        if let Some(found) = fair_scc(succ, pairs, inner) {
            return Some(found);
        }
    }
    None
}

fn nontrivial_within(succ: &[Vec<(usize, usize)>], comp: &[usize]) -> bool {
    comp.len() > 1 || graph::nontrivial(succ, comp)
}
