//! Finite-word and Büchi automata with guarded transitions.

use std::collections::{BTreeSet, HashMap, VecDeque};

use super::{Guard, Lasso};
use crate::model::{Letter, Template};
use crate::unwinding::Unwinding;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Trans {
    pub src: usize,
    pub guard: Guard,
    pub dst: usize,
}

/// Nondeterministic automaton; `accepting` marks final states.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Nfw {
    pub states: Vec<String>,
    pub initial: Vec<usize>,
    pub accepting: Vec<bool>,
    pub trans: Vec<Trans>,
}

/// Same shape as [`Nfw`], with `accepting` read as the Büchi set.
pub type Nbw = Nfw;

impl Nfw {
    pub fn atoms(&self) -> BTreeSet<String> {
        self.trans.iter().flat_map(|t| t.guard.atoms()).collect()
    }

    pub fn successors(&self) -> Vec<Vec<(usize, usize)>> {
        let mut out = vec![vec![]; self.states.len()];
        for (i, t) in self.trans.iter().enumerate() {
            out[t.src].push((t.dst, i));
        }
        out
    }

    fn step(&self, cur: &BTreeSet<usize>, l: &Letter) -> BTreeSet<usize> {
        self.trans.iter().filter(|t| cur.contains(&t.src) && t.guard.matches(l)).map(|t| t.dst).collect()
    }

    pub fn accepts(&self, w: &[Letter]) -> bool {
        let mut cur: BTreeSet<usize> = self.initial.iter().copied().collect();
        for l in w {
            cur = self.step(&cur, l);
        }
        cur.iter().any(|&s| self.accepting[s])
    }

    /// Büchi acceptance of `stem · cycle^ω`.
    pub fn accepts_lasso(&self, w: &Lasso) -> bool {
        super::bauto::BAutomaton::from_nbw(self).accepts_lasso(w)
    }

    /// Keeps states that are reachable and can reach an accepting state.
    pub fn trim(&self) -> Nfw {
        let n = self.states.len();
        let mut fwd = vec![false; n];
        let mut queue: VecDeque<usize> = self.initial.iter().copied().collect();
        for &s in &self.initial {
            fwd[s] = true;
        }
        while let Some(v) = queue.pop_front() {
            for t in self.trans.iter().filter(|t| t.src == v) {
                if !fwd[t.dst] {
                    fwd[t.dst] = true;
                    queue.push_back(t.dst);
                }
            }
        }
        let mut bwd: Vec<bool> = self.accepting.clone();
        let mut changed = true;
        while changed {
            changed = false;
            for t in &self.trans {
                if bwd[t.dst] && !bwd[t.src] {
                    bwd[t.src] = true;
                    changed = true;
                }
            }
        }
        let keep: Vec<bool> = (0..n).map(|s| fwd[s] && bwd[s]).collect();
        let mut map = HashMap::new();
        let mut out = Nfw::default();
        for s in 0..n {
            if keep[s] {
                map.insert(s, out.states.len());
                out.states.push(self.states[s].clone());
                out.accepting.push(self.accepting[s]);
            }
        }
        out.initial = self.initial.iter().filter_map(|s| map.get(s).copied()).collect();
        let mut seen = BTreeSet::new();
        for t in &self.trans {
            if let (Some(&a), Some(&b)) = (map.get(&t.src), map.get(&t.dst)) {
                let t2 = Trans { src: a, guard: t.guard.clone(), dst: b };
                if seen.insert(t2.clone()) {
                    out.trans.push(t2);
                }
            }
        }
        out
    }

    /// Letters worth trying when exploring this automaton against `other`.
    fn alphabet_with(&self, other: &Nfw) -> BTreeSet<String> {
        self.atoms().union(&other.atoms()).cloned().collect()
    }
}

/// Automaton of label sequences of finite paths of `tpl` from its initial
/// states. A fresh non-final state `init` reads the first label.
pub fn exec_nfw(tpl: &Template) -> Nfw {
    let mut nfw = Nfw::default();
    nfw.states.push("init".into());
    nfw.accepting.push(false);
    nfw.initial = vec![0];
    for s in &tpl.states {
        nfw.states.push(s.clone());
        nfw.accepting.push(true);
    }
    let mut seen = BTreeSet::new();
    let mut add = |nfw: &mut Nfw, src: usize, dst: usize| {
        if seen.insert((src, dst)) {
            nfw.trans.push(Trans { src, guard: Guard::Exact(tpl.labels[dst - 1].clone()), dst });
        }
    };
    for &s in &tpl.initial {
        add(&mut nfw, 0, s + 1);
    }
    for e in &tpl.edges {
        add(&mut nfw, e.src + 1, e.dst + 1);
    }
    nfw
}

/// Finite executions of the parameterized system, read off the unwinding.
pub fn build_exec_nfw(uw: &Unwinding) -> Nfw {
    exec_nfw(&uw.flat)
}

/// `None` when `L(a) ⊆ L(spec)`, otherwise a shortest word of `L(a) \ L(spec)`.
pub fn nfw_inclusion(a: &Nfw, spec: &Nfw) -> Option<Vec<Letter>> {
    let universe = a.alphabet_with(spec);
    let spec_init: BTreeSet<usize> = spec.initial.iter().copied().collect();
    type Node = (usize, BTreeSet<usize>);
    let mut parent: HashMap<Node, Option<(Node, Letter)>> = HashMap::new();
    let mut queue = VecDeque::new();
    for &q in &a.initial {
        let node = (q, spec_init.clone());
        if !parent.contains_key(&node) {
            parent.insert(node.clone(), None);
            queue.push_back(node);
        }
    }
    let a_succ = a.successors();
    while let Some(node) = queue.pop_front() {
        let (q, ref set) = node;
        if a.accepting[q] && !set.iter().any(|&s| spec.accepting[s]) {
            let mut word = vec![];
            let mut cur = node.clone();
            while let Some(Some((prev, l))) = parent.get(&cur) {
                word.push(l.clone());
                cur = prev.clone();
            }
            word.reverse();
            return Some(word);
        }
        for &(q2, ti) in &a_succ[q] {
            for l in a.trans[ti].guard.letters(&universe) {
                let next = (q2, spec.step(set, &l));
                if !parent.contains_key(&next) {
                    parent.insert(next.clone(), Some((node.clone(), l)));
                    queue.push_back(next);
                }
            }
        }
    }
    None
}
