//! Büchi automata with one counter (inc/reset/skip), accepting runs that
//! meet the Büchi condition with a bounded counter.

use std::collections::{BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use super::nfw::Nbw;
use super::streett::{streett_emptiness, StreettAutomaton, StreettPair};
use super::{Guard, Lasso};
use crate::edgetypes::{EdgeTypeReport, Shade};
use crate::model::Letter;
use crate::unwinding::Unwinding;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Cc {
    Skip,
    Inc,
    Reset,
}

impl Cc {
    const ALL: [Cc; 3] = [Cc::Skip, Cc::Inc, Cc::Reset];

    fn slot(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BTrans {
    pub src: usize,
    pub guard: Guard,
    pub dst: usize,
    pub cc: Cc,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BAutomaton {
    pub states: Vec<String>,
    pub initial: Vec<usize>,
    pub buchi: Vec<bool>,
    pub trans: Vec<BTrans>,
}

/// An accepting lasso run and the word it reads.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BWitness {
    pub stem: Vec<usize>,
    pub cycle: Vec<usize>,
    pub word: Lasso,
}

fn some_letter(g: &Guard) -> Letter {
    match g {
        Guard::Exact(l) => l.clone(),
        Guard::Cube { pos, .. } => pos.clone(),
    }
}

impl BAutomaton {
    /// The Büchi automaton itself, with every counter command `skip`.
    pub fn from_nbw(n: &Nbw) -> BAutomaton {
        BAutomaton {
            states: n.states.clone(),
            initial: n.initial.clone(),
            buchi: n.accepting.clone(),
            trans: n.trans.iter().map(|t| BTrans { src: t.src, guard: t.guard.clone(), dst: t.dst, cc: Cc::Skip }).collect(),
        }
    }

    /// The equivalent-for-emptiness Streett automaton over `Q × {skip,inc,reset}`,
    /// remembering the last counter command.
    pub fn to_streett(&self) -> StreettAutomaton {
        let id = |q: usize, c: Cc| q * 3 + c.slot();
        let mut st = StreettAutomaton::default();
        for q in &self.states {
            for c in Cc::ALL {
                st.states.push(format!("{q}/{c:?}"));
            }
        }
        st.initial = self.initial.iter().map(|&q| id(q, Cc::Reset)).collect();
        for t in &self.trans {
            for c in Cc::ALL {
                st.trans.push((id(t.src, c), t.guard.clone(), id(t.dst, t.cc)));
            }
        }
        let all: BTreeSet<usize> = (0..st.states.len()).collect();
        let buchi: BTreeSet<usize> = (0..self.states.len()).filter(|&q| self.buchi[q]).flat_map(|q| Cc::ALL.map(|c| id(q, c))).collect();
        let inc: BTreeSet<usize> = (0..self.states.len()).map(|q| id(q, Cc::Inc)).collect();
        let reset: BTreeSet<usize> = (0..self.states.len()).map(|q| id(q, Cc::Reset)).collect();
        st.pairs = vec![StreettPair { if_inf: all, then_inf: buchi }, StreettPair { if_inf: inc, then_inf: reset }];
        st
    }

    /// Product with the deterministic automaton of `w`, then emptiness.
    pub fn accepts_lasso(&self, w: &Lasso) -> bool {
        assert!(!w.cycle.is_empty());
        let len = w.len();
        let id = |q: usize, i: usize| q * len + i;
        let mut p = BAutomaton::default();
        for q in &self.states {
            for i in 0..len {
                p.states.push(format!("{q}@{i}"));
            }
        }
        for &b in &self.buchi {
            p.buchi.extend(std::iter::repeat_n(b, len));
        }
        p.initial = self.initial.iter().map(|&q| id(q, 0)).collect();
        for t in &self.trans {
            for i in 0..len {
                if t.guard.matches(w.at(i)) {
                    p.trans.push(BTrans { src: id(t.src, i), guard: Guard::Exact(w.at(i).clone()), dst: id(t.dst, w.next(i)), cc: t.cc });
                }
            }
        }
        b_emptiness(&p).is_some()
    }
}

/// `None` iff the language is empty; otherwise an accepting lasso run.
pub fn b_emptiness(b: &BAutomaton) -> Option<BWitness> {
    let st = b.to_streett();
    let run = streett_emptiness(&st)?;
    // Streett transitions are laid out three per B transition
    let back = |i: usize| i / 3;
    let stem: Vec<usize> = run.stem.iter().map(|&i| back(i)).collect();
    let cycle: Vec<usize> = run.cycle.iter().map(|&i| back(i)).collect();
    let word = Lasso {
        stem: stem.iter().map(|&i| some_letter(&b.trans[i].guard)).collect(),
        cycle: cycle.iter().map(|&i| some_letter(&b.trans[i].guard)).collect(),
    };
    Some(BWitness { stem, cycle, word })
}

/// Synchronous product; the language is `L(b) ∩ L(n)`.
pub fn b_product_nbw(b: &BAutomaton, n: &Nbw) -> BAutomaton {
    let trivial = b.buchi.iter().all(|&x| x);
    // phase 0 waits for a Büchi state of `b`, phase 1 for one of `n`
    let phases: usize = if trivial { 1 } else { 2 };
    let mut index: HashMap<(usize, usize, usize), usize> = HashMap::new();
    let mut out = BAutomaton::default();
    let mut queue = VecDeque::new();
    let visit = |index: &mut HashMap<(usize, usize, usize), usize>, out: &mut BAutomaton, queue: &mut VecDeque<(usize, usize, usize)>, key: (usize, usize, usize)| -> usize {
        if let Some(&i) = index.get(&key) {
            return i;
        }
        let i = out.states.len();
        index.insert(key, i);
        let (x, y, f) = key;
        out.states.push(if trivial { format!("({},{})", b.states[x], n.states[y]) } else { format!("({},{},{f})", b.states[x], n.states[y]) });
        out.buchi.push(if trivial { n.accepting[y] } else { f == 0 && b.buchi[x] });
        queue.push_back(key);
        i
    };
    for &x in &b.initial {
        for &y in &n.initial {
            let i = visit(&mut index, &mut out, &mut queue, (x, y, 0));
            out.initial.push(i);
        }
    }
    let n_succ = n.successors();
    let mut b_succ = vec![vec![]; b.states.len()];
    for (i, t) in b.trans.iter().enumerate() {
        b_succ[t.src].push(i);
    }
    while let Some(key @ (x, y, f)) = queue.pop_front() {
        let src = index[&key];
        let f2 = match (phases, f) {
            (1, _) => 0,
            (_, 0) if b.buchi[x] => 1,
            (_, 1) if n.accepting[y] => 0,
            _ => f,
        };
        for &bi in &b_succ[x] {
            let bt = &b.trans[bi];
            for &(y2, ni) in &n_succ[y] {
                if let Some(g) = bt.guard.meet(&n.trans[ni].guard) {
                    let dst = visit(&mut index, &mut out, &mut queue, (bt.dst, y2, f2));
                    out.trans.push(BTrans { src, guard: g, dst, cc: bt.cc });
                }
            }
        }
    }
    out
}

/// Three copies of the unwinding: `init` (every edge, counter incremented),
/// `grn` (green edges; dark rendezvous increment, broadcasts reset) and
/// `loc` (locally-reusable edges, counter untouched). Each transition reads
/// the label of its source.
pub fn build_exec_bautomaton(uw: &Unwinding, report: &EdgeTypeReport) -> BAutomaton {
    let flat = &uw.flat;
    let n = flat.num_states();
    let mut b = BAutomaton::default();
    for copy in ["init", "grn", "loc"] {
        for s in &flat.states {
            b.states.push(format!("{copy}:{s}"));
        }
    }
    b.buchi = vec![true; 3 * n];
    b.initial = flat.initial.clone();
    for (e, edge) in flat.edges.iter().enumerate() {
        let g = Guard::Exact(flat.labels[edge.src].clone());
        for copy in 0..3 {
            b.trans.push(BTrans { src: edge.src, guard: g.clone(), dst: copy * n + edge.dst, cc: Cc::Inc });
        }
        if report.green[e] {
            let cc = if edge.label.is_broadcast() {
                Cc::Reset
            } else if report.shade[e] == Shade::Dark {
                Cc::Inc
            } else {
                Cc::Skip
            };
            b.trans.push(BTrans { src: n + edge.src, guard: g.clone(), dst: n + edge.dst, cc });
        }
        if report.locally_reusable[e] {
            b.trans.push(BTrans { src: 2 * n + edge.src, guard: g, dst: 2 * n + edge.dst, cc: Cc::Skip });
        }
    }
    b
}
