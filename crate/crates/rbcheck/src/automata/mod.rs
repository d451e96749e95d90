//! Word automata over letters `2^AP`, with and without a counter.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::model::Letter;

pub mod bauto;
pub mod json;
pub mod ltl;
pub mod nfw;
pub mod streett;

pub use bauto::{b_emptiness, b_product_nbw, build_exec_bautomaton, BAutomaton, BTrans, BWitness, Cc};
pub use ltl::{ltl_to_nbw, ltlf_to_nfw, Ltl};
pub use nfw::{build_exec_nfw, exec_nfw, nfw_inclusion, Nbw, Nfw, Trans};
pub use streett::{streett_emptiness, StreettAutomaton, StreettPair};

/// Which letters a transition may read.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Guard {
    /// Exactly this letter.
    Exact(Letter),
    /// Every letter containing `pos` and disjoint from `neg`.
    Cube { pos: Letter, neg: Letter },
}

impl Guard {
    pub fn any() -> Guard {
        Guard::Cube { pos: Letter::new(), neg: Letter::new() }
    }

    pub fn matches(&self, l: &Letter) -> bool {
        match self {
            Guard::Exact(x) => x == l,
            Guard::Cube { pos, neg } => pos.is_subset(l) && neg.is_disjoint(l),
        }
    }

    /// The conjunction, or `None` when no letter satisfies both.
    pub fn meet(&self, other: &Guard) -> Option<Guard> {
        match (self, other) {
            (Guard::Exact(a), g) | (g, Guard::Exact(a)) => g.matches(a).then(|| Guard::Exact(a.clone())),
            (Guard::Cube { pos: p1, neg: n1 }, Guard::Cube { pos: p2, neg: n2 }) => {
                let pos: Letter = p1.union(p2).cloned().collect();
                let neg: Letter = n1.union(n2).cloned().collect();
                pos.is_disjoint(&neg).then_some(Guard::Cube { pos, neg })
            }
        }
    }

    pub fn atoms(&self) -> BTreeSet<String> {
        match self {
            Guard::Exact(a) => a.clone(),
            Guard::Cube { pos, neg } => pos.union(neg).cloned().collect(),
        }
    }

    /// All letters over `universe` (plus any atoms the guard itself
    /// requires) that satisfy the guard.
    pub fn letters(&self, universe: &BTreeSet<String>) -> Vec<Letter> {
        match self {
            Guard::Exact(a) => vec![a.clone()],
            Guard::Cube { pos, neg } => {
                let free: Vec<&String> = universe.iter().filter(|a| !pos.contains(*a) && !neg.contains(*a)).collect();
                assert!(free.len() < 24, "letter enumeration over {} free atoms", free.len());
                (0u32..1 << free.len())
                    .map(|mask| {
                        let mut l = pos.clone();
                        for (i, a) in free.iter().enumerate() {
                            if mask >> i & 1 == 1 {
                                l.insert((*a).clone());
                            }
                        }
                        l
                    })
                    .collect()
            }
        }
    }
}

impl fmt::Display for Guard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Guard::Exact(a) => write!(f, "{{{}}}", a.iter().cloned().collect::<Vec<_>>().join(",")),
            Guard::Cube { pos, neg } => {
                let lits: Vec<String> = pos.iter().cloned().chain(neg.iter().map(|a| format!("!{a}"))).collect();
                if lits.is_empty() {
                    f.write_str("true")
                } else {
                    f.write_str(&lits.join("&"))
                }
            }
        }
    }
}

/// An ultimately periodic word `stem · cycle^ω`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lasso {
    pub stem: Vec<Letter>,
    pub cycle: Vec<Letter>,
}

impl Lasso {
    pub fn len(&self) -> usize {
        self.stem.len() + self.cycle.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cycle.is_empty()
    }

    pub fn at(&self, i: usize) -> &Letter {
        if i < self.stem.len() {
            &self.stem[i]
        } else {
            &self.cycle[(i - self.stem.len()) % self.cycle.len()]
        }
    }

    /// Position following `i` in the folded lasso of `len()` positions.
    pub fn next(&self, i: usize) -> usize {
        if i + 1 < self.len() {
            i + 1
        } else {
            self.stem.len()
        }
    }
}

pub fn letter(atoms: &[&str]) -> Letter {
    atoms.iter().map(|a| a.to_string()).collect()
}

pub fn fmt_word(w: &[Letter]) -> String {
    w.iter()
        .map(|l| format!("{{{}}}", l.iter().cloned().collect::<Vec<_>>().join(",")))
        .collect::<Vec<_>>()
        .join(" ")
}
