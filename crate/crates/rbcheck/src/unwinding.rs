//! The reachability-unwinding: a lasso of saturated components joined by
//! broadcast edges.

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;
use thiserror::Error;

use crate::model::{EdgeId, EdgeLabel, GlobalTransition, Kind, Run, StateId, Step, Template};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum UnwindError {
    #[error("templates of kind {0:?} cannot be unwound")]
    Unsupported(Kind),
    #[error("unwinding needs more than {0} components")]
    TooManyComponents(usize),
    #[error("transition {0} of the run has no counterpart in the unwinding")]
    NotLiftable(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    pub index: usize,
    pub initial: BTreeSet<StateId>,
    pub states: BTreeSet<StateId>,
    /// Rendezvous edges of the base template, in scan order.
    pub edges: Vec<EdgeId>,
}

/// Least set of rendezvous edges (and their targets) closed under the
/// firing condition, starting from `seed`.
pub fn saturate(base: &Template, seed: &BTreeSet<StateId>, index: usize) -> Component {
    let mut states = seed.clone();
    let mut edges = vec![];
    let mut taken = vec![false; base.edges.len()];
    loop {
        let mut changed = false;
        for (i, e) in base.edges.iter().enumerate() {
            if taken[i] || !states.contains(&e.src) {
                continue;
            }
            let EdgeLabel::Rendezvous { action, index: h } = &e.label else { continue };
            let partners = (1..=base.k).filter(|l| l != h).all(|l| {
                base.edges.iter().any(|f| states.contains(&f.src) && f.label == EdgeLabel::rdz(action, l))
            });
            if partners {
                taken[i] = true;
                edges.push(i);
                states.insert(e.dst);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    Component { index, initial: seed.clone(), states, edges }
}

/// Which copy each flat edge came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EdgeOrigin {
    pub base: EdgeId,
    pub comp: usize,
    pub broadcast: bool,
}

#[derive(Debug, Clone)]
pub struct Unwinding {
    pub base: Template,
    pub components: Vec<Component>,
    pub prefix: usize,
    pub period: usize,
    /// The unwinding as an ordinary template with states named `s@i`.
    pub flat: Template,
    pub state_origin: Vec<(StateId, usize)>,
    pub edge_origin: Vec<EdgeOrigin>,
    state_index: HashMap<(StateId, usize), StateId>,
    edge_index: HashMap<(EdgeId, usize), EdgeId>,
}

/// Builds the unwinding. Components are identified once their state sets
/// repeat, since a component's edges are a function of its states.
pub fn build_unwinding(tpl: &Template, max_components: Option<usize>) -> Result<Unwinding, UnwindError> {
    if tpl.kind == Kind::Rba {
        return Err(UnwindError::Unsupported(tpl.kind));
    }
    let mut components: Vec<Component> = vec![];
    let mut seen: HashMap<BTreeSet<StateId>, usize> = HashMap::new();
    let mut seed: BTreeSet<StateId> = tpl.initial.iter().copied().collect();
    let prefix = loop {
        if let Some(cap) = max_components {
            if components.len() >= cap {
                return Err(UnwindError::TooManyComponents(cap));
            }
        }
        let c = saturate(tpl, &seed, components.len());
        if let Some(&n) = seen.get(&c.states) {
            break n;
        }
        seed = c
            .states
            .iter()
            .flat_map(|&s| tpl.broadcast_edges_from(s).map(|e| tpl.edges[e].dst))
            .collect();
        seen.insert(c.states.clone(), c.index);
        components.push(c);
    };
    let period = components.len() - prefix;

    let mut flat = Template::new(tpl.kind, tpl.k);
    flat.atoms = tpl.atoms.clone();
    let mut state_origin = vec![];
    let mut state_index = HashMap::new();
    for c in &components {
        for &s in &c.states {
            let id = flat.add_state_with(format!("{}@{}", tpl.states[s], c.index), tpl.labels[s].clone());
            state_origin.push((s, c.index));
            state_index.insert((s, c.index), id);
        }
    }
    flat.initial = tpl.initial.iter().map(|s| state_index[&(*s, 0)]).collect();
    let m = components.len() - 1;
    let suc = |i: usize| if i < m { i + 1 } else { prefix };
    let mut edge_origin = vec![];
    let mut edge_index = HashMap::new();
    for c in &components {
        let i = c.index;
        for &e in &c.edges {
            let edge = &tpl.edges[e];
            let id = flat.add_edge(state_index[&(edge.src, i)], edge.label.clone(), state_index[&(edge.dst, i)]);
            edge_origin.push(EdgeOrigin { base: e, comp: i, broadcast: false });
            edge_index.insert((e, i), id);
        }
        for (e, edge) in tpl.edges.iter().enumerate() {
            if edge.label.is_broadcast() && c.states.contains(&edge.src) {
                let dst = state_index[&(edge.dst, suc(i))];
                let id = flat.add_edge(state_index[&(edge.src, i)], EdgeLabel::Broadcast, dst);
                edge_origin.push(EdgeOrigin { base: e, comp: i, broadcast: true });
                edge_index.insert((e, i), id);
            }
        }
    }
    Ok(Unwinding { base: tpl.clone(), components, prefix, period, flat, state_origin, edge_origin, state_index, edge_index })
}

impl Unwinding {
    /// Index of the last component.
    pub fn last(&self) -> usize {
        self.components.len() - 1
    }

    /// Component reached after `i` broadcasts.
    pub fn comp_index(&self, i: usize) -> usize {
        let n = self.prefix;
        i.min(n + (i.saturating_sub(n)) % self.period)
    }

    pub fn suc(&self, i: usize) -> usize {
        if i < self.last() {
            i + 1
        } else {
            self.prefix
        }
    }

    pub fn pre(&self, i: usize) -> usize {
        if i == self.prefix {
            self.last()
        } else {
            i - 1
        }
    }

    /// Components on the noose of the lasso.
    pub fn noose(&self) -> std::ops::RangeInclusive<usize> {
        self.prefix..=self.last()
    }

    pub fn flat_state(&self, s: StateId, comp: usize) -> Option<StateId> {
        self.state_index.get(&(s, comp)).copied()
    }

    pub fn flat_edge(&self, e: EdgeId, comp: usize) -> Option<EdgeId> {
        self.edge_index.get(&(e, comp)).copied()
    }

    /// Flat states belonging to component `i`.
    pub fn states_of(&self, i: usize) -> Vec<StateId> {
        self.components[i].states.iter().map(|&s| self.state_index[&(s, i)]).collect()
    }

    /// Flat rendezvous edges of component `i`.
    pub fn rdz_edges_of(&self, i: usize) -> Vec<EdgeId> {
        self.components[i].edges.iter().map(|&e| self.edge_index[&(e, i)]).collect()
    }

    /// Flat broadcast edges leaving component `i`.
    pub fn broadcast_edges_of(&self, i: usize) -> Vec<EdgeId> {
        (0..self.edge_origin.len()).filter(|&f| self.edge_origin[f].broadcast && self.edge_origin[f].comp == i).collect()
    }

    /// Drops component indices.
    pub fn wind(&self, run: &Run) -> Run {
        let st = |c: &Vec<StateId>| c.iter().map(|&s| self.state_origin[s].0).collect::<Vec<_>>();
        let ed = |e: EdgeId| self.edge_origin[e].base;
        Run {
            init: st(&run.init),
            transitions: run
                .transitions
                .iter()
                .map(|t| GlobalTransition { src: st(&t.src), step: map_step(&t.step, ed), dst: st(&t.dst) })
                .collect(),
        }
    }

    /// Attaches to every state the component given by the number of
    /// preceding broadcasts.
    pub fn unwind(&self, run: &Run) -> Result<Run, UnwindError> {
        let lift = |c: &Vec<StateId>, b: usize, at: usize| -> Result<Vec<StateId>, UnwindError> {
            c.iter().map(|&s| self.flat_state(s, self.comp_index(b)).ok_or(UnwindError::NotLiftable(at))).collect()
        };
        let init = lift(&run.init, 0, 0)?;
        let mut transitions = vec![];
        let mut b = 0;
        for (at, t) in run.transitions.iter().enumerate() {
            let comp = self.comp_index(b);
            let mut missing = false;
            let step = map_step(&t.step, |e| {
                self.flat_edge(e, comp).unwrap_or_else(|| {
                    missing = true;
                    usize::MAX
                })
            });
            if missing {
                return Err(UnwindError::NotLiftable(at));
            }
            let src = lift(&t.src, b, at)?;
            if t.is_broadcast() {
                b += 1;
            }
            let dst = lift(&t.dst, b, at)?;
            transitions.push(GlobalTransition { src, step, dst });
        }
        Ok(Run { init, transitions })
    }

    pub fn view(&self) -> UnwindingView {
        let names = |c: usize, it: &mut dyn Iterator<Item = StateId>| it.map(|s| format!("{}@{}", self.base.states[s], c)).collect();
        UnwindingView {
            prefix: self.prefix,
            period: self.period,
            components: self
                .components
                .iter()
                .map(|c| ComponentView {
                    index: c.index,
                    initial: names(c.index, &mut c.initial.iter().copied()),
                    states: names(c.index, &mut c.states.iter().copied()),
                    edges: c.edges.iter().map(|&e| self.flat.edge_name(self.edge_index[&(e, c.index)])).collect(),
                })
                .collect(),
            cross_edges: (0..self.edge_origin.len())
                .filter(|&e| self.edge_origin[e].broadcast)
                .map(|e| (self.flat.states[self.flat.edges[e].src].clone(), self.flat.states[self.flat.edges[e].dst].clone()))
                .collect(),
        }
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph unwinding {\n  rankdir=LR;\n");
        for c in &self.components {
            s += &format!("  subgraph cluster_{} {{\n    label=\"P{}\";\n", c.index, c.index);
            for f in self.states_of(c.index) {
                s += &format!("    \"{}\";\n", self.flat.states[f]);
            }
            s += "  }\n";
        }
        for (i, e) in self.flat.edges.iter().enumerate() {
            let style = if self.edge_origin[i].broadcast { ", style=dashed" } else { "" };
            s += &format!(
                "  \"{}\" -> \"{}\" [label=\"{}\"{}];\n",
                self.flat.states[e.src], self.flat.states[e.dst], e.label, style
            );
        }
        s + "}\n"
    }
}

pub(crate) fn map_step(step: &Step, mut f: impl FnMut(EdgeId) -> EdgeId) -> Step {
    match step {
        Step::Broadcast { edges } => Step::Broadcast { edges: edges.iter().map(|&e| f(e)).collect() },
        Step::Rendezvous { action, moves } => {
            Step::Rendezvous { action: action.clone(), moves: moves.iter().map(|&(p, e)| (p, f(e))).collect() }
        }
        Step::Asym { action, sender, edges } => {
            Step::Asym { action: action.clone(), sender: *sender, edges: edges.iter().map(|&e| f(e)).collect() }
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ComponentView {
    pub index: usize,
    pub initial: Vec<String>,
    pub states: Vec<String>,
    pub edges: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct UnwindingView {
    pub prefix: usize,
    pub period: usize,
    pub components: Vec<ComponentView>,
    pub cross_edges: Vec<(String, String)>,
}
