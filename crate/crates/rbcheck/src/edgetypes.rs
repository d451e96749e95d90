//! Edge types of the unwinding: locally-reusable, green, light and dark
//! green. Every flag is read off the support of a support-maximal solution
//! of a homogeneous rational system.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{Signed, Zero};
use ratlp::{support_maximal_solution, LinearSystem, Rational};
use serde::{Deserialize, Serialize};

use crate::cvrs::Cvrs;
use crate::model::EdgeId;
use crate::unwinding::Unwinding;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Shade {
    #[default]
    None,
    Light,
    Dark,
}

/// A set of flat edges with the solution that witnesses it.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeSet {
    pub member: Vec<bool>,
    /// Coefficient per flat edge; positive exactly on members.
    pub witness: Vec<Rational>,
}

impl EdgeSet {
    fn empty(n: usize) -> Self {
        EdgeSet { member: vec![false; n], witness: vec![Rational::zero(); n] }
    }

    pub fn edges(&self) -> Vec<EdgeId> {
        (0..self.member.len()).filter(|&e| self.member[e]).collect()
    }
}

/// Per flat edge flags, indexed like `uw.flat.edges`.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeTypeReport {
    pub locally_reusable: Vec<bool>,
    pub green: Vec<bool>,
    pub shade: Vec<Shade>,
    pub locr_witness: Vec<Rational>,
    pub green_witness: Vec<Rational>,
    pub light_witness: Vec<Rational>,
    /// Iterations of the green refinement loop.
    pub green_rounds: usize,
}

/// The flat unwinding seen as a CVRS, with the map from flat edges to
/// CVRS transitions.
struct FlatCvrs {
    cv: Cvrs,
    trans_of: Vec<Option<usize>>,
}

impl FlatCvrs {
    fn new(uw: &Unwinding) -> Self {
        let cv = Cvrs::from_template(&uw.flat);
        let mut trans_of = vec![None; uw.flat.edges.len()];
        let mut next = 0;
        for (e, edge) in uw.flat.edges.iter().enumerate() {
            if edge.label.is_rendezvous() {
                trans_of[e] = Some(next);
                next += 1;
            }
        }
        FlatCvrs { cv, trans_of }
    }

    fn t(&self, e: EdgeId) -> usize {
        self.trans_of[e].expect("rendezvous edge")
    }
}

/// Support-maximal solution of the cyclic flow system of component `i`
/// restricted to the rendezvous edges accepted by `keep`.
fn cyclic_support(uw: &Unwinding, fc: &FlatCvrs, i: usize, keep: &dyn Fn(EdgeId) -> bool, out: &mut EdgeSet) {
    let edges: Vec<EdgeId> = uw.rdz_edges_of(i).into_iter().filter(|&e| keep(e)).collect();
    if edges.is_empty() {
        return;
    }
    let mut sys = LinearSystem::new();
    let mut var = BTreeMap::new();
    for &e in &edges {
        var.insert(fc.t(e), sys.add_var(uw.flat.edge_name(e)));
    }
    let used: Vec<usize> = edges.iter().map(|&e| fc.t(e)).collect();
    let states: BTreeSet<usize> = uw.states_of(i).into_iter().collect();
    fc.cv.add_flow_rows(&mut sys, &used, &var, &states, &BTreeMap::new());
    let probes: Vec<usize> = (0..sys.num_vars()).collect();
    let sol = support_maximal_solution(&sys, &probes).expect("cyclic flow system is homogeneous");
    for (&e, x) in edges.iter().zip(&sol.values) {
        if x.is_positive() {
            out.member[e] = true;
            out.witness[e] = x.clone();
        }
    }
}

/// Edges that some pseudo-cycle without broadcasts uses, per component.
pub fn locally_reusable_edges(uw: &Unwinding) -> EdgeSet {
    let fc = FlatCvrs::new(uw);
    let mut out = EdgeSet::empty(uw.flat.edges.len());
    for i in 0..uw.components.len() {
        cyclic_support(uw, &fc, i, &|_| true, &mut out);
    }
    out
}

/// Light-green edges: the cyclic system again, over green edges only.
pub fn light_green_edges(uw: &Unwinding, green: &[bool]) -> EdgeSet {
    let fc = FlatCvrs::new(uw);
    let mut out = EdgeSet::empty(uw.flat.edges.len());
    for i in uw.noose() {
        cyclic_support(uw, &fc, i, &|e| green[e], &mut out);
    }
    out
}

/// Green edges by iterated refinement over the noose components. Returns
/// the set and the number of rounds.
pub fn green_edges(uw: &Unwinding) -> (EdgeSet, usize) {
    let fc = FlatCvrs::new(uw);
    let ne = uw.flat.edges.len();
    let noose: Vec<usize> = uw.noose().collect();
    let mut tr: BTreeMap<usize, Vec<EdgeId>> = noose.iter().map(|&i| (i, uw.rdz_edges_of(i))).collect();
    let mut bc: BTreeMap<usize, Vec<EdgeId>> = noose.iter().map(|&i| (i, uw.broadcast_edges_of(i))).collect();
    let mut rounds = 0;
    loop {
        rounds += 1;
        let mut sys = LinearSystem::new();
        let mut var: BTreeMap<EdgeId, usize> = BTreeMap::new();
        for &i in &noose {
            for &e in tr[&i].iter().chain(&bc[&i]) {
                var.insert(e, sys.add_var(uw.flat.edge_name(e)));
            }
        }
        for &i in &noose {
            // c_i − c'_i, from broadcasts entering and leaving component i
            let mut c_side: BTreeMap<usize, Vec<(usize, Rational)>> = BTreeMap::new();
            for &b in &bc[&uw.pre(i)] {
                c_side.entry(uw.flat.edges[b].dst).or_default().push((var[&b], ratlp::int(1)));
            }
            for &b in &bc[&i] {
                c_side.entry(uw.flat.edges[b].src).or_default().push((var[&b], ratlp::int(-1)));
            }
            let used: Vec<usize> = tr[&i].iter().map(|&e| fc.t(e)).collect();
            let tvar: BTreeMap<usize, usize> = tr[&i].iter().map(|&e| (fc.t(e), var[&e])).collect();
            let states: BTreeSet<usize> = uw.states_of(i).into_iter().collect();
            fc.cv.add_flow_rows(&mut sys, &used, &tvar, &states, &c_side);
        }
        let probes: Vec<usize> = (0..sys.num_vars()).collect();
        let sol = support_maximal_solution(&sys, &probes).expect("green system is homogeneous");
        let mu = |e: EdgeId| &sol.values[var[&e]];
        let mut changed = false;
        let mut next_tr = BTreeMap::new();
        let mut next_bc = BTreeMap::new();
        for &i in &noose {
            let c_in: BTreeSet<usize> = bc[&uw.pre(i)].iter().filter(|&&b| mu(b).is_positive()).map(|&b| uw.flat.edges[b].dst).collect();
            let c_out: BTreeSet<usize> = bc[&i].iter().filter(|&&b| mu(b).is_positive()).map(|&b| uw.flat.edges[b].src).collect();
            let used: Vec<usize> = tr[&i].iter().map(|&e| fc.t(e)).collect();
            let h: BTreeSet<usize> = fc.cv.forw(&c_in, &used).intersection(&fc.cv.back(&c_out, &used)).copied().collect();
            let t2: Vec<EdgeId> = tr[&i]
                .iter()
                .copied()
                .filter(|&e| mu(e).is_positive() && h.contains(&uw.flat.edges[e].src) && h.contains(&uw.flat.edges[e].dst))
                .collect();
            let b2: Vec<EdgeId> = bc[&i].iter().copied().filter(|&b| mu(b).is_positive()).collect();
            changed |= t2 != tr[&i] || b2 != bc[&i];
            next_tr.insert(i, t2);
            next_bc.insert(i, b2);
        }
        if !changed {
            let mut out = EdgeSet::empty(ne);
            for (&e, &x) in &var {
                out.member[e] = true;
                out.witness[e] = sol.values[x].clone();
            }
            return (out, rounds);
        }
        tr = next_tr;
        bc = next_bc;
    }
}

/// Full classification; dark green is green minus light green.
pub fn classify(uw: &Unwinding) -> EdgeTypeReport {
    let locr = locally_reusable_edges(uw);
    let (green, green_rounds) = green_edges(uw);
    let light = light_green_edges(uw, &green.member);
    let shade = (0..uw.flat.edges.len())
        .map(|e| match (green.member[e], light.member[e]) {
            (false, _) => Shade::None,
            (true, true) => Shade::Light,
            (true, false) => Shade::Dark,
        })
        .collect();
    EdgeTypeReport {
        locally_reusable: locr.member,
        green: green.member,
        shade,
        locr_witness: locr.witness,
        green_witness: green.witness,
        light_witness: light.witness,
        green_rounds,
    }
}

impl EdgeTypeReport {
    /// Broken invariants between the flags, one message each.
    pub fn violations(&self, uw: &Unwinding) -> Vec<String> {
        let mut out = vec![];
        for (e, edge) in uw.flat.edges.iter().enumerate() {
            let name = uw.flat.edge_name(e);
            if self.shade[e] != Shade::None && !self.green[e] {
                out.push(format!("{name}: shaded but not green"));
            }
            if self.green[e] && self.shade[e] == Shade::None {
                out.push(format!("{name}: green without a shade"));
            }
            if self.shade[e] == Shade::Light && !self.locally_reusable[e] {
                out.push(format!("{name}: light green but not locally-reusable"));
            }
            if edge.label.is_broadcast() && self.shade[e] == Shade::Light {
                out.push(format!("{name}: broadcast edge is light green"));
            }
            if self.green[e] && uw.edge_origin[e].comp < uw.prefix {
                out.push(format!("{name}: green edge outside the noose"));
            }
        }
        out
    }

    pub fn count(&self) -> (usize, usize, usize, usize) {
        let c = |f: &dyn Fn(usize) -> bool| (0..self.green.len()).filter(|&e| f(e)).count();
        (
            c(&|e| self.locally_reusable[e]),
            c(&|e| self.green[e]),
            c(&|e| self.shade[e] == Shade::Light),
            c(&|e| self.shade[e] == Shade::Dark),
        )
    }
}
