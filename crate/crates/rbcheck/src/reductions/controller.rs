//! Systems with a controller and asymmetric broadcast.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{fresh_name, ReductionError};
use crate::model::{normalize_arity, EdgeLabel, Kind, Letter, Role, StateId, Template};

/// A controller template and a user template; process 1 runs the controller.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RbcSystem {
    pub controller: Template,
    pub user: Template,
}

/// Both templates as one RB-template over `c.<s>` and `u.<s>`, for explicit
/// enumeration with a population of one controller and many users.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RbcUnion {
    pub tpl: Template,
    pub controller_init: Vec<StateId>,
    pub user_init: Vec<StateId>,
}

/// Fresh names chosen by [`rbc_to_rba`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ControllerMarks {
    pub controller_atom: String,
    pub user_atom: String,
    pub elect: String,
    pub sym: String,
}

fn ensure_rb(t: &Template) -> Result<(), ReductionError> {
    if t.kind != Kind::Rb {
        return Err(ReductionError::WrongKind { want: Kind::Rb, got: t.kind });
    }
    Ok(())
}

/// Raises the arity of `t` to `k`, padding every action with self-loops.
fn lift(t: &Template, k: usize) -> Template {
    if t.k >= k {
        return t.clone();
    }
    let arities: BTreeMap<String, usize> = t.rdz_actions().into_iter().map(|a| (a, t.k)).collect();
    let raised = Template { k, ..t.clone() };
    normalize_arity(&raised, &arities).expect("arities are within 1..=k")
}

impl RbcSystem {
    pub fn new(controller: Template, user: Template) -> Result<Self, ReductionError> {
        ensure_rb(&controller)?;
        ensure_rb(&user)?;
        Ok(RbcSystem { controller, user })
    }

    pub fn k(&self) -> usize {
        self.controller.k.max(self.user.k)
    }

    pub fn union(&self) -> RbcUnion {
        let k = self.k();
        let (c, u) = (lift(&self.controller, k), lift(&self.user, k));
        let mut tpl = Template::new(Kind::Rb, k);
        tpl.atoms = c.atoms.union(&u.atoms).cloned().collect();
        let cs: Vec<StateId> = (0..c.num_states()).map(|s| tpl.add_state_with(format!("c.{}", c.states[s]), c.labels[s].clone())).collect();
        let us: Vec<StateId> = (0..u.num_states()).map(|s| tpl.add_state_with(format!("u.{}", u.states[s]), u.labels[s].clone())).collect();
        for e in &c.edges {
            tpl.add_edge(cs[e.src], e.label.clone(), cs[e.dst]);
        }
        for e in &u.edges {
            tpl.add_edge(us[e.src], e.label.clone(), us[e.dst]);
        }
        let controller_init: Vec<StateId> = c.initial.iter().map(|&s| cs[s]).collect();
        let user_init: Vec<StateId> = u.initial.iter().map(|&s| us[s]).collect();
        tpl.initial = controller_init.iter().chain(&user_init).copied().collect();
        RbcUnion { tpl, controller_init, user_init }
    }
}

/// Disjoint union plus a fresh initial state from which one asymmetric
/// broadcast elects the controller.
pub fn rbc_to_rba(sys: &RbcSystem) -> Result<(Template, ControllerMarks), ReductionError> {
    ensure_rb(&sys.controller)?;
    ensure_rb(&sys.user)?;
    let k = sys.k();
    let (c, u) = (lift(&sys.controller, k), lift(&sys.user, k));
    let mut atoms: BTreeSet<String> = c.atoms.union(&u.atoms).cloned().collect();
    let ca = fresh_name("c", &atoms);
    atoms.insert(ca.clone());
    let pa = fresh_name("p", &atoms);
    atoms.insert(pa.clone());
    let mut actions: BTreeSet<String> = c.rdz_actions().union(&u.rdz_actions()).cloned().collect();
    let elect = fresh_name("elect", &actions);
    actions.insert(elect.clone());
    let sym = fresh_name("sym", &actions);

    let mut out = Template::new(Kind::Rba, k);
    out.atoms = atoms;
    let init = out.add_state("init", &[]);
    out.initial = vec![init];
    let copy = |t: &Template, prefix: &str, mark: &str, out: &mut Template| -> Vec<StateId> {
        let ids: Vec<StateId> = (0..t.num_states())
            .map(|s| {
                let mut l: Letter = t.labels[s].clone();
                l.insert(mark.to_string());
                out.add_state_with(format!("{prefix}.{}", t.states[s]), l)
            })
            .collect();
        for e in &t.edges {
            if e.label.is_broadcast() {
                out.add_edge(ids[e.src], EdgeLabel::Asym { action: sym.clone(), role: Role::Snd }, ids[e.dst]);
                out.add_edge(ids[e.src], EdgeLabel::Asym { action: sym.clone(), role: Role::Rcv }, ids[e.dst]);
            } else {
                out.add_edge(ids[e.src], e.label.clone(), ids[e.dst]);
            }
        }
        ids
    };
    let cs = copy(&c, "c", &ca, &mut out);
    let us = copy(&u, "u", &pa, &mut out);
    for &s in &c.initial {
        out.add_edge(init, EdgeLabel::Asym { action: elect.clone(), role: Role::Snd }, cs[s]);
    }
    for &s in &u.initial {
        out.add_edge(init, EdgeLabel::Asym { action: elect.clone(), role: Role::Rcv }, us[s]);
    }
    for s in 1..out.num_states() {
        out.add_edge(s, EdgeLabel::Asym { action: elect.clone(), role: Role::Rcv }, s);
    }
    out.add_edge(init, EdgeLabel::Asym { action: sym.clone(), role: Role::Rcv }, init);
    let marks = ControllerMarks { controller_atom: ca, user_atom: pa, elect, sym };
    Ok((out, marks))
}

/// Simulates each asymmetric broadcast by two binary rendezvous through the
/// controller followed by a symmetric broadcast. Returns the system and the
/// atom marking original user states.
pub fn rba_to_rbc(tpl: &Template) -> Result<(RbcSystem, String), ReductionError> {
    if tpl.kind != Kind::Rba {
        return Err(ReductionError::WrongKind { want: Kind::Rba, got: tpl.kind });
    }
    let k = tpl.k.max(2);
    let p = fresh_name("p", &tpl.atoms);
    let mut taken = tpl.rdz_actions();
    let mut snd = BTreeMap::new();
    let mut rcv = BTreeMap::new();
    for b in tpl.asym_actions() {
        let s = fresh_name(&format!("{b}_snd"), &taken);
        taken.insert(s.clone());
        let r = fresh_name(&format!("{b}_rcv"), &taken);
        taken.insert(r.clone());
        snd.insert(b.clone(), s);
        rcv.insert(b, r);
    }

    let mut ctl = Template::new(Kind::Rb, k);
    ctl.atoms = tpl.atoms.clone();
    let mut names: BTreeSet<String> = BTreeSet::new();
    let fresh_state = |base: &str, names: &mut BTreeSet<String>| {
        let n = fresh_name(base, names);
        names.insert(n.clone());
        n
    };
    let w = ctl.add_state(fresh_state("w", &mut names), &[]);
    let ctl_dead_name = fresh_state("dead", &mut names);
    let mut per_b = vec![];
    for b in tpl.asym_actions() {
        let s = ctl.add_state(fresh_state(&b, &mut names), &[]);
        per_b.push((b, s));
    }
    let ctl_dead = ctl.add_state(ctl_dead_name, &[]);
    ctl.initial = vec![w];
    for (b, s) in &per_b {
        ctl.add_edge(w, EdgeLabel::rdz(&snd[b], 2), *s);
        ctl.add_edge(*s, EdgeLabel::rdz(&rcv[b], 2), *s);
        ctl.add_edge(*s, EdgeLabel::Broadcast, w);
    }
    ctl.add_edge(w, EdgeLabel::Broadcast, ctl_dead);
    ctl.add_edge(ctl_dead, EdgeLabel::Broadcast, ctl_dead);

    let mut user = Template::new(Kind::Rb, k);
    user.atoms = tpl.atoms.clone();
    user.atoms.insert(p.clone());
    let mut taken_states: BTreeSet<String> = tpl.states.iter().cloned().collect();
    for s in 0..tpl.num_states() {
        let mut l = tpl.labels[s].clone();
        l.insert(p.clone());
        user.add_state_with(tpl.states[s].clone(), l);
    }
    let n = tpl.num_states();
    let copies = ["snd1", "snd2", "rcv1", "rcv2"];
    let mut copy_id = vec![[0; 4]; n];
    for s in 0..n {
        for (j, c) in copies.iter().enumerate() {
            let name = fresh_name(&format!("{}/{c}", tpl.states[s]), &taken_states);
            taken_states.insert(name.clone());
            copy_id[s][j] = user.add_state(name, &[]);
        }
    }
    let dead = user.add_state(fresh_name("dead", &taken_states), &[]);
    user.initial = tpl.initial.clone();
    for e in &tpl.edges {
        match &e.label {
            EdgeLabel::Rendezvous { .. } => {
                user.add_edge(e.src, e.label.clone(), e.dst);
            }
            EdgeLabel::Asym { action, role: Role::Snd } => {
                user.add_edge(e.src, EdgeLabel::rdz(&snd[action], 1), copy_id[e.dst][0]);
            }
            EdgeLabel::Asym { action, role: Role::Rcv } => {
                user.add_edge(e.src, EdgeLabel::rdz(&rcv[action], 1), copy_id[e.dst][2]);
            }
            EdgeLabel::Broadcast => {
                return Err(ReductionError::Invalid("symmetric broadcast in an RBA-template".into()));
            }
        }
    }
    for s in 0..n {
        for &c in &copy_id[s] {
            user.add_edge(c, EdgeLabel::Broadcast, s);
        }
        user.add_edge(s, EdgeLabel::Broadcast, dead);
    }
    user.add_edge(dead, EdgeLabel::Broadcast, dead);

    let mut arities: BTreeMap<String, usize> = tpl.rdz_actions().into_iter().map(|a| (a, tpl.k)).collect();
    arities.extend(snd.values().chain(rcv.values()).map(|a| (a.clone(), 2)));
    let user = normalize_arity(&user, &arities).map_err(|e| ReductionError::Invalid(e.to_string()))?;
    Ok((RbcSystem { controller: ctl, user }, p))
}
