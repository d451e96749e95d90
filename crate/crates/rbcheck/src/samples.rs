//! Small hand-written templates used by tests, docs and the CLI.
//! Every state is labelled by the atom equal to its name.

use crate::model::{EdgeLabel, Kind, Template};

fn named(kind: Kind, k: usize, names: &[&str], initial: &[&str]) -> Template {
    let mut t = Template::new(kind, k);
    for n in names {
        t.add_state(*n, &[n]);
    }
    t.initial = initial.iter().map(|n| t.state(n).unwrap()).collect();
    t
}

fn rdz(t: &mut Template, src: &str, a: &str, i: usize, dst: &str) {
    let (s, d) = (t.state(src).unwrap(), t.state(dst).unwrap());
    t.add_edge(s, EdgeLabel::rdz(a, i), d);
}

fn bcast(t: &mut Template, src: &str, dst: &str) {
    let (s, d) = (t.state(src).unwrap(), t.state(dst).unwrap());
    t.add_edge(s, EdgeLabel::Broadcast, d);
}

/// R-template `p -a1-> p`, `p -a2-> q`; finite executions are prefixes of `p*q`.
pub fn prefix_chain() -> Template {
    let mut t = named(Kind::R, 2, &["p", "q"], &["p"]);
    rdz(&mut t, "p", "a", 1, "p");
    rdz(&mut t, "p", "a", 2, "q");
    t
}

/// RB-template whose broadcasts all lead back to the initial state `r`.
pub fn reset_star() -> Template {
    let mut t = named(Kind::Rb, 2, &["p", "r", "q"], &["r"]);
    rdz(&mut t, "r", "a", 1, "p");
    rdz(&mut t, "p", "a", 1, "p");
    rdz(&mut t, "r", "a", 2, "q");
    bcast(&mut t, "p", "r");
    bcast(&mut t, "q", "r");
    bcast(&mut t, "r", "r");
    t
}

/// RB-template with rendezvous and broadcast self-loops on `p`.
pub fn loop_broadcast() -> Template {
    let mut t = named(Kind::Rb, 2, &["p", "q"], &["p"]);
    rdz(&mut t, "p", "a", 1, "p");
    bcast(&mut t, "p", "p");
    rdz(&mut t, "p", "a", 2, "q");
    bcast(&mut t, "q", "p");
    t
}

/// R-template with two initial states and actions `a` (p to q) and `c`.
pub fn relay() -> Template {
    let mut t = named(Kind::R, 2, &["p", "q", "r"], &["p", "r"]);
    rdz(&mut t, "p", "a", 1, "q");
    rdz(&mut t, "p", "a", 2, "q");
    rdz(&mut t, "r", "c", 2, "p");
    rdz(&mut t, "q", "c", 1, "r");
    t
}

/// Two states exchanging places pairwise: `s -a1-> t`, `t -a2-> s`.
pub fn swap() -> Template {
    let mut t = named(Kind::R, 2, &["s", "t"], &["s", "t"]);
    rdz(&mut t, "s", "a", 1, "t");
    rdz(&mut t, "t", "a", 2, "s");
    t
}

/// [`swap`] with broadcast self-loops on both states.
pub fn swap_with_ticks() -> Template {
    let mut t = swap();
    t.kind = Kind::Rb;
    bcast(&mut t, "s", "s");
    bcast(&mut t, "t", "t");
    t
}
