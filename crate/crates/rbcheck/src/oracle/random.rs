//! Seeded generators for the randomized corpora, and a brute-force
//! emptiness check for B-automata.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;
use ratlp::Rational;

use crate::automata::{BAutomaton, BTrans, Cc, Guard};
use crate::cvrs::{Cvrs, CvrsConfig, CvrsTransition};
use crate::model::{EdgeLabel, Kind, Letter, Template};
use crate::reductions::{BoolProgram, Instr};

/// RB-template with `2..=max_states` states, `k = 2`, one broadcast edge
/// from every state and at most `max_edges` edges overall.
pub fn random_rb_template<R: Rng>(rng: &mut R, max_states: usize, max_edges: usize) -> Template {
    let n = rng.gen_range(2..=max_states);
    let mut t = Template::new(Kind::Rb, 2);
    for i in 0..n {
        let name = format!("s{i}");
        t.atoms.insert(name.clone());
        t.add_state(name.clone(), &[&name]);
    }
    t.initial = vec![0];
    if n > 2 && rng.gen_bool(0.3) {
        t.initial.push(rng.gen_range(1..n));
    }
    for s in 0..n {
        let d = rng.gen_range(0..n);
        t.add_edge(s, EdgeLabel::Broadcast, d);
    }
    let rdz = rng.gen_range(0..=max_edges.saturating_sub(n));
    for _ in 0..rdz {
        let a = ["a", "b"].choose(rng).unwrap();
        let (s, d) = (rng.gen_range(0..n), rng.gen_range(0..n));
        t.add_edge(s, EdgeLabel::rdz(a, rng.gen_range(1..=2)), d);
    }
    t
}

fn letters() -> Vec<Letter> {
    let mut out = vec![];
    for bits in 0..4 {
        let mut l = Letter::new();
        if bits & 1 != 0 {
            l.insert("a".to_string());
        }
        if bits & 2 != 0 {
            l.insert("b".to_string());
        }
        out.push(l);
    }
    out
}

/// B-automaton over atoms `{a, b}` with `1..=max_states` states and
/// single-letter guards.
pub fn random_bautomaton<R: Rng>(rng: &mut R, max_states: usize) -> BAutomaton {
    let n = rng.gen_range(1..=max_states);
    let ls = letters();
    let mut trans = vec![];
    for _ in 0..rng.gen_range(n..=3 * n) {
        let cc = [Cc::Skip, Cc::Inc, Cc::Reset].choose(rng).copied().unwrap();
        trans.push(BTrans {
            src: rng.gen_range(0..n),
            guard: Guard::Exact(ls.choose(rng).unwrap().clone()),
            dst: rng.gen_range(0..n),
            cc,
        });
    }
    BAutomaton {
        states: (0..n).map(|i| format!("b{i}")).collect(),
        initial: vec![0],
        buchi: (0..n).map(|_| rng.gen_bool(0.4)).collect(),
        trans,
    }
}

/// Nonemptiness by enumerating lasso runs: a path to some state `q` and a
/// closed walk through `q` of length at most `max_cycle` that visits a
/// Büchi state and either never increments or resets somewhere.
pub fn brute_force_b_nonempty(b: &BAutomaton, max_cycle: usize) -> bool {
    let n = b.states.len();
    let mut reach: BTreeSet<usize> = b.initial.iter().copied().collect();
    loop {
        let more: Vec<usize> = b.trans.iter().filter(|t| reach.contains(&t.src)).map(|t| t.dst).filter(|d| !reach.contains(d)).collect();
        if more.is_empty() {
            break;
        }
        reach.extend(more);
    }
    // flags: bit 0 Büchi seen, bit 1 inc seen, bit 2 reset seen
    for &q in &reach {
        let mut layer: BTreeSet<(usize, u8)> = BTreeSet::from([(q, u8::from(b.buchi[q]))]);
        for _ in 0..max_cycle {
            let mut next = BTreeSet::new();
            for &(s, f) in &layer {
                for t in b.trans.iter().filter(|t| t.src == s) {
                    let mut g = f | u8::from(b.buchi[t.dst]);
                    match t.cc {
                        Cc::Inc => g |= 2,
                        Cc::Reset => g |= 4,
                        Cc::Skip => {}
                    }
                    if t.dst == q && g & 1 != 0 && (g & 2 == 0 || g & 4 != 0) {
                        return true;
                    }
                    next.insert((t.dst, g));
                }
            }
            layer = next;
        }
    }
    debug_assert!(n > 0 || reach.is_empty());
    false
}

/// Program with `1..=max_vars` variables and `1..=max_len` instructions,
/// ending in a conditional.
pub fn random_boolprog<R: Rng>(rng: &mut R, max_vars: usize, max_len: usize) -> BoolProgram {
    let m = rng.gen_range(1..=max_vars);
    let n = rng.gen_range(1..=max_len);
    let mut instrs = vec![];
    for l in 1..=n {
        let var = rng.gen_range(1..=m);
        if l < n && rng.gen_bool(0.5) {
            instrs.push(Instr::Toggle { var });
        } else {
            instrs.push(Instr::If { var, then_to: rng.gen_range(1..=n), else_to: rng.gen_range(1..=n) });
        }
    }
    BoolProgram::new(instrs).expect("generated programs are well formed")
}

/// A CVRS instance `(v, c, c2)` over `2..=max_states` states with `k = 2`,
/// configurations of equal mass at most `max_mass` and a common denominator
/// in `1..=max_denom`. Half of the targets come from a random trace.
pub fn random_cvrs_instance<R: Rng>(rng: &mut R, max_states: usize, max_mass: i64, max_denom: i64) -> (Cvrs, CvrsConfig, CvrsConfig) {
    let n = rng.gen_range(2..=max_states);
    let mut trans = vec![];
    for a in ["a", "b"] {
        for index in 1..=2 {
            for _ in 0..rng.gen_range(0..=2) {
                trans.push(CvrsTransition { src: rng.gen_range(0..n), action: a.to_string(), index, dst: rng.gen_range(0..n) });
            }
        }
    }
    let v = Cvrs { k: 2, states: (0..n).map(|i| format!("s{i}")).collect(), trans };
    let d = rng.gen_range(1..=max_denom);
    let units = rng.gen_range(1..=max_mass * d);
    let c = spread(rng, n, units, d);
    let c2 = if rng.gen_bool(0.5) { walk(rng, &v, &c, d) } else { spread(rng, n, units, d) };
    (v, c, c2)
}

/// `units` copies of `1/d` scattered over `n` states.
fn spread<R: Rng>(rng: &mut R, n: usize, units: i64, d: i64) -> CvrsConfig {
    let mut k = vec![0i64; n];
    for _ in 0..units {
        k[rng.gen_range(0..n)] += 1;
    }
    CvrsConfig { counts: k.into_iter().map(|x| ratlp::ratio(x, d)).collect() }
}

/// A few random steps with multiplicities in units of `1/d`.
fn walk<R: Rng>(rng: &mut R, v: &Cvrs, c: &CvrsConfig, d: i64) -> CvrsConfig {
    let unit = ratlp::ratio(1, d);
    let mut cur = c.clone();
    for _ in 0..rng.gen_range(1..=4) {
        let ones: Vec<usize> = (0..v.trans.len()).filter(|&t| v.trans[t].index == 1).collect();
        let Some(&t1) = ones.choose(rng) else { break };
        let twos: Vec<usize> =
            (0..v.trans.len()).filter(|&t| v.trans[t].index == 2 && v.trans[t].action == v.trans[t1].action).collect();
        let Some(&t2) = twos.choose(rng) else { continue };
        let mult: Rational = &unit * ratlp::int(rng.gen_range(1..=2));
        if let Ok(next) = v.step(&cur, &crate::cvrs::StepTuple { trans: vec![t1, t2], mult }) {
            cur = next;
        }
    }
    cur
}
