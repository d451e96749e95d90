//! The worked examples: the prefix chain, the reset star and the timed
//! network with one clock.

use std::collections::{BTreeMap, BTreeSet};

use rbcheck::automata::{b_emptiness, build_exec_bautomaton, build_exec_nfw, letter, Guard, Lasso, Nfw};
use rbcheck::edgetypes::{classify, Shade};
use rbcheck::model::{Letter, Template};
use rbcheck::oracle::{for_each_run, initial_configs, loading_check, pseudo_cycle_search, PseudoQuery, SearchOutcome};
use rbcheck::reductions::{sample_tn, tn_to_rb};
use rbcheck::samples;
use rbcheck::unwinding::build_unwinding;

use crate::{ensure, Check};

/// Words of length `1..=max_len` accepted by `a`, by a subset walk over the
/// letters it can read.
fn language(a: &Nfw, max_len: usize) -> BTreeSet<Vec<Letter>> {
    let mut out = BTreeSet::new();
    let mut layer: BTreeMap<Vec<Letter>, BTreeSet<usize>> = BTreeMap::from([(vec![], a.initial.iter().copied().collect())]);
    for _ in 0..max_len {
        let mut next: BTreeMap<Vec<Letter>, BTreeSet<usize>> = BTreeMap::new();
        for (w, qs) in &layer {
            for t in a.trans.iter().filter(|t| qs.contains(&t.src)) {
                let Guard::Exact(l) = &t.guard else { panic!("execution automata read single letters") };
                let mut w2 = w.clone();
                w2.push(l.clone());
                next.entry(w2).or_default().insert(t.dst);
            }
        }
        out.extend(next.iter().filter(|(_, qs)| qs.iter().any(|&q| a.accepting[q])).map(|(w, _)| w.clone()));
        layer = next;
    }
    out
}

/// Hand-built automaton for the nonempty prefixes of `p p* q`.
fn prefix_dfa(w: &[Letter]) -> bool {
    let (p, q) = (letter(&["p"]), letter(&["q"]));
    let mut state = 0;
    for l in w {
        state = match (state, l) {
            (0 | 1, l) if *l == p => 1,
            (1, l) if *l == q => 2,
            _ => return false,
        };
    }
    state != 0
}

fn all_words(alphabet: &[Letter], max_len: usize) -> Vec<Vec<Letter>> {
    let mut out = vec![];
    let mut layer = vec![vec![]];
    for _ in 0..max_len {
        layer = layer.iter().flat_map(|w: &Vec<Letter>| alphabet.iter().map(move |l| [w.clone(), vec![l.clone()]].concat())).collect();
        out.extend(layer.iter().cloned());
    }
    out
}

fn prefix_chain_checks() -> Result<String, String> {
    let t = samples::prefix_chain();
    let uw = build_unwinding(&t, None).map_err(|e| e.to_string())?;
    let nfw = build_exec_nfw(&uw);
    let lang = language(&nfw, 8);
    let alphabet = [letter(&[]), letter(&["p"]), letter(&["q"]), letter(&["p", "q"])];
    let want: BTreeSet<Vec<Letter>> = all_words(&alphabet, 8).into_iter().filter(|w| prefix_dfa(w)).collect();
    ensure(lang == want, || format!("prefix chain language differs: {} words vs {} expected", lang.len(), want.len()))?;
    for e in 0..uw.flat.edges.len() {
        let q = PseudoQuery { edge: e, with_broadcasts: false, max_processes: 6, restrict: None };
        ensure(matches!(pseudo_cycle_search(&uw, &q), SearchOutcome::Inconclusive { .. }), || {
            format!("prefix chain: unexpected pseudo-cycle through {}", uw.flat.edge_name(e))
        })?;
    }
    let b = build_exec_bautomaton(&uw, &classify(&uw));
    ensure(b_emptiness(&b).is_none(), || "prefix chain: B-automaton is not empty".into())?;
    Ok(format!("{} words up to length 8, B empty", lang.len()))
}

fn reset_star_checks() -> Result<String, String> {
    let t = samples::reset_star();
    let uw = build_unwinding(&t, None).map_err(|e| e.to_string())?;
    let report = classify(&uw);
    for e in 0..uw.flat.edges.len() {
        ensure(report.shade[e] == Shade::Dark && !report.locally_reusable[e], || {
            format!("reset star: {} is {:?}, locally-reusable {}", uw.flat.edge_name(e), report.shade[e], report.locally_reusable[e])
        })?;
    }
    let b = build_exec_bautomaton(&uw, &report);
    let (p, r) = (letter(&["p"]), letter(&["r"]));
    let lasso = |stem: &[&Letter], cycle: &[&Letter]| Lasso {
        stem: stem.iter().map(|&l| l.clone()).collect(),
        cycle: cycle.iter().map(|&l| l.clone()).collect(),
    };
    for w in [lasso(&[], &[&r]), lasso(&[], &[&r, &p, &r]), lasso(&[&r, &p], &[&r])] {
        ensure(b.accepts_lasso(&w), || format!("reset star: {w:?} rejected"))?;
    }
    // staying in p forever needs rendezvous without any broadcast
    for w in [lasso(&[&r], &[&p]), lasso(&[&r, &p, &r], &[&p, &p])] {
        ensure(!b.accepts_lasso(&w), || format!("reset star: {w:?} accepted"))?;
    }
    Ok(format!("{} dark green edges", uw.flat.edges.len()))
}

pub fn figure_examples() -> Check {
    Ok(format!("{}; {}", prefix_chain_checks()?, reset_star_checks()?))
}

fn names(t: &Template, edges: impl IntoIterator<Item = usize>) -> BTreeSet<String> {
    edges.into_iter().map(|e| t.edge_name(e)).collect()
}

pub fn timed_translation() -> Check {
    let tn = sample_tn();
    ensure(tn.default_bound() == 3, || format!("bound {} instead of 3", tn.default_bound()))?;
    let u = tn_to_rb(&tn).map_err(|e| e.to_string())?;
    let s = |n: &str, i: usize| format!("{n}[x={i}]");
    let e = |a: String, l: &str, b: String| format!("{a} -{l}-> {b}");
    let mut level: Vec<Vec<String>> = vec![];
    for i in 0..=3 {
        let mut es = vec![e(s("p", i), "a1", s("q", 0)), e(s("p", i), "a2", s("p", i))];
        es.push(if i < 3 { e(s("q", i), "a1", s("r", i)) } else { e(s("q", i), "a'2", s("p", i)) });
        es.push(e(s("r", i), "a'1", s("p", i)));
        level.push(es);
    }
    let mut want: BTreeSet<String> = level.iter().flatten().cloned().collect();
    for n in ["p", "q", "r"] {
        for i in 0..=3 {
            want.insert(e(s(n, i), "broadcast", s(n, (i + 1).min(3))));
        }
    }
    let states: BTreeSet<String> = u.states.iter().cloned().collect();
    let want_states: BTreeSet<String> = ["p", "q", "r"].iter().flat_map(|n| (0..=3).map(move |i| s(n, i))).collect();
    ensure(states == want_states, || format!("states {states:?}"))?;
    let got = names(&u, 0..u.edges.len());
    ensure(got == want && u.edges.len() == want.len(), || {
        format!("edges differ: extra {:?}, missing {:?}", got.difference(&want).collect::<Vec<_>>(), want.difference(&got).collect::<Vec<_>>())
    })?;
    ensure(u.initial == vec![u.state(&s("p", 0)).unwrap()], || "initial state is not p[x=0]".into())?;
    for i in 0..=3 {
        for n in ["p", "q", "r"] {
            let l = &u.labels[u.state(&s(n, i)).unwrap()];
            ensure(l.contains(n) && l.contains("x>2") == (i == 3), || format!("label of {} is {l:?}", s(n, i)))?;
        }
    }

    let uw = build_unwinding(&u, None).map_err(|e| e.to_string())?;
    ensure((uw.prefix, uw.period, uw.components.len()) == (3, 1, 4), || {
        format!("prefix {}, period {}, {} components", uw.prefix, uw.period, uw.components.len())
    })?;
    let comp_states = [
        vec![s("p", 0), s("q", 0), s("r", 0)],
        vec![s("q", 0), s("r", 0), s("p", 1), s("q", 1), s("r", 1)],
        vec![s("q", 0), s("r", 0), s("q", 1), s("r", 1), s("p", 2), s("q", 2), s("r", 2)],
        want_states.iter().cloned().collect(),
    ];
    let comp_edges: [BTreeSet<String>; 4] = [
        level[0][..3].iter().cloned().collect(),
        [level[0][2].clone()].into_iter().chain(level[1][..3].iter().cloned()).collect(),
        [level[0][2].clone(), level[1][2].clone()].into_iter().chain(level[2][..3].iter().cloned()).collect(),
        level.iter().flatten().cloned().collect(),
    ];
    for (i, c) in uw.components.iter().enumerate() {
        let st: BTreeSet<String> = c.states.iter().map(|&q| u.states[q].clone()).collect();
        let want_st: BTreeSet<String> = comp_states[i].iter().cloned().collect();
        ensure(st == want_st, || format!("component {i}: states {st:?}"))?;
        let es = names(&u, c.edges.iter().copied());
        ensure(es == comp_edges[i], || format!("component {i}: edges {es:?}"))?;
    }
    Ok("12 states and 28 edges as drawn; prefix 3, period 1, components as drawn".into())
}

fn figure_templates() -> Vec<(&'static str, Template)> {
    vec![
        ("prefix_chain", samples::prefix_chain()),
        ("reset_star", samples::reset_star()),
        ("relay", samples::relay()),
        ("loop_broadcast", samples::loop_broadcast()),
        ("timed", tn_to_rb(&sample_tn()).unwrap()),
    ]
}

pub fn unwinding_soundness() -> Check {
    let mut runs = 0usize;
    let mut witnessed = 0;
    for (name, t) in figure_templates() {
        let uw = build_unwinding(&t, None).map_err(|e| e.to_string())?;
        let mut bad: Option<String> = None;
        for n in 1..=3 {
            for_each_run(&t, &initial_configs(&t, n), 6, &mut |run| {
                runs += 1;
                if bad.is_some() {
                    return;
                }
                match uw.unwind(run) {
                    Ok(up) if up.is_valid(&uw.flat, true) && &uw.wind(&up) == run => {}
                    Ok(_) => bad = Some(format!("{name}: round trip fails on {run:?}")),
                    Err(e) => bad = Some(format!("{name}: {e}")),
                }
            });
        }
        if let Some(b) = bad {
            return Err(b);
        }
        let rep = loading_check(&uw, 8);
        ensure(rep.complete(), || format!("{name}: unloaded component states {:?}", rep.missing))?;
        witnessed += rep.witnessed.len();
    }
    Ok(format!("{runs} runs round-trip, {witnessed} component states loaded"))
}
