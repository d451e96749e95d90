//! The unwinding against explicit runs: winding round-trips, legality,
//! execution capture and loading.

use std::collections::BTreeSet;

use rbcheck::automata::build_exec_nfw;
use rbcheck::model::{Letter, Template};
use rbcheck::oracle::{executions_upto, for_each_run, initial_configs, loading_check, realize_execution, Population};
use rbcheck::reductions::{sample_tn, tn_to_rb};
use rbcheck::samples;
use rbcheck::unwinding::build_unwinding;

fn figures() -> Vec<Template> {
    vec![samples::prefix_chain(), samples::reset_star(), samples::loop_broadcast(), tn_to_rb(&sample_tn()).unwrap()]
}

#[test]
fn wind_after_unwind_is_identity() {
    for t in figures() {
        let uw = build_unwinding(&t, None).unwrap();
        let mut count = 0;
        for n in 1..=2 {
            for_each_run(&t, &initial_configs(&t, n), 4, &mut |run| {
                let up = uw.unwind(run).expect("every run lifts");
                assert!(up.is_valid(&uw.flat, true));
                assert_eq!(&uw.wind(&up), run);
                count += 1;
            });
        }
        assert!(count > 0);
    }
}

#[test]
fn unwound_configurations_are_legal() {
    for t in figures() {
        let uw = build_unwinding(&t, None).unwrap();
        for n in 1..=3 {
            for c in rbcheck::oracle::enumerate_reachable(&uw.flat, &Population::plain(&uw.flat, n), Some(5)) {
                let comps: BTreeSet<usize> =
                    c.iter().enumerate().filter(|(_, &x)| x > 0).map(|(s, _)| uw.state_origin[s].1).collect();
                assert_eq!(comps.len(), 1, "{:?}", uw.flat.states);
            }
        }
    }
}

#[test]
fn executions_are_accepted_by_the_exec_automaton() {
    for t in figures() {
        let uw = build_unwinding(&t, None).unwrap();
        let a = build_exec_nfw(&uw);
        for n in 1..=3 {
            for w in executions_upto(&t, &Population::plain(&t, n), 5) {
                assert!(a.accepts(&w), "{w:?}");
            }
        }
    }
}

/// Words of length `len` accepted by `a`, by walking its transitions.
fn accepted_words(a: &rbcheck::automata::Nfw, len: usize) -> BTreeSet<Vec<Letter>> {
    let mut layer: BTreeSet<(usize, Vec<Letter>)> = a.initial.iter().map(|&q| (q, vec![])).collect();
    for _ in 0..len {
        let mut next = BTreeSet::new();
        for (q, w) in &layer {
            for t in a.trans.iter().filter(|t| t.src == *q) {
                let rbcheck::automata::Guard::Exact(l) = &t.guard else { panic!("exec automata read exact letters") };
                let mut w2 = w.clone();
                w2.push(l.clone());
                next.insert((t.dst, w2));
            }
        }
        layer = next;
    }
    layer.into_iter().filter(|(q, _)| a.accepting[*q]).map(|(_, w)| w).collect()
}

#[test]
fn automaton_words_are_realized() {
    for t in [samples::prefix_chain(), samples::reset_star(), samples::loop_broadcast()] {
        let a = build_exec_nfw(&build_unwinding(&t, None).unwrap());
        for len in 1..=4 {
            for w in accepted_words(&a, len) {
                assert!(realize_execution(&t, &w, 8).is_some(), "{w:?}");
            }
        }
    }
}

#[test]
fn every_component_state_is_loaded() {
    for t in figures() {
        let uw = build_unwinding(&t, None).unwrap();
        let rep = loading_check(&uw, 8);
        assert!(rep.complete(), "{:?}", rep.missing);
    }
}
