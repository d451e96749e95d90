//! Bounded execution sets are preserved by every system translation.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};

use rbcheck::model::{remove_self_loops, EdgeLabel, Kind, Letter, Role, Template};
use rbcheck::oracle::{destutter, executions_upto, Population};
use rbcheck::pmcp::{check_safety, Options, SafetySpec};
use rbcheck::reductions::{
    boolprog_to_rb, project_word, rb_to_tn, rba_to_rbc, rbc_to_rba, sample_tn, simulate, tn_to_rb, BoolProgram, RbcSystem,
    TnTemplate,
};
use rbcheck::samples;

type Words = BTreeSet<Vec<Letter>>;

/// Direct semantics of a timed network: every process carries its own
/// unbounded clock values; words of process 0.
fn tn_words(tn: &TnTemplate, n: usize, max_len: usize) -> Words {
    let lts = &tn.lts;
    type Local = (usize, BTreeMap<String, u32>);
    let letter = |(q, val): &Local| -> Letter {
        let mut l = lts.labels[*q].clone();
        l.extend(tn.predicates.iter().filter(|p| p.holds(val[&p.clock])).map(|p| p.to_string()));
        l
    };
    let zero: BTreeMap<String, u32> = tn.clocks.iter().map(|c| (c.clone(), 0)).collect();
    let mut inits: Vec<Vec<Local>> = vec![vec![]];
    for _ in 0..n {
        let mut grown = vec![];
        for c in &inits {
            for &q in &lts.initial {
                grown.push([c.clone(), vec![(q, zero.clone())]].concat());
            }
        }
        inits = grown;
    }
    let mut seen: HashSet<(Vec<Local>, Vec<Letter>)> = HashSet::new();
    let mut queue = VecDeque::new();
    for c in inits {
        let w = vec![letter(&c[0])];
        if seen.insert((c.clone(), w.clone())) {
            queue.push_back((c, w));
        }
    }
    let actions = lts.rdz_actions();
    while let Some((cfg, w)) = queue.pop_front() {
        let mut next: Vec<(Vec<Local>, bool)> = vec![];
        let ticked: Vec<Local> = cfg.iter().map(|(q, v)| (*q, v.iter().map(|(c, x)| (c.clone(), x + 1)).collect())).collect();
        next.push((ticked, true));
        for a in &actions {
            // assign distinct processes to indices 1..=k
            let mut partial: Vec<(Vec<Local>, Vec<usize>, bool)> = vec![(cfg.clone(), vec![], false)];
            for j in 1..=lts.k {
                let mut grown = vec![];
                for (c, used, moved0) in &partial {
                    for p in (0..n).filter(|p| !used.contains(p)) {
                        for e in lts.rdz_edges(a, j) {
                            let (q, val) = &cfg[p];
                            if lts.edges[e].src != *q || !tn.guards[e].eval(val) {
                                continue;
                            }
                            let mut c2 = c.clone();
                            let mut v2 = val.clone();
                            for r in &tn.resets[e] {
                                v2.insert(r.clone(), 0);
                            }
                            c2[p] = (lts.edges[e].dst, v2);
                            grown.push((c2, [used.clone(), vec![p]].concat(), *moved0 || p == 0));
                        }
                    }
                }
                partial = grown;
            }
            next.extend(partial.into_iter().map(|(c, _, m)| (c, m)));
        }
        for (c, moved0) in next {
            let mut w2 = w.clone();
            if moved0 {
                if w.len() == max_len {
                    continue;
                }
                w2.push(letter(&c[0]));
            }
            if seen.insert((c.clone(), w2.clone())) {
                queue.push_back((c, w2));
            }
        }
    }
    seen.into_iter().map(|(_, w)| w).collect()
}

#[test]
fn timed_network_translation_matches_direct_semantics() {
    let tn = sample_tn();
    let u = tn_to_rb(&tn).unwrap();
    for n in 1..=3 {
        let len = if n == 3 { 5 } else { 6 };
        let direct = tn_words(&tn, n, len);
        let translated = executions_upto(&u, &Population::plain(&u, n as u32), len);
        assert_eq!(direct, translated, "n={n}");
    }
}

#[test]
fn clock_free_network_is_its_own_template() {
    let tpl = samples::prefix_chain();
    let tn = TnTemplate::new(tpl.clone(), &[], vec![]);
    let u = tn_to_rb(&tn).unwrap();
    for n in 1..=3usize {
        let m = n as u32;
        // time still passes: the translation adds broadcast self-loops
        assert_eq!(tn_words(&tn, n, 5), executions_upto(&u, &Population::plain(&u, m), 5));
        let plain: Words = executions_upto(&tpl, &Population::plain(&tpl, m), 5).iter().map(|w| destutter(w)).collect();
        let via: Words = executions_upto(&u, &Population::plain(&u, m), 5).iter().map(|w| destutter(w)).collect();
        assert_eq!(plain, via);
    }
}

fn projected(words: &Words, marker: &str, ap: &BTreeSet<String>) -> Words {
    words.iter().map(|w| project_word(w, marker, ap)).filter(|w| !w.is_empty()).collect()
}

#[test]
fn rb_round_trip_through_timed_networks() {
    for p in [samples::reset_star(), samples::loop_broadcast()] {
        let u = tn_to_rb(&rb_to_tn(&p).unwrap()).unwrap();
        for n in 2..=3u32 {
            let short = 3;
            let orig: Words = executions_upto(&p, &Population::plain(&p, n), short).iter().map(|w| destutter(w)).collect();
            let long = executions_upto(&u, &Population::plain(&u, n), 3 * short);
            let back: Words = projected(&long, "c=0", &p.atoms).iter().map(|w| destutter(w)).collect();
            assert!(orig.is_subset(&back), "n={n}: {:?}", orig.difference(&back).collect::<Vec<_>>());
            let wide: Words = executions_upto(&p, &Population::plain(&p, n), 3 * short).iter().map(|w| destutter(w)).collect();
            assert!(back.is_subset(&wide), "n={n}: {:?}", back.difference(&wide).collect::<Vec<_>>());
        }
    }
}

fn rb(names: &[(&str, &[&str])], initial: &str, k: usize) -> Template {
    let mut t = Template::new(Kind::Rb, k);
    for (n, l) in names {
        for a in *l {
            t.atoms.insert(a.to_string());
        }
        t.add_state(*n, l);
    }
    t.initial = vec![t.state(initial).unwrap()];
    t
}

fn edge(t: &mut Template, s: &str, l: EdgeLabel, d: &str) {
    let (s, d) = (t.state(s).unwrap(), t.state(d).unwrap());
    t.add_edge(s, l, d);
}

/// A controller that alternates between two phases on broadcasts and a
/// user that must meet it before moving on.
fn sample_rbc() -> RbcSystem {
    let mut c = rb(&[("idle", &["ci"]), ("busy", &["cb"])], "idle", 2);
    edge(&mut c, "idle", EdgeLabel::rdz("go", 1), "busy");
    edge(&mut c, "idle", EdgeLabel::Broadcast, "idle");
    edge(&mut c, "busy", EdgeLabel::Broadcast, "idle");
    let mut u = rb(&[("w", &["uw"]), ("g", &["ug"])], "w", 2);
    edge(&mut u, "w", EdgeLabel::rdz("go", 2), "g");
    edge(&mut u, "g", EdgeLabel::rdz("go", 2), "g");
    edge(&mut u, "w", EdgeLabel::Broadcast, "w");
    edge(&mut u, "g", EdgeLabel::Broadcast, "w");
    RbcSystem::new(c, u).unwrap()
}

#[test]
fn controller_and_users_survive_the_asymmetric_encoding() {
    let sys = sample_rbc();
    let union = sys.union();
    let (rba, marks) = rbc_to_rba(&sys).unwrap();
    assert!(rba.validate().is_empty(), "{:?}", rba.validate());
    let ap: BTreeSet<String> = union.tpl.atoms.clone();
    for users in 0..=2u32 {
        let len = 5;
        let rba_words = executions_upto(&rba, &Population::plain(&rba, users + 1), len + 1);
        let ctl = Population { tracked: union.controller_init.clone(), groups: vec![(union.user_init.clone(), users)] };
        let want = executions_upto(&union.tpl, &ctl, len);
        assert_eq!(projected(&rba_words, &marks.controller_atom, &ap), want, "users={users}");
        if users >= 1 {
            let usr = Population {
                tracked: union.user_init.clone(),
                groups: vec![(union.controller_init.clone(), 1), (union.user_init.clone(), users - 1)],
            };
            let want = executions_upto(&union.tpl, &usr, len);
            assert_eq!(projected(&rba_words, &marks.user_atom, &ap), want, "users={users}");
        }
    }
}

fn sample_rba() -> Template {
    let mut t = Template::new(Kind::Rba, 2);
    for (n, l) in [("a", "x"), ("b", "y")] {
        t.atoms.insert(l.into());
        t.add_state(n, &[l]);
    }
    t.initial = vec![0];
    let snd = EdgeLabel::Asym { action: "m".into(), role: Role::Snd };
    let rcv = EdgeLabel::Asym { action: "m".into(), role: Role::Rcv };
    edge(&mut t, "a", snd, "b");
    edge(&mut t, "a", rcv.clone(), "a");
    edge(&mut t, "b", rcv, "a");
    edge(&mut t, "a", EdgeLabel::rdz("t", 1), "b");
    edge(&mut t, "a", EdgeLabel::rdz("t", 2), "a");
    t
}

#[test]
fn asymmetric_broadcasts_survive_the_controller_encoding() {
    let t = sample_rba();
    assert!(t.validate().is_empty(), "{:?}", t.validate());
    let (sys, p) = rba_to_rbc(&t).unwrap();
    let union = sys.union();
    for n in 1..=3u32 {
        let len = if n == 3 { 3 } else { 4 };
        let direct = executions_upto(&t, &Population::plain(&t, n), len);
        let usr = Population {
            tracked: union.user_init.clone(),
            groups: vec![(union.controller_init.clone(), 1), (union.user_init.clone(), n - 1)],
        };
        let encoded = executions_upto(&union.tpl, &usr, 2 * len);
        let back: Words = projected(&encoded, &p, &t.atoms).into_iter().filter(|w| w.len() <= len).collect();
        assert_eq!(direct, back, "n={n}");
    }
}

#[test]
fn self_loop_removal_keeps_executions() {
    for t in [samples::prefix_chain(), samples::loop_broadcast(), samples::reset_star()] {
        let r = remove_self_loops(&t);
        assert!(!r.has_self_loops());
        for n in 1..=3 {
            assert_eq!(executions_upto(&t, &Population::plain(&t, n), 5), executions_upto(&r, &Population::plain(&r, n), 5));
        }
    }
}

fn program(json: &str) -> BoolProgram {
    serde_json::from_str(json).unwrap()
}

#[test]
fn boolean_programs_decide_safety() {
    let cases = [
        r#"[{"op":"if","var":1,"then":1,"else":1}]"#,
        r#"[{"op":"toggle","var":1},{"op":"if","var":1,"then":3,"else":1},{"op":"if","var":1,"then":3,"else":3}]"#,
        r#"[{"op":"if","var":1,"then":3,"else":1},{"op":"toggle","var":1},{"op":"if","var":1,"then":3,"else":3}]"#,
        r#"[{"op":"toggle","var":2},{"op":"if","var":1,"then":4,"else":3},{"op":"if","var":2,"then":1,"else":3},{"op":"if","var":1,"then":4,"else":4}]"#,
    ];
    for json in cases {
        let p = program(json);
        let (tpl, spec) = boolprog_to_rb(&p);
        let v = check_safety(&tpl, &SafetySpec::Ltlf(spec), &Options::default()).unwrap();
        assert_eq!(v.holds(), !simulate(&p).reaches_last, "{json}");
    }
}
