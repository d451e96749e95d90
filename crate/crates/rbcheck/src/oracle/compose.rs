//! Gluing runs of disjoint process groups into one run, restricting a run
//! to a group, and checking bisimulation relations between LTSs.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::model::{apply_step, GlobalTransition, Run, Step, StepError, Template};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ComposeError {
    #[error("no runs to compose")]
    Empty,
    #[error("runs take {0:?} broadcasts; composition needs equal counts")]
    BroadcastMismatch(Vec<usize>),
    #[error("asymmetric broadcasts cannot be synchronized")]
    Asymmetric,
    #[error("rendezvous on {action} mixes processes inside and outside the group")]
    Split { action: String },
    #[error("process {0} is not in the run")]
    NoSuchProcess(usize),
    #[error(transparent)]
    Step(#[from] StepError),
}

/// Cuts a run into rendezvous segments separated by broadcasts.
fn segments(run: &Run) -> (Vec<Vec<&GlobalTransition>>, Vec<&GlobalTransition>) {
    let mut segs = vec![vec![]];
    let mut bcasts = vec![];
    for t in &run.transitions {
        if t.is_broadcast() {
            bcasts.push(t);
            segs.push(vec![]);
        } else {
            segs.last_mut().unwrap().push(t);
        }
    }
    (segs, bcasts)
}

/// Runs of `tpl` on disjoint groups, glued into one run: group `i` gets the
/// process ids following those of groups `0..i`. Between two broadcasts the
/// rendezvous of each group are replayed group after group; the broadcasts
/// themselves are merged.
pub fn compose_runs(tpl: &Template, runs: &[Run]) -> Result<Run, ComposeError> {
    if runs.is_empty() {
        return Err(ComposeError::Empty);
    }
    let counts: Vec<usize> = runs.iter().map(Run::broadcasts).collect();
    if counts.iter().any(|&b| b != counts[0]) {
        return Err(ComposeError::BroadcastMismatch(counts));
    }
    if runs.iter().flat_map(|r| &r.transitions).any(|t| matches!(t.step, Step::Asym { .. })) {
        return Err(ComposeError::Asymmetric);
    }
    let mut offset = vec![0];
    for r in runs {
        offset.push(offset.last().unwrap() + r.init.len());
    }
    let cut: Vec<_> = runs.iter().map(segments).collect();
    let mut out = Run::empty(runs.iter().flat_map(|r| r.init.iter().copied()).collect());
    for b in 0..=counts[0] {
        for (g, (segs, _)) in cut.iter().enumerate() {
            for t in &segs[b] {
                let Step::Rendezvous { action, moves } = &t.step else { unreachable!() };
                let moves = moves.iter().map(|&(p, e)| (p + offset[g], e)).collect();
                out.push(tpl, Step::Rendezvous { action: action.clone(), moves })?;
            }
        }
        if b < counts[0] {
            let mut edges = vec![];
            for (_, bc) in &cut {
                let Step::Broadcast { edges: es } = &bc[b].step else { unreachable!() };
                edges.extend(es.iter().copied());
            }
            out.push(tpl, Step::Broadcast { edges })?;
        }
    }
    Ok(out)
}

/// The run seen by the processes in `group` (renumbered in the given
/// order); rendezvous outside the group are dropped.
pub fn restrict_run(tpl: &Template, run: &Run, group: &[usize]) -> Result<Run, ComposeError> {
    let n = run.init.len();
    if let Some(&p) = group.iter().find(|&&p| p >= n) {
        return Err(ComposeError::NoSuchProcess(p));
    }
    let rename: BTreeMap<usize, usize> = group.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let mut out = Run::empty(group.iter().map(|&p| run.init[p]).collect());
    for t in &run.transitions {
        let step = match &t.step {
            Step::Rendezvous { action, moves } => {
                let inside = moves.iter().filter(|(p, _)| rename.contains_key(p)).count();
                if inside == 0 {
                    continue;
                }
                if inside < moves.len() {
                    return Err(ComposeError::Split { action: action.clone() });
                }
                Step::Rendezvous { action: action.clone(), moves: moves.iter().map(|&(p, e)| (rename[&p], e)).collect() }
            }
            Step::Broadcast { edges } => Step::Broadcast { edges: group.iter().map(|&p| edges[p]).collect() },
            Step::Asym { .. } => return Err(ComposeError::Asymmetric),
        };
        out.push(tpl, step)?;
    }
    debug_assert!(out.transitions.iter().all(|t| apply_step(tpl, &t.src, &t.step).is_ok()));
    Ok(out)
}

/// Checks that `rel` (pairs of state names) is a bisimulation between `l1`
/// and `l2`: related states carry equal labels, every edge on one side is
/// matched by an equally labelled edge on the other into a related pair, and
/// every initial state is related to some initial state of the other side.
pub fn check_bisimulation(l1: &Template, l2: &Template, rel: &[(String, String)]) -> bool {
    let mut pairs = BTreeSet::new();
    for (a, b) in rel {
        let (Some(s), Some(t)) = (l1.state(a), l2.state(b)) else { return false };
        pairs.insert((s, t));
    }
    let flipped: BTreeSet<(usize, usize)> = pairs.iter().map(|&(s, t)| (t, s)).collect();
    let labels_ok = pairs.iter().all(|&(s, t)| l1.labels[s] == l2.labels[t]);
    labels_ok
        && transfers(l1, l2, &pairs)
        && transfers(l2, l1, &flipped)
        && covers_initial(l1, l2, &pairs)
        && covers_initial(l2, l1, &flipped)
}

fn transfers(a: &Template, b: &Template, pairs: &BTreeSet<(usize, usize)>) -> bool {
    pairs.iter().all(|&(s, t)| {
        a.edges_from(s).all(|e| {
            let ea = &a.edges[e];
            b.edges_from(t).any(|f| b.edges[f].label == ea.label && pairs.contains(&(ea.dst, b.edges[f].dst)))
        })
    })
}

fn covers_initial(a: &Template, b: &Template, pairs: &BTreeSet<(usize, usize)>) -> bool {
    a.initial.iter().all(|&s| b.initial.iter().any(|&t| pairs.contains(&(s, t))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{for_each_run, initial_configs};
    use crate::reductions::{clip_relation, sample_tn, tn_to_rb, tn_to_rb_with_bound};
    use crate::samples;

    fn some_runs(tpl: &Template, n: usize, depth: usize, broadcasts: usize) -> Vec<Run> {
        let mut out = vec![];
        for_each_run(tpl, &initial_configs(tpl, n), depth, &mut |r| {
            if r.broadcasts() == broadcasts && out.len() < 40 {
                out.push(r.clone());
            }
        });
        out
    }

    #[test]
    fn single_run_is_unchanged() {
        let t = samples::reset_star();
        for r in some_runs(&t, 2, 3, 1) {
            assert_eq!(compose_runs(&t, std::slice::from_ref(&r)).unwrap(), r);
        }
    }

    #[test]
    fn composition_restricts_back() {
        let t = samples::reset_star();
        for b in 0..=1 {
            let left = some_runs(&t, 2, 3, b);
            let right = some_runs(&t, 1, 2, b);
            assert!(!left.is_empty() && !right.is_empty());
            for x in &left {
                for y in &right {
                    let both = compose_runs(&t, &[x.clone(), y.clone()]).unwrap();
                    assert!(both.is_valid(&t, true));
                    assert_eq!(both.broadcasts(), b);
                    assert_eq!(&restrict_run(&t, &both, &[0, 1]).unwrap(), x);
                    assert_eq!(&restrict_run(&t, &both, &[2]).unwrap(), y);
                }
            }
        }
    }

    #[test]
    fn mismatched_broadcasts_are_rejected() {
        let t = samples::reset_star();
        let a = some_runs(&t, 1, 1, 0).remove(0);
        let b = some_runs(&t, 1, 1, 1).remove(0);
        assert!(matches!(compose_runs(&t, &[a, b]), Err(ComposeError::BroadcastMismatch(_))));
    }

    #[test]
    fn restriction_refuses_split_rendezvous() {
        let t = samples::prefix_chain();
        let mut r = Run::empty(vec![0, 0]);
        r.push(&t, Step::Rendezvous { action: "a".into(), moves: vec![(0, 0), (1, 1)] }).unwrap();
        assert!(matches!(restrict_run(&t, &r, &[0]), Err(ComposeError::Split { .. })));
    }

    #[test]
    fn identity_is_a_bisimulation() {
        for t in [samples::reset_star(), samples::relay()] {
            let id: Vec<(String, String)> = t.states.iter().map(|s| (s.clone(), s.clone())).collect();
            assert!(check_bisimulation(&t, &t, &id));
        }
    }

    #[test]
    fn clipping_clock_values_is_a_bisimulation() {
        let tn = sample_tn();
        let coarse = tn_to_rb(&tn).unwrap();
        let d = tn.default_bound();
        let fine = tn_to_rb_with_bound(&tn, d + 3).unwrap();
        let mut rel = clip_relation(&tn, d + 3, d);
        assert!(check_bisimulation(&fine, &coarse, &rel));
        rel.remove(rel.len() / 2);
        assert!(!check_bisimulation(&fine, &coarse, &rel));
    }
}
