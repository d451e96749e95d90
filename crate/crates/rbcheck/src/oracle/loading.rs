//! Loading witnesses: for every component `b` and every state `s` in it, a
//! run of the unwound system with exactly `b` broadcasts that ends with a
//! process in `s`.

use std::collections::{BTreeSet, HashSet, VecDeque};

use serde::Serialize;

use super::{Counts, Population, Stepper};
use crate::unwinding::Unwinding;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LoadingReport {
    pub max_processes: u32,
    /// `(component, state, processes used)`.
    pub witnessed: Vec<(usize, String, u32)>,
    pub missing: Vec<(usize, String)>,
}

impl LoadingReport {
    pub fn complete(&self) -> bool {
        self.missing.is_empty()
    }
}

/// Layered search over the flat unwound template with `1..=max_processes`
/// processes, stopping as soon as every component state is covered.
pub fn loading_check(uw: &Unwinding, max_processes: u32) -> LoadingReport {
    let flat = &uw.flat;
    let layers = uw.components.len();
    let mut todo: BTreeSet<(usize, usize)> = (0..layers).flat_map(|b| uw.states_of(b).into_iter().map(move |s| (b, s))).collect();
    let mut witnessed = vec![];
    let st = Stepper::new(flat);
    for n in 1..=max_processes {
        if todo.is_empty() {
            break;
        }
        let mut seen: HashSet<(Counts, usize)> = HashSet::new();
        let mut queue = VecDeque::new();
        for c in Population::plain(flat, n).initial_counts(flat.num_states()) {
            if seen.insert((c.clone(), 0)) {
                queue.push_back((c, 0));
            }
        }
        while let Some((c, b)) = queue.pop_front() {
            for (s, &x) in c.iter().enumerate() {
                if x > 0 && todo.remove(&(b, s)) {
                    witnessed.push((b, flat.states[s].clone(), n));
                }
            }
            for (step, d) in st.successors(&c) {
                let nb = b + usize::from(step.is_broadcast());
                if nb < layers && seen.insert((d.clone(), nb)) {
                    queue.push_back((d, nb));
                }
            }
        }
    }
    witnessed.sort();
    LoadingReport {
        max_processes,
        witnessed,
        missing: todo.into_iter().map(|(b, s)| (b, flat.states[s].clone())).collect(),
    }
}
