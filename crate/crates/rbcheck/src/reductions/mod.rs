//! Translations between timed networks, RB-, RBC- and RBA-templates, the
//! matching specification rewrite, and the Boolean-program generator.

mod boolprog;
mod controller;
mod timed;

use std::collections::BTreeSet;

use thiserror::Error;

use crate::automata::ltl::{and, atom, globally, implies, not, until, Ltl};
use crate::model::Kind;

pub use boolprog::{boolprog_to_rb, simulate, BoolProgram, Instr, Simulation};
pub use controller::{rba_to_rbc, rbc_to_rba, ControllerMarks, RbcSystem, RbcUnion};
pub use timed::{
    clip, clip_relation, local_name, project_word, rb_to_tn, sample_tn, tick_action, tn_to_rb, tn_to_rb_with_bound, ClockGuard,
    ClockPredicate, ClockRel, TnTemplate,
};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ReductionError {
    #[error("expected a {want:?}-template, got {got:?}")]
    WrongKind { want: Kind, got: Kind },
    #[error("{0}")]
    Invalid(String),
    #[error("marker atom `{0}` already occurs in the specification")]
    MarkerClash(String),
    #[error("boolean program: {0}")]
    BadProgram(String),
}

/// `base`, or `base` followed by the least positive integer not in `taken`.
pub fn fresh_name(base: &str, taken: &BTreeSet<String>) -> String {
    if !taken.contains(base) {
        return base.to_string();
    }
    (1..).map(|i| format!("{base}{i}")).find(|n| !taken.contains(n)).expect("unbounded")
}

/// Projection onto the positions labelled `p`: each atom `X` becomes
/// `!p U (p & X)` and the result is guarded by `G(!p U p)`.
pub fn project_spec(phi: &Ltl, p: &str) -> Result<Ltl, ReductionError> {
    if phi.atoms().contains(p) {
        return Err(ReductionError::MarkerClash(p.to_string()));
    }
    let body = phi.substitute(&|x| until(not(atom(p)), and(atom(p), atom(x))));
    Ok(implies(globally(until(not(atom(p)), atom(p))), body))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::ltl::Ltl;
    use crate::automata::{letter, Lasso};

    #[test]
    fn fresh_names_avoid_collisions() {
        let taken: BTreeSet<String> = ["c".to_string(), "c1".to_string()].into();
        assert_eq!(fresh_name("c", &taken), "c2");
        assert_eq!(fresh_name("p", &taken), "p");
    }

    #[test]
    fn projection_rewrites_atoms() {
        let q: Ltl = "q".parse().unwrap();
        let got = project_spec(&q, "p").unwrap();
        let want: Ltl = "G(!p U p) -> (!p U (p & q))".parse().unwrap();
        assert_eq!(got, want);
        let t = project_spec(&Ltl::True, "p").unwrap();
        assert_eq!(t, "G(!p U p) -> true".parse().unwrap());
        assert!(project_spec(&"p & q".parse().unwrap(), "p").is_err());
    }

    #[test]
    fn projection_agrees_on_interleaved_words() {
        let phi: Ltl = "G q".parse().unwrap();
        let proj = project_spec(&phi, "p").unwrap();
        // p-positions read q, q, q, ... with padding in between
        let w = Lasso { stem: vec![letter(&[])], cycle: vec![letter(&["p", "q"]), letter(&[])] };
        assert!(proj.holds_on_lasso(&w));
        let bad = Lasso { stem: vec![letter(&["p"])], cycle: vec![letter(&["p", "q"])] };
        assert!(!proj.holds_on_lasso(&bad));
        // finitely many p-positions: the guard fails
        let dead = Lasso { stem: vec![letter(&["p"])], cycle: vec![letter(&[])] };
        assert!(proj.holds_on_lasso(&dead));
    }
}
