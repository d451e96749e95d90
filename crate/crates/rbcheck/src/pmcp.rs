//! Safety and liveness verdicts for every number of processes.

use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

use crate::automata::{b_emptiness, b_product_nbw, build_exec_bautomaton, build_exec_nfw, ltl, ltl_to_nbw, ltlf_to_nfw, nfw_inclusion, Ltl, Nbw, Nfw};
use crate::edgetypes::classify;
use crate::model::{remove_self_loops, Kind, Letter, Template, Violation};
use crate::oracle::realize_execution;
use crate::reductions::{tn_to_rb, ReductionError, TnTemplate};
use crate::unwinding::{build_unwinding, UnwindError, Unwinding};

#[derive(Debug, Error)]
pub enum PmcpError {
    #[error("invalid template: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
    #[error("{0:?}-templates are not supported here")]
    Unsupported(Kind),
    #[error("resource cap: the unwinding needs more than {0} components")]
    ResourceCap(usize),
    #[error(transparent)]
    Reduction(#[from] ReductionError),
}

impl From<UnwindError> for PmcpError {
    fn from(e: UnwindError) -> Self {
        match e {
            UnwindError::TooManyComponents(n) => PmcpError::ResourceCap(n),
            UnwindError::Unsupported(k) => PmcpError::Unsupported(k),
            UnwindError::NotLiftable(_) => unreachable!("no run is lifted while checking"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Options {
    /// Abort once the unwinding would exceed this many components.
    pub max_components: Option<usize>,
    /// Look for a concrete run of a finite counterexample with up to this
    /// many processes (doubling from 1); 0 skips the search.
    pub realize_up_to: u32,
}

/// Specification of finite executions.
#[derive(Debug, Clone)]
pub enum SafetySpec {
    Ltlf(Ltl),
    Nfw(Nfw),
}

/// Specification of infinite executions: a formula, or an automaton for
/// its negation.
#[derive(Debug, Clone)]
pub enum LivenessSpec {
    Ltl(Ltl),
    NegatedNbw(Nbw),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Answer {
    Holds,
    Violated,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Counterexample {
    Finite { word: Vec<Letter> },
    Lasso { stem: Vec<Letter>, cycle: Vec<Letter> },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Diagnostics {
    pub millis: f64,
    pub components: usize,
    pub prefix: usize,
    pub period: usize,
    pub flat_states: usize,
    pub flat_edges: usize,
    pub automaton_states: usize,
    /// Rounds of the green refinement loop (liveness only).
    pub lp_rounds: Option<usize>,
    /// Locally-reusable, green, light and dark edge counts (liveness only).
    pub edge_types: Option<(usize, usize, usize, usize)>,
    /// Processes of the run realizing a finite counterexample, when one was
    /// found within [`Options::realize_up_to`].
    pub realized_with: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub answer: Answer,
    pub counterexample: Option<Counterexample>,
    pub diagnostics: Diagnostics,
}

impl Verdict {
    pub fn holds(&self) -> bool {
        self.answer == Answer::Holds
    }
}

fn prepare(tpl: &Template, opts: &Options) -> Result<Unwinding, PmcpError> {
    if tpl.kind == Kind::Rba {
        return Err(PmcpError::Unsupported(tpl.kind));
    }
    let bad = tpl.validate();
    if !bad.is_empty() {
        return Err(PmcpError::Invalid(bad));
    }
    Ok(build_unwinding(tpl, opts.max_components)?)
}

fn base_diagnostics(uw: &Unwinding) -> Diagnostics {
    Diagnostics {
        components: uw.components.len(),
        prefix: uw.prefix,
        period: uw.period,
        flat_states: uw.flat.num_states(),
        flat_edges: uw.flat.edges.len(),
        ..Diagnostics::default()
    }
}

/// Does every finite execution of every instance satisfy `spec`?
pub fn check_safety(tpl: &Template, spec: &SafetySpec, opts: &Options) -> Result<Verdict, PmcpError> {
    let start = Instant::now();
    let uw = prepare(tpl, opts)?;
    let exec = build_exec_nfw(&uw);
    let owned;
    let spec = match spec {
        SafetySpec::Nfw(a) => a,
        SafetySpec::Ltlf(phi) => {
            owned = ltlf_to_nfw(phi);
            &owned
        }
    };
    let word = nfw_inclusion(&exec, spec);
    let mut diagnostics = base_diagnostics(&uw);
    diagnostics.automaton_states = exec.states.len() * spec.states.len();
    if let (Some(w), true) = (&word, opts.realize_up_to > 0) {
        diagnostics.realized_with = realize_execution(tpl, w, opts.realize_up_to);
    }
    diagnostics.millis = start.elapsed().as_secs_f64() * 1e3;
    Ok(Verdict {
        answer: if word.is_some() { Answer::Violated } else { Answer::Holds },
        counterexample: word.map(|word| Counterexample::Finite { word }),
        diagnostics,
    })
}

/// Does every infinite execution of every instance satisfy `spec`?
pub fn check_liveness(tpl: &Template, spec: &LivenessSpec, opts: &Options) -> Result<Verdict, PmcpError> {
    let start = Instant::now();
    prepare(tpl, opts)?;
    let uw = build_unwinding(&remove_self_loops(tpl), opts.max_components)?;
    let report = classify(&uw);
    let b = build_exec_bautomaton(&uw, &report);
    let owned;
    let neg = match spec {
        LivenessSpec::NegatedNbw(n) => n,
        LivenessSpec::Ltl(phi) => {
            owned = ltl_to_nbw(&ltl::not(phi.clone()));
            &owned
        }
    };
    let prod = b_product_nbw(&b, neg);
    let witness = b_emptiness(&prod);
    let mut diagnostics = base_diagnostics(&uw);
    diagnostics.automaton_states = prod.states.len();
    diagnostics.lp_rounds = Some(report.green_rounds);
    diagnostics.edge_types = Some(report.count());
    diagnostics.millis = start.elapsed().as_secs_f64() * 1e3;
    Ok(Verdict {
        answer: if witness.is_some() { Answer::Violated } else { Answer::Holds },
        counterexample: witness.map(|w| Counterexample::Lasso { stem: w.word.stem, cycle: w.word.cycle }),
        diagnostics,
    })
}

/// [`check_safety`] on the RB-template of a timed network; the
/// specification may mention clock predicates such as `x>2`.
pub fn check_safety_tn(tn: &TnTemplate, spec: &SafetySpec, opts: &Options) -> Result<Verdict, PmcpError> {
    check_safety(&tn_to_rb(tn)?, spec, opts)
}

pub fn check_liveness_tn(tn: &TnTemplate, spec: &LivenessSpec, opts: &Options) -> Result<Verdict, PmcpError> {
    check_liveness(&tn_to_rb(tn)?, spec, opts)
}
