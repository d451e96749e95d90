//! Continuous vector rendezvous systems: counter configurations over the
//! rationals, steps with multiplicities, the `forw`/`back` operators and a
//! reachability decision by support refinement.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Signed, Zero};
use ratlp::{LinearSystem, Rational, Relation};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{EdgeLabel, Template};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CvrsTransition {
    pub src: usize,
    pub action: String,
    pub index: usize,
    pub dst: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cvrs {
    pub k: usize,
    pub states: Vec<String>,
    pub trans: Vec<CvrsTransition>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CvrsConfig {
    pub counts: Vec<Rational>,
}

/// `k` transitions, one per index of a common action, fired with `mult`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepTuple {
    pub trans: Vec<usize>,
    pub mult: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trace {
    pub start: CvrsConfig,
    pub steps: Vec<StepTuple>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CvrsError {
    #[error("step needs {need} in state `{state}` but only {have} is there")]
    Deficient { state: String, need: String, have: String },
    #[error("transitions do not form one rendezvous of a single action")]
    NotATuple,
    #[error("multiplicity must be positive")]
    NonPositive,
    #[error("integer mode needs multiplicity 1 and integer counts")]
    NotInteger,
}

impl CvrsConfig {
    pub fn zeros(n: usize) -> Self {
        CvrsConfig { counts: vec![Rational::zero(); n] }
    }

    pub fn from_ints(v: &[i64]) -> Self {
        CvrsConfig { counts: v.iter().map(|&x| ratlp::int(x)).collect() }
    }

    pub fn support(&self) -> BTreeSet<usize> {
        (0..self.counts.len()).filter(|&i| self.counts[i].is_positive()).collect()
    }

    pub fn scale(&self, g: &Rational) -> Self {
        CvrsConfig { counts: self.counts.iter().map(|x| x * g).collect() }
    }

    pub fn add(&self, o: &CvrsConfig) -> Self {
        CvrsConfig { counts: self.counts.iter().zip(&o.counts).map(|(a, b)| a + b).collect() }
    }

    pub fn mass(&self) -> Rational {
        self.counts.iter().sum()
    }

    pub fn is_integral(&self) -> bool {
        self.counts.iter().all(|x| x.is_integer())
    }
}

impl Cvrs {
    /// Rendezvous edges of `tpl` as a CVRS over its states.
    pub fn from_template(tpl: &Template) -> Cvrs {
        Cvrs {
            k: tpl.k,
            states: tpl.states.clone(),
            trans: tpl
                .edges
                .iter()
                .filter_map(|e| match &e.label {
                    EdgeLabel::Rendezvous { action, index } => {
                        Some(CvrsTransition { src: e.src, action: action.clone(), index: *index, dst: e.dst })
                    }
                    _ => None,
                })
                .collect(),
        }
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn actions(&self) -> BTreeSet<&str> {
        self.trans.iter().map(|t| t.action.as_str()).collect()
    }

    fn is_tuple(&self, tup: &[usize]) -> bool {
        tup.len() == self.k
            && tup.iter().all(|&t| t < self.trans.len())
            && tup.iter().enumerate().all(|(j, &t)| self.trans[t].index == j + 1 && self.trans[t].action == self.trans[tup[0]].action)
    }

    fn delta(&self, tup: &[usize], mult: &Rational) -> (Vec<Rational>, Vec<Rational>) {
        let n = self.num_states();
        let (mut out, mut inn) = (vec![Rational::zero(); n], vec![Rational::zero(); n]);
        for &t in tup {
            out[self.trans[t].src] += mult;
            inn[self.trans[t].dst] += mult;
        }
        (out, inn)
    }

    pub fn step(&self, cfg: &CvrsConfig, tup: &StepTuple) -> Result<CvrsConfig, CvrsError> {
        if !self.is_tuple(&tup.trans) {
            return Err(CvrsError::NotATuple);
        }
        if !tup.mult.is_positive() {
            return Err(CvrsError::NonPositive);
        }
        let (out, inn) = self.delta(&tup.trans, &tup.mult);
        for s in 0..self.num_states() {
            if cfg.counts[s] < out[s] {
                return Err(CvrsError::Deficient {
                    state: self.states[s].clone(),
                    need: out[s].to_string(),
                    have: cfg.counts[s].to_string(),
                });
            }
        }
        Ok(CvrsConfig { counts: (0..self.num_states()).map(|s| &cfg.counts[s] - &out[s] + &inn[s]).collect() })
    }

    /// Integer (VRS) step: multiplicity 1 on an integral configuration.
    pub fn step_vrs(&self, cfg: &CvrsConfig, tup: &StepTuple) -> Result<CvrsConfig, CvrsError> {
        if !tup.mult.is_one() || !cfg.is_integral() {
            return Err(CvrsError::NotInteger);
        }
        self.step(cfg, tup)
    }

    /// Every configuration along the trace, starting with `tr.start`.
    pub fn run_trace(&self, tr: &Trace) -> Result<Vec<CvrsConfig>, CvrsError> {
        let mut out = vec![tr.start.clone()];
        for s in &tr.steps {
            let next = self.step(out.last().unwrap(), s)?;
            out.push(next);
        }
        Ok(out)
    }

    /// Transitions with the given action and index inside `allowed`.
    fn by_label<'a>(&'a self, allowed: &'a [usize], a: &'a str, j: usize) -> impl Iterator<Item = usize> + 'a {
        allowed.iter().copied().filter(move |&t| self.trans[t].action == a && self.trans[t].index == j)
    }

    fn access(&self, start: BTreeSet<usize>, allowed: &[usize], forward: bool) -> BTreeSet<usize> {
        let mut h = start;
        let end = |t: &CvrsTransition| if forward { t.src } else { t.dst };
        let other = |t: &CvrsTransition| if forward { t.dst } else { t.src };
        loop {
            let mut grew = false;
            for a in self.actions() {
                let ready = (1..=self.k).all(|j| self.by_label(allowed, a, j).any(|t| h.contains(&end(&self.trans[t]))));
                if !ready {
                    continue;
                }
                for j in 1..=self.k {
                    let new: Vec<usize> = self
                        .by_label(allowed, a, j)
                        .filter(|&t| h.contains(&end(&self.trans[t])))
                        .map(|t| other(&self.trans[t]))
                        .collect();
                    for s in new {
                        grew |= h.insert(s);
                    }
                }
            }
            if !grew {
                return h;
            }
        }
    }

    /// Largest state set forward-accessible from `support` using `allowed`.
    pub fn forw(&self, support: &BTreeSet<usize>, allowed: &[usize]) -> BTreeSet<usize> {
        self.access(support.clone(), allowed, true)
    }

    /// Largest state set backward-accessible from `support` using `allowed`.
    pub fn back(&self, support: &BTreeSet<usize>, allowed: &[usize]) -> BTreeSet<usize> {
        self.access(support.clone(), allowed, false)
    }

    /// Adds the flow and balance rows `c' = c + Σ μ_t (in − out)` and the
    /// per-action index balance, with `μ_t` at `var[t]` for `t` in `used`.
    /// `c_side[q]` lists extra `(var, coeff)` terms standing for `c(q) − c'(q)`.
    pub(crate) fn add_flow_rows(
        &self,
        sys: &mut LinearSystem,
        used: &[usize],
        var: &BTreeMap<usize, usize>,
        states: &BTreeSet<usize>,
        c_side: &BTreeMap<usize, Vec<(usize, Rational)>>,
    ) {
        for &q in states {
            let mut row: Vec<(usize, Rational)> = c_side.get(&q).cloned().unwrap_or_default();
            for &t in used {
                let tr = &self.trans[t];
                if tr.src == tr.dst {
                    continue;
                }
                if tr.dst == q {
                    row.push((var[&t], Rational::one()));
                }
                if tr.src == q {
                    row.push((var[&t], -Rational::one()));
                }
            }
            if !row.is_empty() {
                sys.add(row, Relation::Eq, Rational::zero());
            }
        }
        self.add_balance_rows(sys, used, var);
    }

    pub(crate) fn add_balance_rows(&self, sys: &mut LinearSystem, used: &[usize], var: &BTreeMap<usize, usize>) {
        let actions: BTreeSet<&str> = used.iter().map(|&t| self.trans[t].action.as_str()).collect();
        for a in actions {
            let first: Vec<usize> = self.by_label(used, a, 1).collect();
            for j in 2..=self.k {
                let mut row: Vec<(usize, Rational)> = first.iter().map(|t| (var[t], Rational::one())).collect();
                row.extend(self.by_label(used, a, j).map(|t| (var[&t], -Rational::one())));
                sys.add(row, Relation::Eq, Rational::zero());
            }
        }
    }
}

/// Conditions (flow, balance, support) under which `c'` is reachable from
/// `c`; `mu` is indexed by transition.
pub fn check_reach_certificate(v: &Cvrs, c: &CvrsConfig, c2: &CvrsConfig, mu: &[Rational]) -> bool {
    if mu.len() != v.trans.len() || mu.iter().any(|m| m.is_negative()) {
        return false;
    }
    let n = v.num_states();
    let mut expect = c.counts.clone();
    for (t, m) in mu.iter().enumerate() {
        let tr = &v.trans[t];
        expect[tr.src] -= m;
        expect[tr.dst] += m;
    }
    if (0..n).any(|s| expect[s] != c2.counts[s]) {
        return false;
    }
    for a in v.actions() {
        let sum = |j: usize| -> Rational {
            (0..v.trans.len()).filter(|&t| v.trans[t].action == a && v.trans[t].index == j).map(|t| mu[t].clone()).sum()
        };
        let s1 = sum(1);
        if (2..=v.k).any(|j| sum(j) != s1) {
            return false;
        }
    }
    let used: Vec<usize> = (0..v.trans.len()).filter(|&t| mu[t].is_positive()).collect();
    let fw = v.forw(&c.support(), &used);
    let bw = v.back(&c2.support(), &used);
    used.iter().all(|&t| bw.contains(&v.trans[t].src) && fw.contains(&v.trans[t].dst)) && fw == bw
}

/// Outcome of [`cvrs_reachable`]: the certificate when reachable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reach {
    pub reachable: bool,
    pub certificate: Option<Vec<Rational>>,
    pub rounds: usize,
}

/// Decides whether `c2` is reachable from `c`. Repeatedly solves the
/// homogenized flow system `λ(c' − c) = Σ μ_t (in − out)` for a
/// support-maximal solution with `λ ≥ 1`, then drops transitions that are
/// unused or leave `forw(c) ∩ back(c')`.
pub fn cvrs_reachable(v: &Cvrs, c: &CvrsConfig, c2: &CvrsConfig) -> Reach {
    let mut live: Vec<usize> = (0..v.trans.len()).collect();
    let mut rounds = 0;
    loop {
        rounds += 1;
        let mut sys = LinearSystem::new();
        let lambda = sys.add_var("lambda");
        let mut var = BTreeMap::new();
        for &t in &live {
            var.insert(t, sys.add_var(format!("mu{t}")));
        }
        let mut c_side = BTreeMap::new();
        for q in 0..v.num_states() {
            let d = &c.counts[q] - &c2.counts[q];
            if !d.is_zero() {
                c_side.insert(q, vec![(lambda, d)]);
            }
        }
        let all: BTreeSet<usize> = (0..v.num_states()).collect();
        v.add_flow_rows(&mut sys, &live, &var, &all, &c_side);
        let probes: Vec<usize> = std::iter::once(lambda).chain(var.values().copied()).collect();
        let sol = with_lambda(&sys, lambda, &probes);
        let Some(sol) = sol else {
            return Reach { reachable: false, certificate: None, rounds };
        };
        let lam = sol[lambda].clone();
        let mut mu = vec![Rational::zero(); v.trans.len()];
        for (&t, &x) in &var {
            mu[t] = &sol[x] / &lam;
        }
        let used: Vec<usize> = live.iter().copied().filter(|&t| mu[t].is_positive()).collect();
        let h: BTreeSet<usize> = v.forw(&c.support(), &live).intersection(&v.back(&c2.support(), &live)).copied().collect();
        let next: Vec<usize> = used.into_iter().filter(|&t| h.contains(&v.trans[t].src) && h.contains(&v.trans[t].dst)).collect();
        if next == live {
            let ok = check_reach_certificate(v, c, c2, &mu);
            return Reach { reachable: ok, certificate: ok.then_some(mu), rounds };
        }
        live = next;
    }
}

/// Support-maximal solution among those with `λ ≥ 1`, or `None`.
fn with_lambda(sys: &LinearSystem, lambda: usize, probes: &[usize]) -> Option<Vec<Rational>> {
    let mut pinned = sys.clone();
    pinned.add(vec![(lambda, Rational::one())], Relation::Ge, Rational::one());
    if !ratlp::feasible(&pinned).is_feasible() {
        return None;
    }
    // λ ≥ 1 is not homogeneous; probe each variable with λ pinned instead
    let mut acc: Option<Vec<Rational>> = None;
    for &p in probes {
        if acc.as_ref().is_some_and(|a| a[p].is_positive()) {
            continue;
        }
        let mut probe = pinned.clone();
        probe.add(vec![(p, Rational::one())], Relation::Ge, Rational::one());
        if let Some(s) = ratlp::feasible(&probe).solution() {
            acc = Some(match acc {
                None => s.values,
                Some(a) => a.iter().zip(&s.values).map(|(x, y)| x + y).collect(),
            });
        }
    }
    acc
}

/// `γ ⊗ tr`: every count and multiplicity scaled by `γ`.
pub fn scale_trace(tr: &Trace, g: &Rational) -> Trace {
    Trace {
        start: tr.start.scale(g),
        steps: tr.steps.iter().map(|s| StepTuple { trans: s.trans.clone(), mult: &s.mult * g }).collect(),
    }
}

/// `c ⊕ tr`: the same steps from a start shifted by `c`.
pub fn shift_trace(tr: &Trace, c: &CvrsConfig) -> Trace {
    Trace { start: tr.start.add(c), steps: tr.steps.clone() }
}

/// `γ ⊗ tr ⊕ (1 − γ) ⊗ start`, for `0 < γ ≤ 1`; its end is the convex
/// combination of the two endpoints.
pub fn convex_trace(tr: &Trace, g: &Rational) -> Trace {
    let rest = Rational::one() - g;
    shift_trace(&scale_trace(tr, g), &tr.start.scale(&rest))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samples;
    use ratlp::{int, ratio};

    fn relay() -> Cvrs {
        Cvrs::from_template(&samples::relay())
    }

    fn cfg(v: &Cvrs, pairs: &[(&str, Rational)]) -> CvrsConfig {
        let mut c = CvrsConfig::zeros(v.num_states());
        for (s, x) in pairs {
            c.counts[v.states.iter().position(|n| n == s).unwrap()] = x.clone();
        }
        c
    }

    fn tuple(v: &Cvrs, a: &str) -> Vec<usize> {
        (1..=v.k).map(|j| v.trans.iter().position(|t| t.action == a && t.index == j).unwrap()).collect()
    }

    #[test]
    fn integer_step() {
        let v = relay();
        let c = cfg(&v, &[("p", int(1)), ("q", int(1)), ("r", int(1))]);
        let next = v.step_vrs(&c, &StepTuple { trans: tuple(&v, "c"), mult: int(1) }).unwrap();
        assert_eq!(next, cfg(&v, &[("p", int(2)), ("r", int(1))]));
    }

    #[test]
    fn fractional_step() {
        let v = relay();
        let c = cfg(&v, &[("q", int(1)), ("r", int(1))]);
        let next = v.step(&c, &StepTuple { trans: tuple(&v, "c"), mult: ratio(1, 2) }).unwrap();
        // mass is conserved: r loses and regains one half
        assert_eq!(next, cfg(&v, &[("p", ratio(1, 2)), ("q", ratio(1, 2)), ("r", int(1))]));
    }

    #[test]
    fn deficient_step_is_rejected() {
        let v = relay();
        let c = cfg(&v, &[("p", int(1))]);
        let err = v.step(&c, &StepTuple { trans: tuple(&v, "c"), mult: int(1) }).unwrap_err();
        assert!(matches!(err, CvrsError::Deficient { .. }));
    }

    #[test]
    fn forward_and_backward_sets() {
        let v = relay();
        let all: Vec<usize> = (0..v.trans.len()).collect();
        let p = BTreeSet::from([0]);
        assert_eq!(v.forw(&p, &all), BTreeSet::from([0, 1]));
        assert!(v.forw(&BTreeSet::new(), &all).is_empty());
        let full = BTreeSet::from([0, 1, 2]);
        assert_eq!(v.forw(&full, &all), full);
        assert_eq!(v.back(&full, &all), full);
    }

    #[test]
    fn certificates() {
        let v = relay();
        let c = cfg(&v, &[("p", int(2))]);
        let zero = vec![int(0); v.trans.len()];
        assert!(check_reach_certificate(&v, &c, &c, &zero));
        let a = tuple(&v, "a");
        let mut mu = zero.clone();
        mu[a[0]] = int(1);
        mu[a[1]] = int(1);
        assert!(check_reach_certificate(&v, &c, &cfg(&v, &[("q", int(2))]), &mu));
        let mut bad = zero;
        bad[a[0]] = int(1);
        let one_p = cfg(&v, &[("p", int(1))]);
        assert!(!check_reach_certificate(&v, &one_p, &cfg(&v, &[("q", int(1))]), &bad));
    }

    #[test]
    fn reachability() {
        let v = relay();
        let c = cfg(&v, &[("p", int(2))]);
        assert!(cvrs_reachable(&v, &c, &c).reachable);
        let r = cvrs_reachable(&v, &c, &cfg(&v, &[("q", int(2))]));
        assert!(r.reachable);
        assert!(check_reach_certificate(&v, &c, &cfg(&v, &[("q", int(2))]), r.certificate.as_ref().unwrap()));
        assert!(!cvrs_reachable(&v, &cfg(&v, &[("q", int(1))]), &cfg(&v, &[("p", int(1))])).reachable);
    }

    #[test]
    fn convex_combination_ends_at_midpoint() {
        let v = relay();
        let start = cfg(&v, &[("p", int(2)), ("r", int(1))]);
        let tr = Trace {
            start: start.clone(),
            steps: vec![StepTuple { trans: tuple(&v, "a"), mult: int(1) }, StepTuple { trans: tuple(&v, "c"), mult: int(1) }],
        };
        let end = v.run_trace(&tr).unwrap().pop().unwrap();
        let half = convex_trace(&tr, &ratio(1, 2));
        let mid = v.run_trace(&half).unwrap().pop().unwrap();
        assert_eq!(mid, start.scale(&ratio(1, 2)).add(&end.scale(&ratio(1, 2))));
        assert_eq!(scale_trace(&tr, &int(1)), tr);
        assert_eq!(shift_trace(&tr, &CvrsConfig::zeros(3)), tr);
    }
}
