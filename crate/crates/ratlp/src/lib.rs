//! Exact linear feasibility over arbitrary-precision rationals.
//!
//! Every variable is implicitly nonnegative. Systems are solved with a dense
//! two-phase tableau (only phase one is needed since there is no objective)
//! using Bland's rule, so the solver never cycles. Infeasible systems come
//! with a Farkas certificate that can be checked independently.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

pub type Rational = BigRational;

/// Shorthand for an integer-valued rational.
pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// Shorthand for `n / d`. Panics when `d == 0`.
pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "=")]
    Eq,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "<=")]
    Le,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Eq => "=",
            Relation::Ge => ">=",
            Relation::Le => "<=",
        })
    }
}

/// A sparse row `Σ coeffs · x  rel  rhs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub coeffs: Vec<(usize, Rational)>,
    pub rel: Relation,
    pub rhs: Rational,
}

impl Constraint {
    pub fn lhs(&self, x: &[Rational]) -> Rational {
        let mut acc = Rational::zero();
        for (v, c) in &self.coeffs {
            if !c.is_zero() && !x[*v].is_zero() {
                acc += c * &x[*v];
            }
        }
        acc
    }

    pub fn holds(&self, x: &[Rational]) -> bool {
        let l = self.lhs(x);
        match self.rel {
            Relation::Eq => l == self.rhs,
            Relation::Ge => l >= self.rhs,
            Relation::Le => l <= self.rhs,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LinearSystem {
    pub vars: Vec<String>,
    pub constraints: Vec<Constraint>,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum LpError {
    #[error("constraint {row} references undeclared variable {var}")]
    UnknownVariable { row: usize, var: usize },
    #[error("support-maximal solutions need a homogeneous system; constraint {0} has a nonzero right-hand side")]
    NotHomogeneous(usize),
}

impl LinearSystem {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_vars<I: IntoIterator<Item = S>, S: Into<String>>(names: I) -> Self {
        LinearSystem {
            vars: names.into_iter().map(Into::into).collect(),
            constraints: Vec::new(),
        }
    }

    pub fn add_var(&mut self, name: impl Into<String>) -> usize {
        self.vars.push(name.into());
        self.vars.len() - 1
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    /// Adds a row; zero coefficients are dropped and repeated variables merged.
    pub fn add(&mut self, coeffs: Vec<(usize, Rational)>, rel: Relation, rhs: Rational) {
        let mut merged: Vec<(usize, Rational)> = Vec::with_capacity(coeffs.len());
        let mut sorted = coeffs;
        sorted.sort_by_key(|(v, _)| *v);
        for (v, c) in sorted {
            match merged.last_mut() {
                Some((lv, lc)) if *lv == v => *lc += c,
                _ => merged.push((v, c)),
            }
        }
        merged.retain(|(_, c)| !c.is_zero());
        self.constraints.push(Constraint { coeffs: merged, rel, rhs });
    }

    pub fn validate(&self) -> Result<(), LpError> {
        for (row, c) in self.constraints.iter().enumerate() {
            if let Some((var, _)) = c.coeffs.iter().find(|(v, _)| *v >= self.vars.len()) {
                return Err(LpError::UnknownVariable { row, var: *var });
            }
        }
        Ok(())
    }

    pub fn is_homogeneous(&self) -> bool {
        self.constraints.iter().all(|c| c.rhs.is_zero())
    }

    /// Exact check of every row and of nonnegativity.
    pub fn satisfied_by(&self, x: &[Rational]) -> bool {
        x.len() == self.vars.len()
            && x.iter().all(|v| !v.is_negative())
            && self.constraints.iter().all(|c| c.holds(x))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub values: Vec<Rational>,
}

impl Solution {
    pub fn zeros(n: usize) -> Self {
        Solution { values: vec![Rational::zero(); n] }
    }

    pub fn support(&self) -> BTreeSet<usize> {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, v)| v.is_positive())
            .map(|(i, _)| i)
            .collect()
    }

    pub fn add(&self, other: &Solution) -> Solution {
        Solution {
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn scale(&self, c: &Rational) -> Solution {
        Solution { values: self.values.iter().map(|a| a * c).collect() }
    }
}

/// Row multipliers `u` with `u_i ≥ 0` on `>=` rows, `u_i ≤ 0` on `<=` rows,
/// `Σ u_i a_i ≤ 0` componentwise and `Σ u_i b_i > 0`. No nonnegative `x` can
/// satisfy such a system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Farkas {
    pub multipliers: Vec<Rational>,
}

impl Farkas {
    pub fn verify(&self, sys: &LinearSystem) -> bool {
        if self.multipliers.len() != sys.constraints.len() {
            return false;
        }
        let mut comb = vec![Rational::zero(); sys.vars.len()];
        let mut rhs = Rational::zero();
        for (u, c) in self.multipliers.iter().zip(&sys.constraints) {
            match c.rel {
                Relation::Ge if u.is_negative() => return false,
                Relation::Le if u.is_positive() => return false,
                _ => {}
            }
            if u.is_zero() {
                continue;
            }
            for (v, a) in &c.coeffs {
                comb[*v] += u * a;
            }
            rhs += u * &c.rhs;
        }
        comb.iter().all(|v| !v.is_positive()) && rhs.is_positive()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Feasible(Solution),
    Infeasible(Farkas),
}

impl Outcome {
    pub fn solution(self) -> Option<Solution> {
        match self {
            Outcome::Feasible(s) => Some(s),
            Outcome::Infeasible(_) => None,
        }
    }

    pub fn is_feasible(&self) -> bool {
        matches!(self, Outcome::Feasible(_))
    }
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    obj: Vec<Rational>,
    basis: Vec<usize>,
    rhs: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        if !p.is_one() {
            let inv = p.recip();
            for v in self.rows[r].iter_mut() {
                if !v.is_zero() {
                    *v *= &inv;
                }
            }
        }
        let prow = self.rows[r].clone();
        let nz: Vec<usize> = (0..prow.len()).filter(|&j| !prow[j].is_zero()).collect();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for &j in &nz {
                let d = &f * &prow[j];
                row[j] -= d;
            }
        }
        if !self.obj[c].is_zero() {
            let f = self.obj[c].clone();
            for &j in &nz {
                let d = &f * &prow[j];
                self.obj[j] -= d;
            }
        }
        self.basis[r] = c;
    }
}

/// Decides feasibility of `sys` over nonnegative rationals.
pub fn feasible(sys: &LinearSystem) -> Outcome {
    let n = sys.vars.len();
    let m = sys.constraints.len();
    let slack_rows: Vec<usize> = (0..m).filter(|&i| sys.constraints[i].rel != Relation::Eq).collect();
    let ns = slack_rows.len();
    let ncols = n + ns + m;
    let rhs = ncols;
    let mut rows = Vec::with_capacity(m);
    let mut signs = Vec::with_capacity(m);
    let mut slack_of = vec![usize::MAX; m];
    for (k, &i) in slack_rows.iter().enumerate() {
        slack_of[i] = n + k;
    }
    for (i, c) in sys.constraints.iter().enumerate() {
        let mut row = vec![Rational::zero(); ncols + 1];
        for (v, a) in &c.coeffs {
            row[*v] += a;
        }
        match c.rel {
            Relation::Ge => row[slack_of[i]] = -Rational::one(),
            Relation::Le => row[slack_of[i]] = Rational::one(),
            Relation::Eq => {}
        }
        row[rhs] = c.rhs.clone();
        let sign = if c.rhs.is_negative() { -1 } else { 1 };
        if sign < 0 {
            for v in row.iter_mut() {
                *v = -v.clone();
            }
        }
        row[n + ns + i] = Rational::one();
        signs.push(sign);
        rows.push(row);
    }
    let mut obj = vec![Rational::zero(); ncols + 1];
    for j in n + ns..ncols {
        obj[j] = Rational::one();
    }
    for row in &rows {
        for j in 0..=ncols {
            if !row[j].is_zero() {
                obj[j] -= &row[j];
            }
        }
    }
    let mut t = Tableau { rows, obj, basis: (n + ns..ncols).collect(), rhs };

    loop {
        let Some(enter) = (0..ncols).find(|&j| t.obj[j].is_negative()) else { break };
        let mut leave: Option<(usize, Rational)> = None;
        for i in 0..m {
            let a = &t.rows[i][enter];
            if !a.is_positive() {
                continue;
            }
            let ratio = &t.rows[i][t.rhs] / a;
            let better = match &leave {
                None => true,
                Some((li, lr)) => ratio < *lr || (ratio == *lr && t.basis[i] < t.basis[*li]),
            };
            if better {
                leave = Some((i, ratio));
            }
        }
        let (r, _) = leave.expect("phase-one objective is bounded below");
        t.pivot(r, enter);
    }

    let value = -t.obj[t.rhs].clone();
    if value.is_positive() {
        let multipliers = (0..m)
            .map(|i| {
                let y = Rational::one() - &t.obj[n + ns + i];
                if signs[i] < 0 {
                    -y
                } else {
                    y
                }
            })
            .collect();
        return Outcome::Infeasible(Farkas { multipliers });
    }
    let mut values = vec![Rational::zero(); n];
    for (i, &b) in t.basis.iter().enumerate() {
        if b < n {
            values[b] = t.rows[i][t.rhs].clone();
        }
    }
    Outcome::Feasible(Solution { values })
}

/// Sums, over every probe `v` admitting a solution with `v ≥ 1`, one such
/// solution. The support of the result is the union of all achievable
/// supports restricted to the probes (plus whatever else those solutions
/// touch). Probes already covered by the running sum are not re-solved.
pub fn support_maximal_solution(sys: &LinearSystem, probes: &[usize]) -> Result<Solution, LpError> {
    sys.validate()?;
    if let Some(i) = sys.constraints.iter().position(|c| !c.rhs.is_zero()) {
        return Err(LpError::NotHomogeneous(i));
    }
    let mut acc = Solution::zeros(sys.vars.len());
    for &v in probes {
        if acc.values[v].is_positive() {
            continue;
        }
        let mut probe = sys.clone();
        probe.add(vec![(v, Rational::one())], Relation::Ge, Rational::one());
        if let Outcome::Feasible(s) = feasible(&probe) {
            acc = acc.add(&s);
        }
    }
    Ok(acc)
}
