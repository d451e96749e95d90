//! Discrete timed networks and their translations to and from RB-templates.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{fresh_name, ReductionError};
use crate::model::{normalize_arity, Edge, EdgeLabel, Kind, Letter, StateId, Template};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ClockRel {
    Gt,
    Eq,
}

/// `clock > constant` or `clock = constant`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct ClockPredicate {
    pub clock: String,
    pub rel: ClockRel,
    pub constant: u32,
}

impl ClockPredicate {
    pub fn new(clock: &str, rel: ClockRel, constant: u32) -> Self {
        ClockPredicate { clock: clock.to_string(), rel, constant }
    }

    pub fn holds(&self, value: u32) -> bool {
        match self.rel {
            ClockRel::Gt => value > self.constant,
            ClockRel::Eq => value == self.constant,
        }
    }
}

impl fmt::Display for ClockPredicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = match self.rel {
            ClockRel::Gt => ">",
            ClockRel::Eq => "=",
        };
        write!(f, "{}{r}{}", self.clock, self.constant)
    }
}

impl FromStr for ClockPredicate {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let (pos, rel) = s
            .find('>')
            .map(|i| (i, ClockRel::Gt))
            .or_else(|| s.find('=').map(|i| (i, ClockRel::Eq)))
            .ok_or_else(|| format!("`{s}` is not of the form x>c or x=c"))?;
        let clock = s[..pos].trim();
        let c = s[pos + 1..].trim();
        if clock.is_empty() {
            return Err(format!("`{s}` names no clock"));
        }
        let constant = c.parse::<u32>().map_err(|_| format!("`{c}` is not a nonnegative integer"))?;
        Ok(ClockPredicate { clock: clock.to_string(), rel, constant })
    }
}

impl TryFrom<String> for ClockPredicate {
    type Error = String;
    fn try_from(s: String) -> Result<Self, String> {
        s.parse()
    }
}

impl From<ClockPredicate> for String {
    fn from(p: ClockPredicate) -> String {
        p.to_string()
    }
}

/// Boolean combination of clock predicates. JSON: `true`, `false`,
/// `"x>2"`, `{"not": g}`, `{"and": [..]}`, `{"or": [..]}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "GuardRepr", into = "GuardRepr")]
pub enum ClockGuard {
    Const(bool),
    Pred(ClockPredicate),
    Not(Box<ClockGuard>),
    And(Vec<ClockGuard>),
    Or(Vec<ClockGuard>),
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum GuardRepr {
    Bool(bool),
    Pred(String),
    Not { not: Box<GuardRepr> },
    And { and: Vec<GuardRepr> },
    Or { or: Vec<GuardRepr> },
}

impl TryFrom<GuardRepr> for ClockGuard {
    type Error = String;
    fn try_from(r: GuardRepr) -> Result<Self, String> {
        Ok(match r {
            GuardRepr::Bool(b) => ClockGuard::Const(b),
            GuardRepr::Pred(s) => ClockGuard::Pred(s.parse()?),
            GuardRepr::Not { not } => ClockGuard::Not(Box::new((*not).try_into()?)),
            GuardRepr::And { and } => ClockGuard::And(and.into_iter().map(TryInto::try_into).collect::<Result<_, _>>()?),
            GuardRepr::Or { or } => ClockGuard::Or(or.into_iter().map(TryInto::try_into).collect::<Result<_, _>>()?),
        })
    }
}

impl From<ClockGuard> for GuardRepr {
    fn from(g: ClockGuard) -> Self {
        match g {
            ClockGuard::Const(b) => GuardRepr::Bool(b),
            ClockGuard::Pred(p) => GuardRepr::Pred(p.to_string()),
            ClockGuard::Not(g) => GuardRepr::Not { not: Box::new((*g).into()) },
            ClockGuard::And(v) => GuardRepr::And { and: v.into_iter().map(Into::into).collect() },
            ClockGuard::Or(v) => GuardRepr::Or { or: v.into_iter().map(Into::into).collect() },
        }
    }
}

impl ClockGuard {
    pub fn pred(clock: &str, rel: ClockRel, constant: u32) -> Self {
        ClockGuard::Pred(ClockPredicate::new(clock, rel, constant))
    }

    pub fn eval(&self, val: &BTreeMap<String, u32>) -> bool {
        match self {
            ClockGuard::Const(b) => *b,
            ClockGuard::Pred(p) => p.holds(val.get(&p.clock).copied().unwrap_or(0)),
            ClockGuard::Not(g) => !g.eval(val),
            ClockGuard::And(v) => v.iter().all(|g| g.eval(val)),
            ClockGuard::Or(v) => v.iter().any(|g| g.eval(val)),
        }
    }

    pub fn predicates(&self) -> BTreeSet<ClockPredicate> {
        let mut out = BTreeSet::new();
        self.collect(&mut out);
        out
    }

    fn collect(&self, out: &mut BTreeSet<ClockPredicate>) {
        match self {
            ClockGuard::Const(_) => {}
            ClockGuard::Pred(p) => {
                out.insert(p.clone());
            }
            ClockGuard::Not(g) => g.collect(out),
            ClockGuard::And(v) | ClockGuard::Or(v) => v.iter().for_each(|g| g.collect(out)),
        }
    }

    /// Size with constants counted by value.
    pub fn size(&self) -> usize {
        match self {
            ClockGuard::Const(_) => 1,
            ClockGuard::Pred(p) => 1 + p.constant as usize,
            ClockGuard::Not(g) => 1 + g.size(),
            ClockGuard::And(v) | ClockGuard::Or(v) => 1 + v.iter().map(|g| g.size()).sum::<usize>(),
        }
    }
}

/// A TN-template: an R-template whose edges carry guards and resets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "TnFile", into = "TnFile")]
pub struct TnTemplate {
    pub lts: Template,
    pub clocks: Vec<String>,
    pub guards: Vec<ClockGuard>,
    pub resets: Vec<BTreeSet<String>>,
    pub predicates: Vec<ClockPredicate>,
}

#[derive(Serialize, Deserialize)]
struct TnFile {
    k: usize,
    #[serde(default)]
    atoms: Vec<String>,
    states: Vec<String>,
    initial: Vec<String>,
    #[serde(default)]
    labels: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    edges: Vec<TnEdgeFile>,
    #[serde(default)]
    clocks: Vec<String>,
    #[serde(default)]
    clock_predicates: Vec<ClockPredicate>,
}

#[derive(Serialize, Deserialize)]
struct TnEdgeFile {
    src: String,
    dst: String,
    label: EdgeLabel,
    #[serde(default = "always")]
    guard: ClockGuard,
    #[serde(default)]
    reset: Vec<String>,
}

fn always() -> ClockGuard {
    ClockGuard::Const(true)
}

impl TryFrom<TnFile> for TnTemplate {
    type Error = ReductionError;
    fn try_from(f: TnFile) -> Result<Self, ReductionError> {
        let mut lts = Template::new(Kind::R, f.k);
        lts.atoms = f.atoms.into_iter().collect();
        let mut idx = HashMap::new();
        for s in &f.states {
            if idx.insert(s.clone(), lts.add_state(s.clone(), &[])).is_some() {
                return Err(ReductionError::Invalid(format!("duplicate state `{s}`")));
            }
        }
        let look = |s: &String| idx.get(s).copied().ok_or_else(|| ReductionError::Invalid(format!("unknown state `{s}`")));
        for (s, l) in &f.labels {
            lts.labels[look(s)?] = l.iter().cloned().collect();
        }
        lts.initial = f.initial.iter().map(look).collect::<Result<_, _>>()?;
        let (mut guards, mut resets) = (vec![], vec![]);
        for e in f.edges {
            lts.add_edge(look(&e.src)?, e.label, look(&e.dst)?);
            guards.push(e.guard);
            resets.push(e.reset.into_iter().collect());
        }
        let tn = TnTemplate { lts, clocks: f.clocks, guards, resets, predicates: f.clock_predicates };
        tn.validate()?;
        Ok(tn)
    }
}

impl From<TnTemplate> for TnFile {
    fn from(t: TnTemplate) -> Self {
        let l = &t.lts;
        let name = |s: StateId| l.states[s].clone();
        TnFile {
            k: l.k,
            atoms: l.atoms.iter().cloned().collect(),
            states: l.states.clone(),
            initial: l.initial.iter().map(|&s| name(s)).collect(),
            labels: l.labels.iter().enumerate().filter(|(_, x)| !x.is_empty()).map(|(s, x)| (name(s), x.iter().cloned().collect())).collect(),
            edges: l
                .edges
                .iter()
                .enumerate()
                .map(|(i, e)| TnEdgeFile {
                    src: name(e.src),
                    dst: name(e.dst),
                    label: e.label.clone(),
                    guard: t.guards[i].clone(),
                    reset: t.resets[i].iter().cloned().collect(),
                })
                .collect(),
            clocks: t.clocks.clone(),
            clock_predicates: t.predicates.clone(),
        }
    }
}

impl TnTemplate {
    pub fn new(lts: Template, clocks: &[&str], predicates: Vec<ClockPredicate>) -> Self {
        let n = lts.edges.len();
        TnTemplate {
            lts,
            clocks: clocks.iter().map(|c| c.to_string()).collect(),
            guards: vec![always(); n],
            resets: vec![BTreeSet::new(); n],
            predicates,
        }
    }

    pub fn add_edge(&mut self, src: StateId, label: EdgeLabel, dst: StateId, guard: ClockGuard, reset: &[&str]) {
        self.lts.add_edge(src, label, dst);
        self.guards.push(guard);
        self.resets.push(reset.iter().map(|c| c.to_string()).collect());
    }

    pub fn validate(&self) -> Result<(), ReductionError> {
        let bad = |m: String| Err(ReductionError::Invalid(m));
        if self.lts.edges.iter().any(|e| !e.label.is_rendezvous()) {
            return bad("timed-network edges must be rendezvous edges".into());
        }
        if self.guards.len() != self.lts.edges.len() || self.resets.len() != self.lts.edges.len() {
            return bad("every edge needs a guard and a reset".into());
        }
        let clocks: BTreeSet<&String> = self.clocks.iter().collect();
        for p in &self.predicates {
            if !clocks.contains(&p.clock) {
                return bad(format!("clock predicate `{p}` uses an undeclared clock"));
            }
        }
        let cp: BTreeSet<&ClockPredicate> = self.predicates.iter().collect();
        for (i, g) in self.guards.iter().enumerate() {
            for p in g.predicates() {
                if !cp.contains(&p) {
                    return bad(format!("guard of edge {} uses `{p}`, which is not a declared clock predicate", self.lts.edge_name(i)));
                }
            }
        }
        for (i, r) in self.resets.iter().enumerate() {
            if let Some(c) = r.iter().find(|c| !clocks.contains(c)) {
                return bad(format!("edge {} resets undeclared clock `{c}`", self.lts.edge_name(i)));
            }
        }
        Ok(())
    }

    /// One more than the largest constant of a clock predicate; 1 without predicates.
    pub fn default_bound(&self) -> u32 {
        self.predicates.iter().map(|p| p.constant).max().map_or(1, |c| c + 1)
    }

    /// Size with constants in unary.
    pub fn size(&self) -> usize {
        self.lts.num_states()
            + self.lts.edges.len()
            + self.guards.iter().map(|g| g.size()).sum::<usize>()
            + self.resets.iter().map(|r| r.len()).sum::<usize>()
            + self.predicates.iter().map(|p| 1 + p.constant as usize).sum::<usize>()
    }
}

/// All clock valuations with values in `0..=d`, in lexicographic order.
fn valuations(clocks: &[String], d: u32) -> Vec<BTreeMap<String, u32>> {
    let mut out = vec![BTreeMap::new()];
    for c in clocks {
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..=d).map(move |x| {
                    let mut v2 = v.clone();
                    v2.insert(c.clone(), x);
                    v2
                })
            })
            .collect();
    }
    out
}

/// `min(K(x), d)` for every clock.
pub fn clip(val: &BTreeMap<String, u32>, d: u32) -> BTreeMap<String, u32> {
    val.iter().map(|(c, &x)| (c.clone(), x.min(d))).collect()
}

/// Name of the local configuration `(q, K)`.
pub fn local_name(q: &str, val: &BTreeMap<String, u32>) -> String {
    if val.is_empty() {
        return q.to_string();
    }
    let parts: Vec<String> = val.iter().map(|(c, x)| format!("{c}={x}")).collect();
    format!("{q}[{}]", parts.join(","))
}

/// The finite RB-template of local configurations with clocks clipped at
/// one more than the largest predicate constant.
pub fn tn_to_rb(tn: &TnTemplate) -> Result<Template, ReductionError> {
    tn_to_rb_with_bound(tn, tn.default_bound())
}

/// As [`tn_to_rb`] with an explicit clipping bound `d`.
pub fn tn_to_rb_with_bound(tn: &TnTemplate, d: u32) -> Result<Template, ReductionError> {
    tn.validate()?;
    let a = &tn.lts;
    let vals = valuations(&tn.clocks, d);
    let mut u = Template::new(Kind::Rb, a.k);
    u.atoms = a.atoms.iter().cloned().chain(tn.predicates.iter().map(|p| p.to_string())).collect();
    let mut id: HashMap<(StateId, BTreeMap<String, u32>), StateId> = HashMap::new();
    for q in 0..a.num_states() {
        for v in &vals {
            let mut label: Letter = a.labels[q].clone();
            label.extend(tn.predicates.iter().filter(|p| p.holds(v[&p.clock])).map(|p| p.to_string()));
            let s = u.add_state_with(local_name(&a.states[q], v), label);
            id.insert((q, v.clone()), s);
        }
    }
    let zero: BTreeMap<String, u32> = tn.clocks.iter().map(|c| (c.clone(), 0)).collect();
    u.initial = a.initial.iter().map(|&q| id[&(q, zero.clone())]).collect();
    for q in 0..a.num_states() {
        for v in &vals {
            let later: BTreeMap<String, u32> = v.iter().map(|(c, &x)| (c.clone(), (x + 1).min(d))).collect();
            u.add_edge(id[&(q, v.clone())], EdgeLabel::Broadcast, id[&(q, later)]);
        }
    }
    for (i, e) in a.edges.iter().enumerate() {
        for v in &vals {
            if !tn.guards[i].eval(v) {
                continue;
            }
            let after: BTreeMap<String, u32> =
                v.iter().map(|(c, &x)| (c.clone(), if tn.resets[i].contains(c) { 0 } else { x })).collect();
            u.add_edge(id[&(e.src, v.clone())], e.label.clone(), id[&(e.dst, after)]);
        }
    }
    Ok(u)
}

/// Name of the internal action used for broadcasts by [`rb_to_tn`].
pub fn tick_action(tpl: &Template) -> String {
    fresh_name("tick", &tpl.rdz_actions())
}

/// One clock `c`; rendezvous edges need `c=0`, each broadcast edge becomes
/// an internal edge needing `c=1` and resetting `c`. Internal edges are
/// padded to arity `k` with unguarded self-loops.
pub fn rb_to_tn(tpl: &Template) -> Result<TnTemplate, ReductionError> {
    if tpl.kind != Kind::Rb {
        return Err(ReductionError::WrongKind { want: Kind::Rb, got: tpl.kind });
    }
    let tick = tick_action(tpl);
    let c0 = ClockPredicate::new("c", ClockRel::Eq, 0);
    let c1 = ClockPredicate::new("c", ClockRel::Eq, 1);
    let mut lts = Template { kind: Kind::R, edges: vec![], ..tpl.clone() };
    let (mut guards, mut resets) = (vec![], vec![]);
    for e in &tpl.edges {
        match &e.label {
            EdgeLabel::Broadcast => {
                lts.edges.push(Edge { src: e.src, label: EdgeLabel::rdz(&tick, 1), dst: e.dst });
                guards.push(ClockGuard::Pred(c1.clone()));
                resets.push(BTreeSet::from(["c".to_string()]));
            }
            EdgeLabel::Rendezvous { .. } => {
                lts.edges.push(e.clone());
                guards.push(ClockGuard::Pred(c0.clone()));
                resets.push(BTreeSet::new());
            }
            EdgeLabel::Asym { .. } => return Err(ReductionError::WrongKind { want: Kind::Rb, got: Kind::Rba }),
        }
    }
    let before = lts.edges.len();
    let lts = normalize_arity(&lts, &BTreeMap::from([(tick, 1)])).map_err(|e| ReductionError::Invalid(e.to_string()))?;
    for _ in before..lts.edges.len() {
        guards.push(always());
        resets.push(BTreeSet::new());
    }
    let tn = TnTemplate { lts, clocks: vec!["c".into()], guards, resets, predicates: vec![c0, c1] };
    tn.validate()?;
    Ok(tn)
}

/// `(w)_{c=0}|_AP`: keep the letters containing `c=0`, then drop every atom
/// outside `ap`.
pub fn project_word(w: &[Letter], marker: &str, ap: &BTreeSet<String>) -> Vec<Letter> {
    w.iter().filter(|l| l.contains(marker)).map(|l| l.intersection(ap).cloned().collect()).collect()
}

/// Relation pairing each `(q, K)` of `fine` (clipped at a larger bound) with
/// `(q, clip_d(K))` of `coarse`.
pub fn clip_relation(tn: &TnTemplate, fine_bound: u32, d: u32) -> Vec<(String, String)> {
    let mut out = vec![];
    for q in &tn.lts.states {
        for v in valuations(&tn.clocks, fine_bound) {
            out.push((local_name(q, &v), local_name(q, &clip(&v, d))));
        }
    }
    out
}

/// The timed network of the figure: states `p`, `q`, `r`, clock `x`,
/// predicate `x>2`.
pub fn sample_tn() -> TnTemplate {
    let mut lts = Template::new(Kind::R, 2);
    let p = lts.add_state("p", &["p"]);
    let q = lts.add_state("q", &["q"]);
    let r = lts.add_state("r", &["r"]);
    lts.initial = vec![p];
    let x2 = ClockGuard::pred("x", ClockRel::Gt, 2);
    let mut tn = TnTemplate::new(lts, &["x"], vec![ClockPredicate::new("x", ClockRel::Gt, 2)]);
    tn.add_edge(p, EdgeLabel::rdz("a", 1), q, always(), &["x"]);
    tn.add_edge(p, EdgeLabel::rdz("a", 2), p, always(), &[]);
    tn.add_edge(q, EdgeLabel::rdz("a", 1), r, ClockGuard::Not(Box::new(x2.clone())), &[]);
    tn.add_edge(q, EdgeLabel::rdz("a'", 2), p, x2, &[]);
    tn.add_edge(r, EdgeLabel::rdz("a'", 1), p, always(), &[]);
    tn
}
