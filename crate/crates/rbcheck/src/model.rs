//! Process templates and the operational semantics of their instantiations.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type StateId = usize;
pub type EdgeId = usize;
/// A set of atoms; the alphabet of every automaton in this crate.
pub type Letter = BTreeSet<String>;
/// `cfg[i]` is the state of process `i + 1`.
pub type Config = Vec<StateId>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    R,
    Rb,
    Rba,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Snd,
    Rcv,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "LabelRepr", into = "LabelRepr")]
pub enum EdgeLabel {
    Rendezvous { action: String, index: usize },
    Broadcast,
    Asym { action: String, role: Role },
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum LabelRepr {
    Word(String),
    Rdz { action: String, index: usize },
    Asym { action: String, role: Role },
}

impl TryFrom<LabelRepr> for EdgeLabel {
    type Error = String;
    fn try_from(r: LabelRepr) -> Result<Self, String> {
        match r {
            LabelRepr::Word(w) if w == "broadcast" => Ok(EdgeLabel::Broadcast),
            LabelRepr::Word(w) => Err(format!("unknown edge label `{w}`")),
            LabelRepr::Rdz { action, index } => Ok(EdgeLabel::Rendezvous { action, index }),
            LabelRepr::Asym { action, role } => Ok(EdgeLabel::Asym { action, role }),
        }
    }
}

impl From<EdgeLabel> for LabelRepr {
    fn from(l: EdgeLabel) -> Self {
        match l {
            EdgeLabel::Broadcast => LabelRepr::Word("broadcast".into()),
            EdgeLabel::Rendezvous { action, index } => LabelRepr::Rdz { action, index },
            EdgeLabel::Asym { action, role } => LabelRepr::Asym { action, role },
        }
    }
}

impl EdgeLabel {
    pub fn rdz(action: &str, index: usize) -> Self {
        EdgeLabel::Rendezvous { action: action.to_string(), index }
    }

    pub fn is_broadcast(&self) -> bool {
        matches!(self, EdgeLabel::Broadcast)
    }

    pub fn is_rendezvous(&self) -> bool {
        matches!(self, EdgeLabel::Rendezvous { .. })
    }
}

impl fmt::Display for EdgeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EdgeLabel::Rendezvous { action, index } => write!(f, "{action}{index}"),
            EdgeLabel::Broadcast => f.write_str("broadcast"),
            EdgeLabel::Asym { action, role: Role::Snd } => write!(f, "{action}!"),
            EdgeLabel::Asym { action, role: Role::Rcv } => write!(f, "{action}?"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Edge {
    pub src: StateId,
    pub label: EdgeLabel,
    pub dst: StateId,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("duplicate state `{0}`")]
    DuplicateState(String),
    #[error("action `{action}` declared with arity {arity}, outside 1..={k}")]
    BadArity { action: String, arity: usize, k: usize },
}

/// A finite labelled transition system over rendezvous and broadcast labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "TemplateFile", into = "TemplateFile")]
pub struct Template {
    pub kind: Kind,
    pub k: usize,
    pub atoms: BTreeSet<String>,
    pub states: Vec<String>,
    pub initial: Vec<StateId>,
    pub labels: Vec<Letter>,
    pub edges: Vec<Edge>,
}

#[derive(Serialize, Deserialize)]
struct TemplateFile {
    kind: Kind,
    k: usize,
    #[serde(default)]
    atoms: Vec<String>,
    states: Vec<String>,
    initial: Vec<String>,
    #[serde(default)]
    labels: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    edges: Vec<EdgeFile>,
}

#[derive(Serialize, Deserialize)]
struct EdgeFile {
    src: String,
    dst: String,
    label: EdgeLabel,
}

impl TryFrom<TemplateFile> for Template {
    type Error = ModelError;
    fn try_from(f: TemplateFile) -> Result<Self, ModelError> {
        let mut idx = HashMap::new();
        for (i, s) in f.states.iter().enumerate() {
            if idx.insert(s.clone(), i).is_some() {
                return Err(ModelError::DuplicateState(s.clone()));
            }
        }
        let look = |s: &String| idx.get(s).copied().ok_or_else(|| ModelError::UnknownState(s.clone()));
        let mut labels = vec![Letter::new(); f.states.len()];
        for (s, l) in &f.labels {
            labels[look(s)?] = l.iter().cloned().collect();
        }
        let initial = f.initial.iter().map(look).collect::<Result<Vec<_>, _>>()?;
        let edges = f
            .edges
            .into_iter()
            .map(|e| Ok(Edge { src: look(&e.src)?, label: e.label, dst: look(&e.dst)? }))
            .collect::<Result<Vec<_>, ModelError>>()?;
        Ok(Template { kind: f.kind, k: f.k, atoms: f.atoms.into_iter().collect(), states: f.states, initial, labels, edges })
    }
}

impl From<Template> for TemplateFile {
    fn from(t: Template) -> Self {
        let name = |s: StateId| t.states[s].clone();
        TemplateFile {
            kind: t.kind,
            k: t.k,
            atoms: t.atoms.iter().cloned().collect(),
            initial: t.initial.iter().map(|&s| name(s)).collect(),
            labels: t
                .labels
                .iter()
                .enumerate()
                .filter(|(_, l)| !l.is_empty())
                .map(|(s, l)| (name(s), l.iter().cloned().collect()))
                .collect(),
            edges: t.edges.iter().map(|e| EdgeFile { src: name(e.src), dst: name(e.dst), label: e.label.clone() }).collect(),
            states: t.states.clone(),
        }
    }
}

/// A single problem found by [`Template::validate`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub subject: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.subject, self.message)
    }
}

impl Template {
    pub fn new(kind: Kind, k: usize) -> Self {
        Template { kind, k, atoms: BTreeSet::new(), states: vec![], initial: vec![], labels: vec![], edges: vec![] }
    }

    /// Adds a state labelled by `label`; atoms are registered automatically.
    pub fn add_state(&mut self, name: impl Into<String>, label: &[&str]) -> StateId {
        let l: Letter = label.iter().map(|a| a.to_string()).collect();
        self.add_state_with(name, l)
    }

    pub fn add_state_with(&mut self, name: impl Into<String>, label: Letter) -> StateId {
        self.atoms.extend(label.iter().cloned());
        self.states.push(name.into());
        self.labels.push(label);
        self.states.len() - 1
    }

    pub fn add_edge(&mut self, src: StateId, label: EdgeLabel, dst: StateId) -> EdgeId {
        self.edges.push(Edge { src, label, dst });
        self.edges.len() - 1
    }

    pub fn state(&self, name: &str) -> Option<StateId> {
        self.states.iter().position(|s| s == name)
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn edge_name(&self, e: EdgeId) -> String {
        let e = &self.edges[e];
        format!("{} -{}-> {}", self.states[e.src], e.label, self.states[e.dst])
    }

    pub fn edges_from(&self, s: StateId) -> impl Iterator<Item = EdgeId> + '_ {
        self.edges.iter().enumerate().filter(move |(_, e)| e.src == s).map(|(i, _)| i)
    }

    pub fn broadcast_edges_from(&self, s: StateId) -> impl Iterator<Item = EdgeId> + '_ {
        self.edges_from(s).filter(|&e| self.edges[e].label.is_broadcast())
    }

    pub fn rdz_actions(&self) -> BTreeSet<String> {
        self.edges
            .iter()
            .filter_map(|e| match &e.label {
                EdgeLabel::Rendezvous { action, .. } => Some(action.clone()),
                _ => None,
            })
            .collect()
    }

    pub fn asym_actions(&self) -> BTreeSet<String> {
        self.edges
            .iter()
            .filter_map(|e| match &e.label {
                EdgeLabel::Asym { action, .. } => Some(action.clone()),
                _ => None,
            })
            .collect()
    }

    /// Edges labelled `action_index`, in input order.
    pub fn rdz_edges(&self, action: &str, index: usize) -> Vec<EdgeId> {
        self.edges
            .iter()
            .enumerate()
            .filter(|(_, e)| matches!(&e.label, EdgeLabel::Rendezvous { action: a, index: i } if a == action && *i == index))
            .map(|(i, _)| i)
            .collect()
    }

    fn asym_edges(&self, action: &str, role: Role) -> Vec<EdgeId> {
        self.edges
            .iter()
            .enumerate()
            .filter(|(_, e)| matches!(&e.label, EdgeLabel::Asym { action: a, role: r } if a == action && *r == role))
            .map(|(i, _)| i)
            .collect()
    }

    pub fn has_self_loops(&self) -> bool {
        self.edges.iter().any(|e| e.src == e.dst)
    }

    /// Every broken invariant, each naming the offending state or edge.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = vec![];
        let n = self.states.len();
        let endpoints_ok = self.edges.iter().all(|e| e.src < n && e.dst < n);
        let mut push = |subject: String, message: String| out.push(Violation { subject, message });
        if self.states.is_empty() {
            push("template".into(), "no states".into());
        }
        if self.k == 0 {
            push("template".into(), "arity k must be positive".into());
        }
        if self.labels.len() != self.states.len() {
            push("template".into(), "labelling does not cover the state set".into());
        }
        let mut seen = BTreeSet::new();
        for s in &self.states {
            if !seen.insert(s) {
                push(format!("state {s}"), "duplicate name".into());
            }
        }
        for &i in &self.initial {
            if i >= self.states.len() {
                push(format!("initial #{i}"), "not a state".into());
            }
        }
        for (s, l) in self.labels.iter().enumerate() {
            for a in l.difference(&self.atoms) {
                push(format!("state {}", self.states.get(s).cloned().unwrap_or_default()), format!("atom `{a}` not declared"));
            }
        }
        for (i, e) in self.edges.iter().enumerate() {
            if e.src >= n || e.dst >= n {
                push(format!("edge #{i}"), "endpoint is not a state".into());
                continue;
            }
            let subject = format!("edge {}", self.edge_name(i));
            match (&e.label, self.kind) {
                (EdgeLabel::Rendezvous { index, .. }, _) if *index == 0 || *index > self.k => {
                    push(subject, format!("index outside 1..={}", self.k))
                }
                (EdgeLabel::Broadcast, Kind::R) => push(subject, "broadcast edge in an R-template".into()),
                (EdgeLabel::Broadcast, Kind::Rba) => push(subject, "symmetric broadcast in an RBA-template".into()),
                (EdgeLabel::Asym { .. }, Kind::R | Kind::Rb) => push(subject, "asymmetric broadcast outside an RBA-template".into()),
                _ => {}
            }
        }
        if n > 0 && endpoints_ok {
            match self.kind {
                Kind::Rb => {
                    for s in 0..n {
                        if self.broadcast_edges_from(s).next().is_none() {
                            push(format!("state {}", self.states[s]), "no broadcast edge leaves this state".into());
                        }
                    }
                }
                Kind::Rba => {
                    for b in self.asym_actions() {
                        let rcv = self.asym_edges(&b, Role::Rcv);
                        for s in 0..n {
                            if !rcv.iter().any(|&e| self.edges[e].src == s) {
                                push(format!("state {}", self.states[s]), format!("`{b}` cannot be received here"));
                            }
                        }
                    }
                }
                Kind::R => {}
            }
        }
        out
    }
}

/// How a global transition moves the processes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Step {
    /// One broadcast edge per process.
    Broadcast { edges: Vec<EdgeId> },
    /// `moves[j]` is the (process, edge) taking index `j + 1`.
    Rendezvous { action: String, moves: Vec<(usize, EdgeId)> },
    /// One edge per process; `sender` takes the send edge.
    Asym { action: String, sender: usize, edges: Vec<EdgeId> },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GlobalTransition {
    pub src: Config,
    pub step: Step,
    pub dst: Config,
}

impl GlobalTransition {
    pub fn is_broadcast(&self) -> bool {
        !matches!(self.step, Step::Rendezvous { .. })
    }

    /// Active process indices (0-based), ascending.
    pub fn active(&self) -> Vec<usize> {
        match &self.step {
            Step::Rendezvous { moves, .. } => {
                let mut v: Vec<usize> = moves.iter().map(|m| m.0).collect();
                v.sort_unstable();
                v
            }
            _ => (0..self.src.len()).collect(),
        }
    }

    /// The edge taken by process `i`, if it moves.
    pub fn edge_of(&self, i: usize) -> Option<EdgeId> {
        match &self.step {
            Step::Broadcast { edges } | Step::Asym { edges, .. } => edges.get(i).copied(),
            Step::Rendezvous { moves, .. } => moves.iter().find(|m| m.0 == i).map(|m| m.1),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StepError {
    #[error("process {0} does not exist")]
    NoSuchProcess(usize),
    #[error("process {0} appears twice in a rendezvous")]
    Repeated(usize),
    #[error("edge #{edge} does not leave the state of process {process}")]
    WrongSource { process: usize, edge: EdgeId },
    #[error("edge #{edge} has the wrong label for its role")]
    WrongLabel { edge: EdgeId },
    #[error("step has {got} participants, expected {expected}")]
    WrongWidth { got: usize, expected: usize },
}

/// Applies `step` to `cfg`, checking every side condition.
pub fn apply_step(tpl: &Template, cfg: &Config, step: &Step) -> Result<Config, StepError> {
    let n = cfg.len();
    let check_src = |p: usize, e: EdgeId| -> Result<(), StepError> {
        if p >= n {
            return Err(StepError::NoSuchProcess(p));
        }
        match tpl.edges.get(e) {
            Some(edge) if edge.src == cfg[p] => Ok(()),
            _ => Err(StepError::WrongSource { process: p, edge: e }),
        }
    };
    let mut out = cfg.clone();
    match step {
        Step::Broadcast { edges } => {
            if edges.len() != n {
                return Err(StepError::WrongWidth { got: edges.len(), expected: n });
            }
            for (p, &e) in edges.iter().enumerate() {
                check_src(p, e)?;
                if !tpl.edges[e].label.is_broadcast() {
                    return Err(StepError::WrongLabel { edge: e });
                }
                out[p] = tpl.edges[e].dst;
            }
        }
        Step::Rendezvous { action, moves } => {
            if moves.len() != tpl.k {
                return Err(StepError::WrongWidth { got: moves.len(), expected: tpl.k });
            }
            let mut used = BTreeSet::new();
            for (j, &(p, e)) in moves.iter().enumerate() {
                check_src(p, e)?;
                if !used.insert(p) {
                    return Err(StepError::Repeated(p));
                }
                if tpl.edges[e].label != EdgeLabel::rdz(action, j + 1) {
                    return Err(StepError::WrongLabel { edge: e });
                }
                out[p] = tpl.edges[e].dst;
            }
        }
        Step::Asym { action, sender, edges } => {
            if edges.len() != n {
                return Err(StepError::WrongWidth { got: edges.len(), expected: n });
            }
            if *sender >= n {
                return Err(StepError::NoSuchProcess(*sender));
            }
            for (p, &e) in edges.iter().enumerate() {
                check_src(p, e)?;
                let role = if p == *sender { Role::Snd } else { Role::Rcv };
                if tpl.edges[e].label != (EdgeLabel::Asym { action: action.clone(), role }) {
                    return Err(StepError::WrongLabel { edge: e });
                }
                out[p] = tpl.edges[e].dst;
            }
        }
    }
    Ok(out)
}

/// Cartesian product of choice lists, first coordinate slowest.
pub(crate) fn product<T: Clone>(choices: &[Vec<T>]) -> Vec<Vec<T>> {
    let mut acc: Vec<Vec<T>> = vec![vec![]];
    for c in choices {
        if c.is_empty() {
            return vec![];
        }
        let mut next = Vec::with_capacity(acc.len() * c.len());
        for prefix in &acc {
            for x in c {
                let mut v = prefix.clone();
                v.push(x.clone());
                next.push(v);
            }
        }
        acc = next;
    }
    acc
}

/// All global transitions enabled in `cfg`: broadcasts first, then
/// rendezvous per action, then asymmetric broadcasts.
pub fn successors(tpl: &Template, cfg: &Config) -> Vec<GlobalTransition> {
    let mut out = vec![];
    let n = cfg.len();
    let mk = |step: Step| {
        let dst = apply_step(tpl, cfg, &step).expect("enumerated step is valid");
        GlobalTransition { src: cfg.clone(), step, dst }
    };
    let bcast: Vec<Vec<EdgeId>> = cfg.iter().map(|&s| tpl.broadcast_edges_from(s).collect()).collect();
    if n > 0 {
        for edges in product(&bcast) {
            out.push(mk(Step::Broadcast { edges }));
        }
    }
    for a in tpl.rdz_actions() {
        let per_index: Vec<Vec<EdgeId>> = (1..=tpl.k).map(|j| tpl.rdz_edges(&a, j)).collect();
        if per_index.iter().any(|v| v.is_empty()) {
            continue;
        }
        for procs in distinct_tuples(n, tpl.k) {
            let choices: Vec<Vec<EdgeId>> = procs
                .iter()
                .zip(&per_index)
                .map(|(&p, es)| es.iter().copied().filter(|&e| tpl.edges[e].src == cfg[p]).collect())
                .collect();
            for edges in product(&choices) {
                let moves = procs.iter().copied().zip(edges).collect();
                out.push(mk(Step::Rendezvous { action: a.clone(), moves }));
            }
        }
    }
    for b in tpl.asym_actions() {
        let snd = tpl.asym_edges(&b, Role::Snd);
        let rcv = tpl.asym_edges(&b, Role::Rcv);
        for sender in 0..n {
            let choices: Vec<Vec<EdgeId>> = (0..n)
                .map(|p| {
                    let pool = if p == sender { &snd } else { &rcv };
                    pool.iter().copied().filter(|&e| tpl.edges[e].src == cfg[p]).collect()
                })
                .collect();
            for edges in product(&choices) {
                out.push(mk(Step::Asym { action: b.clone(), sender, edges }));
            }
        }
    }
    out
}

/// Ordered `k`-tuples of distinct indices below `n`, lexicographic.
pub(crate) fn distinct_tuples(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![];
    let mut cur = vec![];
    fn go(n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for p in 0..n {
            if !cur.contains(&p) {
                cur.push(p);
                go(n, k, cur, out);
                cur.pop();
            }
        }
    }
    go(n, k, &mut cur, &mut out);
    out
}

/// A path of the instantiated system starting in `init`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Run {
    pub init: Config,
    pub transitions: Vec<GlobalTransition>,
}

impl Run {
    pub fn empty(init: Config) -> Self {
        Run { init, transitions: vec![] }
    }

    pub fn last(&self) -> &Config {
        self.transitions.last().map(|t| &t.dst).unwrap_or(&self.init)
    }

    pub fn broadcasts(&self) -> usize {
        self.transitions.iter().filter(|t| t.is_broadcast()).count()
    }

    /// Chained, each step valid; with `from_initial` also checks the start.
    pub fn is_valid(&self, tpl: &Template, from_initial: bool) -> bool {
        if from_initial && !self.init.iter().all(|s| tpl.initial.contains(s)) {
            return false;
        }
        let mut cur = &self.init;
        for t in &self.transitions {
            if &t.src != cur || apply_step(tpl, cur, &t.step).as_ref() != Ok(&t.dst) {
                return false;
            }
            cur = &t.dst;
        }
        true
    }

    pub fn push(&mut self, tpl: &Template, step: Step) -> Result<(), StepError> {
        let src = self.last().clone();
        let dst = apply_step(tpl, &src, &step)?;
        self.transitions.push(GlobalTransition { src, step, dst });
        Ok(())
    }
}

/// Edges taken by process `i` and the labels of the states it visits.
pub fn project_run(tpl: &Template, run: &Run, i: usize) -> (Vec<EdgeId>, Vec<Letter>) {
    let mut edges = vec![];
    let mut trace = vec![tpl.labels[run.init[i]].clone()];
    for t in &run.transitions {
        if let Some(e) = t.edge_of(i) {
            edges.push(e);
            trace.push(tpl.labels[tpl.edges[e].dst].clone());
        }
    }
    (edges, trace)
}

/// Pads every action of declared arity `j < k` with self-loops for the
/// missing indices `j+1..=k` on every state. Undeclared actions keep arity `k`.
pub fn normalize_arity(tpl: &Template, arities: &BTreeMap<String, usize>) -> Result<Template, ModelError> {
    let mut out = tpl.clone();
    for (a, &j) in arities {
        if j == 0 || j > tpl.k {
            return Err(ModelError::BadArity { action: a.clone(), arity: j, k: tpl.k });
        }
        for i in j + 1..=tpl.k {
            for s in 0..tpl.states.len() {
                out.add_edge(s, EdgeLabel::rdz(a, i), s);
            }
        }
    }
    Ok(out)
}

/// Replaces every self-loop on `s` by a two-cycle through a fresh twin `ŝ`
/// that carries the same label and all outgoing edges of `s`.
pub fn remove_self_loops(tpl: &Template) -> Template {
    let looped: BTreeSet<StateId> = tpl.edges.iter().filter(|e| e.src == e.dst).map(|e| e.src).collect();
    if looped.is_empty() {
        return tpl.clone();
    }
    let mut out = Template { edges: vec![], ..tpl.clone() };
    let mut hat = BTreeMap::new();
    for &s in &looped {
        let mut name = format!("{}^", tpl.states[s]);
        while tpl.states.contains(&name) {
            name.push('^');
        }
        let h = out.add_state_with(name, tpl.labels[s].clone());
        hat.insert(s, h);
    }
    for e in &tpl.edges {
        if e.src == e.dst {
            out.add_edge(e.src, e.label.clone(), hat[&e.src]);
        } else {
            out.add_edge(e.src, e.label.clone(), e.dst);
        }
    }
    for e in &tpl.edges {
        if let Some(&h) = hat.get(&e.src) {
            out.add_edge(h, e.label.clone(), e.dst);
        }
    }
    out
}
