//! Boolean programs and their encoding as RB-templates whose safety
//! verdict answers program reachability.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::ReductionError;
use crate::automata::ltl::Ltl;
use crate::model::{EdgeLabel, Kind, StateId, Template};

/// Variables and locations are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "lowercase")]
pub enum Instr {
    If {
        var: usize,
        #[serde(rename = "then")]
        then_to: usize,
        #[serde(rename = "else")]
        else_to: usize,
    },
    Toggle {
        var: usize,
    },
}

impl Instr {
    pub fn var(&self) -> usize {
        match *self {
            Instr::If { var, .. } | Instr::Toggle { var } => var,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Instr>", into = "Vec<Instr>")]
pub struct BoolProgram {
    pub instrs: Vec<Instr>,
    /// Number of variables: the largest index used.
    pub vars: usize,
}

impl TryFrom<Vec<Instr>> for BoolProgram {
    type Error = ReductionError;
    fn try_from(instrs: Vec<Instr>) -> Result<Self, ReductionError> {
        BoolProgram::new(instrs)
    }
}

impl From<BoolProgram> for Vec<Instr> {
    fn from(p: BoolProgram) -> Self {
        p.instrs
    }
}

impl BoolProgram {
    pub fn new(instrs: Vec<Instr>) -> Result<Self, ReductionError> {
        let bad = |m: String| Err(ReductionError::BadProgram(m));
        let n = instrs.len();
        match instrs.last() {
            None => return bad("no instructions".into()),
            Some(Instr::Toggle { .. }) => return bad("the last instruction must be a conditional".into()),
            _ => {}
        }
        for (l, ins) in instrs.iter().enumerate() {
            if ins.var() == 0 {
                return bad(format!("location {}: variables are numbered from 1", l + 1));
            }
            if let Instr::If { then_to, else_to, .. } = *ins {
                if !(1..=n).contains(&then_to) || !(1..=n).contains(&else_to) {
                    return bad(format!("location {}: jump target outside 1..={n}", l + 1));
                }
            }
        }
        let vars = instrs.iter().map(Instr::var).max().unwrap_or(0);
        Ok(BoolProgram { instrs, vars })
    }

    pub fn len(&self) -> usize {
        self.instrs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instrs.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Simulation {
    pub reaches_last: bool,
    /// Instructions executed before reaching the last location or looping.
    pub steps: usize,
}

/// Runs the program from location 1 with every variable false.
pub fn simulate(prog: &BoolProgram) -> Simulation {
    let n = prog.len();
    let mut loc = 1;
    let mut val = vec![false; prog.vars + 1];
    let mut seen = HashSet::new();
    let mut steps = 0;
    loop {
        if loc == n {
            return Simulation { reaches_last: true, steps };
        }
        if !seen.insert((loc, val.clone())) {
            return Simulation { reaches_last: false, steps };
        }
        match prog.instrs[loc - 1] {
            Instr::If { var, then_to, else_to } => loc = if val[var] { then_to } else { else_to },
            Instr::Toggle { var } => {
                val[var] = !val[var];
                loc += 1;
            }
        }
        steps += 1;
    }
}

/// The template and the specification `G !done`; the specification holds
/// in every instance iff the program never reaches its last location.
pub fn boolprog_to_rb(prog: &BoolProgram) -> (Template, Ltl) {
    let n = prog.len();
    let m = prog.vars;
    let mut t = Template::new(Kind::Rb, 2);
    t.atoms.insert("done".into());
    let init = t.add_state("init", &[]);
    let sink = t.add_state("sink", &[]);
    let loc: Vec<StateId> = (1..=n).map(|l| t.add_state(format!("L{l}"), if l == n { &["done"] } else { &[] })).collect();
    let loc2: Vec<StateId> = (1..=n).map(|l| t.add_state(format!("L{l}'"), &[])).collect();
    let mut x = vec![];
    let mut nx = vec![];
    let mut x2 = vec![];
    let mut nx2 = vec![];
    for i in 1..=m {
        x.push(t.add_state(format!("X{i}"), &[]));
        nx.push(t.add_state(format!("!X{i}"), &[]));
        x2.push(t.add_state(format!("X{i}'"), &[]));
        nx2.push(t.add_state(format!("!X{i}'"), &[]));
    }
    t.initial = vec![init];
    let b = EdgeLabel::Broadcast;
    t.add_edge(init, b.clone(), loc[0]);
    for i in 0..m {
        t.add_edge(init, b.clone(), nx[i]);
    }
    t.add_edge(sink, b.clone(), sink);
    for l in 0..n {
        t.add_edge(loc[l], b.clone(), sink);
    }
    for i in 0..m {
        t.add_edge(x[i], b.clone(), sink);
        t.add_edge(nx[i], b.clone(), sink);
    }
    for l in 0..n {
        t.add_edge(loc2[l], b.clone(), loc[l]);
    }
    for i in 0..m {
        t.add_edge(x2[i], b.clone(), x[i]);
        t.add_edge(nx2[i], b.clone(), nx[i]);
    }
    let act = |name: &str, i: usize, j: usize| EdgeLabel::rdz(&format!("{name}{i}"), j);
    for (l, ins) in prog.instrs.iter().enumerate() {
        for i in (1..=m).filter(|&i| i != ins.var()) {
            t.add_edge(loc[l], act("protect", i, 1), loc[l]);
        }
    }
    for i in 0..m {
        t.add_edge(x[i], act("protect", i + 1, 2), x2[i]);
        t.add_edge(nx[i], act("protect", i + 1, 2), nx2[i]);
    }
    for (l, ins) in prog.instrs.iter().enumerate() {
        match *ins {
            Instr::If { var, then_to, else_to } => {
                t.add_edge(loc[l], act("if", var, 1), loc2[then_to - 1]);
                t.add_edge(loc[l], act("else", var, 1), loc2[else_to - 1]);
            }
            Instr::Toggle { var } => {
                t.add_edge(loc[l], act("toggle", var, 1), loc2[l + 1]);
            }
        }
    }
    for i in 0..m {
        t.add_edge(x[i], act("if", i + 1, 2), x2[i]);
        t.add_edge(nx[i], act("else", i + 1, 2), nx2[i]);
    }
    for i in 0..m {
        t.add_edge(x[i], act("toggle", i + 1, 2), nx2[i]);
        t.add_edge(nx[i], act("toggle", i + 1, 2), x2[i]);
    }
    let spec: Ltl = "G !done".parse().expect("fixed formula");
    (t, spec)
}
