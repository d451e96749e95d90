//! JSON form of automata, shared by NFW, NBW and B-automata.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::bauto::{BAutomaton, BTrans, Cc};
use super::nfw::{Nfw, Trans};
use super::Guard;
use crate::model::Letter;

#[derive(Debug, Error)]
pub enum AutomatonError {
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("duplicate state `{0}`")]
    DuplicateState(String),
    #[error("transition gives both `letter` and `guard`")]
    AmbiguousGuard,
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct CubeFile {
    #[serde(default)]
    pub pos: Vec<String>,
    #[serde(default)]
    pub neg: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TransFile {
    pub src: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub letter: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub guard: Option<CubeFile>,
    pub dst: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cc: Option<Cc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AutomatonFile {
    pub states: Vec<String>,
    pub initial: Vec<String>,
    #[serde(default)]
    pub accepting: Vec<String>,
    #[serde(default)]
    pub transitions: Vec<TransFile>,
}

impl AutomatonFile {
    fn index(&self) -> Result<HashMap<&str, usize>, AutomatonError> {
        let mut idx = HashMap::new();
        for (i, s) in self.states.iter().enumerate() {
            if idx.insert(s.as_str(), i).is_some() {
                return Err(AutomatonError::DuplicateState(s.clone()));
            }
        }
        Ok(idx)
    }

    fn parts(&self) -> Result<(Vec<usize>, Vec<bool>, Vec<(usize, Guard, usize, Cc)>), AutomatonError> {
        let idx = self.index()?;
        let look = |s: &String| idx.get(s.as_str()).copied().ok_or_else(|| AutomatonError::UnknownState(s.clone()));
        let initial = self.initial.iter().map(look).collect::<Result<Vec<_>, _>>()?;
        let mut accepting = vec![false; self.states.len()];
        for s in &self.accepting {
            accepting[look(s)?] = true;
        }
        let mut trans = vec![];
        for t in &self.transitions {
            let guard = match (&t.letter, &t.guard) {
                (Some(_), Some(_)) => return Err(AutomatonError::AmbiguousGuard),
                (Some(l), None) => Guard::Exact(l.iter().cloned().collect()),
                (None, Some(c)) => Guard::Cube { pos: c.pos.iter().cloned().collect(), neg: c.neg.iter().cloned().collect() },
                (None, None) => Guard::any(),
            };
            trans.push((look(&t.src)?, guard, look(&t.dst)?, t.cc.unwrap_or(Cc::Skip)));
        }
        Ok((initial, accepting, trans))
    }

    pub fn to_nfw(&self) -> Result<Nfw, AutomatonError> {
        let (initial, accepting, trans) = self.parts()?;
        Ok(Nfw {
            states: self.states.clone(),
            initial,
            accepting,
            trans: trans.into_iter().map(|(src, guard, dst, _)| Trans { src, guard, dst }).collect(),
        })
    }

    pub fn to_bautomaton(&self) -> Result<BAutomaton, AutomatonError> {
        let (initial, accepting, trans) = self.parts()?;
        let buchi = if self.accepting.is_empty() { vec![true; self.states.len()] } else { accepting };
        Ok(BAutomaton {
            states: self.states.clone(),
            initial,
            buchi,
            trans: trans.into_iter().map(|(src, guard, dst, cc)| BTrans { src, guard, dst, cc }).collect(),
        })
    }

    fn trans_file(states: &[String], src: usize, g: &Guard, dst: usize, cc: Option<Cc>) -> TransFile {
        let (letter, guard) = match g {
            Guard::Exact(l) => (Some(l.iter().cloned().collect()), None),
            Guard::Cube { pos, neg } if pos.is_empty() && neg.is_empty() => (None, None),
            Guard::Cube { pos, neg } => (None, Some(CubeFile { pos: pos.iter().cloned().collect(), neg: neg.iter().cloned().collect() })),
        };
        TransFile { src: states[src].clone(), letter, guard, dst: states[dst].clone(), cc }
    }

    pub fn from_nfw(a: &Nfw) -> AutomatonFile {
        AutomatonFile {
            states: a.states.clone(),
            initial: a.initial.iter().map(|&s| a.states[s].clone()).collect(),
            accepting: (0..a.states.len()).filter(|&s| a.accepting[s]).map(|s| a.states[s].clone()).collect(),
            transitions: a.trans.iter().map(|t| Self::trans_file(&a.states, t.src, &t.guard, t.dst, None)).collect(),
        }
    }

    pub fn from_bautomaton(b: &BAutomaton) -> AutomatonFile {
        AutomatonFile {
            states: b.states.clone(),
            initial: b.initial.iter().map(|&s| b.states[s].clone()).collect(),
            accepting: (0..b.states.len()).filter(|&s| b.buchi[s]).map(|s| b.states[s].clone()).collect(),
            transitions: b.trans.iter().map(|t| Self::trans_file(&b.states, t.src, &t.guard, t.dst, Some(t.cc))).collect(),
        }
    }
}

/// The atoms appearing anywhere in a letter list.
pub fn atoms_of(letters: &[Letter]) -> BTreeSet<String> {
    letters.iter().flatten().cloned().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::ltl::ltl_to_nbw;

    #[test]
    fn round_trip() {
        let n = ltl_to_nbw(&"a U b".parse().unwrap());
        let f = AutomatonFile::from_nfw(&n);
        let s = serde_json::to_string(&f).unwrap();
        let back: AutomatonFile = serde_json::from_str(&s).unwrap();
        assert_eq!(back.to_nfw().unwrap(), n);
    }

    #[test]
    fn letters_and_counters() {
        let src = r#"{"states":["q"],"initial":["q"],"transitions":[{"src":"q","letter":["p"],"dst":"q","cc":"inc"}]}"#;
        let f: AutomatonFile = serde_json::from_str(src).unwrap();
        let b = f.to_bautomaton().unwrap();
        assert_eq!(b.trans[0].cc, Cc::Inc);
        assert_eq!(b.buchi, vec![true]);
    }
}
