//! Reading templates, formulas, automata and words.

use std::path::Path;

use anyhow::{Context, Result};
use serde::de::DeserializeOwned;
use serde_json::{json, Value};

use rbcheck::automata::json::AutomatonFile;
use rbcheck::automata::Ltl;
use rbcheck::model::{Letter, Template};
use rbcheck::reductions::{tn_to_rb, TnTemplate};

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

/// A template file: RB/R/RBA-templates carry a `kind`, TN-templates do not.
pub enum Model {
    Template(Template),
    Timed(TnTemplate),
}

impl Model {
    pub fn load(path: &Path) -> Result<Model> {
        let v: Value = read_json(path)?;
        let what = || format!("parsing {}", path.display());
        Ok(if v.get("kind").is_some() {
            Model::Template(serde_json::from_value(v).with_context(what)?)
        } else {
            Model::Timed(serde_json::from_value(v).with_context(what)?)
        })
    }

    /// The RB-template to check; timed networks are translated first.
    pub fn template(self) -> Result<Template> {
        Ok(match self {
            Model::Template(t) => t,
            Model::Timed(tn) => tn_to_rb(&tn)?,
        })
    }
}

pub fn formula(src: &str) -> Result<Ltl> {
    src.parse().with_context(|| format!("formula `{src}`"))
}

pub fn automaton(path: &Path) -> Result<AutomatonFile> {
    read_json(path)
}

/// A word written as a JSON list of atom lists, e.g. `[["p"],["q"]]`.
pub fn word(src: &str) -> Result<Vec<Letter>> {
    let raw: Vec<Vec<String>> = serde_json::from_str(src).with_context(|| format!("word `{src}`"))?;
    Ok(raw.into_iter().map(|l| l.into_iter().collect()).collect())
}

pub fn counts_json(tpl: &Template, counts: &[u32]) -> Value {
    let m: serde_json::Map<String, Value> =
        counts.iter().enumerate().filter(|(_, &c)| c > 0).map(|(s, &c)| (tpl.states[s].clone(), json!(c))).collect();
    Value::Object(m)
}
