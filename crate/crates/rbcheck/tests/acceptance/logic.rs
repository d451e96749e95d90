//! B-automaton emptiness against lasso enumeration, and the LTL/LTLf
//! translations against evaluation on all short words.

use rand::rngs::StdRng;
use rand::SeedableRng;

use rbcheck::automata::{b_emptiness, letter, ltl_to_nbw, ltlf_to_nfw, Lasso, Ltl};
use rbcheck::model::Letter;
use rbcheck::oracle::random::{brute_force_b_nonempty, random_bautomaton};

use crate::{ensure, Check};

const B_AUTOMATA: u64 = 300;
const B_STATES: usize = 6;
const MIN_CYCLE: usize = 6;
const WORD_LEN: usize = 4;

const BATTERY: &[&str] = &[
    "true",
    "false",
    "a",
    "!a",
    "a & b",
    "a | !b",
    "X a",
    "X X b",
    "X X X a",
    "F a",
    "G a",
    "F G a",
    "G F a",
    "a U b",
    "!a U b",
    "X (a U b)",
    "(a U b) | G a",
    "a U (b U a)",
    "G (a -> X b)",
    "G (a -> F b)",
    "F (a & X !a)",
    "G !(a & b)",
    "F a -> F b",
    "G (a | b)",
    "!(F G b)",
    "X true",
];

/// Truth at position `i` of a nonempty finite word, strong next.
fn eval_finite(f: &Ltl, w: &[Letter], i: usize) -> bool {
    use Ltl::*;
    match f {
        True => true,
        False => false,
        Atom(a) => w[i].contains(a),
        Not(x) => !eval_finite(x, w, i),
        And(x, y) => eval_finite(x, w, i) && eval_finite(y, w, i),
        Or(x, y) => eval_finite(x, w, i) || eval_finite(y, w, i),
        Implies(x, y) => !eval_finite(x, w, i) || eval_finite(y, w, i),
        Next(x) => i + 1 < w.len() && eval_finite(x, w, i + 1),
        Until(x, y) => {
            for j in i..w.len() {
                if eval_finite(y, w, j) {
                    return true;
                }
                if !eval_finite(x, w, j) {
                    return false;
                }
            }
            false
        }
        Finally(x) => (i..w.len()).any(|j| eval_finite(x, w, j)),
        Globally(x) => (i..w.len()).all(|j| eval_finite(x, w, j)),
    }
}

/// Truth values on every position of the folded lasso; `U` as a least
/// fixpoint of its one-step unfolding.
fn eval_lasso(f: &Ltl, w: &Lasso) -> Vec<bool> {
    use Ltl::*;
    let n = w.len();
    let succ = |i: usize| if i + 1 < n { i + 1 } else { w.stem.len() };
    let until = |x: Vec<bool>, y: Vec<bool>| {
        let mut v = vec![false; n];
        for _ in 0..=n {
            v = (0..n).map(|i| y[i] || (x[i] && v[succ(i)])).collect();
        }
        v
    };
    match f {
        True => vec![true; n],
        False => vec![false; n],
        Atom(a) => (0..n).map(|i| w.at(i).contains(a)).collect(),
        Not(x) => eval_lasso(x, w).into_iter().map(|b| !b).collect(),
        And(x, y) => eval_lasso(x, w).into_iter().zip(eval_lasso(y, w)).map(|(p, q)| p && q).collect(),
        Or(x, y) => eval_lasso(x, w).into_iter().zip(eval_lasso(y, w)).map(|(p, q)| p || q).collect(),
        Implies(x, y) => eval_lasso(x, w).into_iter().zip(eval_lasso(y, w)).map(|(p, q)| !p || q).collect(),
        Next(x) => {
            let v = eval_lasso(x, w);
            (0..n).map(|i| v[succ(i)]).collect()
        }
        Until(x, y) => until(eval_lasso(x, w), eval_lasso(y, w)),
        Finally(x) => until(vec![true; n], eval_lasso(x, w)),
        Globally(x) => until(vec![true; n], eval_lasso(x, w).into_iter().map(|b| !b).collect()).into_iter().map(|b| !b).collect(),
    }
}

fn words(len: usize) -> Vec<Vec<Letter>> {
    let alphabet = [letter(&[]), letter(&["a"]), letter(&["b"]), letter(&["a", "b"])];
    let mut layer = vec![vec![]];
    for _ in 0..len {
        layer = layer.iter().flat_map(|w: &Vec<Letter>| alphabet.iter().map(move |l| [w.clone(), vec![l.clone()]].concat())).collect();
    }
    layer
}

pub fn automata() -> Check {
    let mut nonempty = 0;
    for seed in 0..B_AUTOMATA {
        let b = random_bautomaton(&mut StdRng::seed_from_u64(seed), B_STATES);
        let bound = MIN_CYCLE.max(2 * b.states.len());
        let brute = brute_force_b_nonempty(&b, bound);
        let witness = b_emptiness(&b);
        ensure(witness.is_some() == brute, || format!("seed {seed}: emptiness {} vs enumeration {brute}", witness.is_none()))?;
        if let Some(w) = witness {
            ensure(b.accepts_lasso(&w.word), || format!("seed {seed}: witness word is rejected"))?;
            nonempty += 1;
        }
    }
    let finite: Vec<Vec<Letter>> = (1..=WORD_LEN).flat_map(words).collect();
    let mut lassos = vec![];
    for total in 1..=WORD_LEN {
        for w in words(total) {
            for s in 0..total {
                lassos.push(Lasso { stem: w[..s].to_vec(), cycle: w[s..].to_vec() });
            }
        }
    }
    for src in BATTERY {
        let f: Ltl = src.parse().map_err(|e| format!("{src}: {e}"))?;
        let nfw = ltlf_to_nfw(&f);
        for w in &finite {
            ensure(nfw.accepts(w) == eval_finite(&f, w, 0), || format!("{src} on finite {w:?}"))?;
        }
        let nbw = ltl_to_nbw(&f);
        for w in &lassos {
            ensure(nbw.accepts_lasso(w) == eval_lasso(&f, w)[0], || format!("{src} on lasso {w:?}"))?;
        }
    }
    Ok(format!(
        "{B_AUTOMATA} B-automata ({nonempty} nonempty); {} formulas on {} words and {} lassos",
        BATTERY.len(),
        finite.len(),
        lassos.len()
    ))
}
