//! Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
//! criterion fails. Time limits are pinned per criterion below.

#[path = "../../../ratlp/tests/support/fm.rs"]
mod fm;
#[path = "../../../ratlp/tests/support/gen.rs"]
mod gen;

mod corpora;
mod figures;
mod logic;

use std::process::ExitCode;
use std::time::{Duration, Instant};

/// Outcome of one criterion: a short summary, or why it failed.
pub type Check = Result<String, String>;

struct Criterion {
    id: u32,
    name: &'static str,
    limit: Duration,
    run: fn() -> Check,
}

const CRITERIA: &[Criterion] = &[
    Criterion { id: 1, name: "figure examples", limit: Duration::from_secs(2), run: figures::figure_examples },
    Criterion { id: 2, name: "timed translation", limit: Duration::from_secs(1), run: figures::timed_translation },
    Criterion { id: 3, name: "edge-type oracle agreement", limit: Duration::from_secs(600), run: corpora::edge_types },
    Criterion { id: 4, name: "cvrs reachability", limit: Duration::from_secs(300), run: corpora::cvrs },
    Criterion { id: 5, name: "lp engine", limit: Duration::from_secs(120), run: corpora::lp },
    Criterion { id: 6, name: "safety vs boolean programs", limit: Duration::from_secs(300), run: corpora::boolprogs },
    Criterion { id: 7, name: "automata algebra", limit: Duration::from_secs(300), run: logic::automata },
    Criterion { id: 8, name: "unwinding soundness", limit: Duration::from_secs(120), run: figures::unwinding_soundness },
];

fn main() -> ExitCode {
    let only: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for c in CRITERIA.iter().filter(|c| only.is_empty() || only.contains(&c.id)) {
        let start = Instant::now();
        let result = (c.run)();
        let took = start.elapsed();
        let result = match result {
            Ok(msg) if took > c.limit => Err(format!("{msg}; over the {}s limit", c.limit.as_secs())),
            r => r,
        };
        match result {
            Ok(msg) => println!("PASS {}. {} ({:.2}s): {msg}", c.id, c.name, took.as_secs_f64()),
            Err(msg) => {
                failed += 1;
                println!("FAIL {}. {} ({:.2}s): {msg}", c.id, c.name, took.as_secs_f64());
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

/// Turns a condition into a criterion failure.
pub fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}
