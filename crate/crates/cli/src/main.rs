//! `pmcp`: parameterized model checking of rendezvous/broadcast systems and
//! discrete timed networks from the command line.

mod input;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use rand::rngs::StdRng;
use rand::SeedableRng;
use serde_json::{json, Value};

use rbcheck::automata::fmt_word;
use rbcheck::edgetypes::classify;
use rbcheck::model::Template;
use rbcheck::oracle::random::{random_boolprog, random_rb_template};
use rbcheck::oracle::{
    enumerate_reachable, executions_upto, loading_check, pseudo_cycle_search, pump, realize_execution, Population, PseudoQuery,
    SearchOutcome,
};
use rbcheck::pmcp::{
    check_liveness, check_safety, Answer, Counterexample, LivenessSpec, Options, PmcpError, SafetySpec, Verdict,
};
use rbcheck::reductions::{boolprog_to_rb, rb_to_tn, rba_to_rbc, rbc_to_rba, simulate, tn_to_rb, tn_to_rb_with_bound, BoolProgram};
use rbcheck::unwinding::build_unwinding;

use input::{read_json, Model};

#[derive(Parser)]
#[command(name = "pmcp", version, about = "Parameterized model checking of RB-systems and timed networks")]
struct Cli {
    /// Machine-readable JSON on stdout.
    #[arg(long, global = true)]
    json: bool,
    /// Abort when the unwinding needs more components (also PMCP_MAX_COMPONENTS).
    #[arg(long, global = true)]
    max_components: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Safety,
    Liveness,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Tn,
    Rb,
    Rbc,
    Rba,
}

#[derive(Subcommand)]
enum Cmd {
    /// Decide a specification for every number of processes.
    Check {
        /// RB/R-template or TN-template (JSON).
        #[arg(long)]
        template: PathBuf,
        /// LTL (liveness) or LTLf (safety) formula; clock predicates in quotes.
        #[arg(long, conflicts_with = "automaton")]
        spec: Option<String>,
        /// NFW of the allowed words (safety) or NBW of the forbidden ones (liveness).
        #[arg(long)]
        automaton: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "safety")]
        mode: Mode,
        /// Largest instance tried when realizing a finite counterexample.
        #[arg(long, default_value_t = 8)]
        realize_up_to: u32,
    },
    /// The reachability-unwinding of a template.
    Unwind {
        #[arg(long)]
        template: PathBuf,
        /// Graphviz output instead of JSON.
        #[arg(long)]
        dot: bool,
    },
    /// Locally-reusable, green, light and dark green edges of the unwinding.
    EdgeTypes {
        #[arg(long)]
        template: PathBuf,
    },
    /// Translate between system formats.
    Translate {
        #[arg(long, value_enum)]
        from: Format,
        #[arg(long, value_enum)]
        to: Format,
        #[arg(long)]
        input: PathBuf,
        /// Clock bound for `tn` to `rb` (default: largest constant plus one).
        #[arg(long)]
        bound: Option<u32>,
    },
    /// Explicit-state ground truth on small instances.
    Oracle {
        #[command(subcommand)]
        sub: OracleCmd,
    },
    /// The safety instance of a Boolean program, optionally checked.
    GenBoolprog {
        /// Program as a JSON list of instructions.
        #[arg(long, conflicts_with = "seed")]
        program: Option<PathBuf>,
        /// Generate a random program instead.
        #[arg(long)]
        seed: Option<u64>,
        /// Also run the checker and the direct simulation.
        #[arg(long)]
        check: bool,
    },
}

#[derive(Subcommand)]
enum OracleCmd {
    /// Counter configurations reachable with `n` processes.
    Reachable {
        #[arg(long)]
        template: PathBuf,
        #[arg(short, long)]
        n: u32,
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Executions of one process with `n` processes, up to a length.
    Executions {
        #[arg(long)]
        template: PathBuf,
        #[arg(short, long)]
        n: u32,
        #[arg(long, default_value_t = 6)]
        max_len: usize,
    },
    /// Pseudo-cycle through an edge of the unwinding (`src@i -label-> dst@j`).
    PseudoCycle {
        #[arg(long)]
        template: PathBuf,
        #[arg(long)]
        edge: String,
        /// Take exactly one period of broadcasts.
        #[arg(long)]
        broadcasts: bool,
        #[arg(long, default_value_t = 8)]
        max_processes: u32,
    },
    /// Witness runs for every component state of the unwinding.
    Loading {
        #[arg(long)]
        template: PathBuf,
        #[arg(long, default_value_t = 8)]
        max_processes: u32,
    },
    /// Smallest instance producing a word, given as a JSON list of letters.
    Realize {
        #[arg(long)]
        template: PathBuf,
        #[arg(long)]
        word: String,
        #[arg(long, default_value_t = 16)]
        max_processes: u32,
    },
    /// A seeded random RB-template.
    RandomTemplate {
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 5)]
        max_states: usize,
        #[arg(long, default_value_t = 10)]
        max_edges: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            match e.downcast_ref::<PmcpError>() {
                Some(PmcpError::ResourceCap(_)) => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}

fn options(cli: &Cli, realize_up_to: u32) -> Result<Options> {
    let max_components = match cli.max_components {
        Some(m) => Some(m),
        None => match std::env::var("PMCP_MAX_COMPONENTS") {
            Ok(v) => Some(v.parse().with_context(|| format!("PMCP_MAX_COMPONENTS={v}"))?),
            Err(_) => None,
        },
    };
    Ok(Options { max_components, realize_up_to })
}

fn emit(cli: &Cli, value: &Value, human: impl FnOnce() -> String) {
    if cli.json {
        println!("{}", serde_json::to_string_pretty(value).expect("values serialize"));
    } else {
        print!("{}", human());
    }
}

fn run(cli: &Cli) -> Result<u8> {
    match &cli.cmd {
        Cmd::Check { template, spec, automaton, mode, realize_up_to } => {
            let model = Model::load(template)?;
            let tpl = model.template()?;
            let opts = options(cli, *realize_up_to)?;
            let verdict = match (mode, spec, automaton) {
                (Mode::Safety, Some(f), _) => check_safety(&tpl, &SafetySpec::Ltlf(input::formula(f)?), &opts)?,
                (Mode::Safety, None, Some(a)) => check_safety(&tpl, &SafetySpec::Nfw(input::automaton(a)?.to_nfw()?), &opts)?,
                (Mode::Liveness, Some(f), _) => check_liveness(&tpl, &LivenessSpec::Ltl(input::formula(f)?), &opts)?,
                (Mode::Liveness, None, Some(a)) => {
                    check_liveness(&tpl, &LivenessSpec::NegatedNbw(input::automaton(a)?.to_nfw()?), &opts)?
                }
                (_, None, None) => bail!("give --spec or --automaton"),
            };
            emit(cli, &serde_json::to_value(&verdict)?, || verdict_text(&verdict));
            Ok(if verdict.holds() { 0 } else { 1 })
        }
        Cmd::Unwind { template, dot } => {
            let tpl = Model::load(template)?.template()?;
            let uw = build_unwinding(&tpl, options(cli, 0)?.max_components).map_err(PmcpError::from)?;
            if *dot {
                print!("{}", uw.to_dot());
            } else {
                println!("{}", serde_json::to_string_pretty(&uw.view())?);
            }
            Ok(0)
        }
        Cmd::EdgeTypes { template } => {
            let tpl = Model::load(template)?.template()?;
            let uw = build_unwinding(&tpl, options(cli, 0)?.max_components).map_err(PmcpError::from)?;
            let report = classify(&uw);
            let rows: Vec<Value> = (0..uw.flat.edges.len())
                .map(|e| {
                    json!({
                        "edge": uw.flat.edge_name(e),
                        "component": uw.edge_origin[e].comp,
                        "locally_reusable": report.locally_reusable[e],
                        "green": report.green[e],
                        "shade": report.shade[e],
                    })
                })
                .collect();
            let (l, g, lg, dg) = report.count();
            let value = json!({
                "edges": rows,
                "counts": { "locally_reusable": l, "green": g, "light": lg, "dark": dg },
                "green_rounds": report.green_rounds,
            });
            emit(cli, &value, || {
                let mut s = format!("{:<40} {:>4} {:>6} {:>6} {}\n", "edge", "comp", "locr", "green", "shade");
                for r in &rows {
                    let cell = |k: &str| r[k].as_str().map(str::to_string).unwrap_or_else(|| r[k].to_string());
                    s += &format!(
                        "{:<40} {:>4} {:>6} {:>6} {}\n",
                        cell("edge"),
                        cell("component"),
                        cell("locally_reusable"),
                        cell("green"),
                        cell("shade")
                    );
                }
                s + &format!("locally-reusable {l}, green {g} (light {lg}, dark {dg}), {} green rounds\n", report.green_rounds)
            });
            Ok(0)
        }
        Cmd::Translate { from, to, input, bound } => {
            let out = translate(*from, *to, input, *bound)?;
            println!("{}", serde_json::to_string_pretty(&out)?);
            Ok(0)
        }
        Cmd::Oracle { sub } => oracle(cli, sub),
        Cmd::GenBoolprog { program, seed, check } => {
            let prog: BoolProgram = match (program, seed) {
                (Some(p), _) => read_json(p)?,
                (None, Some(s)) => random_boolprog(&mut StdRng::seed_from_u64(*s), 4, 8),
                (None, None) => bail!("give --program or --seed"),
            };
            let (tpl, spec) = boolprog_to_rb(&prog);
            let mut value = json!({ "program": prog, "template": tpl, "spec": spec.to_string() });
            let mut code = 0;
            if *check {
                let v = check_safety(&tpl, &SafetySpec::Ltlf(spec), &options(cli, 0)?)?;
                let sim = simulate(&prog);
                value["verdict"] = serde_json::to_value(v.answer)?;
                value["simulation"] = serde_json::to_value(&sim)?;
                if v.holds() == sim.reaches_last {
                    bail!("checker and simulation disagree");
                }
                code = if v.holds() { 0 } else { 1 };
            }
            println!("{}", serde_json::to_string_pretty(&value)?);
            Ok(code)
        }
    }
}

fn verdict_text(v: &Verdict) -> String {
    let mut s = match v.answer {
        Answer::Holds => "holds for every number of processes\n".to_string(),
        Answer::Violated => "violated\n".to_string(),
    };
    match &v.counterexample {
        Some(Counterexample::Finite { word }) => {
            s += &format!("counterexample: {}\n", fmt_word(word));
            s += &match v.diagnostics.realized_with {
                Some(n) => format!("realized with {n} process{}\n", if n == 1 { "" } else { "es" }),
                None => "not realized within the process budget\n".to_string(),
            };
        }
        Some(Counterexample::Lasso { stem, cycle }) => {
            s += &format!("counterexample: {} ({})^w\n", fmt_word(stem), fmt_word(cycle));
        }
        None => {}
    }
    let d = &v.diagnostics;
    s += &format!(
        "unwinding: {} components (prefix {}, period {}), {} states, {} edges; product {} states; {:.1} ms\n",
        d.components, d.prefix, d.period, d.flat_states, d.flat_edges, d.automaton_states, d.millis
    );
    if let Some((l, g, lg, dg)) = d.edge_types {
        s += &format!("edges: locally-reusable {l}, green {g} (light {lg}, dark {dg})\n");
    }
    s
}

fn translate(from: Format, to: Format, path: &PathBuf, bound: Option<u32>) -> Result<Value> {
    Ok(match (from, to) {
        (Format::Tn, Format::Rb) => {
            let tn = read_json(path)?;
            let u = match bound {
                Some(d) => tn_to_rb_with_bound(&tn, d)?,
                None => tn_to_rb(&tn)?,
            };
            serde_json::to_value(u)?
        }
        (Format::Rb, Format::Tn) => serde_json::to_value(rb_to_tn(&read_json::<Template>(path)?)?)?,
        (Format::Rbc, Format::Rba) => {
            let (tpl, marks) = rbc_to_rba(&read_json(path)?)?;
            json!({ "template": tpl, "marks": marks })
        }
        (Format::Rba, Format::Rbc) => {
            let (sys, atom) = rba_to_rbc(&read_json::<Template>(path)?)?;
            json!({ "system": sys, "user_atom": atom })
        }
        _ => bail!("no translation between these formats; supported: tn->rb, rb->tn, rbc->rba, rba->rbc"),
    })
}

fn oracle(cli: &Cli, sub: &OracleCmd) -> Result<u8> {
    match sub {
        OracleCmd::Reachable { template, n, depth } => {
            let tpl = Model::load(template)?.template()?;
            let configs: Vec<Value> = enumerate_reachable(&tpl, &Population::plain(&tpl, *n), *depth)
                .iter()
                .map(|c| input::counts_json(&tpl, c))
                .collect();
            emit(cli, &json!(configs), || configs.iter().map(|c| format!("{c}\n")).collect());
        }
        OracleCmd::Executions { template, n, max_len } => {
            let tpl = Model::load(template)?.template()?;
            let words = executions_upto(&tpl, &Population::plain(&tpl, *n), *max_len);
            emit(cli, &serde_json::to_value(&words)?, || words.iter().map(|w| format!("{}\n", fmt_word(w))).collect());
        }
        OracleCmd::PseudoCycle { template, edge, broadcasts, max_processes } => {
            let tpl = Model::load(template)?.template()?;
            let uw = build_unwinding(&tpl, options(cli, 0)?.max_components).map_err(PmcpError::from)?;
            let e = (0..uw.flat.edges.len())
                .find(|&e| uw.flat.edge_name(e) == *edge)
                .with_context(|| format!("no edge `{edge}` in the unwinding"))?;
            let q = PseudoQuery { edge: e, with_broadcasts: *broadcasts, max_processes: *max_processes, restrict: None };
            let outcome = pseudo_cycle_search(&uw, &q);
            let mut value = serde_json::to_value(&outcome)?;
            if let SearchOutcome::Found(pc) = &outcome {
                let run = pump(&uw.flat, pc).map_err(anyhow::Error::msg)?;
                value["pumped"] = serde_json::to_value(&run)?;
            }
            emit(cli, &value, || match &outcome {
                SearchOutcome::Found(pc) => format!(
                    "pseudo-cycle with {} processes, {} steps, {} broadcasts, from component {}\n",
                    pc.processes,
                    pc.steps.len(),
                    pc.broadcasts,
                    pc.component
                ),
                SearchOutcome::Inconclusive { max_processes } => format!("inconclusive up to {max_processes} processes\n"),
            });
        }
        OracleCmd::Loading { template, max_processes } => {
            let tpl = Model::load(template)?.template()?;
            let uw = build_unwinding(&tpl, options(cli, 0)?.max_components).map_err(PmcpError::from)?;
            let rep = loading_check(&uw, *max_processes);
            emit(cli, &serde_json::to_value(&rep)?, || {
                let mut s: String = rep.witnessed.iter().map(|(b, st, n)| format!("component {b}: {st} with {n} processes\n")).collect();
                for (b, st) in &rep.missing {
                    s += &format!("component {b}: {st} not loaded\n");
                }
                s
            });
            return Ok(if rep.complete() { 0 } else { 1 });
        }
        OracleCmd::Realize { template, word, max_processes } => {
            let tpl = Model::load(template)?.template()?;
            let w = input::word(word)?;
            let n = realize_execution(&tpl, &w, *max_processes);
            emit(cli, &json!({ "processes": n }), || match n {
                Some(n) => format!("realized with {n} process{}\n", if n == 1 { "" } else { "es" }),
                None => format!("not realized with up to {max_processes} processes\n"),
            });
            return Ok(if n.is_some() { 0 } else { 1 });
        }
        OracleCmd::RandomTemplate { seed, max_states, max_edges } => {
            let t = random_rb_template(&mut StdRng::seed_from_u64(*seed), *max_states, *max_edges);
            println!("{}", serde_json::to_string_pretty(&t)?);
        }
    }
    Ok(0)
}
