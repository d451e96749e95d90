//! Seeded random corpora checked against explicit oracles.

use rand::rngs::StdRng;
use rand::SeedableRng;

use rbcheck::cvrs::{check_reach_certificate, cvrs_reachable};
use rbcheck::edgetypes::classify;
use rbcheck::oracle::random::{random_boolprog, random_cvrs_instance, random_rb_template};
use rbcheck::oracle::{pseudo_cycle_edges, pump, scaled_vrs_reachable};
use rbcheck::pmcp::{check_safety, Options, SafetySpec};
use rbcheck::reductions::{boolprog_to_rb, BoolProgram, Instr};
use rbcheck::unwinding::build_unwinding;

use num_traits::Signed;
use ratlp::{feasible, ratio, support_maximal_solution, Outcome};

use crate::{ensure, fm, gen, Check};

const TEMPLATES: u64 = 200;
const SOUND_N: u32 = 6;
const WITNESS_N: u32 = 10;
const MAX_INCONCLUSIVE: f64 = 0.05;

pub fn edge_types() -> Check {
    let mut flagged = 0usize;
    let mut inconclusive = 0usize;
    let mut found = 0usize;
    for seed in 0..TEMPLATES {
        let t = random_rb_template(&mut StdRng::seed_from_u64(seed), 5, 10);
        let uw = build_unwinding(&t, None).map_err(|e| format!("seed {seed}: {e}"))?;
        let report = classify(&uw);
        let m = uw.flat.edges.len();
        let mut seen_local = vec![false; m];
        let mut seen_green = vec![false; m];
        for n in 1..=WITNESS_N {
            let need_local = (0..m).any(|e| report.locally_reusable[e] && !seen_local[e]);
            let need_green = (0..m).any(|e| report.green[e] && !seen_green[e]);
            if n > SOUND_N && !need_local && !need_green {
                break;
            }
            for (with_b, seen, flags) in [(false, &mut seen_local, &report.locally_reusable), (true, &mut seen_green, &report.green)] {
                if n > SOUND_N && !(if with_b { need_green } else { need_local }) {
                    continue;
                }
                for (e, pc) in pseudo_cycle_edges(&uw, with_b, n, None) {
                    ensure(flags[e], || {
                        format!("seed {seed}: pseudo-cycle with {n} processes through unflagged {}", uw.flat.edge_name(e))
                    })?;
                    if !seen[e] {
                        found += 1;
                        let run = pump(&uw.flat, &pc).map_err(|err| format!("seed {seed}: {err}"))?;
                        ensure(run.last() == &run.init, || format!("seed {seed}: pumped run does not close"))?;
                    }
                    seen[e] = true;
                }
            }
        }
        for e in 0..m {
            for (flag, seen) in [(report.locally_reusable[e], seen_local[e]), (report.green[e], seen_green[e])] {
                if flag {
                    flagged += 1;
                    inconclusive += usize::from(!seen);
                }
            }
        }
    }
    let rate = if flagged == 0 { 0.0 } else { inconclusive as f64 / flagged as f64 };
    ensure(rate < MAX_INCONCLUSIVE, || format!("{inconclusive} of {flagged} flags unwitnessed ({:.1}%)", 100.0 * rate))?;
    Ok(format!(
        "{TEMPLATES} templates, {found} pseudo-cycles pumped, {flagged} flags, {inconclusive} inconclusive ({:.1}%)",
        100.0 * rate
    ))
}

const CVRS_INSTANCES: u64 = 500;
const VRS_BUDGET: u32 = 24;

pub fn cvrs() -> Check {
    let mut positive = 0;
    let mut disagreements = vec![];
    for seed in 0..CVRS_INSTANCES {
        let (v, c, c2) = random_cvrs_instance(&mut StdRng::seed_from_u64(seed), 4, 4, 3);
        let reach = cvrs_reachable(&v, &c, &c2);
        if let Some(mu) = &reach.certificate {
            ensure(check_reach_certificate(&v, &c, &c2, mu), || format!("seed {seed}: certificate does not check"))?;
        }
        let scaled = scaled_vrs_reachable(&v, &c, &c2, VRS_BUDGET);
        if reach.reachable != scaled.is_some() {
            disagreements.push(seed);
        }
        positive += usize::from(reach.reachable);
    }
    ensure(disagreements.is_empty(), || format!("disagreements on seeds {disagreements:?}"))?;
    Ok(format!("{CVRS_INSTANCES} instances, {positive} reachable, 0 disagreements"))
}

const LP_SYSTEMS: u64 = 1000;

pub fn lp() -> Check {
    let mut feasible_count = 0;
    let mut pairs = 0;
    for seed in 0..LP_SYSTEMS {
        let mut rng = StdRng::seed_from_u64(seed);
        let sys = gen::random_system(&mut rng, 6, 8, false);
        let out = feasible(&sys);
        ensure(out.is_feasible() == fm::fm_feasible(&sys), || format!("seed {seed}: verdict differs from elimination"))?;
        match &out {
            Outcome::Feasible(s) => {
                feasible_count += 1;
                ensure(sys.satisfied_by(&s.values), || format!("seed {seed}: solution does not re-verify"))?;
            }
            Outcome::Infeasible(f) => ensure(f.verify(&sys), || format!("seed {seed}: Farkas certificate does not verify"))?,
        }
        let hom = gen::random_system(&mut rng, 6, 8, true);
        let probes: Vec<usize> = (0..hom.num_vars()).collect();
        let max = support_maximal_solution(&hom, &probes).map_err(|e| format!("seed {seed}: {e}"))?;
        let one = feasible(&hom).solution().ok_or_else(|| format!("seed {seed}: homogeneous system infeasible"))?;
        let factor = gen::small_rational(&mut rng, 9).abs() + ratio(1, 2);
        for s in [&max, &one] {
            ensure(hom.satisfied_by(&s.values), || format!("seed {seed}: homogeneous solution does not re-verify"))?;
            ensure(hom.satisfied_by(&s.scale(&factor).values), || format!("seed {seed}: scaling breaks a solution"))?;
        }
        ensure(hom.satisfied_by(&max.add(&one).values), || format!("seed {seed}: sum of solutions is no solution"))?;
        pairs += 1;
    }
    Ok(format!("{LP_SYSTEMS} systems ({feasible_count} feasible) agree with elimination; {pairs} homogeneous pairs"))
}

/// Direct run of the program from location 1 with all variables false;
/// a run longer than the number of program states is looping.
fn reaches_last(p: &BoolProgram) -> bool {
    let n = p.instrs.len();
    let mut val = vec![false; p.vars + 1];
    let mut loc = 1;
    for _ in 0..=(n << p.vars) {
        if loc == n {
            return true;
        }
        match p.instrs[loc - 1] {
            Instr::Toggle { var } => {
                val[var] ^= true;
                loc += 1;
            }
            Instr::If { var, then_to, else_to } => loc = if val[var] { then_to } else { else_to },
        }
    }
    false
}

const PROGRAMS: u64 = 100;

pub fn boolprogs() -> Check {
    let mut reaching = 0;
    for seed in 0..PROGRAMS {
        let p = random_boolprog(&mut StdRng::seed_from_u64(seed), 4, 8);
        let (tpl, spec) = boolprog_to_rb(&p);
        let v = check_safety(&tpl, &SafetySpec::Ltlf(spec), &Options::default()).map_err(|e| format!("seed {seed}: {e}"))?;
        let direct = reaches_last(&p);
        ensure(v.holds() != direct, || format!("seed {seed}: checker says holds={}, program reaches_last={direct}", v.holds()))?;
        reaching += usize::from(direct);
    }
    Ok(format!("{PROGRAMS} programs, {reaching} reach their last location"))
}
