//! Enumerative reachability for integer vector rendezvous systems, and the
//! scaled search used to cross-check the rational decision procedure.

use std::collections::{HashSet, VecDeque};

use num_traits::{One, ToPrimitive, Zero};
use ratlp::Rational;

use crate::cvrs::{Cvrs, CvrsConfig};
use crate::model::product;

fn integral(c: &CvrsConfig) -> Option<Vec<u32>> {
    c.counts.iter().map(|x| if x.is_integer() { x.to_integer().to_u32() } else { None }).collect()
}

/// Rendezvous tuples as `(sources, destinations)`.
fn tuples(v: &Cvrs) -> Vec<(Vec<usize>, Vec<usize>)> {
    let mut out = vec![];
    for a in v.actions() {
        let per_index: Vec<Vec<usize>> = (1..=v.k)
            .map(|j| (0..v.trans.len()).filter(|&t| v.trans[t].action == a && v.trans[t].index == j).collect())
            .collect();
        if per_index.iter().any(Vec::is_empty) {
            continue;
        }
        for tup in product(&per_index) {
            out.push((tup.iter().map(|&t| v.trans[t].src).collect(), tup.iter().map(|&t| v.trans[t].dst).collect()));
        }
    }
    out
}

/// Breadth-first search over integer configurations, one process per index
/// and step. `None` when either endpoint is not integral.
pub fn vrs_reachable(v: &Cvrs, c: &CvrsConfig, c2: &CvrsConfig) -> Option<bool> {
    let (start, goal) = (integral(c)?, integral(c2)?);
    if start.iter().sum::<u32>() != goal.iter().sum::<u32>() {
        return Some(false);
    }
    let tups = tuples(v);
    let mut seen = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    while let Some(cur) = queue.pop_front() {
        if cur == goal {
            return Some(true);
        }
        'tuple: for (src, dst) in &tups {
            let mut next = cur.clone();
            for &s in src {
                if next[s] == 0 {
                    continue 'tuple;
                }
                next[s] -= 1;
            }
            for &d in dst {
                next[d] += 1;
            }
            if seen.insert(next.clone()) {
                queue.push_back(next);
            }
        }
    }
    Some(false)
}

fn lcm(a: u64, b: u64) -> u64 {
    fn gcd(a: u64, b: u64) -> u64 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    a / gcd(a, b) * b
}

/// Searches the VRS at scales `γ = j·L` (`L` the least common multiple of
/// all denominators) while `γ` times the mass stays within `budget`
/// processes. Returns the first scale at which `γc2` is reachable from `γc`.
pub fn scaled_vrs_reachable(v: &Cvrs, c: &CvrsConfig, c2: &CvrsConfig, budget: u32) -> Option<Rational> {
    let l = c
        .counts
        .iter()
        .chain(&c2.counts)
        .map(|x| x.denom().to_u64().expect("small denominators"))
        .fold(1, lcm);
    let mass = c.mass().max(c2.mass());
    let mut gamma = ratlp::int(l as i64);
    let step = gamma.clone();
    if mass.is_zero() {
        return (c == c2).then(Rational::one);
    }
    while &gamma * &mass <= ratlp::int(budget.into()) {
        if vrs_reachable(v, &c.scale(&gamma), &c2.scale(&gamma)) == Some(true) {
            return Some(gamma);
        }
        gamma += &step;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cvrs::cvrs_reachable;
    use crate::samples;

    fn relay() -> Cvrs {
        Cvrs::from_template(&samples::relay())
    }

    fn cfg(v: &Cvrs, pairs: &[(&str, i64)]) -> CvrsConfig {
        let mut c = vec![0; v.num_states()];
        for (s, x) in pairs {
            c[v.states.iter().position(|n| n == s).unwrap()] = *x;
        }
        CvrsConfig::from_ints(&c)
    }

    #[test]
    fn relay_instances() {
        let v = relay();
        assert_eq!(vrs_reachable(&v, &cfg(&v, &[("p", 2)]), &cfg(&v, &[("q", 2)])), Some(true));
        assert_eq!(vrs_reachable(&v, &cfg(&v, &[("q", 1)]), &cfg(&v, &[("p", 1)])), Some(false));
        assert_eq!(vrs_reachable(&v, &cfg(&v, &[("p", 1)]), &cfg(&v, &[("q", 1)])), Some(false));
        let half = cfg(&v, &[("p", 1)]).scale(&ratlp::ratio(1, 2));
        assert_eq!(vrs_reachable(&v, &half, &half), None);
    }

    #[test]
    fn scaled_search_matches_rational_verdict() {
        let v = relay();
        let (a, b) = (cfg(&v, &[("p", 2)]), cfg(&v, &[("q", 1), ("r", 1)]));
        let scaled = scaled_vrs_reachable(&v, &a, &b, 24);
        assert_eq!(scaled.is_some(), cvrs_reachable(&v, &a, &b).reachable);
        let (a, b) = (cfg(&v, &[("q", 1)]), cfg(&v, &[("p", 1)]));
        assert_eq!(scaled_vrs_reachable(&v, &a, &b, 24), None);
        assert!(!cvrs_reachable(&v, &a, &b).reachable);
    }

    #[test]
    fn scaling_reaches_what_one_copy_cannot() {
        let v = relay();
        let a = cfg(&v, &[("p", 1)]);
        let b = cfg(&v, &[("q", 1)]);
        assert_eq!(scaled_vrs_reachable(&v, &a, &b, 24), Some(ratlp::int(2)));
    }
}
